"""Corpus feature extraction and desk-scale CBOW / skip-gram training.

The annotated corpus format is one token per line, "wordform<TAB>lemma<TAB>pos",
with a blank line ending a sentence; plain text (one sentence per line,
space-tokenized) is accepted when training on wordforms. Training follows the
classic negative-sampling recipe: per-position window drawn uniformly from
[1, window], unigram^0.75 noise, linear learning-rate decay floored at
initial_lr / 10000. Single-threaded and bit-deterministic under a fixed seed;
the hot loop is JIT-compiled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from numba import njit

from . import simquery
from .errors import EmptyVocab, MalformedRecord, OutOfVocabulary
from .vstore import FEATURE_KINDS, EmbeddingModel, ModelMeta

NOISE_EXPONENT = 0.75
LR_FLOOR_RATIO = 1e-4


@dataclass(frozen=True)
class AnnotatedToken:
    wordform: str
    lemma: str
    pos: str = ""


@dataclass
class TrainConfig:
    model_type: str = "skipgram"  # or "cbow"
    dim: int = 300
    window: int = 5
    min_count: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    subsample_t: float = 1e-3
    seed: int = 1

    def __post_init__(self):
        if self.model_type not in ("cbow", "skipgram"):
            raise ValueError(f"model_type must be cbow or skipgram, got {self.model_type!r}")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        for name in ("window", "min_count", "negatives", "epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.initial_lr <= 0:
            raise ValueError("initial_lr must be > 0")
        if self.subsample_t < 0:
            raise ValueError("subsample_t must be >= 0 (0 disables subsampling)")

    def to_dict(self) -> dict:
        return {
            "model_type": self.model_type,
            "dim": self.dim,
            "window": self.window,
            "min_count": self.min_count,
            "negatives": self.negatives,
            "epochs": self.epochs,
            "initial_lr": self.initial_lr,
            "subsample_t": self.subsample_t,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass
class TrainProgress:
    """Live view of a running job; updated between epochs."""

    epoch: int = 0
    total_epochs: int = 0
    lr: float = 0.0
    running_loss: float = 0.0


# --- corpus reading -----------------------------------------------------

def read_annotated(path: str) -> list[list[AnnotatedToken]]:
    """Parse the tab-separated annotated format into sentences."""
    sentences: list[list[AnnotatedToken]] = []
    current: list[AnnotatedToken] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(current)
                    current = []
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise MalformedRecord(line_no, f"expected 3 tab-separated fields, got {len(parts)}")
            wordform, lemma, pos = parts
            if not wordform or not lemma:
                raise MalformedRecord(line_no, "empty wordform or lemma")
            current.append(AnnotatedToken(wordform, lemma, pos))
    if current:
        sentences.append(current)
    return sentences


def read_plain(path: str) -> list[list[str]]:
    """One sentence per line, space-tokenized."""
    sentences = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            tokens = line.split()
            if tokens:
                sentences.append(tokens)
    return sentences


def extract_tokens(
    sentences: Iterable[Sequence[AnnotatedToken]], feature: str
) -> list[list[str]]:
    """Project each annotated token to the chosen training feature."""
    if feature not in FEATURE_KINDS:
        raise ValueError(f"feature must be one of {FEATURE_KINDS}, got {feature!r}")
    out = []
    for sentence in sentences:
        if feature == "wordform":
            out.append([t.wordform for t in sentence])
        elif feature == "lemma_cased":
            out.append([t.lemma for t in sentence])
        else:
            out.append([t.lemma.lower() for t in sentence])
    return out


def load_corpus(path: str, feature: str) -> list[list[str]]:
    """Read a corpus file and return feature token sentences.

    Lemma features require the annotated format; wordform accepts plain text
    too (detected by the absence of tabs).
    """
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.read(65536)
    annotated = any("\t" in line for line in head.splitlines() if line.strip())
    if annotated:
        return extract_tokens(read_annotated(path), feature)
    if feature != "wordform":
        raise MalformedRecord(1, f"plain-text corpus cannot provide feature {feature!r}")
    return read_plain(path)


# --- vocabulary ---------------------------------------------------------

def _flat(tokens) -> Iterable[str]:
    for item in tokens:
        if isinstance(item, str):
            yield item
        else:
            yield from item


def build_vocab(tokens, min_count: int) -> tuple[list[str], dict[str, int]]:
    """Count tokens, drop those under min_count, order by (-count, token).

    Accepts a flat token iterable or sentences.
    """
    counts: dict[str, int] = {}
    for tok in _flat(tokens):
        counts[tok] = counts.get(tok, 0) + 1
    kept = {t: c for t, c in counts.items() if c >= min_count}
    if not kept:
        raise EmptyVocab(f"no token reaches min_count={min_count}")
    ordered = sorted(kept, key=lambda t: (-kept[t], t))
    return ordered, kept


def noise_distribution(counts: np.ndarray) -> np.ndarray:
    """Negative-sampling noise: proportional to count^0.75, summing to 1."""
    weights = np.asarray(counts, dtype=np.float64) ** NOISE_EXPONENT
    return weights / weights.sum()


def subsample_keep_probs(counts: np.ndarray, subsample_t: float) -> np.ndarray:
    """Per-token keep probability (sqrt(f/t) + 1) * t/f, capped at 1."""
    counts = np.asarray(counts, dtype=np.float64)
    if subsample_t <= 0:
        return np.ones(len(counts))
    freq = counts / counts.sum()
    ratio = subsample_t / freq
    keep = (np.sqrt(1.0 / ratio) + 1.0) * ratio
    return np.minimum(keep, 1.0)


# --- JIT kernel ---------------------------------------------------------

_LCG_MULT = np.uint64(6364136223846793005)
_LCG_ADD = np.uint64(1442695040888963407)


@njit(cache=True, inline="always")
def _lcg_next(state):
    return state * _LCG_MULT + _LCG_ADD


@njit(cache=True, inline="always")
def _lcg_u01(state):
    # top 53 bits -> uniform in [0, 1)
    return float(state >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, inline="always")
def _lcg_randint(state, bound):
    return int((state >> np.uint64(33)) % np.uint64(bound))


@njit(cache=True, inline="always")
def _sample_negative(cum, u):
    lo = 0
    hi = len(cum) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if u < cum[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(cache=True)
def _train_epoch(
    data,
    offsets,
    syn0,
    syn1,
    cum,
    keep,
    window,
    negatives,
    lr0,
    total_words,
    processed,
    state,
    is_cbow,
    buf,
    work,
):
    """One serial pass over all sentences; returns bookkeeping for the next."""
    dim = syn0.shape[1]
    lr_floor = lr0 * LR_FLOOR_RATIO
    loss = 0.0
    pairs = 0
    for s in range(len(offsets) - 1):
        start = offsets[s]
        end = offsets[s + 1]
        m = 0
        for i in range(start, end):
            w = data[i]
            processed += 1
            if keep[w] < 1.0:
                state = _lcg_next(state)
                if _lcg_u01(state) > keep[w]:
                    continue
            buf[m] = w
            m += 1
        lr = lr0 * (1.0 - processed / (total_words + 1.0))
        if lr < lr_floor:
            lr = lr_floor
        for t in range(m):
            center = buf[t]
            state = _lcg_next(state)
            win = 1 + _lcg_randint(state, window)
            lo_t = t - win
            hi_t = t + win
            if lo_t < 0:
                lo_t = 0
            if hi_t > m - 1:
                hi_t = m - 1
            if is_cbow:
                # averaged context predicts the center word
                cn = 0
                for d in range(dim):
                    work[d] = 0.0
                for p in range(lo_t, hi_t + 1):
                    if p == t:
                        continue
                    ctx = buf[p]
                    for d in range(dim):
                        work[d] += syn0[ctx, d]
                    cn += 1
                if cn == 0:
                    continue
                inv = 1.0 / cn
                for d in range(dim):
                    work[d] *= inv
                err = np.zeros(dim, dtype=np.float32)
                for sample in range(negatives + 1):
                    if sample == 0:
                        target = center
                        label = 1.0
                    else:
                        state = _lcg_next(state)
                        target = _sample_negative(cum, _lcg_u01(state))
                        if target == center:
                            continue
                        label = 0.0
                    f = 0.0
                    for d in range(dim):
                        f += work[d] * syn1[target, d]
                    sig = 1.0 / (1.0 + math.exp(-f))
                    g = (label - sig) * lr
                    if label > 0.0:
                        loss -= math.log(max(sig, 1e-10))
                    else:
                        loss -= math.log(max(1.0 - sig, 1e-10))
                    pairs += 1
                    for d in range(dim):
                        err[d] += np.float32(g * syn1[target, d])
                        syn1[target, d] += np.float32(g * work[d])
                for p in range(lo_t, hi_t + 1):
                    if p == t:
                        continue
                    ctx = buf[p]
                    for d in range(dim):
                        syn0[ctx, d] += err[d]
            else:
                # skip-gram: the center word predicts each context word
                for p in range(lo_t, hi_t + 1):
                    if p == t:
                        continue
                    ctx = buf[p]
                    err = np.zeros(dim, dtype=np.float32)
                    for sample in range(negatives + 1):
                        if sample == 0:
                            target = ctx
                            label = 1.0
                        else:
                            state = _lcg_next(state)
                            target = _sample_negative(cum, _lcg_u01(state))
                            if target == ctx:
                                continue
                            label = 0.0
                        f = 0.0
                        for d in range(dim):
                            f += syn0[center, d] * syn1[target, d]
                        sig = 1.0 / (1.0 + math.exp(-f))
                        g = (label - sig) * lr
                        if label > 0.0:
                            loss -= math.log(max(sig, 1e-10))
                        else:
                            loss -= math.log(max(1.0 - sig, 1e-10))
                        pairs += 1
                        for d in range(dim):
                            err[d] += np.float32(g * syn1[target, d])
                            syn1[target, d] += np.float32(g * syn0[center, d])
                    for d in range(dim):
                        syn0[center, d] += err[d]
    return processed, state, loss, pairs


# --- training driver ----------------------------------------------------

def train(
    sentences: Sequence[Sequence[str]],
    config: Optional[TrainConfig] = None,
    feature_kind: str = "wordform",
    progress: Optional[TrainProgress] = None,
) -> EmbeddingModel:
    """Train an embedding model on feature token sentences.

    Returns the input-side matrix as an EmbeddingModel whose metadata
    records the feature kind and hyperparameters.
    """
    config = config or TrainConfig()
    if feature_kind not in FEATURE_KINDS:
        raise ValueError(f"feature_kind must be one of {FEATURE_KINDS}")
    vocab, counts = build_vocab(sentences, config.min_count)
    index = {t: i for i, t in enumerate(vocab)}
    count_arr = np.array([counts[t] for t in vocab], dtype=np.int64)

    encoded: list[np.ndarray] = []
    for sentence in sentences:
        ids = [index[t] for t in sentence if t in index]
        if ids:
            encoded.append(np.array(ids, dtype=np.int32))
    if not encoded:
        raise EmptyVocab("no sentence survives the frequency threshold")
    data = np.concatenate(encoded)
    offsets = np.zeros(len(encoded) + 1, dtype=np.int64)
    np.cumsum([len(e) for e in encoded], out=offsets[1:])
    max_len = int(max(len(e) for e in encoded))

    cum = np.cumsum(noise_distribution(count_arr))
    cum[-1] = 1.0
    keep = subsample_keep_probs(count_arr, config.subsample_t)

    rng = np.random.default_rng(config.seed)
    syn0 = (rng.random((len(vocab), config.dim), dtype=np.float32) - 0.5) / config.dim
    syn1 = np.zeros((len(vocab), config.dim), dtype=np.float32)
    buf = np.empty(max_len, dtype=np.int32)
    work = np.empty(config.dim, dtype=np.float32)

    total_words = float(config.epochs) * float(len(data))
    state = np.uint64((config.seed * 2654435761 + 1) & 0xFFFFFFFFFFFFFFFF)
    processed = 0.0
    if progress is not None:
        progress.total_epochs = config.epochs
        progress.lr = config.initial_lr
    for epoch in range(config.epochs):
        processed, raw_state, loss, pairs = _train_epoch(
            data,
            offsets,
            syn0,
            syn1,
            cum,
            keep,
            config.window,
            config.negatives,
            config.initial_lr,
            total_words,
            processed,
            state,
            config.model_type == "cbow",
            buf,
            work,
        )
        # the kernel unboxes uint64 to a Python int; re-wrap so the next
        # call does not overflow numba's default int64 conversion
        state = np.uint64(raw_state)
        if progress is not None:
            progress.epoch = epoch + 1
            progress.lr = max(
                config.initial_lr * (1.0 - processed / (total_words + 1.0)),
                config.initial_lr * LR_FLOOR_RATIO,
            )
            progress.running_loss = loss / max(pairs, 1)

    meta = ModelMeta(
        dim=config.dim,
        feature_kind=feature_kind,
        frequency_threshold=config.min_count,
        window=config.window,
        source=f"embex-trainer:{config.model_type}",
    )
    return EmbeddingModel(vocab, syn0, meta)


def compare_neighborhoods(
    model_wf: EmbeddingModel,
    model_lm: EmbeddingModel,
    wordform: str,
    lemma: str,
    k: int = 10,
) -> dict:
    """Top-k lists from a wordform and a lemma model, plus their raw overlap."""
    try:
        wf_neighbors = simquery.top_k_similar(model_wf, wordform, k)
    except OutOfVocabulary as exc:
        raise OutOfVocabulary(exc.token, where="wordform model") from None
    try:
        lm_neighbors = simquery.top_k_similar(model_lm, lemma, k)
    except OutOfVocabulary as exc:
        raise OutOfVocabulary(exc.token, where="lemma model") from None
    overlap = sorted(
        {n.token for n in wf_neighbors} & {n.token for n in lm_neighbors}
    )
    return {
        "wf_neighbors": wf_neighbors,
        "lm_neighbors": lm_neighbors,
        "overlap": overlap,
    }

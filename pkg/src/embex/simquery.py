"""Similarity queries: cosine scores, top-k neighbors, analogy arithmetic.

Search is an exact full scan over the model's unit-normalized matrix, so the
results match a brute-force oracle exactly, ties included. Tie rule
everywhere: descending score, then ascending lexicographic token.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import LengthMismatch, OutOfVocabulary, ZeroVector
from .vstore import EmbeddingModel


@dataclass(frozen=True)
class Neighbor:
    token: str
    score: float

    def to_dict(self) -> dict:
        return {"token": self.token, "score": self.score}


@dataclass
class AnalogyTrace:
    """Intermediate vectors of an A−B+C query, as shown in the trace view."""

    a: str
    b: str
    c: str
    a_vec: np.ndarray
    b_vec: np.ndarray
    c_vec: np.ndarray
    a_minus_b: np.ndarray
    query: np.ndarray
    result: Neighbor
    residual: np.ndarray
    cos_query_result: float

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "a_vec": [float(v) for v in self.a_vec],
            "b_vec": [float(v) for v in self.b_vec],
            "c_vec": [float(v) for v in self.c_vec],
            "a_minus_b": [float(v) for v in self.a_minus_b],
            "query": [float(v) for v in self.query],
            "result": self.result.to_dict(),
            "residual": [float(v) for v in self.residual],
            "cos_query_result": self.cos_query_result,
        }


def cosine(x, y) -> float:
    """Normalized dot product, clamped to [-1, 1] against rounding overshoot.

    Inputs are rescaled by their largest component first so extreme
    magnitudes cannot over- or underflow the norms.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"vector shapes differ: {x.shape} vs {y.shape}")
    mx = np.max(np.abs(x))
    my = np.max(np.abs(y))
    if mx == 0.0 or my == 0.0:
        raise ZeroVector("cosine undefined for zero vectors")
    xs = x / mx
    ys = y / my
    nx = np.linalg.norm(xs)
    ny = np.linalg.norm(ys)
    return float(np.clip(np.dot(xs, ys) / (nx * ny), -1.0, 1.0))


def default_case_fallback(model: EmbeddingModel) -> bool:
    # Case-sensitive lemma models deliberately distinguish named entities;
    # folding their queries would defeat the point.
    return model.meta.feature_kind != "lemma_cased"


def resolve_token(
    model: EmbeddingModel, token: str, case_fallback: Optional[bool] = None
) -> tuple[str, int]:
    """Exact-match resolution with an optional lowercase second try."""
    i = model.index.get(token)
    if i is not None:
        return token, i
    if case_fallback is None:
        case_fallback = default_case_fallback(model)
    if case_fallback:
        lowered = token.lower()
        i = model.index.get(lowered)
        if i is not None:
            return lowered, i
    raise OutOfVocabulary(token)


def _ranked_neighbors(
    model: EmbeddingModel,
    unit_query: np.ndarray,
    exclude: Iterable[int],
    k: int,
) -> list[Neighbor]:
    """Top-k by cosine against all non-zero-norm rows, ties broken by token."""
    scores = model.unit_matrix @ unit_query
    np.clip(scores, -1.0, 1.0, out=scores)
    s = scores.copy()
    s[model.zero_mask] = -np.inf
    for i in exclude:
        s[i] = -np.inf
    n_valid = int(np.isfinite(s).sum())
    k_eff = min(k, n_valid)
    if k_eff == 0:
        return []
    thresh = np.partition(s, len(s) - k_eff)[len(s) - k_eff]
    candidates = np.flatnonzero(s >= thresh)
    order = sorted(candidates, key=lambda i: (-s[i], model.tokens[i]))
    return [Neighbor(model.tokens[i], float(s[i])) for i in order[:k_eff]]


def top_k_similar(
    model: EmbeddingModel,
    token: str,
    k: int,
    case_fallback: Optional[bool] = None,
) -> list[Neighbor]:
    """The k most cosine-similar vocabulary tokens, excluding the query itself."""
    if k < 1:
        raise ValueError("k must be >= 1")
    resolved, idx = resolve_token(model, token, case_fallback)
    if model.zero_mask[idx]:
        raise ZeroVector(f"query token {resolved!r} has a zero vector")
    unit_query = model.unit_matrix[idx]
    return _ranked_neighbors(model, unit_query, [idx], k)


def analogy(
    model: EmbeddingModel,
    a: str,
    b: str,
    c: str,
    k: int = 10,
    case_fallback: Optional[bool] = None,
) -> tuple[list[Neighbor], AnalogyTrace]:
    """Rank tokens nearest to vec(a) - vec(b) + vec(c), excluding {a, b, c}.

    The returned trace covers the top-1 result, mirroring the textual
    analogy view's vector rows.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    _, ia = resolve_token(model, a, case_fallback)
    _, ib = resolve_token(model, b, case_fallback)
    _, ic = resolve_token(model, c, case_fallback)
    va = model.matrix[ia].astype(np.float64)
    vb = model.matrix[ib].astype(np.float64)
    vc = model.matrix[ic].astype(np.float64)
    query = va - vb + vc
    qnorm = np.linalg.norm(query)
    if qnorm == 0.0:
        raise ZeroVector("analogy query vector is zero")
    neighbors = _ranked_neighbors(model, query / qnorm, {ia, ib, ic}, k)
    if not neighbors:
        raise ValueError("no candidate tokens remain after excluding the query")
    top = neighbors[0]
    r_vec = model.matrix[model.index[top.token]].astype(np.float64)
    trace = AnalogyTrace(
        a=model.tokens[ia],
        b=model.tokens[ib],
        c=model.tokens[ic],
        a_vec=va,
        b_vec=vb,
        c_vec=vc,
        a_minus_b=va - vb,
        query=query,
        result=top,
        residual=query - r_vec,
        cos_query_result=cosine(query, r_vec),
    )
    return neighbors, trace


def vector_trace(
    model: EmbeddingModel,
    a: str,
    b: str,
    c: str,
    case_fallback: Optional[bool] = None,
) -> AnalogyTrace:
    """Just the intermediate-vector trace of an analogy query."""
    _, trace = analogy(model, a, b, c, k=1, case_fallback=case_fallback)
    return trace


def top_n_frequent(model: EmbeddingModel, n: int) -> list[str]:
    """First min(n, vocab_size) tokens in storage order (frequency rank proxy)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return model.tokens[:n]


def format_score(score: float) -> str:
    """6-decimal display formatting used by the textual interfaces."""
    return f"{score:.6f}"

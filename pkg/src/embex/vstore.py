"""Embedding model storage: word2vec text/binary formats plus a JSON metadata sidecar.

Models are immutable after load (the matrix is marked read-only), so any
number of threads may query them concurrently. Vocabulary order is the file
order, which word2vec tools emit in descending corpus frequency; nothing
here re-sorts it.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateToken,
    IoFailure,
    MalformedHeader,
    NonFiniteValue,
    OutOfVocabulary,
    TruncatedFile,
)

FEATURE_KINDS = ("wordform", "lemma_cased", "lemma_lower")

# Norm slack allowed on rows of the unit-normalized cache.
UNIT_NORM_TOL = 1e-6


@dataclass
class ModelMeta:
    """Provenance and training parameters carried next to a vector file."""

    dim: int
    feature_kind: str = "wordform"
    frequency_threshold: int = 0
    window: Optional[int] = None
    source: str = ""

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.feature_kind not in FEATURE_KINDS:
            raise ValueError(
                f"feature_kind must be one of {FEATURE_KINDS}, got {self.feature_kind!r}"
            )
        if self.frequency_threshold < 0:
            raise ValueError("frequency_threshold must be non-negative")
        if self.window is not None and self.window <= 0:
            raise ValueError("window must be positive or None")

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "feature_kind": self.feature_kind,
            "frequency_threshold": self.frequency_threshold,
            "window": self.window,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelMeta":
        return cls(
            dim=int(d["dim"]),
            feature_kind=d.get("feature_kind", "wordform"),
            frequency_threshold=int(d.get("frequency_threshold", 0)),
            window=d.get("window"),
            source=d.get("source", ""),
        )


class EmbeddingModel:
    """Vocabulary + dense row-major vector matrix + metadata.

    Row i of ``matrix`` is the vector of ``tokens[i]``. The matrix is stored
    as float32 (word2vec convention; binary round-trips stay bit-exact).
    ``unit_matrix`` is a lazily computed float64 row-normalized copy; rows
    whose source norm is zero are kept as zero rows and flagged in
    ``zero_mask``.
    """

    def __init__(self, tokens: list[str], matrix: np.ndarray, meta: ModelMeta):
        matrix = np.asarray(matrix, dtype=np.float32)
        if matrix.ndim != 2:
            raise ValueError("matrix must be 2-dimensional")
        if matrix.shape[0] != len(tokens):
            raise ValueError(
                f"matrix has {matrix.shape[0]} rows for {len(tokens)} tokens"
            )
        if matrix.shape[1] != meta.dim:
            raise ValueError(f"matrix width {matrix.shape[1]} != meta.dim {meta.dim}")
        index: dict[str, int] = {}
        for i, tok in enumerate(tokens):
            if tok in index:
                raise DuplicateToken(tok)
            index[tok] = i
        self.tokens = list(tokens)
        self.index = index
        self.matrix = matrix
        self.matrix.flags.writeable = False
        self.meta = meta
        self._unit: Optional[np.ndarray] = None
        self._zero_mask: Optional[np.ndarray] = None
        self._lock = threading.Lock()

    @property
    def vocab_size(self) -> int:
        return len(self.tokens)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def _normalize(self):
        with self._lock:
            if self._unit is not None:
                return
            mat = self.matrix.astype(np.float64)
            norms = np.linalg.norm(mat, axis=1)
            zero = norms == 0.0
            safe = np.where(zero, 1.0, norms)
            unit = mat / safe[:, None]
            unit.flags.writeable = False
            zero.flags.writeable = False
            self._zero_mask = zero
            self._unit = unit

    @property
    def unit_matrix(self) -> np.ndarray:
        if self._unit is None:
            self._normalize()
        return self._unit

    @property
    def zero_mask(self) -> np.ndarray:
        """Boolean mask of rows whose source vector has zero norm."""
        if self._zero_mask is None:
            self._normalize()
        return self._zero_mask

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def row(self, i: int) -> np.ndarray:
        return self.matrix[i]


def lookup(model: EmbeddingModel, token: str) -> np.ndarray:
    """Exact-match vector lookup; no case folding at this layer."""
    i = model.index.get(token)
    if i is None:
        raise OutOfVocabulary(token)
    return model.matrix[i]


def model_info(model: EmbeddingModel) -> dict:
    """Metadata copy plus vocabulary size and the zero-norm row count."""
    info = model.meta.to_dict()
    info["vocab_size"] = model.vocab_size
    info["zero_norm_rows"] = int(model.zero_mask.sum())
    return info


def sidecar_path(path: str) -> str:
    return str(path) + ".meta.json"


def _read_sidecar(path: str, dim: int) -> ModelMeta:
    try:
        with open(sidecar_path(path), "r", encoding="utf-8") as fh:
            d = json.load(fh)
    except FileNotFoundError:
        return ModelMeta(dim=dim, source=str(path))
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailure(f"unreadable metadata sidecar for {path}: {exc}") from exc
    d["dim"] = dim  # the vector file is authoritative for the dimension
    return ModelMeta.from_dict(d)


def _write_sidecar(path: str, meta: ModelMeta):
    with open(sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(meta.to_dict(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def _parse_header(line: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise MalformedHeader(f"expected '<vocab_size> <dim>', got {line!r}")
    try:
        n, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise MalformedHeader(f"non-integer header fields: {line!r}") from None
    if n < 0 or dim <= 0:
        raise MalformedHeader(f"header out of range: {line!r}")
    return n, dim


def load_text(path: str) -> EmbeddingModel:
    """Load a word2vec text-format file: header line, then one token per line."""
    try:
        fh = open(path, "r", encoding="utf-8", errors="surrogateescape")
    except OSError as exc:
        raise IoFailure(f"cannot open {path}: {exc}") from exc
    with fh:
        header = fh.readline()
        if not header:
            raise MalformedHeader("empty file")
        n, dim = _parse_header(header)
        tokens: list[str] = []
        matrix = np.empty((n, dim), dtype=np.float32)
        line_no = 1
        for line in fh:
            line_no += 1
            parts = line.split()
            if not parts:
                continue  # tolerate trailing blank lines
            if len(tokens) >= n:
                raise MalformedHeader(
                    f"header declares {n} tokens but line {line_no} holds more data"
                )
            if len(parts) != dim + 1:
                raise DimensionMismatch(line_no)
            try:
                values = [float(v) for v in parts[1:]]
            except ValueError:
                raise NonFiniteValue(line_no) from None
            if not all(math.isfinite(v) for v in values):
                raise NonFiniteValue(line_no)
            matrix[len(tokens)] = values
            tokens.append(parts[0])
        if len(tokens) != n:
            raise TruncatedFile(
                f"header declares {n} tokens, file contains {len(tokens)}"
            )
    meta = _read_sidecar(path, dim)
    return EmbeddingModel(tokens, matrix, meta)


def load_binary(path: str) -> EmbeddingModel:
    """Load a word2vec binary-format file.

    ASCII header, then per record: token bytes, one 0x20 separator, dim
    little-endian float32 values; a single trailing newline per record is
    tolerated.
    """
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot open {path}: {exc}") from exc
    nl = data.find(b"\n")
    if nl < 0:
        raise MalformedHeader("missing header line")
    try:
        header = data[:nl].decode("ascii")
    except UnicodeDecodeError:
        raise MalformedHeader("non-ASCII header") from None
    n, dim = _parse_header(header)
    vec_bytes = 4 * dim
    pos = nl + 1
    tokens: list[str] = []
    matrix = np.empty((n, dim), dtype=np.float32)
    for rec in range(n):
        sep = data.find(b" ", pos)
        if sep < 0:
            raise TruncatedFile(f"record {rec + 1}: unterminated token")
        token = data[pos:sep].decode("utf-8", errors="surrogateescape")
        pos = sep + 1
        if pos + vec_bytes > len(data):
            raise TruncatedFile(f"record {rec + 1}: vector data ends early")
        row = np.frombuffer(data[pos : pos + vec_bytes], dtype="<f4")
        if not np.all(np.isfinite(row)):
            raise NonFiniteValue(rec + 1)
        matrix[rec] = row
        tokens.append(token)
        pos += vec_bytes
        if pos < len(data) and data[pos : pos + 1] == b"\n":
            pos += 1
    meta = _read_sidecar(path, dim)
    return EmbeddingModel(tokens, matrix, meta)


def save_text(model: EmbeddingModel, path: str):
    """Write word2vec text format (6 significant digits) plus the metadata sidecar."""
    try:
        with open(path, "w", encoding="utf-8", errors="surrogateescape") as fh:
            fh.write(f"{model.vocab_size} {model.dim}\n")
            for tok, row in zip(model.tokens, model.matrix):
                fh.write(tok)
                for v in row:
                    fh.write(f" {v:.6g}")
                fh.write("\n")
        _write_sidecar(path, model.meta)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def save_binary(model: EmbeddingModel, path: str):
    """Write word2vec binary format (float32 stored bit-exactly) plus the sidecar."""
    try:
        with open(path, "wb") as fh:
            fh.write(f"{model.vocab_size} {model.dim}\n".encode("ascii"))
            for tok, row in zip(model.tokens, model.matrix):
                fh.write(tok.encode("utf-8", errors="surrogateescape"))
                fh.write(b" ")
                fh.write(np.ascontiguousarray(row, dtype="<f4").tobytes())
                fh.write(b"\n")
        _write_sidecar(path, model.meta)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load(path: str) -> EmbeddingModel:
    """Auto-detect text vs binary by probing the bytes after the header.

    float32 payloads essentially always contain control bytes; text files
    never do.
    """
    with open(path, "rb") as fh:
        head = fh.read(4096)
    nl = head.find(b"\n")
    probe = head[nl + 1 : nl + 1 + 1024]
    textual = not any(b < 0x09 or 0x0E <= b < 0x20 or b == 0x7F for b in probe)
    if textual:
        try:
            probe.decode("utf-8")
        except UnicodeDecodeError:
            textual = False
    return load_text(path) if textual else load_binary(path)

"""t-SNE projection to 2D: exact reference variant and Barnes-Hut variant.

Affinity bandwidths come from a per-row bisection on perplexity; the
optimizer is momentum gradient descent with the classic early-exaggeration,
momentum-switch and adaptive-gains schedule. Everything runs in float64 and
is deterministic under a fixed seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, asdict
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateInput, PerplexityTooLarge

# Bisection knobs. The perplexity tolerance is far tighter than the 1e-5
# contract so that rows stay near-uniform (to 1e-6) when the target sits at
# the n-1 limit where entropy becomes flat in the bandwidth.
_PERP_TOL = 1e-12
_BISECT_MAX_ITER = 200

_HISTORY_EVERY = 50
_MIN_GAIN = 0.01


@dataclass
class TsneConfig:
    perplexity: float = 30.0
    n_iter: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch_iter: int = 250
    theta: float = 0.5
    seed: int = 0
    use_pca: bool = False
    pca_dims: int = 50

    def __post_init__(self):
        if self.perplexity <= 0:
            raise ValueError("perplexity must be > 0")
        if self.n_iter < 1:
            raise ValueError("n_iter must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TsneConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass
class TsneLayout:
    tokens: list[str]
    coords: np.ndarray  # (n, 2) float64
    kl_history: list[tuple[int, float]]
    config: TsneConfig

    def to_dict(self) -> dict:
        return {
            "tokens": list(self.tokens),
            "coords": [[float(x), float(y)] for x, y in self.coords],
            "config": self.config.to_dict(),
            "kl_history": [[int(i), float(c)] for i, c in self.kl_history],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TsneLayout":
        return cls(
            tokens=list(d["tokens"]),
            coords=np.asarray(d["coords"], dtype=np.float64),
            kl_history=[(int(i), float(c)) for i, c in d["kl_history"]],
            config=TsneConfig.from_dict(d.get("config", {})),
        )

    def to_tsv(self) -> str:
        lines = [
            f"{t}\t{float(x)!r}\t{float(y)!r}"
            for t, (x, y) in zip(self.tokens, self.coords)
        ]
        return "\n".join(lines) + "\n"


def _sq_distances(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X * X, axis=1)
    D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D

def _bisect_rows(D_rows: np.ndarray, perplexity: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-row Gaussian precisions matching the target perplexity.

    ``D_rows[i]`` holds the squared distances from point i to its candidate
    set (self excluded). Returns the row-conditional probabilities over the
    candidates and the precisions beta = 1/(2 sigma^2).
    """
    n, m = D_rows.shape
    # shift by the row minimum so exp() never underflows a whole row
    shift = D_rows.min(axis=1, keepdims=True)
    Ds = D_rows - shift
    beta = np.ones(n)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    target = float(perplexity)
    P = np.empty_like(Ds)
    for _ in range(_BISECT_MAX_ITER):
        np.exp(-Ds * beta[:, None], out=P)
        rowsum = P.sum(axis=1, keepdims=True)
        P /= rowsum
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(P > 0.0, np.log2(P), 0.0)
        perp = np.exp2(-(P * logs).sum(axis=1))
        diff = perp - target
        done = np.abs(diff) <= _PERP_TOL
        if done.all():
            break
        too_flat = diff > 0  # need larger beta (narrower kernel)
        lo = np.where(~done & too_flat, beta, lo)
        hi = np.where(~done & ~too_flat, beta, hi)
        # bisect the bracket; double upward while the top is still unbounded
        mid = np.where(np.isinf(hi), beta * 2.0, (lo + hi) / 2.0)
        beta = np.where(done, beta, mid)
    np.exp(-Ds * beta[:, None], out=P)
    P /= P.sum(axis=1, keepdims=True)
    return P, beta


def _check_input(X: np.ndarray, perplexity: float) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D array")
    n = X.shape[0]
    if n < 4:
        raise ValueError("need at least 4 points")
    if perplexity > n - 1:
        raise PerplexityTooLarge(
            f"perplexity {perplexity} exceeds n-1 = {n - 1} candidate neighbors"
        )
    return X


def conditional_affinities(
    X: np.ndarray, perplexity: float
) -> tuple[np.ndarray, np.ndarray]:
    """Row-conditional Gaussian affinities P_{j|i} (zero diagonal) and betas."""
    X = _check_input(X, perplexity)
    n = X.shape[0]
    D = _sq_distances(X)
    off = ~np.eye(n, dtype=bool)
    if not np.any(D[off] > 0.0):
        raise DegenerateInput("all points are identical")
    D_rows = D[off].reshape(n, n - 1)
    P_rows, betas = _bisect_rows(D_rows, perplexity)
    P = np.zeros((n, n))
    P[off] = P_rows.ravel()
    return P, betas


def pairwise_affinities(X: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized joint affinities P = (P_cond + P_cond^T) / 2n; sums to 1."""
    P_cond, _ = conditional_affinities(X, perplexity)
    n = P_cond.shape[0]
    return (P_cond + P_cond.T) / (2.0 * n)


def exact_knn(X: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest input points per row (self excluded)."""
    D = _sq_distances(X)
    np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")
    return order[:, :k]


def sparse_affinities(
    X: np.ndarray,
    perplexity: float,
    k: Optional[int] = None,
    knn: Optional[Callable[[np.ndarray, int], np.ndarray]] = None,
) -> sp.csr_matrix:
    """Joint affinities restricted to each point's k nearest input neighbors.

    k defaults to 3 * perplexity (the usual Barnes-Hut truncation); the kNN
    provider is pluggable.
    """
    X = _check_input(X, perplexity)
    n = X.shape[0]
    if k is None:
        k = int(min(n - 1, 3 * perplexity))
    k = max(1, min(k, n - 1))
    neighbor_idx = (knn or exact_knn)(X, k)
    diffs = X[:, None, :] - X[neighbor_idx]  # (n, k, d)
    D_rows = np.sum(diffs * diffs, axis=2)
    if not np.any(D_rows > 0.0):
        raise DegenerateInput("all points are identical")
    P_rows, _ = _bisect_rows(D_rows, perplexity)
    indptr = np.arange(0, n * k + 1, k)
    P_cond = sp.csr_matrix((P_rows.ravel(), neighbor_idx.ravel(), indptr), shape=(n, n))
    P = (P_cond + P_cond.T) / (2.0 * n)
    return P.tocsr()


def low_dim_affinities(Y: np.ndarray) -> np.ndarray:
    """Student-t (1 dof) joint affinities Q of a 2-D embedding."""
    W = 1.0 / (1.0 + _sq_distances(Y))
    np.fill_diagonal(W, 0.0)
    return W / W.sum()


def kl_divergence(P: np.ndarray, Q: np.ndarray) -> float:
    """KL(P || Q) over off-diagonal entries, 0*log(0/q) = 0, q floored at 1e-12."""
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if P.shape != Q.shape:
        raise ValueError("P and Q must have identical shapes")
    mask = P > 0.0
    if P.ndim == 2 and P.shape[0] == P.shape[1]:
        mask = mask & ~np.eye(P.shape[0], dtype=bool)
    q = np.maximum(Q, 1e-12)
    return float(np.sum(P[mask] * np.log(P[mask] / q[mask])))


def tsne_gradient(P: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Analytic KL gradient: 4 sum_j (p_ij - q_ij) (y_i - y_j) / (1 + |y_i - y_j|^2)."""
    W = 1.0 / (1.0 + _sq_distances(Y))
    np.fill_diagonal(W, 0.0)
    Q = W / W.sum()
    M = (P - Q) * W
    return 4.0 * (M.sum(axis=1)[:, None] * Y - M @ Y)


def _attractive_forces(P, Y: np.ndarray) -> np.ndarray:
    """sum_j p_ij w_ij (y_i - y_j), exact over P's nonzero entries."""
    if sp.issparse(P):
        P = P.tocoo()
        i, j, p = P.row, P.col, P.data
        dy = Y[i] - Y[j]
        w = 1.0 / (1.0 + np.sum(dy * dy, axis=1))
        contrib = (p * w)[:, None] * dy
        attr = np.zeros_like(Y)
        np.add.at(attr, i, contrib)
        return attr
    W = 1.0 / (1.0 + _sq_distances(Y))
    np.fill_diagonal(W, 0.0)
    PW = P * W
    return PW.sum(axis=1)[:, None] * Y - PW @ Y


def tsne_gradient_bh(P, Y: np.ndarray, theta: float) -> np.ndarray:
    """Barnes-Hut gradient: exact attraction over P, quadtree repulsion.

    With theta = 0 the traversal visits every point, reproducing the exact
    gradient.
    """
    from .quadtree import QuadTree

    n = Y.shape[0]
    attr = _attractive_forces(P, Y)
    tree = QuadTree(Y)
    rep = np.empty_like(Y)
    z_total = 0.0
    for i in range(n):
        fx, fy, z = tree.repulsion(float(Y[i, 0]), float(Y[i, 1]), theta)
        rep[i, 0] = fx
        rep[i, 1] = fy
        z_total += z
    z_total -= n  # remove each point's own w = 1 term
    return 4.0 * (attr - rep / z_total)


def _dense_for_kl(P) -> np.ndarray:
    return P.toarray() if sp.issparse(P) else P


def _pca(X: np.ndarray, dims: int) -> np.ndarray:
    Xc = X - X.mean(axis=0)
    _, _, Vt = np.linalg.svd(Xc, full_matrices=False)
    return Xc @ Vt[:dims].T


def _optimize(
    P,
    n: int,
    tokens: Sequence[str],
    config: TsneConfig,
    gradient: Callable[[object, np.ndarray], np.ndarray],
    progress: Optional[Callable[[int, float], None]],
) -> TsneLayout:
    rng = np.random.default_rng(config.seed)
    Y = rng.normal(0.0, 1e-4, size=(n, 2))
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    P_plain = P
    history: list[tuple[int, float]] = []
    for it in range(config.n_iter):
        P_eff = P_plain * config.early_exaggeration if it < config.exaggeration_iters else P_plain
        grad = gradient(P_eff, Y)
        momentum = (
            config.momentum_early
            if it < config.momentum_switch_iter
            else config.momentum_late
        )
        agree = np.sign(grad) == np.sign(velocity)
        gains = np.where(agree, gains * 0.8, gains + 0.2)
        np.maximum(gains, _MIN_GAIN, out=gains)
        velocity = momentum * velocity - config.learning_rate * gains * grad
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)
        iteration = it + 1
        if iteration % _HISTORY_EVERY == 0 or iteration == config.n_iter:
            if not history or history[-1][0] != iteration:
                cost = kl_divergence(_dense_for_kl(P_plain), low_dim_affinities(Y))
                history.append((iteration, cost))
                if progress is not None:
                    progress(iteration, cost)
        # elementwise numpy work holds the GIL; hand it to concurrent query
        # threads once per iteration so layouts never starve them
        time.sleep(0)
    if not np.all(np.isfinite(Y)):
        raise DegenerateInput("optimization diverged to non-finite coordinates")
    return TsneLayout(list(tokens), Y, history, config)


def _check_embed_args(X, tokens, config: TsneConfig) -> np.ndarray:
    X = _check_input(X, config.perplexity)
    n = X.shape[0]
    if len(tokens) != n:
        raise ValueError(f"{len(tokens)} tokens for {n} rows")
    # headroom for the 3*perplexity neighbor lists of the accelerated variant
    if config.perplexity >= (n - 1) / 3.0:
        raise PerplexityTooLarge(
            f"perplexity {config.perplexity} needs at least "
            f"{int(3 * config.perplexity) + 2} points, got {n}"
        )
    if config.use_pca and X.shape[1] > config.pca_dims:
        X = _pca(X, config.pca_dims)
    return X


def tsne_embed(
    X,
    tokens: Sequence[str],
    config: Optional[TsneConfig] = None,
    progress: Optional[Callable[[int, float], None]] = None,
) -> TsneLayout:
    """Exact-gradient t-SNE embedding of the input rows into 2D."""
    config = config or TsneConfig()
    X = _check_embed_args(X, tokens, config)
    P = pairwise_affinities(X, config.perplexity)
    return _optimize(P, X.shape[0], tokens, config, tsne_gradient, progress)


def tsne_embed_bh(
    X,
    tokens: Sequence[str],
    config: Optional[TsneConfig] = None,
    progress: Optional[Callable[[int, float], None]] = None,
    knn: Optional[Callable[[np.ndarray, int], np.ndarray]] = None,
) -> TsneLayout:
    """Barnes-Hut t-SNE: sparse attractive forces, quadtree repulsion."""
    config = config or TsneConfig()
    X = _check_embed_args(X, tokens, config)
    P = sparse_affinities(X, config.perplexity, knn=knn)

    def gradient(P_eff, Y):
        return tsne_gradient_bh(P_eff, Y, config.theta)

    return _optimize(P, X.shape[0], tokens, config, gradient, progress)

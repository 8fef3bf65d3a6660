import numpy as np
import pytest

from embex.vstore import EmbeddingModel, ModelMeta


def make_random_model(n: int, dim: int, seed: int, feature_kind: str = "wordform") -> EmbeddingModel:
    """Random model with word2vec-scale components (|x| < 0.5)."""
    rng = np.random.default_rng(seed)
    matrix = rng.random((n, dim), dtype=np.float32) - 0.5
    tokens = [f"tok{i:05d}" for i in range(n)]
    return EmbeddingModel(tokens, matrix, ModelMeta(dim=dim, feature_kind=feature_kind))


@pytest.fixture
def toy2x3(tmp_path):
    path = tmp_path / "toy.vec"
    path.write_text("2 3\na 1 0 0\nb 0 1 0\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def ortho_model():
    """Three orthonormal tokens: every cross-cosine is exactly 0."""
    return EmbeddingModel(
        ["a", "b", "c"], np.eye(3, dtype=np.float32), ModelMeta(dim=3)
    )


@pytest.fixture
def random_model():
    return make_random_model(200, 16, seed=99)

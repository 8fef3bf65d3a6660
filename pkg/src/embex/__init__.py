"""embex: load, train, query, project, and serve dense word-vector models."""

from .errors import EmbexError
from .vstore import EmbeddingModel, ModelMeta, load, load_binary, load_text, lookup, model_info, save_binary, save_text
from .simquery import AnalogyTrace, Neighbor, analogy, cosine, top_k_similar, top_n_frequent, vector_trace
from .tsne import TsneConfig, TsneLayout, kl_divergence, pairwise_affinities, tsne_embed, tsne_embed_bh, tsne_gradient
from .graphx import SimilarityGraph, add_word, build_star, connected_components, expand_node
from .trainer import AnnotatedToken, TrainConfig, build_vocab, compare_neighborhoods, extract_tokens, train

__version__ = "0.1.0"

__all__ = [
    "EmbexError",
    "EmbeddingModel",
    "ModelMeta",
    "load",
    "load_binary",
    "load_text",
    "lookup",
    "model_info",
    "save_binary",
    "save_text",
    "AnalogyTrace",
    "Neighbor",
    "analogy",
    "cosine",
    "top_k_similar",
    "top_n_frequent",
    "vector_trace",
    "TsneConfig",
    "TsneLayout",
    "kl_divergence",
    "pairwise_affinities",
    "tsne_embed",
    "tsne_embed_bh",
    "tsne_gradient",
    "SimilarityGraph",
    "add_word",
    "build_star",
    "connected_components",
    "expand_node",
    "AnnotatedToken",
    "TrainConfig",
    "build_vocab",
    "compare_neighborhoods",
    "extract_tokens",
    "train",
]

"""Similarity graphs grown by user-driven expansion.

Nodes are unique tokens; expanding a word merges its neighbors onto any
nodes already present, which is what creates indirect similarity paths
between separately explored words. Edges are undirected, weighted by the
model cosine, and never removed.
"""

from __future__ import annotations

from typing import Optional

from . import simquery
from .errors import NodeCapExceeded, NodeNotInGraph
from .vstore import EmbeddingModel

# Guards the service against runaway interactive expansion.
NODE_CAP = 5000


class SimilarityGraph:
    """Token-unique nodes + cosine-weighted undirected edges + expansion log."""

    def __init__(self, model_id: str = "", node_cap: int = NODE_CAP):
        self.nodes: dict[str, dict] = {}  # token -> {"is_seed": bool}
        self.edges: dict[tuple[str, str], float] = {}  # (min, max) -> weight
        self.provenance: dict = {"model": model_id, "expansions": []}
        self.node_cap = node_cap

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_node(self, token: str) -> bool:
        return token in self.nodes

    def neighbors_of(self, token: str) -> list[str]:
        out = []
        for a, b in self.edges:
            if a == token:
                out.append(b)
            elif b == token:
                out.append(a)
        return out

    def _add_node(self, token: str, is_seed: bool = False):
        entry = self.nodes.get(token)
        if entry is None:
            self.nodes[token] = {"is_seed": is_seed}
        elif is_seed:
            entry["is_seed"] = True

    def _add_edge(self, a: str, b: str, weight: float):
        if a == b:
            return  # no self-loops
        key = (a, b) if a < b else (b, a)
        # first insertion wins; the weight is the same cosine either way
        self.edges.setdefault(key, weight)

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {"token": t, "is_seed": flags["is_seed"]}
                for t, flags in self.nodes.items()
            ],
            "edges": [
                {"a": a, "b": b, "weight": w} for (a, b), w in self.edges.items()
            ],
            "provenance": {
                "model": self.provenance["model"],
                "expansions": [list(e) for e in self.provenance["expansions"]],
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimilarityGraph":
        g = cls(model_id=d.get("provenance", {}).get("model", ""))
        for node in d["nodes"]:
            g._add_node(node["token"], bool(node["is_seed"]))
        for edge in d["edges"]:
            g._add_edge(edge["a"], edge["b"], float(edge["weight"]))
        g.provenance["expansions"] = [
            (e[0], int(e[1]))
            for e in d.get("provenance", {}).get("expansions", [])
        ]
        return g


def _expand_into(
    graph: SimilarityGraph, model: EmbeddingModel, token: str, n: int
):
    """Merge token's top-n neighbors into the graph; atomic w.r.t. the cap."""
    neighbors = simquery.top_k_similar(model, token, n, case_fallback=False)
    new_tokens = {nb.token for nb in neighbors} - set(graph.nodes)
    if len(graph.nodes) + len(new_tokens) > graph.node_cap:
        raise NodeCapExceeded(
            f"expansion would exceed the {graph.node_cap}-node cap"
        )
    for nb in neighbors:
        graph._add_node(nb.token)
        graph._add_edge(token, nb.token, nb.score)
    graph.provenance["expansions"].append((token, n))


def build_star(
    model: EmbeddingModel,
    center: str,
    n: int,
    model_id: str = "",
    case_fallback: Optional[bool] = None,
) -> SimilarityGraph:
    """New graph: the center (seed) plus its top-n neighbors as a star."""
    if n < 1:
        raise ValueError("n must be >= 1")
    resolved, _ = simquery.resolve_token(model, center, case_fallback)
    graph = SimilarityGraph(model_id=model_id)
    graph._add_node(resolved, is_seed=True)
    _expand_into(graph, model, resolved, n)
    return graph


def expand_node(
    graph: SimilarityGraph, model: EmbeddingModel, token: str, n: int
) -> SimilarityGraph:
    """Expand an existing node in place; already-present neighbors merge."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not graph.has_node(token):
        raise NodeNotInGraph(token)
    _expand_into(graph, model, token, n)
    return graph


def add_word(
    graph: SimilarityGraph,
    model: EmbeddingModel,
    token: str,
    n: int = 0,
    case_fallback: Optional[bool] = None,
) -> SimilarityGraph:
    """Insert a word as a seed node (merging if present); expand when n > 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    resolved, _ = simquery.resolve_token(model, token, case_fallback)
    if len(graph.nodes) + (0 if graph.has_node(resolved) else 1) > graph.node_cap:
        raise NodeCapExceeded(f"graph is at its {graph.node_cap}-node cap")
    graph._add_node(resolved, is_seed=True)
    if n > 0:
        _expand_into(graph, model, resolved, n)
    return graph


def connected_components(graph: SimilarityGraph) -> list[list[str]]:
    """Undirected components, each sorted; components ordered by first token."""
    adjacency: dict[str, list[str]] = {t: [] for t in graph.nodes}
    for a, b in graph.edges:
        adjacency[a].append(b)
        adjacency[b].append(a)
    seen: set[str] = set()
    components: list[list[str]] = []
    for start in graph.nodes:
        if start in seen:
            continue
        stack = [start]
        comp = []
        seen.add(start)
        while stack:
            tok = stack.pop()
            comp.append(tok)
            for nb in adjacency[tok]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        components.append(sorted(comp))
    components.sort(key=lambda c: c[0])
    return components

"""HTTP JSON API over the engine: model registry, queries, async jobs, graphs.

Every endpoint is a thin delegation to the engine functions; responses are
their outputs JSON-encoded at full float precision. Long operations (t-SNE
layouts, training) run as jobs on a small worker pool and are polled via
/jobs/{id}. Research tool: CORS is open and there is no authentication.
"""

from __future__ import annotations

import json
import os
import sys
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import graphx, simquery, trainer, tsne, vstore
from .errors import (
    EmbexError,
    NodeCapExceeded,
    NodeNotInGraph,
    OutOfVocabulary,
    PerplexityTooLarge,
    ZeroVector,
)

DEFAULT_PORT = 8642
DEFAULT_HOST = "127.0.0.1"
MAX_K = 1000


# --- registry -----------------------------------------------------------

@dataclass
class ModelRegistryEntry:
    id: str
    path: str
    state: str = "loading"  # loading | ready | failed
    meta: Optional[vstore.ModelMeta] = None
    model: Optional[vstore.EmbeddingModel] = None
    error: str = ""

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "path": self.path,
            "state": self.state,
            "meta": self.meta.to_dict() if self.meta else None,
        }
        if self.model is not None:
            d["vocab_size"] = self.model.vocab_size
        if self.error:
            d["error"] = self.error
        return d


class ModelRegistry:
    def __init__(self):
        self._entries: dict[str, ModelRegistryEntry] = {}
        self._lock = threading.Lock()

    def register(self, model_id: str, path: str, meta_path: Optional[str] = None) -> ModelRegistryEntry:
        with self._lock:
            if model_id in self._entries:
                raise HTTPException(409, {"error": "duplicate_model_id", "id": model_id})
            entry = ModelRegistryEntry(id=model_id, path=path)
            self._entries[model_id] = entry
        try:
            if meta_path and meta_path != vstore.sidecar_path(path):
                model = vstore.load(path)
                with open(meta_path, "r", encoding="utf-8") as fh:
                    meta = vstore.ModelMeta.from_dict({**json.load(fh), "dim": model.dim})
                model.meta = meta
            else:
                model = vstore.load(path)
            entry.model = model
            entry.meta = model.meta
            entry.state = "ready"
        except (EmbexError, OSError, ValueError, json.JSONDecodeError) as exc:
            entry.state = "failed"
            entry.error = str(exc)
        return entry

    def add_trained(self, model_id: str, model: vstore.EmbeddingModel, source: str = "") -> ModelRegistryEntry:
        with self._lock:
            if model_id in self._entries:
                raise ValueError(f"duplicate model id {model_id!r}")
            entry = ModelRegistryEntry(
                id=model_id, path=source, state="ready", meta=model.meta, model=model
            )
            self._entries[model_id] = entry
            return entry

    def entries(self) -> list[ModelRegistryEntry]:
        with self._lock:
            return list(self._entries.values())

    def get(self, model_id: str) -> vstore.EmbeddingModel:
        with self._lock:
            entry = self._entries.get(model_id)
        if entry is None:
            raise HTTPException(404, {"error": "unknown_model", "id": model_id})
        if entry.state != "ready" or entry.model is None:
            raise HTTPException(
                409, {"error": "model_not_ready", "id": model_id, "state": entry.state}
            )
        return entry.model


# --- jobs ---------------------------------------------------------------

@dataclass
class Job:
    id: str
    kind: str  # tsne | train
    state: str = "pending"  # pending -> running -> done | failed
    progress: dict = field(default_factory=dict)
    result: Optional[dict] = None
    error: str = ""
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def to_dict(self) -> dict:
        with self.lock:
            d = {
                "id": self.id,
                "kind": self.kind,
                "state": self.state,
                "progress": dict(self.progress),
                "result_ref": f"/jobs/{self.id}/result" if self.state == "done" else None,
            }
            if self.error:
                d["error"] = self.error
            return d


class JobManager:
    def __init__(self, workers: int = 2):
        self._pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="embex-job")
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def submit(self, kind: str, fn) -> Job:
        job = Job(id=uuid.uuid4().hex[:12], kind=kind)
        with self._lock:
            self._jobs[job.id] = job

        def run():
            with job.lock:
                if job.state != "pending":  # cancelled or already handled
                    return
                job.state = "running"
            try:
                result = fn(job)
            except Exception as exc:  # job failures surface via the handle
                with job.lock:
                    job.state = "failed"
                    job.error = str(exc)
                return
            with job.lock:
                job.result = result
                job.state = "done"

        self._pool.submit(run)
        return job

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise HTTPException(404, {"error": "unknown_job", "id": job_id})
        return job


# --- graphs -------------------------------------------------------------

class GraphStore:
    def __init__(self, persist_dir: Optional[str] = None):
        self._graphs: dict[str, tuple[graphx.SimilarityGraph, threading.Lock]] = {}
        self._lock = threading.Lock()
        self._persist_dir = persist_dir
        if persist_dir:
            os.makedirs(persist_dir, exist_ok=True)
            for name in sorted(os.listdir(persist_dir)):
                if name.endswith(".json"):
                    with open(os.path.join(persist_dir, name), encoding="utf-8") as fh:
                        graph = graphx.SimilarityGraph.from_dict(json.load(fh))
                    self._graphs[name[: -len(".json")]] = (graph, threading.Lock())

    def create(self, graph: graphx.SimilarityGraph) -> str:
        graph_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._graphs[graph_id] = (graph, threading.Lock())
        self._persist(graph_id, graph)
        return graph_id

    def get(self, graph_id: str) -> tuple[graphx.SimilarityGraph, threading.Lock]:
        with self._lock:
            item = self._graphs.get(graph_id)
        if item is None:
            raise HTTPException(404, {"error": "unknown_graph", "id": graph_id})
        return item

    def _persist(self, graph_id: str, graph: graphx.SimilarityGraph):
        if self._persist_dir:
            path = os.path.join(self._persist_dir, f"{graph_id}.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(graph.to_dict(), fh, ensure_ascii=False)

    def persist(self, graph_id: str, graph: graphx.SimilarityGraph):
        self._persist(graph_id, graph)


# --- request bodies -----------------------------------------------------

class RegisterModelRequest(BaseModel):
    id: str
    path: str
    meta_path: Optional[str] = None


class TsneRequest(BaseModel):
    tokens: Optional[list[str]] = None
    top_frequent_n: Optional[int] = None
    similar_to: Optional[str] = None
    n: Optional[int] = None
    config: Optional[dict] = None


class GraphCreateRequest(BaseModel):
    model_id: str
    center: str
    n: int


class GraphMutationRequest(BaseModel):
    token: str
    n: int = 0


class TrainRequest(BaseModel):
    corpus_ref: str
    feature: str = "wordform"
    config: Optional[dict] = None
    model_id: Optional[str] = None
    save_path: Optional[str] = None


# --- app ----------------------------------------------------------------

def _engine_error(exc: EmbexError) -> HTTPException:
    body = {"error": exc.code, "message": str(exc)}
    if isinstance(exc, OutOfVocabulary):
        body["token"] = exc.token
        return HTTPException(404, body)
    if isinstance(exc, (NodeNotInGraph,)):
        body["token"] = exc.token
        return HTTPException(404, body)
    if isinstance(exc, NodeCapExceeded):
        return HTTPException(409, body)
    if isinstance(exc, (PerplexityTooLarge, ZeroVector)):
        return HTTPException(400, body)
    return HTTPException(400, body)


def create_app(
    models_config: Optional[str] = None,
    job_workers: int = 2,
    persist_graphs: Optional[str] = None,
) -> FastAPI:
    """Build the service; models_config is the startup "models.json" path."""
    # queries must preempt long-running job threads quickly; the default 5 ms
    # switch interval lets a busy layout job starve short requests
    sys.setswitchinterval(1e-3)
    app = FastAPI(title="embex", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = ModelRegistry()
    jobs = JobManager(workers=job_workers)
    graphs = GraphStore(persist_dir=persist_graphs)
    app.state.registry = registry
    app.state.jobs = jobs
    app.state.graphs = graphs

    if models_config:
        with open(models_config, encoding="utf-8") as fh:
            config = json.load(fh)
        for item in config.get("models", config) if isinstance(config, dict) else config:
            registry.register(item["id"], item["path"], item.get("meta_path"))

    @app.exception_handler(StarletteHTTPException)
    async def http_error(_req: Request, exc: StarletteHTTPException):
        detail = exc.detail
        if isinstance(detail, dict) and "error" in detail:
            body = detail
        elif exc.status_code == 404:
            body = {"error": "not_found", "message": str(detail)}
        else:
            body = {"error": "http_error", "message": str(detail)}
        return JSONResponse(status_code=exc.status_code, content=body)

    @app.exception_handler(RequestValidationError)
    async def validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "bad_request", "detail": jsonable_encoder(exc.errors())},
        )

    # -- models --

    @app.get("/models")
    def list_models(
        feature_kind: Optional[str] = None,
        dim: Optional[int] = None,
        min_frequency_threshold: Optional[int] = None,
    ):
        out = []
        for entry in registry.entries():
            if feature_kind and (entry.meta is None or entry.meta.feature_kind != feature_kind):
                continue
            if dim is not None and (entry.meta is None or entry.meta.dim != dim):
                continue
            if min_frequency_threshold is not None and (
                entry.meta is None
                or entry.meta.frequency_threshold < min_frequency_threshold
            ):
                continue
            out.append(entry.to_dict())
        return out

    @app.post("/models", status_code=201)
    def register_model(body: RegisterModelRequest):
        return registry.register(body.id, body.path, body.meta_path).to_dict()

    @app.get("/models/{model_id}/vector")
    def get_vector(model_id: str, token: str = Query(...)):
        model = registry.get(model_id)
        try:
            row = vstore.lookup(model, token)
        except OutOfVocabulary as exc:
            raise _engine_error(exc) from None
        return {"token": token, "vector": [float(v) for v in row]}

    @app.get("/models/{model_id}/similar")
    def get_similar(model_id: str, token: str = Query(...), k: int = Query(10)):
        model = registry.get(model_id)
        if k < 1:
            raise HTTPException(400, {"error": "bad_k", "message": "k must be >= 1"})
        k = min(k, MAX_K)
        try:
            neighbors = simquery.top_k_similar(model, token, k)
        except EmbexError as exc:
            raise _engine_error(exc) from None
        return [n.to_dict() for n in neighbors]

    @app.get("/models/{model_id}/analogy")
    def get_analogy(
        model_id: str,
        a: str = Query(...),
        b: str = Query(...),
        c: str = Query(...),
        k: int = Query(10),
    ):
        model = registry.get(model_id)
        if k < 1:
            raise HTTPException(400, {"error": "bad_k", "message": "k must be >= 1"})
        k = min(k, MAX_K)
        try:
            neighbors, trace = simquery.analogy(model, a, b, c, k)
        except EmbexError as exc:
            raise _engine_error(exc) from None
        return {"neighbors": [n.to_dict() for n in neighbors], "trace": trace.to_dict()}

    # -- t-SNE jobs --

    @app.post("/models/{model_id}/tsne", status_code=202)
    def start_tsne(model_id: str, body: TsneRequest):
        model = registry.get(model_id)
        modes = [
            body.tokens is not None,
            body.top_frequent_n is not None,
            body.similar_to is not None,
        ]
        if sum(modes) != 1:
            raise HTTPException(
                400,
                {
                    "error": "bad_selection",
                    "message": "exactly one of tokens | top_frequent_n | similar_to required",
                },
            )
        try:
            config = tsne.TsneConfig.from_dict(body.config or {})
            if body.tokens is not None:
                selection = [simquery.resolve_token(model, t)[0] for t in body.tokens]
            elif body.top_frequent_n is not None:
                if body.top_frequent_n < 1:
                    raise ValueError("top_frequent_n must be >= 1")
                selection = simquery.top_n_frequent(model, body.top_frequent_n)
            else:
                if body.n is None or body.n < 1:
                    raise ValueError("similar_to requires n >= 1")
                resolved, _ = simquery.resolve_token(model, body.similar_to)
                neighbors = simquery.top_k_similar(model, resolved, body.n)
                # the query word itself is part of the picture
                selection = [resolved] + [nb.token for nb in neighbors]
        except EmbexError as exc:
            raise _engine_error(exc) from None
        except ValueError as exc:
            raise HTTPException(400, {"error": "bad_selection", "message": str(exc)}) from None

        rows = model.matrix[[model.index[t] for t in selection]].astype(float)

        def run(job: Job):
            def observe(iteration: int, cost: float):
                with job.lock:
                    job.progress["iteration"] = iteration
                    job.progress["kl"] = cost
                    tail = job.progress.setdefault("kl_tail", [])
                    tail.append([iteration, cost])
                    del tail[:-5]

            embed = tsne.tsne_embed if config.theta == 0.0 else tsne.tsne_embed_bh
            layout = embed(rows, selection, config, progress=observe)
            return layout.to_dict()

        return jobs.submit("tsne", run).to_dict()

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return jobs.get(job_id).to_dict()

    @app.get("/jobs/{job_id}/result")
    def get_job_result(job_id: str):
        job = jobs.get(job_id)
        with job.lock:
            if job.state == "failed":
                raise HTTPException(409, {"error": "job_failed", "message": job.error})
            if job.state != "done":
                raise HTTPException(
                    409, {"error": "job_not_done", "state": job.state}
                )
            return job.result

    # -- graphs --

    @app.post("/graphs", status_code=201)
    def create_graph(body: GraphCreateRequest):
        model = registry.get(body.model_id)
        try:
            graph = graphx.build_star(model, body.center, body.n, model_id=body.model_id)
        except EmbexError as exc:
            raise _engine_error(exc) from None
        except ValueError as exc:
            raise HTTPException(400, {"error": "bad_request", "message": str(exc)}) from None
        graph_id = graphs.create(graph)
        return {"graph_id": graph_id, "graph": graph.to_dict()}

    def _mutate_graph(graph_id: str, fn):
        graph, lock = graphs.get(graph_id)
        with lock:  # one mutation at a time per graph id
            try:
                fn(graph)
            except EmbexError as exc:
                raise _engine_error(exc) from None
            except ValueError as exc:
                raise HTTPException(400, {"error": "bad_request", "message": str(exc)}) from None
            graphs.persist(graph_id, graph)
            return graph.to_dict()

    @app.post("/graphs/{graph_id}/expand")
    def expand_graph(graph_id: str, body: GraphMutationRequest):
        graph, _ = graphs.get(graph_id)
        model = registry.get(graph.provenance["model"])
        return _mutate_graph(
            graph_id, lambda g: graphx.expand_node(g, model, body.token, body.n)
        )

    @app.post("/graphs/{graph_id}/add")
    def add_to_graph(graph_id: str, body: GraphMutationRequest):
        graph, _ = graphs.get(graph_id)
        model = registry.get(graph.provenance["model"])
        return _mutate_graph(
            graph_id, lambda g: graphx.add_word(g, model, body.token, body.n)
        )

    @app.get("/graphs/{graph_id}")
    def get_graph(graph_id: str):
        graph, _ = graphs.get(graph_id)
        return graph.to_dict()

    # -- training jobs --

    @app.post("/train", status_code=202)
    def start_train(body: TrainRequest):
        if body.feature not in vstore.FEATURE_KINDS:
            raise HTTPException(
                400,
                {"error": "bad_feature", "message": f"feature must be one of {vstore.FEATURE_KINDS}"},
            )
        try:
            config = trainer.TrainConfig.from_dict(body.config or {})
        except (ValueError, TypeError) as exc:
            raise HTTPException(400, {"error": "bad_config", "message": str(exc)}) from None
        if not os.path.exists(body.corpus_ref):
            raise HTTPException(
                404, {"error": "unknown_corpus", "corpus_ref": body.corpus_ref}
            )
        model_id = body.model_id

        def run(job: Job):
            sentences = trainer.load_corpus(body.corpus_ref, body.feature)
            prog = trainer.TrainProgress()
            ticker = threading.Event()

            def pump():
                while not ticker.wait(0.05):
                    with job.lock:
                        job.progress.update(
                            epoch=prog.epoch,
                            total_epochs=prog.total_epochs,
                            lr=prog.lr,
                            running_loss=prog.running_loss,
                        )

            watcher = threading.Thread(target=pump, daemon=True)
            watcher.start()
            try:
                model = trainer.train(sentences, config, feature_kind=body.feature, progress=prog)
            finally:
                ticker.set()
                watcher.join()
            with job.lock:
                job.progress.update(epoch=prog.epoch, lr=prog.lr, running_loss=prog.running_loss)
            if body.save_path:
                vstore.save_text(model, body.save_path)
            final_id = model_id or f"trained-{job.id}"
            registry.add_trained(final_id, model, source=body.save_path or "")
            return {"model_id": final_id, "vocab_size": model.vocab_size}

        return jobs.submit("train", run).to_dict()

    return app


def run_server(
    models_config: Optional[str] = None,
    host: Optional[str] = None,
    port: Optional[int] = None,
    job_workers: int = 2,
    persist_graphs: Optional[str] = None,
):
    """Start uvicorn; host/port fall back to EMBEX_HOST / EMBEX_PORT env vars."""
    import uvicorn

    host = host or os.environ.get("EMBEX_HOST", DEFAULT_HOST)
    port = port or int(os.environ.get("EMBEX_PORT", DEFAULT_PORT))
    app = create_app(
        models_config=models_config,
        job_workers=job_workers,
        persist_graphs=persist_graphs,
    )
    uvicorn.run(app, host=host, port=port)

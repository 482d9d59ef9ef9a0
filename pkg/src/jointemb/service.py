"""HTTP retrieval API and static host for the explorer UI."""

from __future__ import annotations

import os
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import _kernels as kernels
from .engine import Engine, EngineConfig
from .errors import (ArtifactFormatError, DegenerateQueryError,
                     UnembeddableQueryError, ValidationError)

_PLACEHOLDER = """<!doctype html>
<title>retrieval engine</title>
<p>The engine is running. The explorer UI bundle was not found; build it
and point ui_dir at the bundle directory to serve it here.</p>
<p>API endpoints: POST /api/query, GET /api/items/{id}, GET /api/vocab,
POST /api/reload, GET /api/health.</p>
"""


class QueryTerm(BaseModel):
    text: Optional[str] = None
    image_id: Optional[str] = None
    weight: float = 1.0


class QueryRequest(BaseModel):
    terms: list[QueryTerm] = Field(min_length=1)
    k: int = 10


def create_app(config: EngineConfig, engine: Engine | None = None) -> FastAPI:
    """Wire the API over one Engine; reload swaps artifacts atomically."""
    engine = engine or Engine(config)
    app = FastAPI(title="joint embedding retrieval", docs_url=None, redoc_url=None)
    app.state.engine = engine

    @app.exception_handler(HTTPException)
    def flat_error(request, exc):
        # error bodies are flat {"reason", "message"} objects, not {"detail": ...}
        body = exc.detail if isinstance(exc.detail, dict) else {"reason": str(exc.detail)}
        return JSONResponse(status_code=exc.status_code, content=body)

    @app.post("/api/query")
    def api_query(request: QueryRequest):
        terms = [t.model_dump(exclude_none=True) for t in request.terms]
        try:
            ranked, dropped = engine.execute_query(terms, request.k)
        except DegenerateQueryError as exc:
            raise HTTPException(422, {"reason": "degenerate_query", "message": str(exc)})
        except UnembeddableQueryError as exc:
            raise HTTPException(422, {"reason": "unembeddable_query", "message": str(exc)})
        except ValidationError as exc:
            raise HTTPException(400, {"reason": "invalid_query", "message": str(exc)})
        return {
            "results": [{"id": id_, "score": score} for id_, score in ranked],
            "dropped_tokens": dropped,
        }

    @app.get("/api/items/{item_id}")
    def api_item(item_id: str):
        state = engine.state
        if item_id not in state.corpus:
            raise HTTPException(404, {"reason": "unknown_item", "message": item_id})
        doc = state.corpus.by_id(item_id)
        return {
            "id": doc.id,
            "caption": doc.caption,
            "tags": sorted(doc.tags),
            "labels": sorted(doc.labels) if doc.labels is not None else None,
            "split": doc.split,
            "image_url": doc.image_url,
            "indexed": doc.id in state.index,
        }

    @app.get("/api/vocab")
    def api_vocab(prefix: str = "", limit: int = 50):
        if limit < 1:
            raise HTTPException(400, {"reason": "invalid_limit", "message": str(limit)})
        vocab = engine.state.text_embedder.vocab
        tokens = [t for t in vocab.id_to_token if t.startswith(prefix)]
        return {"tokens": tokens[:limit], "total": len(tokens)}

    @app.post("/api/reload")
    def api_reload():
        try:
            state = engine.reload()
        except (OSError, ArtifactFormatError, ValidationError) as exc:
            raise HTTPException(500, {"reason": "reload_failed", "message": str(exc)})
        return {"status": "ok", "n_items": len(state.index)}

    @app.get("/api/health")
    def api_health():
        state = engine.state
        return {
            "status": "ok",
            "kernel_backend": kernels.BACKEND,
            "n_items": len(state.index),
            "vocab_size": len(state.text_embedder.vocab),
            "dim": state.index.dim,
            "method": state.text_embedder.method,
        }

    ui_dir = config.ui_dir
    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def ui_placeholder():
            return _PLACEHOLDER

    return app


def serve(config: EngineConfig, host: str | None = None,
          port: int | None = None) -> None:
    """Run the API under uvicorn (blocking)."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=host or config.host, port=port or config.port,
                log_level="warning")

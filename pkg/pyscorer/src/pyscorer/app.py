"""FastAPI application implementing the scoring wire protocol.

POST /score  {"pairs": [[s1, s2], ...]}      -> {"scores": [x, ...]}
POST /embed  {"sentences": [s, ...]}         -> {"embeddings": [[...], ...]}
GET  /health                                 -> {"status": "ok", "embedding_dim": d}

Responses preserve input order; scores are clamped to [0, 1]. Requests
larger than the configured limit are refused with 413, malformed JSON
with 400, and every endpoint returns 503 until the models are loaded.
"""

from __future__ import annotations

import json
from contextlib import asynccontextmanager
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .backends import load_embedder, load_pair_scorer


@dataclass(frozen=True)
class ServiceConfig:
    cross_encoder: str = "hash"
    bi_encoder: str = "hash"
    max_batch_size: int = 32
    max_request_items: int = 8192
    load_on_startup: bool = True

    def __post_init__(self):
        if self.max_batch_size < 1:
            raise ValueError("max_batch_size must be >= 1")
        if self.max_request_items < 1:
            raise ValueError("max_request_items must be >= 1")


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _chunks(items, size):
    for start in range(0, len(items), size):
        yield items[start : start + size]


def load_backends(app: FastAPI) -> None:
    config: ServiceConfig = app.state.config
    app.state.scorer = load_pair_scorer(config.cross_encoder)
    app.state.embedder = load_embedder(config.bi_encoder)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if config.load_on_startup:
            load_backends(app)
        yield

    app = FastAPI(title="pyscorer", lifespan=lifespan)
    app.state.config = config
    app.state.scorer = None
    app.state.embedder = None

    def ready() -> bool:
        return app.state.scorer is not None and app.state.embedder is not None

    async def parse_body(request: Request, field: str, expect_pairs: bool):
        raw = await request.body()
        try:
            body = json.loads(raw)
        except (UnicodeDecodeError, json.JSONDecodeError):
            return None, _error(400, "request body is not valid JSON")
        if not isinstance(body, dict) or not isinstance(body.get(field), list):
            return None, _error(400, f"request must be an object with a {field!r} list")
        items = body[field]
        if len(items) > config.max_request_items:
            return None, _error(
                413, f"request of {len(items)} items exceeds limit {config.max_request_items}"
            )
        if expect_pairs:
            for item in items:
                if (
                    not isinstance(item, (list, tuple))
                    or len(item) != 2
                    or not all(isinstance(s, str) for s in item)
                ):
                    return None, _error(400, "each pair must be a [string, string] list")
        elif not all(isinstance(s, str) for s in items):
            return None, _error(400, "each sentence must be a string")
        return items, None

    @app.get("/health")
    async def health():
        if not ready():
            return _error(503, "models are loading")
        probe = app.state.embedder.embed([""])
        return {"status": "ok", "embedding_dim": len(probe[0])}

    @app.post("/score")
    async def score(request: Request):
        if not ready():
            return _error(503, "models are loading")
        pairs, failure = await parse_body(request, "pairs", expect_pairs=True)
        if failure is not None:
            return failure
        scores: list[float] = []
        for chunk in _chunks([tuple(p) for p in pairs], config.max_batch_size):
            got = app.state.scorer.score(chunk)
            scores.extend(min(1.0, max(0.0, float(s))) for s in got)
        return {"scores": scores}

    @app.post("/embed")
    async def embed(request: Request):
        if not ready():
            return _error(503, "models are loading")
        sentences, failure = await parse_body(request, "sentences", expect_pairs=False)
        if failure is not None:
            return failure
        embeddings: list[list[float]] = []
        for chunk in _chunks(list(sentences), config.max_batch_size):
            embeddings.extend(app.state.embedder.embed(chunk))
        return {"embeddings": embeddings}

    return app

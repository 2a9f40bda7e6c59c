"""HTTP surface: POST /embed and GET /health.

Request and response bodies match the pipeline's provider protocol:
``{"texts": [...]}`` in, ``{"dim": D, "vectors": [[...], ...]}`` out,
one vector per text in order. Oversized batches are refused with a
non-200 status, which clients treat as a provider error.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .model import SentenceEmbedder

DEFAULT_MAX_BATCH = 256


class EmbedRequest(BaseModel):
    texts: list[str]


def create_app(embedder: SentenceEmbedder, max_batch: int = DEFAULT_MAX_BATCH) -> FastAPI:
    app = FastAPI(title="embedding-sidecar")

    @app.post("/embed")
    def embed(request: EmbedRequest) -> dict:
        if len(request.texts) > max_batch:
            raise HTTPException(
                status_code=413,
                detail=f"batch of {len(request.texts)} exceeds limit {max_batch}",
            )
        return {"dim": embedder.dim, "vectors": embedder.encode(request.texts)}

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "model": embedder.model_id, "dim": embedder.dim}

    return app

"""FastAPI application implementing the NLI wire protocol."""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, model_validator

from .backends import Backend, DEFAULT_MAX_SEQUENCE_LENGTH

DEFAULT_MAX_BATCH = 64


class NliRequest(BaseModel):
    premise: Optional[str] = None
    hypothesis: Optional[str] = None
    pairs: Optional[list[tuple[str, str]]] = None

    @model_validator(mode="after")
    def _single_or_batch(self) -> "NliRequest":
        single = self.premise is not None or self.hypothesis is not None
        if single and self.pairs is not None:
            raise ValueError("send either premise/hypothesis or pairs, not both")
        if not single and self.pairs is None:
            raise ValueError("send premise/hypothesis or pairs")
        if single and (self.premise is None or self.hypothesis is None):
            raise ValueError("premise and hypothesis are both required")
        return self

    def as_pairs(self) -> list[tuple[str, str]]:
        if self.pairs is not None:
            return [tuple(pair) for pair in self.pairs]
        return [(self.premise, self.hypothesis)]


def create_app(
    backend: Backend,
    max_batch: int = DEFAULT_MAX_BATCH,
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH,
) -> FastAPI:
    app = FastAPI(title="nli-service")
    # Model invocation is serialized; the model itself is loaded exactly once.
    inference_lock = threading.Lock()

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok", "model": backend.model_id}

    @app.get("/v1/info")
    def info() -> dict:
        return {
            "model": backend.model_id,
            "max_batch": max_batch,
            "max_sequence_length": max_sequence_length,
        }

    @app.post("/v1/nli")
    def nli(request: NliRequest) -> dict:
        pairs = request.as_pairs()
        if len(pairs) > max_batch:
            raise HTTPException(
                status_code=413,
                detail=f"batch of {len(pairs)} exceeds the maximum of {max_batch}",
            )
        for premise, hypothesis in pairs:
            if not premise.strip() or not hypothesis.strip():
                raise HTTPException(
                    status_code=400, detail="premise and hypothesis must be non-empty"
                )
        with inference_lock:
            results = backend.classify(pairs)
        return {"results": results}

    return app

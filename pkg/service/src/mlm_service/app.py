"""FastAPI application exposing the fill-mask wire protocol.

    POST /v1/fill-mask   {"tokens": [...], "mask_token": "[MASK]", "top_k": 50}
    GET  /v1/health

Status codes: 400 malformed body, 413 over the length limit, 422 no mask
token present, 503 model not loaded. top_k beyond the configured maximum is
clamped and noted in the response metadata.
"""

from __future__ import annotations

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import ServiceConfig
from .model import FillMaskModel, SequenceTooLong

log = logging.getLogger("mlm_service")


class FillMaskRequest(BaseModel):
    tokens: list[str] = Field(min_length=1)
    mask_token: str = "[MASK]"
    top_k: int = Field(default=50, ge=1)


class Candidate(BaseModel):
    token: str
    log_prob: float


class Prediction(BaseModel):
    position: int
    candidates: list[Candidate]


class FillMaskResponse(BaseModel):
    predictions: list[Prediction]
    meta: dict


def create_app(cfg: ServiceConfig, model: FillMaskModel | None = None,
               load_on_startup: bool = True) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.model is None and load_on_startup:
            log.info("loading model %s", cfg.model_id)
            app.state.model = FillMaskModel(cfg.model_id, cfg.device, cfg.max_tokens)
        yield

    app = FastAPI(title="fill-mask service", version="0.1.0", lifespan=lifespan)
    app.state.cfg = cfg
    app.state.model = model

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:3])})

    @app.get("/v1/health")
    async def health():
        if app.state.model is None:
            return JSONResponse(status_code=503, content={"status": "loading", "model": cfg.model_id})
        return {"status": "ok", "model": app.state.model.model_id}

    @app.post("/v1/fill-mask", response_model=FillMaskResponse)
    async def fill_mask(request: FillMaskRequest):
        model = app.state.model
        if model is None:
            return JSONResponse(status_code=503, content={"error": "model not loaded"})
        if len(request.tokens) > cfg.max_tokens:
            return JSONResponse(
                status_code=413,
                content={"error": f"{len(request.tokens)} tokens exceed the limit of {cfg.max_tokens}"},
            )
        if request.mask_token not in request.tokens:
            return JSONResponse(status_code=422, content={"error": "no mask token present"})
        top_k = min(request.top_k, cfg.max_top_k)
        meta = {"model": model.model_id}
        if top_k != request.top_k:
            meta["clamped_top_k"] = top_k
        try:
            filled = model.fill(request.tokens, request.mask_token, top_k)
        except SequenceTooLong as exc:
            return JSONResponse(status_code=413, content={"error": str(exc)})
        return {
            "predictions": [
                {
                    "position": position,
                    "candidates": [{"token": t, "log_prob": lp} for t, lp in candidates],
                }
                for position, candidates in filled
            ],
            "meta": meta,
        }

    return app

"""FastAPI application: the sidecar's HTTP/JSON surface.

Endpoints: POST /v1/aspect-sentiment, POST /v1/logprobs, GET /v1/health,
GET /v1/model.  Schema and span violations return 400; requests in model
mode before a model is loaded return 503.  Request handling is stateless;
in stub mode every response is a pure function of the request body.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, field_validator

from . import stub
from .engines import AbsaEngine, EngineError, LogProbEngine

DEFAULT_PORT = 8901
MODE_ENV = "TEMPUS_SIDECAR_MODE"
ABSA_MODEL_ENV = "TEMPUS_ABSA_MODEL"
LM_MODEL_ENV = "TEMPUS_LM_MODEL"

SIMPLEX_TOLERANCE = 1e-6


class AspectSentimentRequest(BaseModel):
    text: str
    aspect: str
    aspect_char_span: list[int]

    @field_validator("aspect_char_span")
    @classmethod
    def _span_shape(cls, value: list[int]) -> list[int]:
        if len(value) != 2 or value[0] < 0 or value[1] < value[0]:
            raise ValueError("aspect_char_span must be [start, end) with 0 <= start <= end")
        return value


class AspectSentimentResponse(BaseModel):
    negative: float
    neutral: float
    positive: float


class LogProbRequest(BaseModel):
    context: str
    continuation: str


class LogProbResponse(BaseModel):
    tokens: list[str]
    token_logprobs: list[float]


def create_app(
    mode: str | None = None,
    absa_model: str | None = None,
    lm_model: str | None = None,
) -> FastAPI:
    mode = mode or os.environ.get(MODE_ENV, "stub")
    if mode not in ("stub", "model"):
        raise ValueError(f"{MODE_ENV} must be 'stub' or 'model', got '{mode}'")
    app = FastAPI(title="tempus-sidecar", version="0.1.0")
    app.state.mode = mode
    app.state.absa_engine = None
    app.state.lm_engine = None
    app.state.load_error = None

    if mode == "model":
        absa_id = absa_model or os.environ.get(ABSA_MODEL_ENV)
        lm_id = lm_model or os.environ.get(LM_MODEL_ENV)
        try:
            if absa_id:
                app.state.absa_engine = AbsaEngine(absa_id)
            if lm_id:
                app.state.lm_engine = LogProbEngine(lm_id)
            if not absa_id and not lm_id:
                app.state.load_error = f"model mode: set {ABSA_MODEL_ENV} and/or {LM_MODEL_ENV}"
        except (EngineError, OSError) as exc:
            app.state.load_error = str(exc)

    @app.exception_handler(RequestValidationError)
    async def _validation_as_400(request: Request, exc: RequestValidationError):
        detail = [
            {"loc": [str(part) for part in err.get("loc", ())], "msg": str(err.get("msg", "")),
             "type": str(err.get("type", ""))}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": detail})

    def _model_id() -> str:
        if mode == "stub":
            return stub.STUB_MODEL_ID
        parts = []
        if app.state.absa_engine is not None:
            parts.append(app.state.absa_engine.model_id)
        if app.state.lm_engine is not None:
            parts.append(app.state.lm_engine.model_id)
        return "+".join(parts) if parts else "unloaded"

    @app.get("/v1/health")
    async def health():
        status = "ok"
        if mode == "model" and app.state.load_error is not None:
            status = "degraded"
        body = {"status": status, "mode": mode}
        if app.state.load_error is not None:
            body["error"] = app.state.load_error
        return body

    @app.get("/v1/model")
    async def model_info():
        return {"mode": mode, "model_id": _model_id()}

    @app.post("/v1/aspect-sentiment", response_model=AspectSentimentResponse)
    async def aspect_sentiment(request: AspectSentimentRequest):
        lo, hi = request.aspect_char_span
        if hi > len(request.text) or request.text[lo:hi] != request.aspect:
            return JSONResponse(
                status_code=400,
                content={"detail": "aspect_char_span does not slice to the aspect string"},
            )
        if mode == "stub":
            neg, neu, pos = stub.aspect_sentiment(request.text)
        else:
            engine = app.state.absa_engine
            if engine is None:
                return JSONResponse(
                    status_code=503,
                    content={"detail": app.state.load_error or "sentiment model not loaded"},
                )
            neg, neu, pos = engine.score(request.text, request.aspect)
        total = neg + neu + pos
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            # never ship an off-simplex score; surface the defect instead
            return JSONResponse(
                status_code=500,
                content={"detail": f"backend produced off-simplex scores (sum {total})"},
            )
        return {"negative": neg, "neutral": neu, "positive": pos}

    @app.post("/v1/logprobs", response_model=LogProbResponse)
    async def logprobs(request: LogProbRequest):
        if not request.continuation.strip():
            return JSONResponse(status_code=400, content={"detail": "empty continuation"})
        if mode == "stub":
            tokens, lps = stub.logprobs(request.context, request.continuation)
        else:
            engine = app.state.lm_engine
            if engine is None:
                return JSONResponse(
                    status_code=503,
                    content={"detail": app.state.load_error or "language model not loaded"},
                )
            tokens, lps = engine.score(request.context, request.continuation)
        return {"tokens": tokens, "token_logprobs": lps}

    return app

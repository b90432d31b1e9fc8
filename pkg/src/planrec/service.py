"""HTTP suggestion service around a loaded embedding model.

The service is stateless: the model is immutable and every request runs an
independent recognition, so identical request bodies produce identical
response bodies.  Wall time is reported in the X-Elapsed-Ms header to keep
the body deterministic.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import replace

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.encoders import jsonable_encoder
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .corpus import HOLE_TOKEN, Observation
from .embedding import EmbeddingModel, model_to_json
from .errors import InvalidConfigError
from .recognizer import EmConfig, em_recognize

DEFAULT_OBSERVATION_CAP = 256
DEFAULT_BIND = "127.0.0.1:8000"
BIND_ENV_VAR = "PLANREC_BIND"


class SuggestRequest(BaseModel):
    observation: list[str] = Field(min_length=1)
    m: int = Field(default=10, ge=1)
    iterations: int | None = Field(default=None, ge=1)
    delta: float | None = Field(default=None, gt=0)
    seed: int | None = None


class SuggestionOut(BaseModel):
    action: str
    weight: float


class HoleOut(BaseModel):
    position: int
    suggestions: list[SuggestionOut]


class SuggestResponse(BaseModel):
    holes: list[HoleOut]
    completed: list[str]
    objective: float
    model_id: str


def model_digest(model: EmbeddingModel) -> str:
    """Short content hash identifying the loaded model."""
    return hashlib.sha256(model_to_json(model).encode("utf-8")).hexdigest()[:12]


def resolve_bind(explicit: str | None = None) -> tuple[str, int]:
    """Bind address precedence: explicit flag, then env var, then default."""
    raw = explicit or os.environ.get(BIND_ENV_VAR) or DEFAULT_BIND
    host, _, port_text = raw.rpartition(":")
    if not host or not port_text.isdigit():
        raise InvalidConfigError(
            f"bind address must look like host:port, got {raw!r}"
        )
    return host, int(port_text)


def create_app(
    model: EmbeddingModel,
    em_defaults: EmConfig | None = None,
    observation_cap: int = DEFAULT_OBSERVATION_CAP,
    static_dir: str | None = None,
) -> FastAPI:
    """Build the service around one immutable model.

    ``em_defaults`` carries process-level recognition settings; request
    fields override them per call.  The window always follows the model.
    """
    defaults = em_defaults or EmConfig()
    defaults = replace(defaults, window=model.window)
    vocab = model.vocabulary
    digest = model_digest(model)
    app = FastAPI(title="planrec suggestion service")

    @app.exception_handler(RequestValidationError)
    async def invalid_request(request: Request, exc: RequestValidationError):
        if any(err.get("type") == "json_invalid" for err in exc.errors()):
            return JSONResponse(
                status_code=400, content={"detail": "malformed JSON body"}
            )
        return JSONResponse(
            status_code=422, content={"detail": jsonable_encoder(exc.errors())}
        )

    @app.get("/api/health")
    def health() -> dict:
        return {
            "status": "ok",
            "model_id": digest,
            "dim": model.dim,
            "window": model.window,
            "vocab_size": len(vocab),
        }

    @app.get("/api/vocab")
    def vocabulary() -> dict:
        return {"tokens": list(vocab.tokens), "counts": list(vocab.counts)}

    @app.post("/api/suggest", response_model=SuggestResponse)
    def suggest(request: SuggestRequest) -> JSONResponse:
        started = time.perf_counter()
        if len(request.observation) > observation_cap:
            raise HTTPException(
                status_code=413,
                detail=f"observation has {len(request.observation)} slots; "
                f"the cap is {observation_cap}",
            )
        unknown = []
        for token in request.observation:
            if token != HOLE_TOKEN and token not in vocab and token not in unknown:
                unknown.append(token)
        if unknown:
            raise HTTPException(
                status_code=422,
                detail={
                    "message": "unknown actions: " + " ".join(unknown),
                    "unknown_actions": unknown,
                },
            )
        observation = Observation(
            slots=tuple(
                None if tok == HOLE_TOKEN else vocab.id_of(tok)
                for tok in request.observation
            )
        )
        config = replace(
            defaults,
            m=request.m,
            iterations=request.iterations or defaults.iterations,
            delta=request.delta if request.delta is not None else defaults.delta,
            seed=request.seed if request.seed is not None else defaults.seed,
        )
        try:
            result = em_recognize(model, observation, config)
        except InvalidConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        body = {
            "holes": [
                {
                    "position": x,
                    "suggestions": [
                        {"action": vocab.token_of(o), "weight": w}
                        for o, w in result.suggestions[x]
                    ],
                }
                for x in sorted(result.suggestions)
            ],
            "completed": [vocab.token_of(a) for a in result.completed],
            "objective": result.objective,
            "model_id": digest,
        }
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return JSONResponse(
            content=body, headers={"X-Elapsed-Ms": f"{elapsed_ms:.3f}"}
        )

    if static_dir is not None and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="webui")
    return app

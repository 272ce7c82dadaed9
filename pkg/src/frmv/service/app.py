"""FastAPI application exposing the detector over HTTP."""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import handlers
from .schemas import (
    DetectRequest,
    DetectResponse,
    MatchRequest,
    MatchResponse,
    SweepRequest,
    SweepResponse,
    SynthRequest,
    SynthResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="frmv", version="0.1.0")

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        # Domain validation failures (bad window, degenerate spectra, ...)
        # are client errors, not server crashes.
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/detect", response_model=DetectResponse)
    async def detect(request: DetectRequest):
        return handlers.run_detect(request)

    @app.post("/synth", response_model=SynthResponse)
    async def synth(request: SynthRequest):
        return handlers.run_synth(request)

    @app.post("/sweep", response_model=SweepResponse)
    async def sweep(request: SweepRequest):
        return handlers.run_sweep(request)

    @app.post("/match", response_model=MatchResponse)
    async def match(request: MatchRequest):
        return handlers.run_match(request)

    return app


app = create_app()

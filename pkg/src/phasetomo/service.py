"""FastAPI service wrapping the experiment runner.

Each command is one POST endpoint taking a strict RunConfig body and
returning the CSV as ``text/csv``. Malformed configurations are rejected
with 422 (pydantic) and numeric-domain failures with 400 plus a structured
error body.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from . import __version__
from .errors import ConfigError, NumericDomainError
from .runner import RunConfig, run_command

app = FastAPI(
    title="phasetomo",
    version=__version__,
    description="Direct wave-function tomography as complex phase estimation",
)


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorBody(BaseModel):
    error: str
    message: str


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


def _run(command: str, cfg: RunConfig) -> PlainTextResponse:
    try:
        csv = run_command(command, cfg)
    except ConfigError as exc:
        raise HTTPException(
            status_code=422,
            detail=ErrorBody(error="config", message=str(exc)).model_dump(),
        ) from exc
    except NumericDomainError as exc:
        raise HTTPException(
            status_code=400,
            detail=ErrorBody(
                error=type(exc).__name__, message=str(exc)
            ).model_dump(),
        ) from exc
    return PlainTextResponse(csv, media_type="text/csv")


@app.post("/run/reconstruct", response_class=PlainTextResponse)
def reconstruct(cfg: RunConfig) -> PlainTextResponse:
    return _run("reconstruct", cfg)


@app.post("/run/scan", response_class=PlainTextResponse)
def scan(cfg: RunConfig) -> PlainTextResponse:
    return _run("scan", cfg)


@app.post("/run/fisher", response_class=PlainTextResponse)
def fisher(cfg: RunConfig) -> PlainTextResponse:
    return _run("fisher", cfg)


@app.post("/run/mc", response_class=PlainTextResponse)
def mc(cfg: RunConfig) -> PlainTextResponse:
    return _run("mc", cfg)

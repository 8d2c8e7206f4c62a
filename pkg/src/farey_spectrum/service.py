"""FastAPI service exposing the command layer over HTTP.

Run with, for example:

    uvicorn farey_spectrum.service:app --port 8000

Every endpoint mirrors one CLI command and returns the same payload the
CLI would compute locally, so a CLI invocation pointed at this service
produces byte-identical files.
"""

from __future__ import annotations

from fastapi import FastAPI

from . import runner
from ._version import __version__
from .formats import TOOL_TAG
from .schemas import (
    EigenRequest,
    EigenResponse,
    EntriesRequest,
    EntriesResponse,
    HealthResponse,
    NormsRequest,
    NormsResponse,
    QSweepRequest,
    QSweepResponse,
    ResidualRequest,
    ResidualResponse,
    TruncSweepRequest,
    TruncSweepResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(
    title="farey-spectrum",
    version=__version__,
    description=(
        "Dominant eigenpairs of the signed Farey transfer operators in a "
        "generalized Laguerre basis, with structural verification suites."
    ),
)


@app.get("/health", response_model=HealthResponse)
def health() -> dict:
    return {"status": "ok", "tool": TOOL_TAG}


@app.post("/entries", response_model=EntriesResponse)
def entries(req: EntriesRequest) -> dict:
    return runner.entries_payload(req.q, req.sign, req.size)


@app.post("/eigen", response_model=EigenResponse)
def eigen(req: EigenRequest) -> dict:
    return runner.eigen_payload(req.q, req.sign, req.size, req.tol)


@app.post("/trunc-sweep", response_model=TruncSweepResponse)
def trunc_sweep(req: TruncSweepRequest) -> dict:
    return runner.trunc_sweep_payload(req.q, req.sign, req.sizes, req.tol)


@app.post("/q-sweep", response_model=QSweepResponse)
def q_sweep(req: QSweepRequest) -> dict:
    return runner.q_sweep_payload(req.q_min, req.q_max, req.q_step, req.sign, req.size, req.tol)


@app.post("/norms", response_model=NormsResponse)
def norms(req: NormsRequest) -> dict:
    return runner.norms_payload(req.q, req.sign, req.sizes, req.tol)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest) -> dict:
    return runner.verify_payload(req.q, req.size)


@app.post("/residual", response_model=ResidualResponse)
def residual(req: ResidualRequest) -> dict:
    return runner.residual_payload(req.q, req.sign, req.size, req.tol, req.x_grid)

"""Pydantic request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

Sign = Literal["plus", "minus"]


class EntriesRequest(BaseModel):
    q: float = Field(gt=0.0)
    sign: Sign
    size: int = Field(ge=1, le=400)


class EigenRequest(BaseModel):
    q: float = Field(gt=0.0)
    sign: Sign
    size: int = Field(ge=1, le=400)
    tol: float = Field(default=1e-13, ge=1e-15, le=1e-6)


class TruncSweepRequest(BaseModel):
    q: float = Field(gt=0.0)
    sign: Sign
    sizes: list[int] = Field(min_length=1)
    tol: float = Field(default=1e-13, ge=1e-15, le=1e-6)

    @field_validator("sizes")
    @classmethod
    def _increasing(cls, v: list[int]) -> list[int]:
        if any(s < 1 or s > 400 for s in v):
            raise ValueError("sizes must lie in [1, 400]")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("sizes must be strictly increasing")
        return v


class QSweepRequest(BaseModel):
    q_min: float = Field(gt=0.0)
    q_max: float
    q_step: float = Field(gt=0.0)
    sign: Sign
    size: int = Field(ge=1, le=400)
    tol: float = Field(default=1e-13, ge=1e-15, le=1e-6)

    @field_validator("q_max")
    @classmethod
    def _ordered(cls, v: float, info) -> float:
        q_min = info.data.get("q_min")
        if q_min is not None and v <= q_min:
            raise ValueError("q_max must exceed q_min")
        return v


class NormsRequest(BaseModel):
    q: float = Field(gt=0.0)
    sign: Sign
    sizes: list[int] = Field(min_length=1)
    tol: float = Field(default=1e-13, ge=1e-15, le=1e-6)


class VerifyRequest(BaseModel):
    # q >= 0.5 keeps the kernel checks within the Bessel series' domain
    # (order 2q-1 must be nonnegative).
    q: float = Field(default=0.5, ge=0.5)
    size: int = Field(default=50, ge=2, le=400)


class ResidualRequest(BaseModel):
    q: float = Field(gt=0.0)
    sign: Sign
    size: int = Field(ge=1, le=400)
    tol: float = Field(default=1e-13, ge=1e-15, le=1e-6)
    x_grid: list[float] = Field(
        default=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    )

    @field_validator("x_grid")
    @classmethod
    def _interior(cls, v: list[float]) -> list[float]:
        if not v or any(not 0.0 < x < 1.0 for x in v):
            raise ValueError("x_grid values must lie in (0, 1)")
        return v


class EntriesResponse(BaseModel):
    q: float
    sign: Sign
    size: int
    entries: list[list[float]]
    tool: str


class EigenResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    q: float
    sign: Sign
    size: int
    lam: float = Field(alias="lambda")
    phi: list[float]
    normalization_index: int
    iterations: int
    converged: bool
    residual: float
    degenerate: bool
    tool: str


class SweepRecordModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    parameter: float
    lam: float = Field(alias="lambda")
    bound: float
    converged: bool
    iterations: int
    spectral_bound: Optional[float] = None
    hypothesis_ok: Optional[bool] = None


class TruncSweepResponse(BaseModel):
    q: float
    sign: Sign
    sizes: list[int]
    kind: str
    records: list[SweepRecordModel]
    heads: list[list[float]]
    lambda_monotone: bool
    component_monotone: list[bool]
    aitken_lambda: Optional[float]
    converged_all: bool
    tool: str


class QSweepResponse(BaseModel):
    q_min: float
    q_max: float
    q_step: float
    sign: Sign
    size: int
    kind: str
    records: list[SweepRecordModel]
    converged_all: bool
    tool: str


class NormCurveModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    size: int
    converged: bool
    lam: float = Field(alias="lambda")
    s: list[float]


class NormsResponse(BaseModel):
    q: float
    sign: Sign
    sizes: list[int]
    curves: list[NormCurveModel]
    converged_all: bool
    tool: str


class CheckModel(BaseModel):
    name: str
    max_violation: float
    tolerance: float
    passed: bool


class IntertwiningRecordModel(BaseModel):
    q: float
    n: int
    t: float
    residual_fn: float
    residual_en: float
    quadrature_order: int


class VerifyResponse(BaseModel):
    q: float
    size: int
    passed: bool
    checks: list[CheckModel]
    intertwining_records: list[IntertwiningRecordModel]
    tool: str


class ResidualRowModel(BaseModel):
    x: float
    f_value: float
    transfer_value: float
    relative_residual: float


class ResidualResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    q: float
    sign: Sign
    size: int
    lam: float = Field(alias="lambda")
    converged: bool
    rows: list[ResidualRowModel]
    max_relative_residual: Optional[float]
    tool: str


class HealthResponse(BaseModel):
    status: str
    tool: str

"""Request and response bodies for the HTTP API.

Scenarios travel as YAML text in a JSON field, so a request body stays
exactly the file a user would feed the command line.
"""
from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, Field

SweepValue = Union[int, float, str]


class HealthResponse(BaseModel):
    status: str
    tool: str
    version: str


class ValidateRequest(BaseModel):
    scenario: str = Field(description="Scenario document, YAML text.")
    strict: bool = False


class ValidateResponse(BaseModel):
    valid: bool
    errors: list[str] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    normalized: Optional[str] = Field(
        default=None, description="Canonical YAML with defaults filled in."
    )
    steps: Optional[int] = None
    variables: Optional[int] = None
    faults: Optional[int] = None


class RecordModel(BaseModel):
    t: float
    x_n: list[float]
    x_a: list[float]
    x_h: list[float]
    u_a: list[float]
    u_h: list[float]
    d_vod: float
    d_vid: float
    d_vad: float
    p: float
    s: float
    r: float
    grade: str
    flags: list[str] = Field(default_factory=list)


class RunRequest(BaseModel):
    scenario: str = Field(description="Scenario document, YAML text.")
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    include_records: bool = Field(
        default=False,
        description="Return the full per-step timeseries, not just the summary.",
    )


class RunSummary(BaseModel):
    steps: int
    seed: int
    peak_r: float
    peak_grade: str
    peak_t: float
    peak_d_vod: float


class RunResponse(BaseModel):
    summary: RunSummary
    records: Optional[list[RecordModel]] = None
    manifest: dict


class SweepRequest(BaseModel):
    scenario: str
    param: str = Field(description="Dotted path, e.g. faults.0.params.delta")
    values: list[SweepValue]


class SweepRow(BaseModel):
    value: SweepValue
    seed: int
    peak_d_vod: float
    peak_r: float
    grade: str


class SweepResponse(BaseModel):
    param: str
    rows: list[SweepRow]


class FaultKindInfo(BaseModel):
    name: str
    parameters: list[str]
    overriding: Union[bool, str]


class FaultCatalogResponse(BaseModel):
    kinds: list[FaultKindInfo]


class SignatureRequest(BaseModel):
    kind: str
    params: dict = Field(default_factory=dict)
    t0: float = 100.0
    horizon: float = 200.0
    dt: float = 0.2
    baseline: float = 1.0
    range_min: float = -10.0
    range_max: float = 10.0
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)


class SignatureResponse(BaseModel):
    kind: str
    t: list[float]
    vod: list[float]

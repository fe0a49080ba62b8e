"""FastAPI application wrapping the simulation core.

The service is stateless: every request carries its full scenario, every
response is a pure function of it. Config problems map to 422, a diverging
simulation to 409.
"""
from __future__ import annotations

from random import Random

from fastapi import FastAPI, HTTPException, Response

from ..engine import RunResult, TimeSeriesRecord, run_scenario, run_sweep
from ..errors import (
    CompositionAmbiguityError,
    ConfigError,
    SimulationDivergenceError,
)
from ..faults import SensorRange, make_fault_kind, vod_signature
from ..output import manifest_mapping
from ..scenario import parse_scenario, parse_scenario_with_warnings, serialize_scenario
from ..svgplot import render_line_svg
from ..version import VERSION
from .schemas import (
    FaultCatalogResponse,
    FaultKindInfo,
    HealthResponse,
    RecordModel,
    RunRequest,
    RunResponse,
    RunSummary,
    SignatureRequest,
    SignatureResponse,
    SweepRequest,
    SweepResponse,
    SweepRow,
    ValidateRequest,
    ValidateResponse,
)

_TOOL = "conflictsim"

_FAULT_CATALOG = (
    FaultKindInfo(name="open_circuit", parameters=[], overriding=True),
    FaultKindInfo(name="short_circuit", parameters=[], overriding=True),
    FaultKindInfo(name="stuck", parameters=[], overriding=True),
    FaultKindInfo(name="bias", parameters=["delta", "sign"], overriding=False),
    FaultKindInfo(name="cyclic",
                  parameters=["amplitude", "period", "noise_std"],
                  overriding=False),
    FaultKindInfo(name="drift", parameters=["slope"], overriding=False),
    FaultKindInfo(name="delay",
                  parameters=["tau", "mode", "error_amplitude"],
                  overriding="depends on mode"),
)


def _record_model(record: TimeSeriesRecord) -> RecordModel:
    s = record.sample
    return RecordModel(
        t=s.t,
        x_n=list(record.x_n), x_a=list(record.x_a), x_h=list(record.x_h),
        u_a=list(record.u_a), u_h=list(record.u_h),
        d_vod=s.d_vod, d_vid=s.d_vid, d_vad=s.d_vad,
        p=s.p, s=s.s, r=s.r, grade=s.grade.value,
        flags=sorted(record.flags),
    )


def _run_summary(result: RunResult) -> RunSummary:
    peak = result.peak_sample
    return RunSummary(
        steps=len(result.records),
        seed=result.seed,
        peak_r=peak.r,
        peak_grade=peak.grade.value,
        peak_t=peak.t,
        peak_d_vod=result.peak_d_vod,
    )


def _signature_series(request: SignatureRequest) -> list[tuple[float, float]]:
    try:
        kind = make_fault_kind(request.kind, dict(request.params))
        if request.dt <= 0 or request.horizon < request.dt:
            raise ConfigError("signature needs dt > 0 and horizon >= dt")
        if request.t0 < 0:
            raise ConfigError("signature t0 must be >= 0")
        sensor_range = SensorRange(request.range_min, request.range_max)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    rng = None if request.seed is None else Random(request.seed)
    return vod_signature(
        kind,
        horizon=request.horizon,
        t0=request.t0,
        dt=request.dt,
        baseline=request.baseline,
        sensor_range=sensor_range,
        rng=rng,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title=_TOOL,
        version=VERSION,
        description="Abnormal-situation conflict simulation over HTTP.",
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", tool=_TOOL, version=VERSION)

    @app.post("/scenario/validate", response_model=ValidateResponse)
    def validate_scenario(request: ValidateRequest) -> ValidateResponse:
        try:
            config, warnings = parse_scenario_with_warnings(
                request.scenario, strict=request.strict
            )
        except ConfigError as exc:
            return ValidateResponse(valid=False, errors=[str(exc)])
        return ValidateResponse(
            valid=True,
            warnings=warnings,
            normalized=serialize_scenario(config),
            steps=config.clock.steps,
            variables=config.process.n,
            faults=len(config.faults),
        )

    @app.post("/scenario/run", response_model=RunResponse,
              response_model_exclude_none=True)
    def run_endpoint(request: RunRequest) -> RunResponse:
        try:
            config = parse_scenario(request.scenario)
            result = run_scenario(config, seed_override=request.seed)
        except (ConfigError, CompositionAmbiguityError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except SimulationDivergenceError as exc:
            raise HTTPException(
                status_code=409,
                detail=f"simulation failed at step {exc.step} "
                       f"(t={exc.t:g}): {exc}",
            ) from None
        records = None
        if request.include_records:
            records = [_record_model(rec) for rec in result.records]
        return RunResponse(
            summary=_run_summary(result),
            records=records,
            manifest=manifest_mapping(
                config, result.seed, request.seed is not None
            ),
        )

    @app.post("/scenario/sweep", response_model=SweepResponse)
    def sweep_endpoint(request: SweepRequest) -> SweepResponse:
        try:
            config = parse_scenario(request.scenario)
            points = run_sweep(config, request.param, list(request.values))
        except (ConfigError, CompositionAmbiguityError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except SimulationDivergenceError as exc:
            raise HTTPException(
                status_code=409,
                detail=f"simulation failed at step {exc.step} "
                       f"(t={exc.t:g}): {exc}",
            ) from None
        rows = []
        for point in points:
            peak = point.result.peak_sample
            rows.append(SweepRow(
                value=point.value,
                seed=point.seed,
                peak_d_vod=point.result.peak_d_vod,
                peak_r=peak.r,
                grade=peak.grade.value,
            ))
        return SweepResponse(param=request.param, rows=rows)

    @app.get("/faults", response_model=FaultCatalogResponse)
    def fault_catalog() -> FaultCatalogResponse:
        return FaultCatalogResponse(kinds=list(_FAULT_CATALOG))

    @app.post("/signature", response_model=SignatureResponse)
    def signature(request: SignatureRequest) -> SignatureResponse:
        series = _signature_series(request)
        return SignatureResponse(
            kind=request.kind,
            t=[point[0] for point in series],
            vod=[point[1] for point in series],
        )

    @app.post("/signature/svg")
    def signature_svg(request: SignatureRequest) -> Response:
        series = _signature_series(request)
        svg = render_line_svg(
            series,
            title="Observation difference under "
                  + request.kind.replace("_", " "),
        )
        return Response(content=svg, media_type="image/svg+xml")

    return app


app = create_app()

"""Scenario documents: parsing, validation, defaulting, and serialization.

A scenario is a single YAML document with nested sections. Only the clock
and the process are mandatory; every other section falls back to documented
defaults, and serialization always writes the fully normalized form so a
parsed config echoes its defaults back. parse -> serialize -> parse is the
identity on valid documents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import yaml

from .errors import ConfigError
from .faults import (
    Bias,
    Cyclic,
    Delay,
    DelayMode,
    Drift,
    FaultChannel,
    FaultKind,
    FaultSpec,
    SensorRange,
    make_fault_kind,
)
from .metrics import InterpretationRule
from .process import (
    HumanPolicy,
    HumanPolicyKind,
    PidParams,
    ProcessModel,
    SimClock,
)
from .risk import AggregateRule, GradeScale, RiskConfig, RiskParams

SCHEMA_VERSION = 1


class ActingParty(str, Enum):
    AI = "ai"
    HUMAN = "human"
    BLEND = "blend"


class VodMetric(str, Enum):
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully validated scenario: every section present, every default filled."""

    clock: SimClock
    process: ProcessModel
    pid: PidParams
    human: HumanPolicy
    sensor_ranges: tuple[SensorRange, ...]
    faults: tuple[FaultSpec, ...]
    risk: RiskConfig
    grades: GradeScale
    acting_party: ActingParty
    blend_weight: float
    interpretation: InterpretationRule
    vod_metric: VodMetric
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        n = self.process.n
        if len(self.sensor_ranges) != n:
            raise ConfigError(
                f"sensor_ranges lists {len(self.sensor_ranges)} entries "
                f"but the process has {n} variables"
            )
        for i, spec in enumerate(self.faults):
            if spec.variable_index >= n:
                raise ConfigError(
                    f"faults[{i}] ({spec.kind.name}): variable index "
                    f"{spec.variable_index} out of range for {n} variables"
                )
        if self.interpretation.variable_index >= n:
            raise ConfigError(
                f"interpretation.variable {self.interpretation.variable_index} "
                f"out of range for {n} variables"
            )
        if not 0.0 <= self.blend_weight <= 1.0:
            raise ConfigError("blend_weight must lie in [0, 1]")
        if self.clock.dt > self.process.time_constant:
            raise ConfigError(
                "clock.dt must not exceed process.time_constant "
                "(forward-Euler stability)"
            )
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(
                f"unsupported schema_version {self.schema_version}; "
                f"this tool reads version {SCHEMA_VERSION}"
            )


_TOP_KEYS = {
    "schema_version", "clock", "process", "pid", "human", "sensor_ranges",
    "faults", "risk", "grades", "acting_party", "blend_weight",
    "interpretation", "vod_metric",
}
_SECTION_KEYS = {
    "clock": {"dt", "duration", "seed"},
    "process": {"gain", "time_constant", "initial_values", "n", "actuators"},
    "pid": {"kp", "ki", "kd", "setpoint", "output_min", "output_max"},
    "human": {"kind", "parameters", "reaction_delay_steps"},
    "risk": {"vod", "vid", "vad", "aggregate"},
    "grades": {"thresholds"},
    "interpretation": {"variable", "boundaries", "temperature"},
}
_FAULT_KEYS = {"kind", "channel", "variable", "t0", "t_end", "params"}
_RANGE_KEYS = {"min", "max"}
_RISK_PARAM_KEYS = {"alpha", "beta", "d_max"}


def _as_float(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"{where}: must be finite, got {value!r}")
    return v


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _as_mapping(value: Any, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(value).__name__}")
    return value


def _check_keys(mapping: dict, allowed: set[str], where: str,
                strict: bool, warnings: list[str]) -> None:
    unknown = sorted(set(mapping) - allowed)
    for key in unknown:
        message = f"unknown key {where}.{key}" if where else f"unknown key {key}"
        if strict:
            raise ConfigError(message)
        warnings.append(message)


def _parse_enum(enum_cls, value: Any, where: str):
    try:
        return enum_cls(value)
    except ValueError:
        valid = ", ".join(member.value for member in enum_cls)
        raise ConfigError(f"{where}: {value!r} is not one of: {valid}") from None


def _parse_risk_params(raw: Any, where: str, strict: bool,
                       warnings: list[str]) -> RiskParams:
    section = _as_mapping(raw, where)
    _check_keys(section, _RISK_PARAM_KEYS, where, strict, warnings)
    kwargs = {}
    for key in ("alpha", "beta", "d_max"):
        if key in section:
            kwargs[key] = _as_float(section[key], f"{where}.{key}")
    return RiskParams(**kwargs)


def _parse_fault(raw: Any, index: int, strict: bool,
                 warnings: list[str]) -> FaultSpec:
    where = f"faults[{index}]"
    section = _as_mapping(raw, where)
    _check_keys(section, _FAULT_KEYS, where, strict, warnings)
    for required in ("kind", "channel", "t0"):
        if required not in section:
            raise ConfigError(f"{where}: missing required key {required!r}")
    kind = make_fault_kind(str(section["kind"]), _as_mapping(section.get("params"),
                                                             f"{where}.params"))
    channel = _parse_enum(FaultChannel, section["channel"], f"{where}.channel")
    t_end = section.get("t_end")
    try:
        return FaultSpec(
            kind=kind,
            channel=channel,
            variable_index=_as_int(section.get("variable", 0), f"{where}.variable"),
            t0=_as_float(section["t0"], f"{where}.t0"),
            t_end=None if t_end is None else _as_float(t_end, f"{where}.t_end"),
        )
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_scenario_with_warnings(
    text: str, strict: bool = False
) -> tuple[ScenarioConfig, list[str]]:
    """Parse a YAML scenario document; returns the config and any
    unknown-key warnings (which become errors under strict)."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ConfigError(
                f"syntax error at line {mark.line + 1}, column {mark.column + 1}: "
                f"{getattr(exc, 'problem', exc)}"
            ) from None
        raise ConfigError(f"syntax error: {exc}") from None
    if raw is None:
        raise ConfigError("empty scenario document")
    if not isinstance(raw, dict):
        raise ConfigError("scenario document must be a mapping")

    warnings: list[str] = []
    config = parse_scenario_mapping(raw, strict=strict, warnings=warnings)
    return config, warnings


def parse_scenario(text: str, strict: bool = False) -> ScenarioConfig:
    """Parse a YAML scenario document into a validated ScenarioConfig."""
    config, _warnings = parse_scenario_with_warnings(text, strict=strict)
    return config


def parse_scenario_mapping(
    raw: dict, strict: bool = False, warnings: Optional[list[str]] = None
) -> ScenarioConfig:
    """Validate an already-loaded scenario mapping."""
    if warnings is None:
        warnings = []
    _check_keys(raw, _TOP_KEYS, "", strict, warnings)

    schema_version = _as_int(raw.get("schema_version", SCHEMA_VERSION),
                             "schema_version")

    if "clock" not in raw:
        raise ConfigError("missing required section: clock")
    clock_raw = _as_mapping(raw["clock"], "clock")
    _check_keys(clock_raw, _SECTION_KEYS["clock"], "clock", strict, warnings)
    for required in ("dt", "duration"):
        if required not in clock_raw:
            raise ConfigError(f"clock: missing required key {required!r}")
    clock = SimClock(
        dt=_as_float(clock_raw["dt"], "clock.dt"),
        duration=_as_float(clock_raw["duration"], "clock.duration"),
        seed=_as_int(clock_raw.get("seed", 0), "clock.seed"),
    )

    if "process" not in raw:
        raise ConfigError("missing required section: process")
    proc_raw = _as_mapping(raw["process"], "process")
    _check_keys(proc_raw, _SECTION_KEYS["process"], "process", strict, warnings)
    for required in ("gain", "time_constant"):
        if required not in proc_raw:
            raise ConfigError(f"process: missing required key {required!r}")
    if "initial_values" in proc_raw:
        ivs = proc_raw["initial_values"]
        if not isinstance(ivs, (list, tuple)) or not ivs:
            raise ConfigError("process.initial_values must be a non-empty list")
        initial = tuple(_as_float(v, f"process.initial_values[{i}]")
                        for i, v in enumerate(ivs))
        if "n" in proc_raw and _as_int(proc_raw["n"], "process.n") != len(initial):
            raise ConfigError(
                f"process.n ({proc_raw['n']}) disagrees with "
                f"initial_values length ({len(initial)})"
            )
    elif "n" in proc_raw:
        count = _as_int(proc_raw["n"], "process.n")
        if count < 1:
            raise ConfigError("process.n must be >= 1")
        initial = (0.0,) * count
    else:
        raise ConfigError("process: provide initial_values (or n for all-zero start)")
    process = ProcessModel(
        gain=_as_float(proc_raw["gain"], "process.gain"),
        time_constant=_as_float(proc_raw["time_constant"], "process.time_constant"),
        initial_values=initial,
        actuators=_as_int(proc_raw.get("actuators", 1), "process.actuators"),
    )

    pid_raw = _as_mapping(raw.get("pid"), "pid")
    _check_keys(pid_raw, _SECTION_KEYS["pid"], "pid", strict, warnings)
    pid = PidParams(**{
        key: _as_float(pid_raw[key], f"pid.{key}")
        for key in _SECTION_KEYS["pid"] if key in pid_raw
    })

    human_raw = _as_mapping(raw.get("human"), "human")
    _check_keys(human_raw, _SECTION_KEYS["human"], "human", strict, warnings)
    params_raw = _as_mapping(human_raw.get("parameters"), "human.parameters")
    human = HumanPolicy(
        kind=_parse_enum(HumanPolicyKind, human_raw.get("kind", "mirror_pid"),
                         "human.kind"),
        parameters={str(k): _as_float(v, f"human.parameters.{k}")
                    for k, v in params_raw.items()},
        reaction_delay_steps=_as_int(human_raw.get("reaction_delay_steps", 0),
                                     "human.reaction_delay_steps"),
    )

    if "sensor_ranges" in raw:
        ranges_raw = raw["sensor_ranges"]
        if not isinstance(ranges_raw, (list, tuple)):
            raise ConfigError("sensor_ranges must be a list of {min, max} mappings")
        ranges = []
        for i, entry in enumerate(ranges_raw):
            where = f"sensor_ranges[{i}]"
            mapping = _as_mapping(entry, where)
            _check_keys(mapping, _RANGE_KEYS, where, strict, warnings)
            kwargs = {key: _as_float(mapping[key], f"{where}.{key}")
                      for key in _RANGE_KEYS if key in mapping}
            try:
                ranges.append(SensorRange(**kwargs))
            except ConfigError as exc:
                raise ConfigError(f"{where}: {exc}") from None
        sensor_ranges = tuple(ranges)
    else:
        sensor_ranges = tuple(SensorRange() for _ in range(process.n))

    faults_raw = raw.get("faults") or []
    if not isinstance(faults_raw, (list, tuple)):
        raise ConfigError("faults must be a list")
    faults = tuple(_parse_fault(entry, i, strict, warnings)
                   for i, entry in enumerate(faults_raw))

    risk_raw = _as_mapping(raw.get("risk"), "risk")
    _check_keys(risk_raw, _SECTION_KEYS["risk"], "risk", strict, warnings)
    risk_config = RiskConfig(
        vod=_parse_risk_params(risk_raw.get("vod"), "risk.vod", strict, warnings),
        vid=_parse_risk_params(risk_raw.get("vid"), "risk.vid", strict, warnings),
        vad=_parse_risk_params(risk_raw.get("vad"), "risk.vad", strict, warnings),
        aggregate=_parse_enum(AggregateRule, risk_raw.get("aggregate",
                                                          "max_normalized"),
                              "risk.aggregate"),
    )

    if "grades" in raw:
        grades_raw = _as_mapping(raw["grades"], "grades")
        _check_keys(grades_raw, _SECTION_KEYS["grades"], "grades", strict, warnings)
        thresholds = grades_raw.get("thresholds")
        if (not isinstance(thresholds, (list, tuple))) or len(thresholds) != 3:
            raise ConfigError("grades.thresholds must list exactly three values")
        grades = GradeScale(thresholds=tuple(
            _as_float(v, f"grades.thresholds[{i}]")
            for i, v in enumerate(thresholds)
        ))
    else:
        widest = max(risk_config.vod.d_max, risk_config.vid.d_max,
                     risk_config.vad.d_max)
        grades = GradeScale.from_d_max(widest)

    acting_party = _parse_enum(ActingParty, raw.get("acting_party", "ai"),
                               "acting_party")
    blend_weight = _as_float(raw.get("blend_weight", 0.5), "blend_weight")

    interp_raw = _as_mapping(raw.get("interpretation"), "interpretation")
    _check_keys(interp_raw, _SECTION_KEYS["interpretation"], "interpretation",
                strict, warnings)
    boundaries_raw = interp_raw.get("boundaries", [0.5])
    if not isinstance(boundaries_raw, (list, tuple)) or not boundaries_raw:
        raise ConfigError("interpretation.boundaries must be a non-empty list")
    interpretation = InterpretationRule(
        boundaries=tuple(_as_float(b, f"interpretation.boundaries[{i}]")
                         for i, b in enumerate(boundaries_raw)),
        variable_index=_as_int(interp_raw.get("variable", 0),
                               "interpretation.variable"),
        temperature=_as_float(interp_raw.get("temperature", 1.0),
                              "interpretation.temperature"),
    )

    vod_metric = _parse_enum(VodMetric, raw.get("vod_metric", "euclidean"),
                             "vod_metric")

    return ScenarioConfig(
        clock=clock,
        process=process,
        pid=pid,
        human=human,
        sensor_ranges=sensor_ranges,
        faults=faults,
        risk=risk_config,
        grades=grades,
        acting_party=acting_party,
        blend_weight=blend_weight,
        interpretation=interpretation,
        vod_metric=vod_metric,
        schema_version=schema_version,
    )


def _kind_to_mapping(kind: FaultKind) -> tuple[str, dict]:
    if isinstance(kind, Bias):
        return kind.name, {"delta": kind.delta, "sign": kind.sign}
    if isinstance(kind, Cyclic):
        return kind.name, {"amplitude": kind.amplitude, "period": kind.period,
                           "noise_std": kind.noise_std}
    if isinstance(kind, Drift):
        return kind.name, {"slope": kind.slope}
    if isinstance(kind, Delay):
        return kind.name, {"tau": kind.tau, "mode": kind.mode.value,
                           "error_amplitude": kind.error_amplitude}
    return kind.name, {}


def scenario_to_mapping(config: ScenarioConfig) -> dict:
    """Plain mapping form of a config, in canonical key order."""
    faults = []
    for spec in config.faults:
        name, params = _kind_to_mapping(spec.kind)
        entry: dict[str, Any] = {
            "kind": name,
            "channel": spec.channel.value,
            "variable": spec.variable_index,
            "t0": spec.t0,
        }
        if spec.t_end is not None:
            entry["t_end"] = spec.t_end
        if params:
            entry["params"] = params
        faults.append(entry)
    return {
        "schema_version": config.schema_version,
        "clock": {
            "dt": config.clock.dt,
            "duration": config.clock.duration,
            "seed": config.clock.seed,
        },
        "process": {
            "gain": config.process.gain,
            "time_constant": config.process.time_constant,
            "initial_values": list(config.process.initial_values),
            "actuators": config.process.actuators,
        },
        "pid": {
            "kp": config.pid.kp,
            "ki": config.pid.ki,
            "kd": config.pid.kd,
            "setpoint": config.pid.setpoint,
            "output_min": config.pid.output_min,
            "output_max": config.pid.output_max,
        },
        "human": {
            "kind": config.human.kind.value,
            "parameters": dict(sorted(config.human.parameters.items())),
            "reaction_delay_steps": config.human.reaction_delay_steps,
        },
        "sensor_ranges": [
            {"min": r.min, "max": r.max} for r in config.sensor_ranges
        ],
        "faults": faults,
        "risk": {
            "vod": {"alpha": config.risk.vod.alpha, "beta": config.risk.vod.beta,
                    "d_max": config.risk.vod.d_max},
            "vid": {"alpha": config.risk.vid.alpha, "beta": config.risk.vid.beta,
                    "d_max": config.risk.vid.d_max},
            "vad": {"alpha": config.risk.vad.alpha, "beta": config.risk.vad.beta,
                    "d_max": config.risk.vad.d_max},
            "aggregate": config.risk.aggregate.value,
        },
        "grades": {"thresholds": list(config.grades.thresholds)},
        "acting_party": config.acting_party.value,
        "blend_weight": config.blend_weight,
        "interpretation": {
            "variable": config.interpretation.variable_index,
            "boundaries": list(config.interpretation.boundaries),
            "temperature": config.interpretation.temperature,
        },
        "vod_metric": config.vod_metric.value,
    }


def serialize_scenario(config: ScenarioConfig) -> str:
    """Normalized YAML form with every default spelled out."""
    return yaml.safe_dump(scenario_to_mapping(config), sort_keys=False,
                          default_flow_style=False)

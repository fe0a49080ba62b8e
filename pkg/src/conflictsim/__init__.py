"""Deterministic simulator for observation, interpretation, and action
conflicts between an automated controller and a human supervisor.

A scenario drives a small first-order plant while injected faults distort
what each party sees. Per timestep the simulator scores how far apart the
two parties are in what they observe, how they classify it, and what they
do about it, then turns the dominant distance into a probability, a
severity, a risk value, and a discrete grade.
"""

from .engine import (
    RunResult,
    SweepPoint,
    TimeSeriesRecord,
    derive_sweep_seed,
    run_scenario,
    run_sweep,
)
from .errors import (
    CompositionAmbiguityError,
    ConfigError,
    ConflictSimError,
    DimensionMismatchError,
    SimulationDivergenceError,
)
from .faults import (
    Bias,
    ChannelComposer,
    Cyclic,
    Delay,
    DelayMode,
    Drift,
    FaultChannel,
    FaultSpec,
    OpenCircuit,
    SensorRange,
    ShortCircuit,
    Stuck,
    compose_channel,
    make_fault_kind,
    vod_signature,
)
from .metrics import (
    InterpretationRule,
    classify,
    d_vad,
    d_vid_cross_entropy,
    d_vod_euclidean,
    d_vod_manhattan,
    interpret_ai,
    interpret_human,
    softmax,
)
from .process import (
    HumanPolicy,
    HumanPolicyKind,
    PidParams,
    ProcessModel,
    SimClock,
    TrueState,
    step_process,
)
from .risk import (
    AggregateRule,
    ConflictSample,
    Grade,
    GradeScale,
    RiskConfig,
    RiskParams,
    assess,
    conflict_probability,
    regularized_incomplete_beta,
    risk,
    severity,
)
from .scenario import (
    ActingParty,
    ScenarioConfig,
    VodMetric,
    parse_scenario,
    parse_scenario_with_warnings,
    serialize_scenario,
)
from .version import VERSION

__version__ = VERSION

__all__ = [
    "ActingParty",
    "AggregateRule",
    "Bias",
    "ChannelComposer",
    "CompositionAmbiguityError",
    "ConfigError",
    "ConflictSample",
    "ConflictSimError",
    "Cyclic",
    "Delay",
    "DelayMode",
    "DimensionMismatchError",
    "Drift",
    "FaultChannel",
    "FaultSpec",
    "Grade",
    "GradeScale",
    "HumanPolicy",
    "HumanPolicyKind",
    "InterpretationRule",
    "OpenCircuit",
    "PidParams",
    "ProcessModel",
    "RiskConfig",
    "RiskParams",
    "RunResult",
    "ScenarioConfig",
    "SensorRange",
    "ShortCircuit",
    "SimClock",
    "SimulationDivergenceError",
    "Stuck",
    "SweepPoint",
    "TimeSeriesRecord",
    "TrueState",
    "VERSION",
    "VodMetric",
    "assess",
    "classify",
    "compose_channel",
    "conflict_probability",
    "d_vad",
    "d_vid_cross_entropy",
    "d_vod_euclidean",
    "d_vod_manhattan",
    "derive_sweep_seed",
    "interpret_ai",
    "interpret_human",
    "make_fault_kind",
    "parse_scenario",
    "parse_scenario_with_warnings",
    "regularized_incomplete_beta",
    "risk",
    "run_scenario",
    "run_sweep",
    "serialize_scenario",
    "severity",
    "softmax",
    "step_process",
    "vod_signature",
]

"""Abnormal-situation models and their composition onto observation channels.

Seven fault expressions cover the classic sensor failures and their attack /
operator-error twins: open circuit (reads 0), short circuit (reads the range
ceiling, the finite stand-in for an off-scale-high signal), stuck (frozen at
the onset reading), bias (+/- a constant), cyclic (a sinusoid, optionally
noisy), drift (a linear ramp), and delay (either a shrinking error window or
a pure transport delay).

Each fault is bound to one channel. The automated observer's channel carries
sensor faults and cyberattacks; the human observer's channel carries operator
errors and sabotage. Within a channel, additive faults accumulate on top of
the true value and overriding faults (open/short circuit, stuck, pure delay)
then replace the running value outright: a dead sensor reads 0 no matter
what bias was riding on it. The composed reading is finally clamped to the
sensor range.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Callable, NamedTuple, Optional, Sequence, Union

from .errors import CompositionAmbiguityError, ConfigError

# Flags carried on a composed sample for reporting.
FLAG_SHORT_CIRCUIT_INF = "short_circuit_infinite"
FLAG_DELAY_HISTORY_CLAMPED = "delay_history_clamped"

_NO_FLAGS: frozenset[str] = frozenset()


@dataclass(frozen=True)
class SensorRange:
    """Finite interval a composed observation is clamped to."""

    min: float = -1e6
    max: float = 1e6

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigError("sensor range bounds must be finite")
        if self.min >= self.max:
            raise ConfigError("sensor range min must be < max")

    def clamp(self, value: float) -> float:
        return min(max(value, self.min), self.max)


class FaultChannel(str, Enum):
    AI_SENSOR_FAULT = "ai_sensor_fault"
    AI_CYBERATTACK = "ai_cyberattack"
    HUMAN_ERROR = "human_error"
    HUMAN_SABOTAGE = "human_sabotage"

    @property
    def is_ai(self) -> bool:
        return self in (FaultChannel.AI_SENSOR_FAULT, FaultChannel.AI_CYBERATTACK)


class DelayMode(str, Enum):
    FADING_ERROR = "fading_error"
    PURE_DELAY = "pure_delay"


class FaultReading(NamedTuple):
    value: float
    flags: frozenset[str]


class FaultContext(NamedTuple):
    """Everything a single fault expression may consume.

    history is the true-value record up to and including t, as parallel
    (times, values) sequences; onset_value is the channel reading captured
    when a stuck fault first became active.
    """

    x_n: float
    t: float
    t0: float
    sensor_range: SensorRange
    onset_value: Optional[float]
    history_t: Sequence[float]
    history_x: Sequence[float]
    rng: Optional[Random]


@dataclass(frozen=True)
class OpenCircuit:
    """Signal lost: the channel reads 0."""

    name = "open_circuit"
    override = True

    def reading(self, ctx: FaultContext) -> FaultReading:
        return FaultReading(0.0, _NO_FLAGS)


@dataclass(frozen=True)
class ShortCircuit:
    """Signal railed high: reads the sensor-range maximum, flagged as infinite."""

    name = "short_circuit"
    override = True

    def reading(self, ctx: FaultContext) -> FaultReading:
        return FaultReading(ctx.sensor_range.max, frozenset((FLAG_SHORT_CIRCUIT_INF,)))


@dataclass(frozen=True)
class Stuck:
    """Channel frozen at the value it carried when the fault set in."""

    name = "stuck"
    override = True

    def reading(self, ctx: FaultContext) -> FaultReading:
        if ctx.onset_value is None:
            raise ValueError("stuck fault evaluated without an onset value")
        return FaultReading(ctx.onset_value, _NO_FLAGS)


@dataclass(frozen=True)
class Bias:
    """Constant offset: x_n +/- delta."""

    delta: float
    sign: str = "+"
    name = "bias"
    override = False

    def __post_init__(self):
        if self.delta < 0:
            raise ConfigError("bias delta must be >= 0")
        if self.sign not in ("+", "-"):
            raise ConfigError("bias sign must be '+' or '-'")

    def reading(self, ctx: FaultContext) -> FaultReading:
        offset = self.delta if self.sign == "+" else -self.delta
        return FaultReading(ctx.x_n + offset, _NO_FLAGS)


@dataclass(frozen=True)
class Cyclic:
    """Sinusoidal disturbance, plus optional seeded gaussian noise."""

    amplitude: float
    period: float
    noise_std: float = 0.0
    name = "cyclic"
    override = False

    def __post_init__(self):
        if self.period <= 0:
            raise ConfigError("cyclic period must be > 0")
        if self.noise_std < 0:
            raise ConfigError("cyclic noise_std must be >= 0")

    def reading(self, ctx: FaultContext) -> FaultReading:
        e = self.amplitude * math.sin(2.0 * math.pi * (ctx.t - ctx.t0) / self.period)
        if self.noise_std > 0.0:
            if ctx.rng is None:
                raise ValueError("cyclic fault with noise_std > 0 requires an rng")
            e += ctx.rng.gauss(0.0, self.noise_std)
        return FaultReading(ctx.x_n + e, _NO_FLAGS)


@dataclass(frozen=True)
class Drift:
    """Error ramping linearly from the onset: slope * (t - t0)."""

    slope: float
    name = "drift"
    override = False

    def reading(self, ctx: FaultContext) -> FaultReading:
        return FaultReading(ctx.x_n + self.slope * (ctx.t - ctx.t0), _NO_FLAGS)


@dataclass(frozen=True)
class Delay:
    """Delayed response, in one of two modes.

    fading_error adds a shrinking error error_amplitude * (1 - (t-t0)/tau)
    inside the window [t0, t0+tau] and nothing afterward. pure_delay replays
    the true value from tau seconds ago (zero-order hold on the recorded
    history; the earliest record is held, and flagged, when the lookback
    undershoots it).
    """

    tau: float
    mode: DelayMode = DelayMode.FADING_ERROR
    error_amplitude: float = 1.0

    name = "delay"

    def __post_init__(self):
        if self.tau < 0:
            raise ConfigError("delay tau must be >= 0")

    @property
    def override(self) -> bool:
        return self.mode is DelayMode.PURE_DELAY

    def reading(self, ctx: FaultContext) -> FaultReading:
        if self.mode is DelayMode.FADING_ERROR:
            elapsed = ctx.t - ctx.t0
            if self.tau > 0.0 and elapsed <= self.tau:
                e = self.error_amplitude * (1.0 - elapsed / self.tau)
                return FaultReading(ctx.x_n + e, _NO_FLAGS)
            return FaultReading(ctx.x_n, _NO_FLAGS)
        # pure transport delay
        if self.tau == 0.0:
            return FaultReading(ctx.x_n, _NO_FLAGS)
        query = max(0.0, ctx.t - self.tau)
        times, values = ctx.history_t, ctx.history_x
        if not times:
            raise ValueError("pure delay fault evaluated without history")
        idx = bisect.bisect_right(times, query) - 1
        if idx < 0:
            return FaultReading(values[0], frozenset((FLAG_DELAY_HISTORY_CLAMPED,)))
        return FaultReading(values[idx], _NO_FLAGS)


FaultKind = Union[OpenCircuit, ShortCircuit, Stuck, Bias, Cyclic, Drift, Delay]

FAULT_KIND_NAMES = (
    "open_circuit",
    "short_circuit",
    "stuck",
    "bias",
    "cyclic",
    "drift",
    "delay",
)

_KIND_CLASSES = {
    "open_circuit": OpenCircuit,
    "short_circuit": ShortCircuit,
    "stuck": Stuck,
    "bias": Bias,
    "cyclic": Cyclic,
    "drift": Drift,
    "delay": Delay,
}


def make_fault_kind(name: str, params: Optional[dict] = None) -> FaultKind:
    """Build a fault kind from its config name and parameter mapping."""
    cls = _KIND_CLASSES.get(name)
    if cls is None:
        raise ConfigError(
            f"unknown fault kind {name!r}; valid kinds: {', '.join(FAULT_KIND_NAMES)}"
        )
    params = dict(params or {})
    if name == "delay" and "mode" in params:
        try:
            params["mode"] = DelayMode(params["mode"])
        except ValueError:
            raise ConfigError(
                f"unknown delay mode {params['mode']!r}; valid modes: "
                f"{', '.join(m.value for m in DelayMode)}"
            ) from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for fault kind {name!r}: {exc}") from None


@dataclass(frozen=True)
class FaultSpec:
    """One fault bound to a channel, variable, and activity window [t0, t_end)."""

    kind: FaultKind
    channel: FaultChannel
    variable_index: int
    t0: float
    t_end: Optional[float] = None

    def __post_init__(self):
        if self.t0 < 0:
            raise ConfigError(f"fault {self.kind.name}: t0 must be >= 0")
        if self.t_end is not None and self.t_end <= self.t0:
            raise ConfigError(
                f"fault {self.kind.name}: t_end ({self.t_end}) must be > t0 ({self.t0})"
            )
        if self.variable_index < 0:
            raise ConfigError(f"fault {self.kind.name}: variable index must be >= 0")

    def active_at(self, t: float) -> bool:
        return t >= self.t0 and (self.t_end is None or t < self.t_end)


def apply_fault(
    kind: FaultKind,
    *,
    x_n: float,
    t: float,
    t0: float,
    sensor_range: SensorRange,
    onset_value: Optional[float] = None,
    history_t: Sequence[float] = (),
    history_x: Sequence[float] = (),
    rng: Optional[Random] = None,
) -> FaultReading:
    """Evaluate one fault expression in isolation at time t >= t0.

    Returns the observed value the faulted channel would show if this were
    the only fault present, with any reporting flags it raised.
    """
    if t < t0:
        raise ValueError(f"fault evaluated before its onset (t={t} < t0={t0})")
    ctx = FaultContext(
        x_n=x_n,
        t=t,
        t0=t0,
        sensor_range=sensor_range,
        onset_value=onset_value,
        history_t=history_t,
        history_x=history_x,
        rng=rng,
    )
    return kind.reading(ctx)


@dataclass
class ChannelComposer:
    """Stateful composer for one observer's channel across a run.

    Tracks the true-value history (for transport delays) and the captured
    onset readings of stuck faults; everything else is evaluated pure per
    step. observe() must be called once per timestep in time order.
    """

    faults: Sequence[FaultSpec]
    ranges: Sequence[SensorRange]
    rng: Optional[Random] = None
    _history_t: list[float] = field(default_factory=list)
    _history_x: list[list[float]] = field(default_factory=list)
    _onsets: dict[int, float] = field(default_factory=dict)

    def observe(self, t: float, x_n: Sequence[float]) -> tuple[list[float], frozenset[str]]:
        """Compose all active faults onto the true vector at time t."""
        self._history_t.append(t)
        self._history_x.append(list(x_n))
        n = len(x_n)

        active = [
            (idx, spec) for idx, spec in enumerate(self.faults) if spec.active_at(t)
        ]
        for _idx, spec in active:
            if spec.variable_index >= n:
                raise ConfigError(
                    f"fault {spec.kind.name} targets variable {spec.variable_index} "
                    f"but only {n} exist"
                )

        values = list(x_n)
        flags: set[str] = set()

        # Additive faults accumulate first, in declaration order.
        for fault_idx, spec in active:
            if spec.kind.override:
                continue
            var = spec.variable_index
            reading = spec.kind.reading(self._context(fault_idx, spec, t, x_n[var], var))
            values[var] += reading.value - x_n[var]
            flags |= reading.flags

        # Overriding faults then replace the running value outright.
        override_owner: dict[int, FaultSpec] = {}
        for fault_idx, spec in active:
            if not spec.kind.override:
                continue
            var = spec.variable_index
            prior = override_owner.get(var)
            if prior is not None:
                raise CompositionAmbiguityError(
                    f"overriding faults {prior.kind.name!r} and {spec.kind.name!r} "
                    f"both claim variable {var} at t={t}"
                )
            override_owner[var] = spec
            if isinstance(spec.kind, Stuck) and fault_idx not in self._onsets:
                # The sensor freezes whatever the channel carried at onset,
                # additive contributions included.
                self._onsets[fault_idx] = values[var]
            reading = spec.kind.reading(self._context(fault_idx, spec, t, x_n[var], var))
            values[var] = reading.value
            flags |= reading.flags

        clamped = [self.ranges[i].clamp(v) for i, v in enumerate(values)]
        return clamped, frozenset(flags)

    def _context(
        self, fault_idx: int, spec: FaultSpec, t: float, x_n_var: float, var: int
    ) -> FaultContext:
        return FaultContext(
            x_n=x_n_var,
            t=t,
            t0=spec.t0,
            sensor_range=self.ranges[var],
            onset_value=self._onsets.get(fault_idx),
            history_t=self._history_t,
            history_x=_VariableColumn(self._history_x, var),
            rng=self.rng,
        )


class _VariableColumn(Sequence[float]):
    """Read-only view of one variable's column in the vector history."""

    __slots__ = ("_rows", "_var")

    def __init__(self, rows: list[list[float]], var: int):
        self._rows = rows
        self._var = var

    def __len__(self) -> int:
        return len(self._rows)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return [row[self._var] for row in self._rows[idx]]
        return self._rows[idx][self._var]


def compose_channel(
    x_n: Sequence[float],
    faults: Sequence[FaultSpec],
    t: float,
    ranges: Sequence[SensorRange],
    rng: Optional[Random] = None,
    *,
    history_t: Sequence[float] = (),
    history_x: Sequence[Sequence[float]] = (),
    onset_values: Optional[dict[int, float]] = None,
) -> tuple[list[float], frozenset[str]]:
    """One-shot channel composition for callers that manage state themselves.

    Equivalent to a single ChannelComposer.observe() with the supplied prior
    history and stuck-onset captures.
    """
    composer = ChannelComposer(faults=faults, ranges=ranges, rng=rng)
    composer._history_t = [float(ht) for ht in history_t]
    composer._history_x = [list(row) for row in history_x]
    composer._onsets = dict(onset_values or {})
    return composer.observe(t, x_n)


def vod_signature(
    kind: FaultKind,
    *,
    horizon: float = 200.0,
    t0: float = 100.0,
    dt: float = 0.2,
    baseline: Union[float, Callable[[float], float]] = 1.0,
    sensor_range: SensorRange = SensorRange(-10.0, 10.0),
    rng: Optional[Random] = None,
) -> list[tuple[float, float]]:
    """Observation-difference trace for one fault on the automated channel.

    The human channel stays fault-free, so the trace is exactly the fault's
    contribution: zero before onset, then the shape of the expression. The
    baseline may be a constant or a callable t -> true value.
    """
    base = baseline if callable(baseline) else (lambda _t, _c=float(baseline): _c)
    spec = FaultSpec(kind=kind, channel=FaultChannel.AI_SENSOR_FAULT,
                     variable_index=0, t0=t0)
    composer = ChannelComposer(faults=(spec,), ranges=(sensor_range,), rng=rng)
    series: list[tuple[float, float]] = []
    steps = max(1, round(horizon / dt))
    for k in range(steps + 1):
        t = k * dt
        x = base(t)
        observed, _flags = composer.observe(t, (x,))
        x_h = sensor_range.clamp(x)
        series.append((t, observed[0] - x_h))
    return series

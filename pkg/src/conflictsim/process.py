"""Plant dynamics and the two decision-makers' control laws.

The plant is a bank of first-order lags advanced with forward Euler: each
process variable relaxes toward gain * u with the configured time constant.
Variable i is driven by actuator i % p, so a plant with n variables can be
wired to p <= n actuators. The automated side runs one PID channel per
actuator; the human side runs a scripted policy over its own observations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .errors import ConfigError, SimulationDivergenceError


@dataclass(frozen=True)
class ProcessModel:
    """First-order-lag plant with n observable variables and p actuators."""

    gain: float
    time_constant: float
    initial_values: tuple[float, ...]
    actuators: int = 1

    @property
    def n(self) -> int:
        return len(self.initial_values)

    def __post_init__(self):
        if self.time_constant <= 0:
            raise ConfigError("process.time_constant must be > 0")
        if len(self.initial_values) < 1:
            raise ConfigError("process.initial_values must list at least one variable")
        if not all(math.isfinite(v) for v in self.initial_values):
            raise ConfigError("process.initial_values must be finite")
        if not math.isfinite(self.gain):
            raise ConfigError("process.gain must be finite")
        if not 1 <= self.actuators <= self.n:
            raise ConfigError(
                f"process.actuators must lie in [1, {self.n}] for this plant"
            )


@dataclass(frozen=True)
class PidParams:
    kp: float = 1.0
    ki: float = 0.0
    kd: float = 0.0
    setpoint: float = 1.0
    output_min: float = -10.0
    output_max: float = 10.0

    def __post_init__(self):
        for name in ("kp", "ki", "kd", "setpoint", "output_min", "output_max"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"pid.{name} must be finite")
        if self.output_min >= self.output_max:
            raise ConfigError("pid.output_min must be < pid.output_max")


class HumanPolicyKind(str, Enum):
    MIRROR_PID = "mirror_pid"
    THRESHOLD_MANUAL = "threshold_manual"
    INACTIVE = "inactive"


@dataclass(frozen=True)
class HumanPolicy:
    """Scripted supervisor behaviour producing the human control action.

    mirror_pid runs the same PID law on the human's own observations;
    threshold_manual pushes a fixed manual output once the setpoint error
    exceeds a threshold; inactive never acts (silence is itself a corrective
    stance for a supervisor).
    """

    kind: HumanPolicyKind = HumanPolicyKind.MIRROR_PID
    parameters: dict[str, float] = field(default_factory=dict)
    reaction_delay_steps: int = 0

    def __post_init__(self):
        if self.reaction_delay_steps < 0:
            raise ConfigError("human.reaction_delay_steps must be >= 0")
        if self.kind is HumanPolicyKind.THRESHOLD_MANUAL:
            missing = {"threshold", "manual_output"} - set(self.parameters)
            if missing:
                raise ConfigError(
                    f"human policy threshold_manual requires parameters {sorted(missing)}"
                )
            if self.parameters["threshold"] < 0:
                raise ConfigError("human.parameters.threshold must be >= 0")


@dataclass(frozen=True)
class SimClock:
    dt: float
    duration: float
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError("clock.dt must be > 0")
        if not (math.isfinite(self.duration) and self.duration >= self.dt):
            raise ConfigError("clock.duration must be >= clock.dt")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("clock.seed must fit in 64 unsigned bits")

    @property
    def steps(self) -> int:
        return max(1, round(self.duration / self.dt))


@dataclass(frozen=True)
class TrueState:
    """Ground-truth process variables and the control input applied to them."""

    t: float
    x_n: tuple[float, ...]
    u_applied: tuple[float, ...]


def step_process(
    state: TrueState, u: Sequence[float], model: ProcessModel, dt: float
) -> TrueState:
    """Advance the plant one step: x' = x + dt * (gain*u - x) / time_constant.

    Raises SimulationDivergenceError when the incoming state or input is
    already non-finite, so a runaway loop aborts instead of propagating NaNs.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if not all(math.isfinite(v) for v in state.x_n):
        raise SimulationDivergenceError(
            f"non-finite process state at t={state.t}", step=-1, t=state.t
        )
    if not all(math.isfinite(v) for v in u):
        raise SimulationDivergenceError(
            f"non-finite control input at t={state.t}", step=-1, t=state.t
        )
    p = len(u)
    if p < 1:
        raise ValueError("control input must have at least one actuator")
    k = dt / model.time_constant
    g = model.gain
    new_x = tuple(x + k * (g * u[i % p] - x) for i, x in enumerate(state.x_n))
    return TrueState(t=state.t + dt, x_n=new_x, u_applied=tuple(u))


def pid_control(
    observed: float,
    params: PidParams,
    integ_state: float,
    prev_error: Optional[float],
    dt: float,
) -> tuple[float, float, float]:
    """One PID update on a single observed variable.

    Returns (u, new_integ_state, new_prev_error). The integral is frozen
    while the output is saturated (anti-windup), and the first call of a run
    (prev_error=None) contributes no derivative kick.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    e = params.setpoint - observed
    candidate = integ_state + e * dt
    de = 0.0 if prev_error is None else (e - prev_error) / dt
    raw = params.kp * e + params.ki * candidate + params.kd * de
    if raw > params.output_max:
        return params.output_max, integ_state, e
    if raw < params.output_min:
        return params.output_min, integ_state, e
    return raw, candidate, e


def human_action(
    observed: float,
    policy: HumanPolicy,
    params: PidParams,
    integ_state: float,
    prev_error: Optional[float],
    dt: float,
) -> tuple[float, float, Optional[float]]:
    """One step of the human policy on a single observed variable.

    Returns (u, new_integ_state, new_prev_error); the PID context is only
    consumed by mirror_pid, the other kinds pass it through unchanged.
    """
    if policy.kind is HumanPolicyKind.MIRROR_PID:
        return pid_control(observed, params, integ_state, prev_error, dt)
    if policy.kind is HumanPolicyKind.THRESHOLD_MANUAL:
        e = params.setpoint - observed
        if abs(e) > policy.parameters["threshold"]:
            return policy.parameters["manual_output"], integ_state, prev_error
        return 0.0, integ_state, prev_error
    if policy.kind is HumanPolicyKind.INACTIVE:
        return 0.0, integ_state, prev_error
    raise ConfigError(f"unknown human policy kind: {policy.kind!r}")

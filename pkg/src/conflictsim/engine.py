"""Simulation driver: advances the plant, both observers, both controllers,
and the per-step conflict assessment.

Per timestep, in a fixed order so seeded runs replay byte for byte:
observe the automated channel, observe the human channel (the two share one
random stream), interpret the monitored variable on each side, compute both
control vectors, score the three conflict distances, then integrate the
plant with whichever party is acting.
"""
from __future__ import annotations

import copy
import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from random import Random
from typing import Any, Optional, Sequence

from .errors import ConfigError, SimulationDivergenceError
from .faults import ChannelComposer
from .metrics import (
    d_vad,
    d_vid_cross_entropy,
    d_vod_euclidean,
    d_vod_manhattan,
    interpret_ai,
    interpret_human,
)
from .process import TrueState, human_action, pid_control, step_process
from .risk import ConflictSample, assess
from .scenario import (
    ActingParty,
    ScenarioConfig,
    VodMetric,
    parse_scenario_mapping,
    scenario_to_mapping,
)


@dataclass
class TimeSeriesRecord:
    """Everything observable about one timestep."""

    sample: ConflictSample
    x_n: tuple[float, ...]
    x_a: tuple[float, ...]
    x_h: tuple[float, ...]
    u_a: tuple[float, ...]
    u_h: tuple[float, ...]
    flags: frozenset[str]


@dataclass
class RunResult:
    """A completed run: the config it ran under, the effective seed, and
    one record per timestep."""

    config: ScenarioConfig
    seed: int
    records: list[TimeSeriesRecord]

    @property
    def peak_sample(self) -> ConflictSample:
        return max((rec.sample for rec in self.records), key=lambda s: s.r)

    @property
    def peak_r(self) -> float:
        return self.peak_sample.r

    @property
    def peak_d_vod(self) -> float:
        return max(rec.sample.d_vod for rec in self.records)


def run_scenario(
    config: ScenarioConfig, seed_override: Optional[int] = None
) -> RunResult:
    """Run one scenario to completion.

    Raises SimulationDivergenceError (carrying the step index and time) as
    soon as the plant state stops being finite.
    """
    seed = config.clock.seed if seed_override is None else seed_override
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must fit in 64 unsigned bits")

    model = config.process
    clock = config.clock
    dt = clock.dt
    n = model.n
    p = model.actuators
    rule = config.interpretation
    monitored = rule.variable_index
    distance = (d_vod_euclidean if config.vod_metric is VodMetric.EUCLIDEAN
                else d_vod_manhattan)

    rng = Random(seed)
    ai_composer = ChannelComposer(
        faults=[f for f in config.faults if f.channel.is_ai],
        ranges=config.sensor_ranges,
        rng=rng,
    )
    human_composer = ChannelComposer(
        faults=[f for f in config.faults if not f.channel.is_ai],
        ranges=config.sensor_ranges,
        rng=rng,
    )

    ai_integ = [0.0] * p
    ai_prev: list[Optional[float]] = [None] * p
    human_integ = [0.0] * p
    human_prev: list[Optional[float]] = [None] * p
    human_seen: list[list[float]] = []
    delay_steps = config.human.reaction_delay_steps

    state = TrueState(t=0.0, x_n=model.initial_values, u_applied=(0.0,) * p)
    records: list[TimeSeriesRecord] = []

    for k in range(clock.steps):
        t = k * dt
        x_a, ai_flags = ai_composer.observe(t, state.x_n)
        x_h, human_flags = human_composer.observe(t, state.x_n)

        reading_a = interpret_ai(x_a[monitored], rule)
        reading_h = interpret_human(x_h[monitored], rule)

        u_a = []
        for j in range(p):
            u, ai_integ[j], ai_prev[j] = pid_control(
                x_a[j], config.pid, ai_integ[j], ai_prev[j], dt
            )
            u_a.append(u)

        human_seen.append(x_h)
        delayed = human_seen[max(0, k - delay_steps)]
        u_h = []
        for j in range(p):
            u, human_integ[j], human_prev[j] = human_action(
                delayed[j], config.human, config.pid,
                human_integ[j], human_prev[j], dt,
            )
            u_h.append(u)

        d_obs = distance(x_a, x_h)
        if reading_a.one_hot.class_index == reading_h.one_hot.class_index:
            d_int = 0.0
        else:
            d_int = d_vid_cross_entropy(reading_a.probs, reading_h.probs)
        d_act = d_vad(u_a, u_h)

        prob, sev, r, g = assess(d_obs, d_int, d_act, config.risk, config.grades)
        records.append(TimeSeriesRecord(
            sample=ConflictSample(t=t, d_vod=d_obs, d_vid=d_int, d_vad=d_act,
                                  p=prob, s=sev, r=r, grade=g),
            x_n=state.x_n,
            x_a=tuple(x_a),
            x_h=tuple(x_h),
            u_a=tuple(u_a),
            u_h=tuple(u_h),
            flags=ai_flags | human_flags,
        ))

        if config.acting_party is ActingParty.AI:
            u_applied: Sequence[float] = u_a
        elif config.acting_party is ActingParty.HUMAN:
            u_applied = u_h
        else:
            w = config.blend_weight
            u_applied = [w * a + (1.0 - w) * h for a, h in zip(u_a, u_h)]

        try:
            state = step_process(state, u_applied, model, dt)
        except SimulationDivergenceError as exc:
            raise SimulationDivergenceError(str(exc), step=k, t=t) from None
        if not all(math.isfinite(v) for v in state.x_n):
            raise SimulationDivergenceError(
                f"process state diverged after step {k} (t={state.t:g})",
                step=k, t=state.t,
            )

    return RunResult(config=config, seed=seed, records=records)


def derive_sweep_seed(base_seed: int, index: int) -> int:
    """Independent 64-bit stream seed for sweep run number `index`."""
    digest = hashlib.blake2b(
        f"{base_seed}:{index}".encode("ascii"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


def set_mapping_path(mapping: dict, path: str, value: Any) -> None:
    """Assign `value` at a dotted path into a nested scenario mapping.

    List hops use integer segments (faults.0.params.delta). The full path
    must already exist; sweeping is meant to run against the normalized
    mapping, where every defaulted key is present.
    """
    if not path:
        raise ConfigError("sweep parameter path must not be empty")
    node: Any = mapping
    segments = path.split(".")
    for i, segment in enumerate(segments):
        last = i == len(segments) - 1
        if isinstance(node, list):
            try:
                idx = int(segment)
            except ValueError:
                raise ConfigError(
                    f"sweep path {path!r}: segment {segment!r} must be a "
                    f"list index"
                ) from None
            if not 0 <= idx < len(node):
                raise ConfigError(
                    f"sweep path {path!r}: index {idx} out of range"
                )
            if last:
                node[idx] = value
            else:
                node = node[idx]
        elif isinstance(node, dict):
            if segment not in node:
                raise ConfigError(
                    f"unknown sweep parameter path {path!r} "
                    f"(no key {segment!r})"
                )
            if last:
                node[segment] = value
            else:
                node = node[segment]
        else:
            raise ConfigError(
                f"sweep path {path!r}: segment {segment!r} lands on a scalar"
            )


def _value_sort_key(value: Any) -> tuple:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return (1, str(value))
    return (0, float(value))


@dataclass(frozen=True)
class SweepPoint:
    """One sweep run: the swept value, the derived seed, and the result."""

    value: Any
    seed: int
    config: ScenarioConfig
    result: RunResult


def run_sweep(
    config: ScenarioConfig,
    param_path: str,
    values: Sequence[Any],
    max_workers: Optional[int] = None,
) -> list[SweepPoint]:
    """Run the scenario once per value of one swept parameter.

    Values are processed in ascending order; run i gets its own seed derived
    from (base seed, i), so the runs stay independent yet reproducible.
    Runs execute concurrently, which is safe because each builds its own
    config and composers.
    """
    if not values:
        raise ConfigError("sweep needs at least one value")
    base_mapping = scenario_to_mapping(config)
    # Surface a bogus path before any run starts.
    set_mapping_path(copy.deepcopy(base_mapping), param_path, values[0])

    ordered = sorted(values, key=_value_sort_key)
    base_seed = config.clock.seed

    def one(indexed: tuple[int, Any]) -> SweepPoint:
        index, value = indexed
        mapping = copy.deepcopy(base_mapping)
        set_mapping_path(mapping, param_path, value)
        if param_path != "clock.seed":
            mapping["clock"]["seed"] = derive_sweep_seed(base_seed, index)
        run_config = parse_scenario_mapping(mapping)
        return SweepPoint(
            value=value,
            seed=run_config.clock.seed,
            config=run_config,
            result=run_scenario(run_config),
        )

    workers = max_workers or min(8, len(ordered))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, enumerate(ordered)))

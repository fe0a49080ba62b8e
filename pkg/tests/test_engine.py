"""Full simulation runs: wiring, determinism, gating, divergence, sweeps."""
import math

import pytest

from conflictsim import (
    ConfigError,
    Grade,
    SimulationDivergenceError,
    d_vid_cross_entropy,
    derive_sweep_seed,
    parse_scenario,
    run_scenario,
    run_sweep,
)
from conflictsim.engine import set_mapping_path
from conflictsim.metrics import interpret_ai

CLEAN = """
clock: {dt: 0.1, duration: 20.0, seed: 5}
process: {gain: 1.0, time_constant: 4.0, initial_values: [0.0, 0.5]}
pid: {kp: 1.5, ki: 0.2, setpoint: 1.0}
"""

BIASED = """
clock: {dt: 0.1, duration: 30.0, seed: 5}
process: {gain: 1.0, time_constant: 4.0, initial_values: [0.0]}
pid: {kp: 1.5, ki: 0.2, setpoint: 1.0}
faults:
  - {kind: bias, channel: ai_sensor_fault, variable: 0, t0: 10.0, t_end: 20.0,
     params: {delta: 0.4}}
"""


def run_text(text, seed_override=None):
    return run_scenario(parse_scenario(text), seed_override=seed_override)


def test_fault_free_run_has_zero_conflict_everywhere():
    result = run_text(CLEAN)
    assert len(result.records) == 200
    for rec in result.records:
        s = rec.sample
        assert s.d_vod == 0.0
        assert s.d_vid == 0.0
        assert s.d_vad == 0.0
        assert s.p == 0.0 and s.s == 0.0 and s.r == 0.0
        assert s.grade is Grade.LOW
        assert rec.x_a == rec.x_h
    assert result.peak_r == 0.0


def test_time_axis_and_state_bookkeeping():
    result = run_text(CLEAN)
    dt = 0.1
    for k, rec in enumerate(result.records[:50]):
        assert rec.sample.t == k * dt
    assert result.records[0].x_n == (0.0, 0.5)


def test_bias_fault_shows_observation_distance_inside_window():
    result = run_text(BIASED)
    for rec in result.records:
        if 10.0 <= rec.sample.t < 20.0:
            # adding the offset to a nonzero reading rounds once
            assert rec.sample.d_vod == pytest.approx(0.4, abs=1e-12)
        else:
            assert rec.sample.d_vod == 0.0
    assert result.peak_d_vod == pytest.approx(0.4, abs=1e-12)


def test_same_seed_reproduces_every_record():
    text = BIASED.replace("bias", "cyclic").replace(
        "delta: 0.4", "amplitude: 0.4, period: 6.0, noise_std: 0.05")
    first = run_text(text)
    second = run_text(text)
    assert first.records == second.records


def test_different_seed_changes_noisy_run():
    text = BIASED.replace("bias", "cyclic").replace(
        "delta: 0.4", "amplitude: 0.4, period: 6.0, noise_std: 0.05")
    base = run_text(text)
    other = run_text(text, seed_override=99)
    assert other.seed == 99
    assert base.records != other.records


def test_seed_override_equivalent_to_config_seed():
    with_override = run_text(BIASED, seed_override=123)
    rewritten = BIASED.replace("seed: 5", "seed: 123")
    assert with_override.records == run_text(rewritten).records


def test_channel_side_flips_observation_sign():
    ai_side = run_text(BIASED)
    human_side = run_text(BIASED.replace("ai_sensor_fault", "human_sabotage"))
    k = 150  # t = 15, inside the fault window
    ai_rec = ai_side.records[k]
    human_rec = human_side.records[k]
    assert ai_rec.x_a[0] - ai_rec.x_h[0] == pytest.approx(0.4, abs=1e-12)
    assert human_rec.x_a[0] - human_rec.x_h[0] == pytest.approx(-0.4, abs=1e-12)
    # the distance itself is sign-blind on both sides
    assert ai_rec.sample.d_vod == pytest.approx(0.4, abs=1e-12)
    assert human_rec.sample.d_vod == pytest.approx(0.4, abs=1e-12)


def test_interpretation_distance_gates_on_class_agreement():
    # bias pushes only the automated reading across the class boundary
    text = """
clock: {dt: 0.5, duration: 10.0}
process: {gain: 1.0, time_constant: 5.0, initial_values: [0.2]}
pid: {kp: 0.0, setpoint: 0.2}
human: {kind: inactive}
interpretation: {variable: 0, boundaries: [0.5], temperature: 1.0}
faults:
  - {kind: bias, channel: ai_cyberattack, variable: 0, t0: 5.0,
     params: {delta: 0.6}}
"""
    result = run_text(text)
    for rec in result.records:
        if rec.sample.t < 5.0:
            assert rec.sample.d_vid == 0.0
        else:
            ai_probs = interpret_ai(rec.x_a[0], parse_scenario(text).interpretation).probs
            human_target = [1.0, 0.0]
            expected = d_vid_cross_entropy(ai_probs, human_target)
            assert rec.sample.d_vid == pytest.approx(expected, abs=1e-15)
            assert rec.sample.d_vid > 0.0


def test_same_class_means_zero_interpretation_distance():
    # a small bias that never crosses the boundary leaves agreement intact
    text = BIASED.replace("delta: 0.4", "delta: 0.05")
    result = run_text(text)
    assert all(rec.sample.d_vid == 0.0 for rec in result.records)


def test_inactive_human_with_human_acting_decays_plant():
    text = """
clock: {dt: 0.1, duration: 5.0}
process: {gain: 1.0, time_constant: 2.0, initial_values: [1.0]}
human: {kind: inactive}
acting_party: human
"""
    result = run_text(text)
    decay = 1.0 - 0.1 / 2.0
    x = 1.0
    for rec in result.records:
        assert rec.x_n[0] == pytest.approx(x, abs=1e-12)
        assert rec.u_h == (0.0,)
        x *= decay


def test_blend_weight_endpoints_match_pure_parties():
    base = """
clock: {dt: 0.1, duration: 10.0}
process: {gain: 1.0, time_constant: 2.0, initial_values: [0.3]}
pid: {kp: 2.0, ki: 0.1, setpoint: 1.0}
human: {kind: threshold_manual, parameters: {threshold: 0.2, manual_output: 0.5}}
acting_party: %s
blend_weight: %s
"""
    ai_run = run_text(base % ("ai", "0.5"))
    blend_as_ai = run_text(base % ("blend", "1.0"))
    assert blend_as_ai.records == ai_run.records
    human_run = run_text(base % ("human", "0.5"))
    blend_as_human = run_text(base % ("blend", "0.0"))
    assert [r.x_n for r in blend_as_human.records] == \
           [r.x_n for r in human_run.records]


def test_human_reaction_delay_shifts_response():
    # kp 19 parks the loop at x = 0.95 so only the fault can trip the
    # 0.3 threshold around the setpoint
    base = """
clock: {dt: 0.1, duration: 10.0}
process: {gain: 1.0, time_constant: 2.0, initial_values: [1.0]}
pid: {kp: 19.0, setpoint: 1.0}
human:
  kind: threshold_manual
  parameters: {threshold: 0.3, manual_output: 2.0}
  reaction_delay_steps: %d
faults:
  - {kind: bias, channel: human_error, variable: 0, t0: 3.0,
     params: {delta: 1.0, sign: "-"}}
"""
    prompt = run_text(base % 0)
    delayed = run_text(base % 7)

    def first_action_step(result):
        for k, rec in enumerate(result.records):
            if rec.u_h != (0.0,):
                return k
        return None

    k_prompt = first_action_step(prompt)
    k_delayed = first_action_step(delayed)
    assert k_prompt == 30  # fault onset at t=3.0
    assert k_delayed == 37


def test_divergence_reports_step_and_time():
    text = """
clock: {dt: 0.5, duration: 100.0}
process: {gain: 1.0e+308, time_constant: 1.0, initial_values: [0.0]}
pid: {kp: 1.0, setpoint: 1.0}
"""
    with pytest.raises(SimulationDivergenceError) as excinfo:
        run_text(text)
    assert excinfo.value.step >= 0
    assert excinfo.value.t >= 0.0


def test_run_rejects_out_of_range_seed_override():
    with pytest.raises(ConfigError):
        run_text(CLEAN, seed_override=2**64)


def test_set_mapping_path():
    mapping = {"a": {"b": [10, {"c": 1}]}}
    set_mapping_path(mapping, "a.b.0", 99)
    assert mapping["a"]["b"][0] == 99
    set_mapping_path(mapping, "a.b.1.c", 7)
    assert mapping["a"]["b"][1]["c"] == 7
    with pytest.raises(ConfigError, match="no key"):
        set_mapping_path(mapping, "a.z", 1)
    with pytest.raises(ConfigError, match="out of range"):
        set_mapping_path(mapping, "a.b.5", 1)
    with pytest.raises(ConfigError, match="list index"):
        set_mapping_path(mapping, "a.b.x", 1)
    with pytest.raises(ConfigError, match="scalar"):
        set_mapping_path(mapping, "a.b.0.deep", 1)


def test_derive_sweep_seed_is_stable_and_spread():
    first = derive_sweep_seed(5, 0)
    assert first == derive_sweep_seed(5, 0)
    seeds = {derive_sweep_seed(5, i) for i in range(100)}
    assert len(seeds) == 100
    assert all(0 <= s < 2**64 for s in seeds)


def test_run_sweep_orders_values_and_applies_them():
    config = parse_scenario(BIASED)
    points = run_sweep(config, "faults.0.params.delta", [2.0, 0.0, 1.0])
    assert [p.value for p in points] == [0.0, 1.0, 2.0]
    assert [p.result.peak_d_vod for p in points] == [0.0, 1.0, 2.0]
    # derived seeds recorded in the per-run configs
    for i, point in enumerate(points):
        assert point.seed == derive_sweep_seed(5, i)
        assert point.config.clock.seed == point.seed


def test_run_sweep_rejects_bad_input():
    config = parse_scenario(BIASED)
    with pytest.raises(ConfigError):
        run_sweep(config, "faults.0.params.delta", [])
    with pytest.raises(ConfigError, match="no key"):
        run_sweep(config, "faults.0.params.oops", [1.0])


def test_run_sweep_over_seed_path_keeps_given_seeds():
    config = parse_scenario(BIASED)
    points = run_sweep(config, "clock.seed", [3, 1])
    assert [p.seed for p in points] == [1, 3]

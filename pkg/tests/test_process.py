"""Plant stepping, the PID law, and the scripted human policies."""
import math

import pytest

from conflictsim import (
    ConfigError,
    HumanPolicy,
    HumanPolicyKind,
    PidParams,
    ProcessModel,
    SimClock,
    SimulationDivergenceError,
    TrueState,
    step_process,
)
from conflictsim.process import human_action, pid_control


def make_model(**kwargs):
    defaults = dict(gain=1.0, time_constant=10.0, initial_values=(0.0,))
    defaults.update(kwargs)
    return ProcessModel(**defaults)


def test_step_matches_first_order_response():
    # dx/dt = (u - x)/tau with constant u=1 has x(t) = 1 - exp(-t/tau)
    model = make_model(time_constant=10.0)
    dt = 0.01
    state = TrueState(t=0.0, x_n=(0.0,), u_applied=(0.0,))
    for _ in range(1000):
        state = step_process(state, (1.0,), model, dt)
    expected = 1.0 - math.exp(-1.0)
    assert abs(state.x_n[0] - expected) < 1e-3
    assert abs(state.t - 10.0) < 1e-9


def test_step_converges_to_gain_times_input():
    model = make_model(gain=3.0, time_constant=2.0)
    state = TrueState(t=0.0, x_n=(0.0,), u_applied=(0.0,))
    for _ in range(5000):
        state = step_process(state, (0.5,), model, 0.05)
    assert abs(state.x_n[0] - 1.5) < 1e-6


def test_step_round_robin_actuator_wiring():
    # variable i is driven by actuator i % p
    model = make_model(initial_values=(0.0, 0.0, 0.0, 0.0), actuators=2)
    dt = 0.1
    state = TrueState(t=0.0, x_n=(0.0, 0.0, 0.0, 0.0), u_applied=(0.0, 0.0))
    state = step_process(state, (1.0, -1.0), model, dt)
    k = dt / model.time_constant
    assert state.x_n == (k, -k, k, -k)
    assert state.u_applied == (1.0, -1.0)


def test_step_rejects_nonfinite_state_and_input():
    model = make_model()
    bad_state = TrueState(t=0.0, x_n=(math.nan,), u_applied=(0.0,))
    with pytest.raises(SimulationDivergenceError):
        step_process(bad_state, (1.0,), model, 0.1)
    good_state = TrueState(t=0.0, x_n=(0.0,), u_applied=(0.0,))
    with pytest.raises(SimulationDivergenceError):
        step_process(good_state, (math.inf,), model, 0.1)


def test_step_argument_validation():
    model = make_model()
    state = TrueState(t=0.0, x_n=(0.0,), u_applied=(0.0,))
    with pytest.raises(ValueError):
        step_process(state, (1.0,), model, 0.0)
    with pytest.raises(ValueError):
        step_process(state, (), model, 0.1)


def test_process_model_validation():
    with pytest.raises(ConfigError):
        make_model(time_constant=0.0)
    with pytest.raises(ConfigError):
        make_model(initial_values=())
    with pytest.raises(ConfigError):
        make_model(initial_values=(math.inf,))
    with pytest.raises(ConfigError):
        make_model(gain=math.nan)
    with pytest.raises(ConfigError):
        make_model(initial_values=(0.0, 0.0), actuators=3)
    with pytest.raises(ConfigError):
        make_model(actuators=0)
    assert make_model(initial_values=(1.0, 2.0, 3.0)).n == 3


def test_pid_proportional_only():
    params = PidParams(kp=2.0, ki=0.0, kd=0.0, setpoint=1.5)
    u, integ, prev = pid_control(0.0, params, 0.0, None, 0.1)
    assert u == 3.0
    assert integ == pytest.approx(0.15)
    assert prev == 1.5


def test_pid_integral_accumulates():
    params = PidParams(kp=0.0, ki=0.5, kd=0.0, setpoint=1.0)
    u1, integ, prev = pid_control(0.0, params, 0.0, None, 0.2)
    assert u1 == pytest.approx(0.5 * 0.2)
    u2, integ, _ = pid_control(0.0, params, integ, prev, 0.2)
    assert u2 == pytest.approx(0.5 * 0.4)
    assert integ == pytest.approx(0.4)


def test_pid_derivative_skips_first_step():
    params = PidParams(kp=0.0, ki=0.0, kd=1.0, setpoint=1.0)
    u1, integ, prev = pid_control(0.0, params, 0.0, None, 0.1)
    assert u1 == 0.0
    # error moves from 1.0 to 0.5, so de/dt = -5
    u2, _, _ = pid_control(0.5, params, integ, prev, 0.1)
    assert u2 == pytest.approx(-5.0)


def test_pid_saturation_freezes_integral():
    params = PidParams(kp=100.0, ki=1.0, kd=0.0, setpoint=1.0,
                       output_min=-5.0, output_max=5.0)
    u, integ, prev = pid_control(0.0, params, 0.25, None, 0.1)
    assert u == 5.0
    assert integ == 0.25  # anti-windup: unchanged while clipped
    assert prev == 1.0
    u_low, integ_low, _ = pid_control(2.0, params, 0.25, None, 0.1)
    assert u_low == -5.0
    assert integ_low == 0.25


def test_pid_unsaturated_updates_integral():
    params = PidParams(kp=1.0, ki=0.1, kd=0.0, setpoint=1.0)
    _, integ, _ = pid_control(0.5, params, 0.0, None, 0.1)
    assert integ == pytest.approx(0.05)


def test_pid_params_validation():
    with pytest.raises(ConfigError):
        PidParams(output_min=1.0, output_max=1.0)
    with pytest.raises(ConfigError):
        PidParams(kp=math.inf)


def test_sim_clock_steps_and_validation():
    assert SimClock(dt=0.1, duration=10.0).steps == 100
    assert SimClock(dt=0.3, duration=1.0).steps == 3
    assert SimClock(dt=1.0, duration=1.0).steps == 1
    with pytest.raises(ConfigError):
        SimClock(dt=0.0, duration=1.0)
    with pytest.raises(ConfigError):
        SimClock(dt=1.0, duration=0.5)
    with pytest.raises(ConfigError):
        SimClock(dt=0.1, duration=1.0, seed=-1)
    with pytest.raises(ConfigError):
        SimClock(dt=0.1, duration=1.0, seed=2**64)


def test_human_mirror_pid_matches_pid_law():
    params = PidParams(kp=1.2, ki=0.3, kd=0.1, setpoint=1.0)
    policy = HumanPolicy(kind=HumanPolicyKind.MIRROR_PID)
    direct = pid_control(0.4, params, 0.05, 0.7, 0.1)
    mirrored = human_action(0.4, policy, params, 0.05, 0.7, 0.1)
    assert mirrored == direct


def test_human_threshold_manual():
    policy = HumanPolicy(
        kind=HumanPolicyKind.THRESHOLD_MANUAL,
        parameters={"threshold": 0.5, "manual_output": 2.0},
    )
    params = PidParams(setpoint=1.0)
    # |error| above the threshold fires the manual output
    u, integ, prev = human_action(0.0, policy, params, 0.1, 0.2, 0.1)
    assert u == 2.0
    assert (integ, prev) == (0.1, 0.2)  # PID context passes through untouched
    u, _, _ = human_action(0.8, policy, params, 0.0, None, 0.1)
    assert u == 0.0
    u, _, _ = human_action(2.0, policy, params, 0.0, None, 0.1)
    assert u == 2.0  # fires on either side of the setpoint


def test_human_inactive_never_acts():
    policy = HumanPolicy(kind=HumanPolicyKind.INACTIVE)
    params = PidParams()
    for observed in (-10.0, 0.0, 5.0):
        u, _, _ = human_action(observed, policy, params, 0.0, None, 0.1)
        assert u == 0.0


def test_human_policy_validation():
    with pytest.raises(ConfigError):
        HumanPolicy(kind=HumanPolicyKind.THRESHOLD_MANUAL, parameters={})
    with pytest.raises(ConfigError):
        HumanPolicy(
            kind=HumanPolicyKind.THRESHOLD_MANUAL,
            parameters={"threshold": -1.0, "manual_output": 1.0},
        )
    with pytest.raises(ConfigError):
        HumanPolicy(reaction_delay_steps=-1)

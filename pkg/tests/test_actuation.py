import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphsim.actuation import (
    ActuatorLimits,
    SaturationFlags,
    ServoParams,
    enforce_end_stops,
    saturate_command,
    servo_derivative,
    step_overshoot,
)
from morphsim.control import ControlCommand
from morphsim.dynamics import Plant
from morphsim.simulation import rk4_step
from morphsim.validation import simulate_servo_step

UNLIMITED = ServoParams(rate_max=math.inf)


def test_equilibrium_at_command():
    assert servo_derivative(0.07, 0.0, 0.07, ServoParams()) == (0.0, 0.0)


def test_overshoot_formula():
    assert step_overshoot(0.7) == pytest.approx(0.04599, abs=1e-5)
    assert step_overshoot(1.0) == 0.0


@pytest.mark.parametrize("zeta", [0.5, 0.7])
def test_step_overshoot_matches_closed_form(zeta):
    _, x = simulate_servo_step(ServoParams(zeta=zeta, rate_max=math.inf))
    assert x.max() / 0.1 - 1 == pytest.approx(step_overshoot(zeta), rel=0.01)


def test_critical_damping_does_not_overshoot():
    _, x = simulate_servo_step(ServoParams(zeta=1.0, rate_max=math.inf))
    assert x.max() <= 0.1 * (1 + 1e-6)


def test_unit_dc_gain():
    _, x = simulate_servo_step(UNLIMITED, step=0.08, duration=3.0)
    assert x[-1] == pytest.approx(0.08, rel=1e-6)


def test_rate_limit_caps_slew():
    t, x = simulate_servo_step(ServoParams(), step=0.14, dt=1e-4, duration=1.0)
    slope = np.diff(x) / np.diff(t)
    assert slope.max() <= 0.5 + 1e-9
    assert slope.max() > 0.49


def test_end_stops():
    assert enforce_end_stops(0.2, 0.3, 0.15) == (0.15, 0.0)
    assert enforce_end_stops(-0.2, -0.3, 0.15) == (-0.15, 0.0)
    assert enforce_end_stops(0.1, 0.3, 0.15) == (0.1, 0.3)


def test_saturation_flags():
    raw = ControlCommand(np.array([900.0, 100.0, -5.0, 100.0]), dx_cmd=-0.2, dy_cmd=0.1)
    cmd, flags = saturate_command(raw, ActuatorLimits())
    np.testing.assert_array_equal(cmd.omega, [800.0, 100.0, 0.0, 100.0])
    assert cmd.dx_cmd == -0.15 and cmd.dy_cmd == 0.1
    assert flags == SaturationFlags((True, False, True, False), True, False)
    assert flags.names() == ["omega1", "omega3", "dx_cmd"]
    assert raw.omega[0] == 900.0


@pytest.mark.parametrize("kwargs", [{"zeta": 0.0}, {"zeta": 1.5}, {"omega_n": -1.0}, {"rate_max": 0.0}])
def test_invalid_servo(kwargs):
    with pytest.raises(ValueError):
        ServoParams(**kwargs)


@given(st.lists(st.tuples(st.floats(-0.4, 0.4), st.floats(-0.4, 0.4)), min_size=1, max_size=20))
@settings(max_examples=25, deadline=None)
def test_bounded_travel_under_any_command(commands):
    # arbitrary held commands, even past the end stops, never move an arm beyond travel
    plant = Plant()
    y = np.zeros(16)
    hover = np.full(4, 131.87)
    for cx, cy in commands:
        for _ in range(20):
            prev = y
            y = rk4_step(plant, y, hover, cx, cy, 1e-3)
            assert abs(y[12]) <= 0.15 and abs(y[14]) <= 0.15
            # slew limit: no arm moves faster than rate_max
            assert abs(y[12] - prev[12]) <= 0.5e-3 * (1 + 1e-9)
            assert abs(y[14] - prev[14]) <= 0.5e-3 * (1 + 1e-9)
        assert np.all(np.isfinite(y))


def test_peak_time():
    t, x = simulate_servo_step(UNLIMITED)
    expected = math.pi / (15.0 * math.sqrt(1 - 0.7**2))
    assert expected == pytest.approx(0.293, abs=1e-3)
    assert t[x.argmax()] == pytest.approx(expected, abs=2e-4)


def test_stiff_servo_tracks_command():
    params = ServoParams(omega_n=400.0, zeta=1.0, rate_max=math.inf)
    _, x = simulate_servo_step(params, step=0.1, dt=1e-5, duration=0.05)
    assert x[-1] == pytest.approx(0.1, rel=1e-3)

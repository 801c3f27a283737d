import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphsim.actuation import ServoParams
from morphsim.control import (
    AttitudeController,
    AttitudeSetpoint,
    CascadedController,
    ControllerGains,
    Mode,
    Pid,
    PidGains,
    PositionController,
    arm_torque_signs,
    attitude_setpoints,
    hover_floor_applied,
    hover_speed,
    motor_mixer,
)
from morphsim.dynamics import G, RigidBodyState, RotorSet, body_torque, rotor_wrench
from morphsim.morphology import MassModel, compute_inertia
from morphsim.validation import mixer_torque_jacobian

MODEL = MassModel()


def test_zero_error_commands_gravity():
    acc = PositionController().update(RigidBodyState(pos=np.array([1.0, 2.0, 3.0])), (1.0, 2.0, 3.0), (0, 0, 0), 0.004)
    np.testing.assert_allclose(acc, [0.0, 0.0, G])


def test_proportional_channel():
    gains = ControllerGains(x=PidGains(2.0, 0.0, 0.0))
    acc = PositionController(gains).update(RigidBodyState(), (0.5, 0.0, 0.0), (0, 0, 0), 0.004)
    assert acc[0] == pytest.approx(1.0)


def test_hover_speed():
    assert hover_speed(G, 1.56) == pytest.approx(131.87, abs=5e-3)
    assert hover_speed(-5.0, 1.56) == pytest.approx(math.sqrt(1.56 * 0.1 * G / (4 * 2.2e-4)))
    assert hover_floor_applied(-5.0) and not hover_floor_applied(G)


def test_setpoints_zero_yaw():
    sp = attitude_setpoints((1.0, 0.0, G))
    assert sp.theta_d == pytest.approx(1 / G) == pytest.approx(0.1019, abs=1e-4)
    assert sp.phi_d == 0.0
    sp = attitude_setpoints((0.0, 1.0, G))
    assert sp.phi_d == pytest.approx(-1 / G)


def test_setpoints_quarter_yaw():
    # facing +y, a +y acceleration needs nose-down pitch
    sp = attitude_setpoints((0.0, 1.0, G), psi_d=math.pi / 2)
    assert sp.theta_d == pytest.approx(1 / G)
    assert sp.phi_d == pytest.approx(0.0, abs=1e-15)


def test_tilt_saturation():
    sp = attitude_setpoints((50.0, -50.0, G), tilt_max=0.5)
    assert sp.theta_d == 0.5 and sp.phi_d == 0.5 and sp.saturated


def test_arm_signs_default_model():
    assert arm_torque_signs(MODEL) == (-1.0, 1.0)


def _sp(phi=0.0, theta=0.0):
    return AttitudeSetpoint(phi, theta, 0.0, 131.87)


def test_positive_pitch_error_retracts_x_arm():
    out = AttitudeController(mode=Mode.SLIDING).update(RigidBodyState(), _sp(theta=0.1), 0.004)
    assert out[3] < 0
    # the resulting arm moves the torque in the direction of the error
    thrust = np.full(4, 1.56 * G / 4)
    tau = body_torque(compute_inertia((out[3], 0.0)), thrust, np.zeros(4))
    assert tau[1] > 0


@pytest.mark.parametrize("mode", list(Mode))
def test_mode_contracts(mode):
    out = AttitudeController(mode=mode).update(RigidBodyState(), _sp(0.1, -0.1), 0.004)
    d_phi, d_theta, _, dx, dy = out
    assert (d_phi != 0 and d_theta != 0) == mode.uses_rotor_attitude
    assert (dx != 0 and dy != 0) == mode.uses_arms
    if not mode.uses_rotor_attitude:
        assert d_phi == 0.0 and d_theta == 0.0
    if not mode.uses_arms:
        assert dx == 0.0 and dy == 0.0


def test_mode_aliases():
    assert Mode.parse("SlidingArmOnly") is Mode.SLIDING
    with pytest.raises(ValueError):
        Mode.parse("hybrid")


def test_mixer_quadratic_cross_term_small():
    # pitch delta alone leaks a yaw moment only through the quadratic rotor law
    wh = 131.87
    props = compute_inertia((0.0, 0.0))
    thrusts, moments = rotor_wrench(RotorSet(tuple(motor_mixer(wh, 0.0, 5.0, 0.0))))
    tau = body_torque(props, thrusts, moments)
    # -(wh - d)^2 - (wh + d)^2 + 2 wh^2 = -2 d^2
    assert tau[2] == pytest.approx(-2 * 5.4e-6 * 25.0, rel=1e-9)
    assert tau[1] == pytest.approx(4 * 2.2e-4 * wh * 5.0 * 0.25, rel=1e-12)
    assert tau[0] == pytest.approx(0.0, abs=1e-15)


def test_mixer_jacobian_diagonal():
    jac = mixer_torque_jacobian()
    assert np.all(np.diag(jac) > 0)
    assert np.abs(jac - np.diag(np.diag(jac))).max() < 1e-9 * np.diag(jac).min()


@given(st.floats(-1e3, 1e3), st.integers(1, 400))
@settings(max_examples=50, deadline=None)
def test_integrator_clamp(error, n):
    pid = Pid(PidGains(1.0, 2.0, 0.0, 0.3))
    for _ in range(n):
        pid.update(error, 0.0, 0.01)
    assert abs(pid.integral) <= 0.3


def test_frozen_integrator():
    pid = Pid(PidGains(1.0, 1.0, 0.0, 1.0))
    pid.update(1.0, 0.0, 0.1, freeze=True)
    assert pid.integral == 0.0


def _pitch_loop(mode, gains=ControllerGains(), servo=ServoParams()):
    """Continuous pitch-channel closed loop about hover.

    State (theta, q, integral of e_theta, dx, dx_rate); the rotor and arm
    PIDs share the same error so one integral state serves both.
    """
    jyy = compute_inertia((0.0, 0.0)).inertia[1, 1]
    k_rot = mixer_torque_jacobian()[1, 1]
    thrust = np.full(4, 1.56 * G / 4)
    h = 1e-4
    k_arm = (
        body_torque(compute_inertia((h, 0.0)), thrust, np.zeros(4))[1]
        - body_torque(compute_inertia((-h, 0.0)), thrust, np.zeros(4))[1]
    ) / (2 * h)
    sign = arm_torque_signs()[0]
    r = gains.theta if mode.uses_rotor_attitude else type(gains.theta)(0, 0, 0)
    a = gains.l_theta if mode.uses_arms else type(gains.l_theta)(0, 0, 0)
    wn, z = servo.omega_n, servo.zeta
    A = np.zeros((5, 5))
    # e = -theta, de = -q
    A[0, 1] = 1.0
    A[1, :3] = k_rot * np.array([-r.kp, -r.kd, r.ki]) / jyy
    A[1, 3] = k_arm / jyy
    A[2, 0] = -1.0
    A[3, 4] = 1.0
    A[4, :3] = wn * wn * sign * np.array([-a.kp, -a.kd, a.ki])
    A[4, 3] = -wn * wn
    A[4, 4] = -2 * z * wn
    return A


@pytest.mark.parametrize("mode", list(Mode))
def test_linear_pitch_loop_stable(mode):
    eig = np.linalg.eigvals(_pitch_loop(mode))
    assert np.all(eig.real < -1e-3)


def test_wrong_arm_sign_is_unstable():
    A = _pitch_loop(Mode.SLIDING)
    A[4, :3] *= -1
    assert np.linalg.eigvals(A).real.max() > 0


def test_step_target_uses_both_effectors_in_combined_mode():
    ctrl = CascadedController(mode=Mode.COMBINED)
    cmd = ctrl.step(RigidBodyState(), (1.0, 0.0, 0.0), dt=0.004)
    assert cmd.dx_cmd < 0
    # nose-down demand speeds up rotor 3 relative to rotor 1
    assert cmd.omega[2] > cmd.omega[0]
    assert not ctrl.flags.any

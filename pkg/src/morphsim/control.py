"""Cascaded position/attitude controller with three actuation modes.

Outer loop: PID on world position error produces desired accelerations,
which become a collective rotor speed and roll/pitch setpoints. Inner loop:
PID on attitude error produces rotor speed deltas (mixed onto the four
rotors) and arm displacement commands, depending on the mode.
"""

import enum
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .actuation import ActuatorLimits, SaturationFlags, saturate_command
from .dynamics import G, K_F, RigidBodyState, rotation_matrix
from .morphology import MassModel, compute_cog

__all__ = [
    "Mode",
    "PidGains",
    "ControllerGains",
    "AttitudeSetpoint",
    "ControlCommand",
    "Pid",
    "hover_speed",
    "attitude_setpoints",
    "motor_mixer",
    "arm_torque_signs",
    "PositionController",
    "AttitudeController",
    "CascadedController",
]


class Mode(str, enum.Enum):
    CONVENTIONAL = "conventional"
    SLIDING = "sliding"
    COMBINED = "combined"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        aliases = {
            "conventional": cls.CONVENTIONAL,
            "sliding": cls.SLIDING,
            "slidingarmonly": cls.SLIDING,
            "slidingonly": cls.SLIDING,
            "combined": cls.COMBINED,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown mode {value!r}; expected conventional, sliding or combined")

    @property
    def uses_rotor_attitude(self):
        return self is not Mode.SLIDING

    @property
    def uses_arms(self):
        return self is not Mode.CONVENTIONAL


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    i_limit: float = 1.0


def _g(kp, ki, kd, i_limit):
    return field(default_factory=lambda: PidGains(kp, ki, kd, i_limit))


@dataclass(frozen=True)
class ControllerGains:
    """Per-channel PID gains.

    Position channels output m/s^2, rotor attitude channels rad/s per rad,
    arm channels m per rad. ``i_limit`` bounds the integral state.
    """

    x: PidGains = _g(4.0, 0.05, 4.0, 1.0)
    y: PidGains = _g(4.0, 0.05, 4.0, 1.0)
    z: PidGains = _g(8.0, 0.1, 6.0, 1.0)
    phi: PidGains = _g(30.0, 0.5, 6.0, 0.5)
    theta: PidGains = _g(30.0, 0.5, 6.0, 0.5)
    psi: PidGains = _g(15.0, 0.2, 4.0, 0.5)
    l_theta: PidGains = _g(0.10, 0.05, 0.04, 0.5)
    l_phi: PidGains = _g(0.10, 0.05, 0.04, 0.5)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown gain channels: {sorted(unknown)}")
        base = cls()
        kwargs = {}
        for name, value in data.items():
            if isinstance(value, dict):
                current = getattr(base, name)
                extra = set(value) - {"kp", "ki", "kd", "i_limit"}
                if extra:
                    raise ValueError(f"unknown keys for gains.{name}: {sorted(extra)}")
                merged = {f.name: getattr(current, f.name) for f in fields(PidGains)}
                merged.update(value)
                kwargs[name] = PidGains(**{k: float(v) for k, v in merged.items()})
            else:
                kp, ki, kd = value[:3]
                i_limit = value[3] if len(value) > 3 else getattr(base, name).i_limit
                kwargs[name] = PidGains(float(kp), float(ki), float(kd), float(i_limit))
        return cls(**{**{n: getattr(base, n) for n in names}, **kwargs})

    def to_dict(self):
        return {f.name: vars(getattr(self, f.name)).copy() for f in fields(self)}

    def violations(self):
        out = []
        for f in fields(self):
            g = getattr(self, f.name)
            vals = (g.kp, g.ki, g.kd, g.i_limit)
            if not all(math.isfinite(v) for v in vals):
                out.append(f"gains.{f.name} must be finite")
            elif g.i_limit < 0:
                out.append(f"gains.{f.name}.i_limit must be >= 0")
        return out


@dataclass
class AttitudeSetpoint:
    phi_d: float
    theta_d: float
    psi_d: float
    omega_h: float
    saturated: bool = False


@dataclass
class ControlCommand:
    omega: np.ndarray
    dx_cmd: float = 0.0
    dy_cmd: float = 0.0
    mode: Mode = Mode.COMBINED


class Pid:
    """Single-channel PID with a clamped, freezable integrator.

    The derivative term is supplied by the caller (velocity or body-rate
    error) rather than differenced here.
    """

    def __init__(self, gains):
        self.gains = gains
        self.integral = 0.0

    def update(self, error, error_rate, dt, freeze=False):
        g = self.gains
        if not freeze:
            lim = g.i_limit
            self.integral = min(max(self.integral + error * dt, -lim), lim)
        return g.kp * error + g.ki * self.integral + g.kd * error_rate

    def reset(self):
        self.integral = 0.0


def hover_speed(accel_z_des, mass, k_f=K_F):
    """Common rotor speed whose total thrust gives ``mass * accel_z_des``.

    Demands below ``0.1 g`` are raised to that floor; see
    :func:`hover_floor_applied`.
    """
    a = max(accel_z_des, 0.1 * G)
    return math.sqrt(mass * a / (4.0 * k_f))


def hover_floor_applied(accel_z_des):
    return accel_z_des < 0.1 * G


def attitude_setpoints(accel_des, psi_d=0.0, omega_h=0.0, tilt_max=0.5):
    """Roll/pitch setpoints from desired horizontal accelerations.

    Small-angle inversion of the translational dynamics about hover:
    ``phi = (ax sin(psi) - ay cos(psi)) / g``,
    ``theta = (ax cos(psi) + ay sin(psi)) / g``.
    """
    ax, ay = accel_des[0], accel_des[1]
    sp, cp = math.sin(psi_d), math.cos(psi_d)
    phi = (ax * sp - ay * cp) / G
    theta = (ax * cp + ay * sp) / G
    phi_c = min(max(phi, -tilt_max), tilt_max)
    theta_c = min(max(theta, -tilt_max), tilt_max)
    return AttitudeSetpoint(phi_c, theta_c, psi_d, omega_h, saturated=(phi_c != phi or theta_c != theta))


def motor_mixer(omega_h, d_phi, d_theta, d_psi):
    """Plus-configuration mix; rotors 1, 3 on the x arm and 2, 4 on the y arm.

    Rotors 2 and 4 produce positive yaw reaction moment, 1 and 3 negative.
    """
    return np.array(
        [
            omega_h - d_theta - d_psi,
            omega_h + d_phi + d_psi,
            omega_h + d_theta - d_psi,
            omega_h - d_phi + d_psi,
        ]
    )


def arm_torque_signs(model=MassModel()):
    """Signs of d(pitch torque)/d(dx) and d(roll torque)/d(dy) at equal thrust.

    With equal thrust F on every rotor the pitch torque is
    ``-F (sum of rotor x - 4 cog_x)``; the sign depends only on how far the CoG
    moves per unit of arm travel.
    """
    h = 0.5 * model.d_max
    cx = compute_cog((h, 0.0), model)[0] - compute_cog((0.0, 0.0), model)[0]
    cy = compute_cog((0.0, h), model)[1] - compute_cog((0.0, 0.0), model)[1]
    pitch = -np.sign(2 * h - 4 * cx)
    roll = np.sign(2 * h - 4 * cy)
    if pitch == 0 or roll == 0:
        raise ValueError("arm travel produces no torque for this mass model")
    return float(pitch), float(roll)


def _wrap(angle):
    return (angle + math.pi) % (2 * math.pi) - math.pi


class PositionController:
    """Outer loop: world-frame position PID with gravity feed-forward on z."""

    def __init__(self, gains=ControllerGains()):
        self.pids = [Pid(gains.x), Pid(gains.y), Pid(gains.z)]

    def update(self, state, target, target_vel, dt, freeze=(False, False, False)):
        if not dt > 0:
            raise ValueError("dt must be positive")
        vel = rotation_matrix(state.euler) @ np.asarray(state.vel_body, dtype=float)
        e = np.asarray(target, dtype=float) - np.asarray(state.pos, dtype=float)
        de = np.asarray(target_vel, dtype=float) - vel
        acc = np.array([pid.update(e[i], de[i], dt, freeze[i]) for i, pid in enumerate(self.pids)])
        acc[2] += G
        return acc


class AttitudeController:
    """Inner loop: rotor speed deltas and arm displacement commands.

    Derivative action uses body-rate errors against zero rate setpoints.
    Only the branches enabled by ``mode`` run; disabled outputs are exactly 0.
    """

    def __init__(self, gains=ControllerGains(), mode=Mode.COMBINED, arm_signs=(-1.0, 1.0)):
        self.mode = Mode.parse(mode)
        self.phi = Pid(gains.phi)
        self.theta = Pid(gains.theta)
        self.psi = Pid(gains.psi)
        self.l_theta = Pid(gains.l_theta)
        self.l_phi = Pid(gains.l_phi)
        self.arm_signs = arm_signs

    def update(self, state, setpoint, dt, freeze_rotors=False, freeze_dx=False, freeze_dy=False):
        if not dt > 0:
            raise ValueError("dt must be positive")
        phi, theta, psi = state.euler
        p, q, r = state.rates
        e_phi = setpoint.phi_d - phi
        e_theta = setpoint.theta_d - theta
        e_psi = _wrap(setpoint.psi_d - psi)

        d_psi = self.psi.update(e_psi, -r, dt, freeze_rotors)
        d_phi = d_theta = 0.0
        dx_cmd = dy_cmd = 0.0
        if self.mode.uses_rotor_attitude:
            d_phi = self.phi.update(e_phi, -p, dt, freeze_rotors)
            d_theta = self.theta.update(e_theta, -q, dt, freeze_rotors)
        if self.mode.uses_arms:
            dx_cmd = self.arm_signs[0] * self.l_theta.update(e_theta, -q, dt, freeze_dx)
            dy_cmd = self.arm_signs[1] * self.l_phi.update(e_phi, -p, dt, freeze_dy)
        return d_phi, d_theta, d_psi, dx_cmd, dy_cmd


class CascadedController:
    """Full controller: position loop, attitude loop, mixer and saturation.

    Keeps the integrator states and the previous step's saturation flags,
    which freeze the matching integrators on the next step.
    """

    def __init__(
        self,
        gains=ControllerGains(),
        mode=Mode.COMBINED,
        model=MassModel(),
        k_f=K_F,
        limits=None,
        tilt_max=0.5,
    ):
        self.mode = Mode.parse(mode)
        self.mass = model.total_mass
        self.k_f = k_f
        self.limits = limits if limits is not None else ActuatorLimits(d_max=model.d_max)
        self.tilt_max = tilt_max
        self.position = PositionController(gains)
        self.attitude = AttitudeController(gains, self.mode, arm_torque_signs(model))
        self.flags = SaturationFlags()
        self.tilt_saturated = False
        self.last_setpoint = None

    def step(self, measured, target, target_vel=(0.0, 0.0, 0.0), dt=0.004, psi_d=0.0):
        """Run one controller cycle and return the saturated ControlCommand."""
        rotor_sat = any(self.flags.rotors)
        acc = self.position.update(
            measured,
            target,
            target_vel,
            dt,
            freeze=(self.tilt_saturated, self.tilt_saturated, rotor_sat),
        )
        omega_h = hover_speed(acc[2], self.mass, self.k_f)
        sp = attitude_setpoints(acc, psi_d, omega_h, self.tilt_max)
        self.tilt_saturated = sp.saturated
        self.last_setpoint = sp
        d_phi, d_theta, d_psi, dx_cmd, dy_cmd = self.attitude.update(
            measured, sp, dt, rotor_sat, self.flags.dx, self.flags.dy
        )
        raw = ControlCommand(motor_mixer(omega_h, d_phi, d_theta, d_psi), dx_cmd, dy_cmd, self.mode)
        cmd, self.flags = saturate_command(raw, self.limits)
        return cmd


def controller_step(measured, target, controller, dt, target_vel=(0.0, 0.0, 0.0)):
    """Functional wrapper around :meth:`CascadedController.step`."""
    if not isinstance(measured, RigidBodyState):
        measured = RigidBodyState.from_vector(measured)
    return controller.step(measured, target, target_vel, dt)

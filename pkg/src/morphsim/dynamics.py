"""Rigid-body equations of motion about a moving centre of gravity.

World frame E is z-up. Attitude is Z-Y-X Euler angles (roll ``phi``,
pitch ``theta``, yaw ``psi``). The body frame B and the CoG frame share
orientation, so one set of body rates serves both.

The 16-element augmented state used by the integrator is laid out as::

    [x, y, z, u, v, w, phi, theta, psi, p, q, r, dx, dx_rate, dy, dy_rate]
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .actuation import ServoParams, servo_derivative
from .morphology import MassModel, MassPropertyCache, compute_inertia

__all__ = [
    "G",
    "THETA_LIMIT",
    "SingularityError",
    "RigidBodyState",
    "RotorSet",
    "rotation_matrix",
    "rotor_wrench",
    "translational_derivative",
    "rotational_derivative",
    "euler_rate",
    "state_derivative",
    "Plant",
]

G = 9.81
THETA_LIMIT = math.pi / 2 - 1e-3
K_F = 2.2e-4
K_M = 5.4e-6
OMEGA_MAX = 800.0


class SingularityError(ArithmeticError):
    """Pitch reached the Euler-rate singularity guard."""

    def __init__(self, theta, t=None, state=None):
        self.theta = theta
        self.t = t
        self.state = state
        where = "" if t is None else f" at t={t:.4f} s"
        super().__init__(f"pitch {theta:.6f} rad beyond Euler singularity guard{where}")


@dataclass
class RigidBodyState:
    pos: np.ndarray = field(default_factory=lambda: np.zeros(3))
    vel_body: np.ndarray = field(default_factory=lambda: np.zeros(3))
    euler: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rates: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def as_vector(self):
        return np.concatenate([self.pos, self.vel_body, self.euler, self.rates]).astype(float)

    @classmethod
    def from_vector(cls, y):
        y = np.asarray(y, dtype=float)
        return cls(y[0:3].copy(), y[3:6].copy(), y[6:9].copy(), y[9:12].copy())

    @property
    def vel_world(self):
        return rotation_matrix(self.euler) @ self.vel_body


@dataclass(frozen=True)
class RotorSet:
    """Rotor speeds (rad/s) and aerodynamic coefficients.

    ``k_f`` is in N s^2/rad^2 and ``k_m`` in N m s^2/rad^2.
    """

    omega: tuple = (0.0, 0.0, 0.0, 0.0)
    k_f: float = K_F
    k_m: float = K_M
    omega_max: float = OMEGA_MAX


def rotation_matrix(euler):
    """Body-to-world rotation for Z-Y-X Euler angles."""
    phi, theta, psi = euler
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
            [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
            [-st, ct * sf, ct * cf],
        ]
    )


def rotor_wrench(rotors):
    """Per-rotor thrusts and drag moments, both quadratic in rotor speed."""
    w = np.asarray(rotors.omega, dtype=float)
    if np.any(w < 0) or np.any(w > rotors.omega_max * (1 + 1e-12)):
        raise ValueError(f"rotor speeds {w} outside [0, {rotors.omega_max}] rad/s")
    w2 = w * w
    return rotors.k_f * w2, rotors.k_m * w2


def _guard(theta):
    if not abs(theta) < THETA_LIMIT:
        raise SingularityError(theta)


def translational_derivative(state, total_thrust, mass):
    """Position rate in E and body-velocity rate in B.

    The CoG offset does not enter: thrust acts along body z and gravity is
    resolved into body axes.
    """
    phi, theta, psi = state.euler
    _guard(theta)
    u, v, w = state.vel_body
    p, q, r = state.rates
    pos_dot = rotation_matrix(state.euler) @ np.asarray(state.vel_body, dtype=float)
    ct, st = math.cos(theta), math.sin(theta)
    cf, sf = math.cos(phi), math.sin(phi)
    vel_dot = np.array(
        [
            G * st + (r * v - q * w),
            -G * ct * sf + (p * w - r * u),
            total_thrust / mass - G * ct * cf + (q * u - p * v),
        ]
    )
    return pos_dot, vel_dot


def body_torque(props, thrusts, drag_moments):
    arms = props.torque_arms
    thrusts = np.asarray(thrusts, dtype=float)
    m = np.asarray(drag_moments, dtype=float)
    return np.array(
        [
            arms[:, 1] @ thrusts,
            -(arms[:, 0] @ thrusts),
            -m[0] + m[1] - m[2] + m[3],
        ]
    )


def rotational_derivative(rates, props, thrusts, drag_moments):
    """Body angular acceleration, ``J^-1 (tau - w x J w)`` about the CoG."""
    w = np.asarray(rates, dtype=float)
    tau = body_torque(props, thrusts, drag_moments)
    jw = props.inertia @ w
    return np.linalg.solve(props.inertia, tau - np.cross(w, jw))


def euler_rate(euler, rates):
    phi, theta, _ = euler
    _guard(theta)
    p, q, r = rates
    cf, sf = math.cos(phi), math.sin(phi)
    ct, tt = math.cos(theta), math.tan(theta)
    return np.array(
        [
            p + q * sf * tt + r * cf * tt,
            q * cf - r * sf,
            (q * sf + r * cf) / ct,
        ]
    )


def state_derivative(state, morph, rotors, model=MassModel()):
    """Derivative of the 12 rigid-body states, returned as a RigidBodyState.

    Mass properties are recomputed from ``morph`` on every call.
    """
    props = compute_inertia(morph, model)
    thrusts, moments = rotor_wrench(rotors)
    pos_dot, vel_dot = translational_derivative(state, thrusts.sum(), model.total_mass)
    rates_dot = rotational_derivative(state.rates, props, thrusts, moments)
    return RigidBodyState(pos_dot, vel_dot, euler_rate(state.euler, state.rates), rates_dot)


class Plant:
    """Vehicle + arm servo model on the flat 16-element state.

    Same equations as :func:`state_derivative` and
    :func:`morphsim.actuation.servo_derivative`, evaluated with scalar
    arithmetic and cached mass-property expansions, since this is the
    integrator's inner loop.
    """

    def __init__(self, model=MassModel(), servo=None, k_f=K_F, k_m=K_M):
        self.model = model
        self.servo = servo if servo is not None else ServoParams(d_max=model.d_max)
        self.k_f = k_f
        self.k_m = k_m
        self.mass = model.total_mass
        self.props = MassPropertyCache(model)
        self.travel = min(self.servo.d_max, model.d_max)

    def derivative(self, y, omega, dx_cmd, dy_cmd):
        """Time derivative of the augmented state; inputs held over the call."""
        _, _, _, u, v, w, phi, theta, psi, p, q, r, dx, dxr, dy, dyr = y.tolist()
        if not abs(theta) < THETA_LIMIT:
            raise SingularityError(theta)
        # RK4 stages may probe slightly past an end stop; geometry stays on it
        lim = self.travel
        gx = dx if -lim <= dx <= lim else math.copysign(lim, dx)
        gy = dy if -lim <= dy <= lim else math.copysign(lim, dy)
        cx, cy, (a, b, c, d, e, f) = self.props.scalars(gx, gy)

        w1, w2, w3, w4 = omega.tolist() if hasattr(omega, "tolist") else omega
        kf, km, l = self.k_f, self.k_m, self.model.l_nominal
        f1, f2, f3, f4 = kf * w1 * w1, kf * w2 * w2, kf * w3 * w3, kf * w4 * w4
        total = f1 + f2 + f3 + f4

        # thrust torques about the CoG, rotors at (l+dx,0) (0,l+dy) (-l+dx,0) (0,-l+dy)
        tx = (l + gy) * f2 + (-l + gy) * f4 - cy * total
        ty = -((l + gx) * f1 + (-l + gx) * f3 - cx * total)
        tz = km * (-w1 * w1 + w2 * w2 - w3 * w3 + w4 * w4)

        # gyroscopic term w x Jw, J = [[a d e] [d b f] [e f c]]
        jp = a * p + d * q + e * r
        jq = d * p + b * q + f * r
        jr = e * p + f * q + c * r
        tx -= q * jr - r * jq
        ty -= r * jp - p * jr
        tz -= p * jq - q * jp

        a11 = b * c - f * f
        a12 = e * f - d * c
        a13 = d * f - b * e
        a22 = a * c - e * e
        a23 = d * e - a * f
        a33 = a * b - d * d
        det = a * a11 + d * a12 + e * a13
        pd = (a11 * tx + a12 * ty + a13 * tz) / det
        qd = (a12 * tx + a22 * ty + a23 * tz) / det
        rd = (a13 * tx + a23 * ty + a33 * tz) / det

        cf, sf = math.cos(phi), math.sin(phi)
        ct, st = math.cos(theta), math.sin(theta)
        cp, sp = math.cos(psi), math.sin(psi)
        tt = st / ct

        s = self.servo
        dx_dot, dx_acc = servo_derivative(dx, dxr, dx_cmd, s)
        dy_dot, dy_acc = servo_derivative(dy, dyr, dy_cmd, s)

        return np.array(
            [
                cp * ct * u + (cp * st * sf - sp * cf) * v + (cp * st * cf + sp * sf) * w,
                sp * ct * u + (sp * st * sf + cp * cf) * v + (sp * st * cf - cp * sf) * w,
                -st * u + ct * sf * v + ct * cf * w,
                G * st + (r * v - q * w),
                -G * ct * sf + (p * w - r * u),
                total / self.mass - G * ct * cf + (q * u - p * v),
                p + q * sf * tt + r * cf * tt,
                q * cf - r * sf,
                (q * sf + r * cf) / ct,
                pd,
                qd,
                rd,
                dx_dot,
                dx_acc,
                dy_dot,
                dy_acc,
            ]
        )

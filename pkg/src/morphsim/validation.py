"""Independent numerical checks of the model.

Each check compares a production code path against a route that does not
share its formulas: point-mass integration for inertia, finite differences
for torque Jacobians, closed-form step responses for the servo, and
step-halving for the integrator. ``run_checks`` drives the ``validate``
subcommand.
"""

import math
from dataclasses import dataclass

import numpy as np

from .actuation import ServoParams, servo_derivative, step_overshoot
from .control import motor_mixer
from .dynamics import (
    G,
    K_F,
    K_M,
    Plant,
    RigidBodyState,
    RotorSet,
    body_torque,
    rotor_wrench,
    state_derivative,
    translational_derivative,
)
from .morphology import MassModel, compute_inertia
from .simulation import rk4_step

__all__ = [
    "CheckResult",
    "point_mass_inertia",
    "inertia_oracle_error",
    "mixer_torque_jacobian",
    "simulate_servo_step",
    "hover_trim_residual",
    "translational_invariance",
    "convergence_study",
    "run_checks",
]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _cuboid_points(center, dims, n):
    k = max(2, int(math.ceil(n ** (1.0 / 3.0))))
    axes = [(np.arange(k) + 0.5) / k * d - d / 2 + c for c, d in zip(center, dims)]
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])


def _cylinder_points(center, radius, height, n):
    # equal-area rings, so each point carries the same mass
    k = max(2, int(math.ceil(n ** (1.0 / 3.0))))
    r = radius * np.sqrt((np.arange(k) + 0.5) / k)
    th = 2 * np.pi * (np.arange(k) + 0.5) / k
    z = (np.arange(k) + 0.5) / k * height - height / 2
    rr, tt, zz = np.meshgrid(r, th, z, indexing="ij")
    return np.column_stack(
        [center[0] + (rr * np.cos(tt)).ravel(), center[1] + (rr * np.sin(tt)).ravel(), center[2] + zz.ravel()]
    )


def point_mass_inertia(morph, model=MassModel(), samples=100_000):
    """CoG and inertia from a cloud of equal point masses per component.

    Geometry is rebuilt here from the mass model, not taken from
    :mod:`morphsim.morphology`, and no parallel-axis shift is used: the
    second moment is summed directly about the cloud's mass centre.
    """
    dx, dy = morph
    l, zo = model.l_nominal, model.arm_z_offset
    length, width, height = model.arm_dims
    clouds = [
        (model.body_mass, _cuboid_points((0, 0, 0), model.body_dims, samples)),
        (model.arm_mass, _cuboid_points((dx, 0, zo), (length, width, height), samples)),
        (model.arm_mass, _cuboid_points((0, dy, -zo), (width, length, height), samples)),
    ]
    for c in [(l + dx, 0, zo), (0, l + dy, -zo), (-l + dx, 0, zo), (0, -l + dy, -zo)]:
        clouds.append((model.motor_mass, _cylinder_points(c, model.motor_radius, model.motor_height, samples)))
    pts = np.vstack([p for _, p in clouds])
    w = np.concatenate([np.full(len(p), m / len(p)) for m, p in clouds])
    cog = w @ pts / w.sum()
    d = pts - cog
    sq = np.einsum("ij,ij->i", d, d)
    inertia = np.eye(3) * (w @ sq) - (d.T * w) @ d
    return cog, inertia


def inertia_oracle_error(morph, model=MassModel(), samples=100_000):
    """Relative Frobenius distance between closed-form and point-mass inertia."""
    ref = compute_inertia(morph, model).inertia
    _, oracle = point_mass_inertia(morph, model, samples)
    return float(np.linalg.norm(ref - oracle) / np.linalg.norm(oracle))


def mixer_torque_jacobian(model=MassModel(), k_f=K_F, k_m=K_M, h=1e-3):
    """Central-difference Jacobian of body torque w.r.t. (d_phi, d_theta, d_psi) at hover."""
    props = compute_inertia((0.0, 0.0), model)
    omega_h = math.sqrt(model.total_mass * G / (4 * k_f))
    jac = np.zeros((3, 3))
    for j in range(3):
        delta = np.zeros(3)
        delta[j] = h
        torques = []
        for sign in (1.0, -1.0):
            omega = motor_mixer(omega_h, *(sign * delta))
            thrusts, moments = rotor_wrench(RotorSet(tuple(omega), k_f, k_m))
            torques.append(body_torque(props, thrusts, moments))
        jac[:, j] = (torques[0] - torques[1]) / (2 * h)
    return jac


def simulate_servo_step(params, step=0.1, dt=1e-4, duration=None):
    """RK4 step response of one servo; returns ``(t, position)`` arrays."""
    if duration is None:
        duration = 12.0 / (params.zeta * params.omega_n)
    n = int(round(duration / dt))
    t = np.arange(n + 1) * dt
    x = np.zeros(n + 1)
    pos, rate = 0.0, 0.0

    def f(p, r):
        return servo_derivative(p, r, step, params)

    for i in range(n):
        k1 = f(pos, rate)
        k2 = f(pos + 0.5 * dt * k1[0], rate + 0.5 * dt * k1[1])
        k3 = f(pos + 0.5 * dt * k2[0], rate + 0.5 * dt * k2[1])
        k4 = f(pos + dt * k3[0], rate + dt * k3[1])
        pos += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        rate += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        x[i + 1] = pos
    return t, x


def hover_trim_residual(model=MassModel(), k_f=K_F, k_m=K_M):
    """Largest |component| of the 12-state derivative at hover trim."""
    omega_h = math.sqrt(model.total_mass * G / (4 * k_f))
    d = state_derivative(
        RigidBodyState(), (0.0, 0.0), RotorSet((omega_h,) * 4, k_f, k_m), model
    ).as_vector()
    return float(np.max(np.abs(d)))


def translational_invariance(model=MassModel(), n=5, state=None, omega=None):
    """True when translational derivatives are bitwise equal over an n x n morph grid.

    Checked on both the composed :func:`state_derivative` and the
    integrator's :class:`Plant`, at fixed attitude, rates and rotor speeds.
    """
    if state is None:
        state = RigidBodyState(
            np.array([0.3, -0.2, 1.0]),
            np.array([0.4, -0.1, 0.2]),
            np.array([0.1, -0.05, 0.3]),
            np.array([0.2, 0.1, -0.3]),
        )
    if omega is None:
        omega = np.array([140.0, 128.0, 135.0, 131.0])
    rotors = RotorSet(tuple(omega))
    plant = Plant(model)
    y = np.concatenate([state.as_vector(), np.zeros(4)])
    ref = ref_plant = None
    for dx in np.linspace(-model.d_max, model.d_max, n):
        for dy in np.linspace(-model.d_max, model.d_max, n):
            full = state_derivative(state, (dx, dy), rotors, model)
            out = np.concatenate([full.pos, full.vel_body])
            y[12], y[14] = dx, dy
            out_plant = plant.derivative(y, omega, 0.0, 0.0)[:6]
            if ref is None:
                ref, ref_plant = out, out_plant
            elif not (np.array_equal(out, ref) and np.array_equal(out_plant, ref_plant)):
                return False
    direct = np.concatenate(translational_derivative(state, rotor_wrench(rotors)[0].sum(), model.total_mass))
    return bool(np.array_equal(direct, ref))


def _perturbed_hover():
    y0 = np.zeros(16)
    y0[3:6] = [0.3, -0.2, 0.1]
    y0[6:9] = [0.05, -0.03, 0.1]
    y0[9:12] = [0.2, -0.1, 0.3]
    y0[12], y0[14] = 0.02, -0.01
    omega_h = math.sqrt(MassModel().total_mass * G / (4 * K_F))
    omega = omega_h + np.array([1.0, -0.5, 0.8, -0.3])
    return y0, omega, 0.04, -0.03


def convergence_study(dts=(0.02, 0.01, 0.005), duration=2.0, dt_ref=1e-4, model=MassModel()):
    """Global RK4 error at ``duration`` s for each step size against a fine reference.

    Open-loop flight from a perturbed hover with rotor speeds and arm
    commands held. Returns ``(errors, observed_orders)``.
    """
    plant = Plant(model)
    y0, omega, cx, cy = _perturbed_hover()

    def run(dt):
        y = y0.copy()
        for _ in range(int(round(duration / dt))):
            y = rk4_step(plant, y, omega, cx, cy, dt)
        return y

    ref = run(dt_ref)
    errors = [float(np.max(np.abs(run(dt) - ref))) for dt in dts]
    orders = [math.log(errors[i] / errors[i + 1]) / math.log(dts[i] / dts[i + 1]) for i in range(len(dts) - 1)]
    return errors, orders


def run_checks(model=MassModel(), grid=5, samples=100_000):
    """Run the property checks; returns a list of CheckResult."""
    out = []
    worst, sym_pd = 0.0, True
    for dx in np.linspace(-model.d_max, model.d_max, grid):
        for dy in np.linspace(-model.d_max, model.d_max, grid):
            J = compute_inertia((dx, dy), model).inertia
            sym_pd &= bool(np.linalg.norm(J - J.T) < 1e-12 and np.all(np.linalg.eigvalsh(J) > 0))
            worst = max(worst, inertia_oracle_error((dx, dy), model, samples))
    out.append(
        CheckResult(
            "inertia oracle",
            worst < 1e-3 and sym_pd,
            f"max relative Frobenius error {worst:.2e} over {grid}x{grid} grid, symmetric PD: {sym_pd}",
        )
    )

    jac = mixer_torque_jacobian(model)
    diag = np.diag(jac)
    off = np.abs(jac - np.diag(diag)).max()
    out.append(
        CheckResult(
            "mixer torque jacobian",
            bool(np.all(diag > 0) and off < 1e-9 * diag.min()),
            f"diagonal {np.array2string(diag, precision=4)}, max off-diagonal {off:.1e}",
        )
    )

    for zeta in (0.5, 0.7, 1.0):
        params = ServoParams(15.0, zeta, model.d_max, float("inf"))
        _, x = simulate_servo_step(params)
        sim = x.max() / 0.1 - 1.0
        theory = step_overshoot(zeta)
        ok = abs(sim - theory) <= 0.01 * theory if theory > 0 else sim < 1e-6
        out.append(
            CheckResult(f"servo overshoot zeta={zeta}", ok, f"simulated {sim:.5f}, closed form {theory:.5f}")
        )

    res = hover_trim_residual(model)
    out.append(CheckResult("hover trim", res < 1e-10, f"max |derivative| {res:.1e}"))
    inv = translational_invariance(model)
    out.append(CheckResult("translation independent of arms", inv, "bitwise equal over 5x5 grid"))
    errors, orders = convergence_study(model=model)
    out.append(
        CheckResult(
            "rk4 convergence order",
            min(orders) >= 3.8,
            "errors " + ", ".join(f"{e:.2e}" for e in errors) + "; orders " + ", ".join(f"{o:.2f}" for o in orders),
        )
    )
    return out

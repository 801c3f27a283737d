"""Fixed-step closed-loop simulation and the two reference missions.

A run alternates a controller update (at ``controller_hz``, on measured
states carrying optional roll/pitch noise) with several RK4 physics
substeps during which rotor speeds and arm commands are held.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .actuation import ActuatorLimits, ServoParams, enforce_end_stops
from .control import CascadedController, ControllerGains, Mode
from .dynamics import K_F, K_M, OMEGA_MAX, Plant, RigidBodyState, SingularityError
from .morphology import MassModel

__all__ = [
    "Waypoints",
    "FigureEight",
    "SimConfig",
    "Telemetry",
    "MissionResult",
    "SimulationAbort",
    "rk4_step",
    "apply_measurement_noise",
    "run_mission",
    "DEFAULT_WAYPOINTS",
    "CSV_COLUMNS",
]

log = logging.getLogger(__name__)

DEFAULT_WAYPOINTS = ((1.0, 1.0, 1.0), (1.0, 2.0, 2.0), (2.0, 2.0, 1.0), (2.0, 3.0, 2.0))

CSV_COLUMNS = tuple(
    "t x y z u v w phi theta psi p q r w1 w2 w3 w4 dx dy dx_cmd dy_cmd xd yd zd".split()
)


@dataclass(frozen=True)
class Waypoints:
    points: tuple = DEFAULT_WAYPOINTS
    capture_radius: float = 0.1

    kind = "waypoint"

    def __post_init__(self):
        pts = tuple(tuple(float(c) for c in p) for p in self.points)
        if not pts or any(len(p) != 3 for p in pts):
            raise ValueError("waypoint list must be nonempty 3-vectors")
        if not self.capture_radius > 0:
            raise ValueError("capture_radius must be > 0")
        object.__setattr__(self, "points", pts)

    @property
    def default_duration(self):
        return 60.0


def _smoothstep(s):
    """Quintic ramp on [0, 1] with zero slope and curvature at both ends."""
    if s <= 0.0:
        return 0.0, 0.0
    if s >= 1.0:
        return 1.0, 0.0
    return s**3 * (10 - 15 * s + 6 * s * s), 30 * s * s * (1 - s) ** 2


@dataclass(frozen=True)
class FigureEight:
    """Lissajous figure eight ``(Ax sin(W t), Ay sin(2 W t), h)``.

    Amplitudes and altitude are faded in over ``ramp`` seconds so the vehicle
    starts on the reference at the origin.
    """

    amplitude_x: float = 2.0
    amplitude_y: float = 1.0
    rate: float = 0.4
    altitude: float = 1.5
    ramp: float = 5.0

    kind = "figure8"

    def __post_init__(self):
        if not (self.amplitude_x > 0 and self.amplitude_y > 0):
            raise ValueError("figure-eight amplitudes must be > 0")
        if not self.rate > 0:
            raise ValueError("figure-eight rate must be > 0")
        if self.ramp < 0:
            raise ValueError("ramp must be >= 0")

    @property
    def default_duration(self):
        return self.ramp + 2 * (2 * math.pi / self.rate)

    def reference(self, t):
        """Target position and velocity at time ``t``."""
        if self.ramp > 0:
            s, ds = _smoothstep(t / self.ramp)
            ds /= self.ramp
        else:
            s, ds = 1.0, 0.0
        w = self.rate
        bx = self.amplitude_x * math.sin(w * t)
        by = self.amplitude_y * math.sin(2 * w * t)
        dbx = self.amplitude_x * w * math.cos(w * t)
        dby = 2 * self.amplitude_y * w * math.cos(2 * w * t)
        h = self.altitude
        pos = np.array([s * bx, s * by, s * h])
        vel = np.array([ds * bx + s * dbx, ds * by + s * dby, ds * h])
        return pos, vel


@dataclass(frozen=True)
class SimConfig:
    dt_physics: float = 1e-3
    controller_hz: float = 250.0
    duration: float = None
    rng_seed: int = 0
    noise_deg: float = 0.0
    mode: Mode = Mode.COMBINED
    mission: object = field(default_factory=Waypoints)
    servo: ServoParams = field(default_factory=ServoParams)
    k_f: float = K_F
    k_m: float = K_M
    omega_max: float = OMEGA_MAX
    tilt_max: float = 0.5
    stop_when_complete: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        problems = self.violations()
        if problems:
            raise ValueError("invalid simulation config: " + "; ".join(problems))

    @property
    def substeps(self):
        return int(round(1.0 / (self.controller_hz * self.dt_physics)))

    @property
    def horizon(self):
        return self.duration if self.duration is not None else self.mission.default_duration

    def violations(self):
        out = []
        if not self.dt_physics > 0:
            out.append("dt_physics must be > 0")
        if not self.controller_hz > 0:
            out.append("controller_hz must be > 0")
        if self.dt_physics > 0 and self.controller_hz > 0:
            ratio = 1.0 / (self.controller_hz * self.dt_physics)
            if ratio < 1 - 1e-9 or abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
                out.append(
                    f"controller period 1/{self.controller_hz:g} s is not an integer "
                    f"multiple of dt_physics={self.dt_physics:g} s"
                )
        if self.duration is not None and not self.duration > 0:
            out.append("duration must be > 0")
        if not self.noise_deg >= 0:
            out.append("noise_deg must be >= 0")
        if not (isinstance(self.rng_seed, (int, np.integer)) and 0 <= self.rng_seed < 2**64):
            out.append("rng_seed must be an unsigned 64-bit integer")
        for name in ("k_f", "k_m", "omega_max", "tilt_max"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0")
        return out


class Telemetry:
    """Column store, one row per controller step.

    ``data`` has the columns of :data:`CSV_COLUMNS`; the roll and pitch the
    controller actually saw are kept in ``measured_euler``.
    """

    def __init__(self, data, measured_euler, mode):
        self.data = data
        self.measured_euler = measured_euler
        self.mode = Mode.parse(mode)

    def __len__(self):
        return self.data.shape[0]

    def __getitem__(self, name):
        return self.data[:, CSV_COLUMNS.index(name)]

    def records(self):
        for row in self.data:
            rec = dict(zip(CSV_COLUMNS, row.tolist()))
            rec["mode"] = self.mode.value
            yield rec

    def to_csv(self, path):
        lines = [",".join(CSV_COLUMNS)]
        for row in self.data.tolist():
            lines.append(",".join(repr(v) for v in row))
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path, mode=Mode.COMBINED):
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected telemetry header in {path}")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data, np.full((len(data), 2), np.nan), mode)


@dataclass
class MissionResult:
    telemetry: Telemetry
    summary: dict


class SimulationAbort(RuntimeError):
    """Run stopped on a non-finite state or the pitch singularity guard."""

    def __init__(self, message, t, state, result=None):
        super().__init__(f"{message} at t={t:.4f} s")
        self.t = t
        self.state = state
        self.result = result


def rk4_step(plant, y, omega, dx_cmd, dy_cmd, dt):
    """One classical Runge-Kutta step of the augmented state.

    Inputs are held over the step. Servo end stops are enforced afterwards.
    """
    f = plant.derivative
    k1 = f(y, omega, dx_cmd, dy_cmd)
    k2 = f(y + 0.5 * dt * k1, omega, dx_cmd, dy_cmd)
    k3 = f(y + 0.5 * dt * k2, omega, dx_cmd, dy_cmd)
    k4 = f(y + dt * k3, omega, dx_cmd, dy_cmd)
    out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    d_max = plant.travel
    if abs(out[12]) > d_max:
        out[12], out[13] = enforce_end_stops(out[12], out[13], d_max)
    if abs(out[14]) > d_max:
        out[14], out[15] = enforce_end_stops(out[14], out[15], d_max)
    return out


def apply_measurement_noise(state, noise_deg, rng):
    """Copy of ``state`` with roll and pitch perturbed by U(-a, a) degrees.

    Accepts a RigidBodyState or a state vector (roll, pitch at indices 6, 7).
    """
    if noise_deg < 0:
        raise ValueError("noise_deg must be >= 0")
    if isinstance(state, RigidBodyState):
        out = RigidBodyState(state.pos.copy(), state.vel_body.copy(), state.euler.copy(), state.rates.copy())
        euler = out.euler
    else:
        out = np.array(state, dtype=float, copy=True)
        euler = out[6:9]
    if noise_deg > 0:
        half = math.radians(noise_deg)
        euler[0:2] += rng.uniform(-half, half, size=2)
    return out


def _initial_state():
    # origin, level, at rest, nominal arms
    return np.zeros(16)


def run_mission(config=SimConfig(), model=MassModel(), gains=ControllerGains(), initial=None):
    """Simulate one mission and return a :class:`MissionResult`.

    ``initial`` optionally overrides the 16-element starting state.
    Raises :class:`SimulationAbort` (carrying the partial result) when the
    state becomes non-finite or pitch hits the singularity guard.
    """
    servo = ServoParams(
        config.servo.omega_n, config.servo.zeta, min(config.servo.d_max, model.d_max), config.servo.rate_max
    )
    plant = Plant(model, servo, config.k_f, config.k_m)
    limits = ActuatorLimits(config.omega_max, servo.d_max)
    ctrl = CascadedController(gains, config.mode, model, config.k_f, limits, config.tilt_max)
    rng = np.random.default_rng(config.rng_seed)

    n_sub = config.substeps
    dt = config.dt_physics
    dt_ctrl = n_sub * dt
    n_steps = int(math.floor(config.horizon / dt_ctrl + 1e-9))
    mission = config.mission
    waypoint_mode = isinstance(mission, Waypoints)

    y = _initial_state() if initial is None else np.array(initial, dtype=float)
    rows = np.empty((n_steps, len(CSV_COLUMNS)))
    measured = np.empty((n_steps, 2))
    wp_index = 0
    arrivals = []
    sat_steps = 0
    abort = None
    monitors = {"finite": True, "arm_travel": True, "theta_guard": True}

    k = 0
    for k in range(n_steps):
        t = k * dt_ctrl
        if waypoint_mode:
            if wp_index < len(mission.points):
                target = np.asarray(mission.points[wp_index])
                if np.linalg.norm(y[0:3] - target) <= mission.capture_radius:
                    arrivals.append(t)
                    log.debug("waypoint %d captured at t=%.3f s", wp_index + 1, t)
                    wp_index += 1
            target = np.asarray(mission.points[min(wp_index, len(mission.points) - 1)])
            target_vel = np.zeros(3)
            if config.stop_when_complete and wp_index == len(mission.points):
                rows = rows[:k]
                measured = measured[:k]
                break
        else:
            target, target_vel = mission.reference(t)

        y_meas = apply_measurement_noise(y[:12], config.noise_deg, rng)
        measured[k] = y_meas[6:8]
        cmd = ctrl.step(RigidBodyState.from_vector(y_meas), target, target_vel, dt_ctrl)
        if ctrl.flags.any:
            sat_steps += 1
        rows[k, 0] = t
        rows[k, 1:13] = y[:12]
        rows[k, 13:17] = cmd.omega
        rows[k, 17] = y[12]
        rows[k, 18] = y[14]
        rows[k, 19] = cmd.dx_cmd
        rows[k, 20] = cmd.dy_cmd
        rows[k, 21:24] = target

        try:
            for _ in range(n_sub):
                y = rk4_step(plant, y, cmd.omega, cmd.dx_cmd, cmd.dy_cmd, dt)
        except SingularityError as exc:
            monitors["theta_guard"] = False
            abort = ("pitch singularity guard", t, exc)
        else:
            if not np.all(np.isfinite(y)):
                monitors["finite"] = False
                abort = ("non-finite state", t, None)
            elif max(abs(y[12]), abs(y[14])) > servo.d_max * (1 + 1e-9):
                monitors["arm_travel"] = False
        if abort is not None:
            rows = rows[: k + 1]
            measured = measured[: k + 1]
            break

    telemetry = Telemetry(rows, measured, config.mode)
    summary = summarize(telemetry, config, arrivals, sat_steps, monitors, aborted=abort is not None)
    result = MissionResult(telemetry, summary)
    if abort is not None:
        message, t_abort, _ = abort
        raise SimulationAbort(message, t_abort, y.copy(), result)
    return result


def summarize(telemetry, config, arrivals, sat_steps, monitors, aborted=False):
    tel = telemetry
    mission = config.mission
    out = {
        "mode": config.mode.value,
        "mission": mission.kind,
        "seed": int(config.rng_seed),
        "noise_deg": config.noise_deg,
        "steps": len(tel),
        "duration": float(tel["t"][-1]) + 1.0 / config.controller_hz if len(tel) else 0.0,
        "aborted": aborted,
        "monitors": dict(monitors),
        "saturated_steps": sat_steps,
    }
    if len(tel):
        ex = tel["x"] - tel["xd"]
        ey = tel["y"] - tel["yd"]
        ez = tel["z"] - tel["zd"]
        phi, theta = tel["phi"], tel["theta"]
        out.update(
            rms_lateral_error=float(np.sqrt(np.mean(ex * ex + ey * ey))),
            rms_error=float(np.sqrt(np.mean(ex * ex + ey * ey + ez * ez))),
            max_abs_dx=float(np.max(np.abs(tel["dx"]))),
            max_abs_dy=float(np.max(np.abs(tel["dy"]))),
            max_tilt=float(np.max(np.maximum(np.abs(phi), np.abs(theta)))),
            peak_abs_phi=float(np.max(np.abs(phi))),
            peak_abs_theta=float(np.max(np.abs(theta))),
            peak_phi_plus_theta=float(np.max(np.abs(phi) + np.abs(theta))),
            max_omega=float(np.max(tel.data[:, 13:17])),
            min_omega=float(np.min(tel.data[:, 13:17])),
        )
    if isinstance(mission, Waypoints):
        out["waypoints_total"] = len(mission.points)
        out["waypoints_captured"] = len(arrivals)
        out["arrival_times"] = [float(a) for a in arrivals]
    out["completed"] = not aborted and (
        not isinstance(mission, Waypoints) or len(arrivals) == len(mission.points)
    )
    out["ok"] = out["completed"] and all(monitors.values())
    return out

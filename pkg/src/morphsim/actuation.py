"""Arm servos and actuator saturation.

Each arm is driven by a servo modelled as the second-order lag
``w_n^2 / (s^2 + 2 zeta w_n s + w_n^2)`` from commanded to actual
displacement, with a slew-rate limit and hard end stops at ``+/-d_max``.
"""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ServoParams",
    "ActuatorLimits",
    "SaturationFlags",
    "servo_derivative",
    "enforce_end_stops",
    "saturate_command",
    "step_overshoot",
]


@dataclass(frozen=True)
class ServoParams:
    omega_n: float = 15.0
    zeta: float = 0.7
    d_max: float = 0.15
    rate_max: float = 0.5

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValueError("invalid servo parameters: " + "; ".join(problems))

    def violations(self):
        out = []
        if not self.omega_n > 0:
            out.append("omega_n must be > 0")
        if not 0 < self.zeta <= 1.2:
            out.append("zeta must be in (0, 1.2]")
        if not self.d_max > 0:
            out.append("d_max must be > 0")
        if not self.rate_max > 0:
            out.append("rate_max must be > 0 (use inf to disable)")
        return out


@dataclass(frozen=True)
class ActuatorLimits:
    omega_max: float = 800.0
    d_max: float = 0.15


@dataclass(frozen=True)
class SaturationFlags:
    rotors: tuple = (False, False, False, False)
    dx: bool = False
    dy: bool = False

    @property
    def any(self):
        return any(self.rotors) or self.dx or self.dy

    def names(self):
        out = [f"omega{i + 1}" for i, hit in enumerate(self.rotors) if hit]
        if self.dx:
            out.append("dx_cmd")
        if self.dy:
            out.append("dy_cmd")
        return out


def servo_derivative(position, rate, command, params):
    """Return ``(position_rate, rate_rate)`` for one servo channel.

    The position rate is the rate state clipped to ``+/-rate_max``. While the
    rate sits on the limit, acceleration further past it is dropped so the
    rate state cannot wind up.
    """
    wn = params.omega_n
    accel = wn * wn * (command - position) - 2.0 * params.zeta * wn * rate
    rmax = params.rate_max
    if rate >= rmax:
        if accel > 0:
            accel = 0.0
        return rmax, accel
    if rate <= -rmax:
        if accel < 0:
            accel = 0.0
        return -rmax, accel
    return rate, accel


def enforce_end_stops(position, rate, d_max):
    """Clamp a servo state onto its mechanical travel range."""
    if position > d_max:
        return d_max, min(rate, 0.0)
    if position < -d_max:
        return -d_max, max(rate, 0.0)
    return position, rate


def saturate_command(raw, limits=ActuatorLimits()):
    """Clamp rotor speeds to ``[0, omega_max]`` and arm commands to ``+/-d_max``.

    ``raw`` is any dataclass with ``omega``, ``dx_cmd`` and ``dy_cmd`` fields.
    Returns ``(clamped, SaturationFlags)``.
    """
    omega = np.asarray(raw.omega, dtype=float)
    clipped = np.clip(omega, 0.0, limits.omega_max)
    dx = min(max(raw.dx_cmd, -limits.d_max), limits.d_max)
    dy = min(max(raw.dy_cmd, -limits.d_max), limits.d_max)
    flags = SaturationFlags(
        rotors=tuple(bool(f) for f in clipped != omega),
        dx=dx != raw.dx_cmd,
        dy=dy != raw.dy_cmd,
    )
    return dataclasses.replace(raw, omega=clipped, dx_cmd=dx, dy_cmd=dy), flags


def step_overshoot(zeta):
    """Fractional peak overshoot of the unit step response (0 when zeta >= 1)."""
    if zeta >= 1.0:
        return 0.0
    return math.exp(-math.pi * zeta / math.sqrt(1.0 - zeta * zeta))

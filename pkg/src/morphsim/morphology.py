"""Geometry and mass properties of the sliding-arm quadcopter.

The airframe is a plus configuration. One rod carries rotors 1 and 3 along
the body x axis, the other carries rotors 2 and 4 along the body y axis.
Each rod slides along its own axis, so the rotor spacing on a rod stays
fixed at ``2 * l_nominal`` while the rotors shift relative to the body.

Components and their models:

* central body: solid cuboid fixed at the body-frame origin
* two arm rods: solid cuboids, X rod at ``+arm_z_offset``, Y rod at
  ``-arm_z_offset``
* four motor/propeller units: solid cylinders with the spin axis along z
"""

from dataclasses import dataclass, field, fields

import numpy as np

__all__ = [
    "MorphologyError",
    "MassModel",
    "MorphState",
    "MassProperties",
    "motor_positions",
    "compute_cog",
    "component_inertia_cuboid",
    "component_inertia_cylinder",
    "compute_inertia",
    "component_layout",
]

D_MAX = 0.15


class MorphologyError(ValueError):
    """Raised for invalid geometry, masses, or out-of-range displacements."""


@dataclass(frozen=True)
class MassModel:
    """Component masses (kg) and dimensions (m) of the airframe.

    ``total_mass`` is the declared vehicle mass; the components must add up
    to it. ``arm_dims`` is (length, width, height) of one rod, with the
    length running along the direction of travel.
    """

    total_mass: float = 1.56
    body_mass: float = 0.80
    body_dims: tuple = (0.12, 0.12, 0.06)
    arm_mass: float = 0.20
    arm_dims: tuple = (0.50, 0.02, 0.01)
    motor_mass: float = 0.09
    motor_radius: float = 0.014
    motor_height: float = 0.03
    l_nominal: float = 0.25
    arm_z_offset: float = 0.01
    d_max: float = D_MAX

    def __post_init__(self):
        object.__setattr__(self, "body_dims", tuple(float(v) for v in self.body_dims))
        object.__setattr__(self, "arm_dims", tuple(float(v) for v in self.arm_dims))
        problems = self.violations()
        if problems:
            raise MorphologyError("invalid mass model: " + "; ".join(problems))

    @property
    def component_mass(self):
        return self.body_mass + 2 * self.arm_mass + 4 * self.motor_mass

    def violations(self):
        """Return a list of human-readable invariant violations (empty if valid)."""
        out = []
        for name in ("total_mass", "body_mass", "arm_mass", "motor_mass"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0")
        for name in ("motor_radius", "motor_height", "l_nominal", "d_max"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0")
        for name in ("body_dims", "arm_dims"):
            dims = getattr(self, name)
            if len(dims) != 3 or not all(d > 0 for d in dims):
                out.append(f"{name} must be three positive lengths")
        if self.arm_z_offset < 0:
            out.append("arm_z_offset must be >= 0")
        if self.total_mass > 0:
            rel = abs(self.component_mass - self.total_mass) / self.total_mass
            if rel > 1e-12:
                out.append(
                    f"component masses sum to {self.component_mass:.6g} kg, "
                    f"total_mass is {self.total_mass:.6g} kg"
                )
        if len(self.arm_dims) == 3 and abs(self.arm_dims[0] - 2 * self.l_nominal) > 1e-12:
            out.append("arm_dims length must equal 2 * l_nominal")
        if self.d_max >= self.l_nominal:
            out.append("d_max must be smaller than l_nominal")
        return out

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise MorphologyError(f"unknown mass_model keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class MorphState:
    """Arm displacements, servo rates, and latched displacement commands."""

    dx: float = 0.0
    dy: float = 0.0
    dx_rate: float = 0.0
    dy_rate: float = 0.0
    dx_cmd: float = 0.0
    dy_cmd: float = 0.0


@dataclass
class MassProperties:
    cog: np.ndarray
    inertia: np.ndarray
    torque_arms: np.ndarray = field(repr=False)


def _check_travel(dx, dy, model):
    # small tolerance so that a servo sitting on its end stop stays valid
    lim = model.d_max * (1 + 1e-9)
    if not abs(dx) <= lim:
        raise MorphologyError(f"x-arm displacement {dx!r} outside +/-{model.d_max} m")
    if not abs(dy) <= lim:
        raise MorphologyError(f"y-arm displacement {dy!r} outside +/-{model.d_max} m")


def _displacements(morph):
    if isinstance(morph, MorphState):
        return morph.dx, morph.dy
    dx, dy = morph
    return dx, dy


def motor_positions(morph, model=MassModel()):
    """Rotor hub positions in the body frame, shape (4, 3), rotors 1..4.

    ``morph`` is a :class:`MorphState` or a ``(dx, dy)`` pair.
    """
    dx, dy = _displacements(morph)
    _check_travel(dx, dy, model)
    l = model.l_nominal
    zx, zy = model.arm_z_offset, -model.arm_z_offset
    return np.array(
        [
            [l + dx, 0.0, zx],
            [0.0, l + dy, zy],
            [-l + dx, 0.0, zx],
            [0.0, -l + dy, zy],
        ]
    )


def component_inertia_cuboid(mass, dims):
    """Inertia of a solid cuboid about its centroid; dims along (x, y, z)."""
    a, b, c = dims
    if not (mass > 0 and a > 0 and b > 0 and c > 0):
        raise MorphologyError("cuboid mass and dimensions must be positive")
    k = mass / 12.0
    return np.diag([k * (b * b + c * c), k * (a * a + c * c), k * (a * a + b * b)])


def component_inertia_cylinder(mass, radius, height):
    """Inertia of a solid cylinder about its centroid, axis along z."""
    if not (mass > 0 and radius > 0 and height > 0):
        raise MorphologyError("cylinder mass, radius and height must be positive")
    ia = mass * (3 * radius * radius + height * height) / 12.0
    return np.diag([ia, ia, 0.5 * mass * radius * radius])


def component_layout(morph, model=MassModel()):
    """Per-component masses, centroids and local inertias.

    Returns ``(names, masses (7,), centroids (7, 3), inertias (7, 3, 3))``
    ordered body, x-arm, y-arm, motors 1..4.
    """
    dx, dy = _displacements(morph)
    motors = motor_positions((dx, dy), model)
    length, width, height = model.arm_dims
    names = ["body", "arm_x", "arm_y", "motor1", "motor2", "motor3", "motor4"]
    masses = np.array([model.body_mass, model.arm_mass, model.arm_mass] + [model.motor_mass] * 4)
    centroids = np.vstack(
        [
            [0.0, 0.0, 0.0],
            [dx, 0.0, model.arm_z_offset],
            [0.0, dy, -model.arm_z_offset],
            motors,
        ]
    )
    j_motor = component_inertia_cylinder(model.motor_mass, model.motor_radius, model.motor_height)
    inertias = np.stack(
        [
            component_inertia_cuboid(model.body_mass, model.body_dims),
            component_inertia_cuboid(model.arm_mass, (length, width, height)),
            component_inertia_cuboid(model.arm_mass, (width, length, height)),
            j_motor,
            j_motor,
            j_motor,
            j_motor,
        ]
    )
    return names, masses, centroids, inertias


def compute_cog(morph, model=MassModel()):
    """Vehicle centre of gravity in the body frame."""
    _, masses, centroids, _ = component_layout(morph, model)
    return masses @ centroids / masses.sum()


def compute_inertia(morph, model=MassModel()):
    """Mass properties about the instantaneous CoG.

    Each component inertia is shifted to the vehicle CoG with the
    parallel-axis theorem ``J_c + m_c (|d|^2 I - d d^T)`` and summed.
    """
    _, masses, centroids, inertias = component_layout(morph, model)
    cog = masses @ centroids / masses.sum()
    d = centroids - cog
    sq = np.einsum("ij,ij->i", d, d)
    inertia = inertias.sum(axis=0) + np.eye(3) * (masses @ sq) - (d.T * masses) @ d
    inertia = 0.5 * (inertia + inertia.T)
    arms = centroids[3:, :2] - cog[:2]
    return MassProperties(cog=cog, inertia=inertia, torque_arms=arms)


class MassPropertyCache:
    """Fast repeated evaluation of :func:`compute_inertia` for one model.

    Component centroids are affine in ``(dx, dy)``, so the CoG is affine and
    the inertia about it is an exact quadratic in the displacements. The
    expansion coefficients are extracted once from :func:`compute_inertia`;
    evaluations agree with it to rounding.
    """

    def __init__(self, model=MassModel()):
        self.model = model
        h = model.d_max
        j = lambda a, b: compute_inertia((a, b), model).inertia
        c = lambda a, b: compute_cog((a, b), model)
        j0 = j(0.0, 0.0)
        jxp, jxm, jyp, jym, jxy = j(h, 0.0), j(-h, 0.0), j(0.0, h), j(0.0, -h), j(h, h)
        self.j0 = j0
        self.jx = (jxp - jxm) / (2 * h)
        self.jy = (jyp - jym) / (2 * h)
        self.jxx = (jxp + jxm - 2 * j0) / (2 * h * h)
        self.jyy = (jyp + jym - 2 * j0) / (2 * h * h)
        self.jxy = (jxy - jxp - jyp + j0) / (h * h)
        c0 = c(0.0, 0.0)
        self.c0 = c0
        self.cx = (c(h, 0.0) - c(-h, 0.0)) / (2 * h)
        self.cy = (c(0.0, h) - c(0.0, -h)) / (2 * h)
        # upper-triangle entries as flat python floats for scalar evaluation
        idx = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]
        self._coef = [
            tuple(float(m[a, b]) for a, b in idx)
            for m in (self.j0, self.jx, self.jy, self.jxx, self.jyy, self.jxy)
        ]
        self._cog = [tuple(float(v) for v in vec) for vec in (self.c0, self.cx, self.cy)]

    def scalars(self, dx, dy):
        """Return ``(cog_x, cog_y, (Jxx, Jyy, Jzz, Jxy, Jxz, Jyz))``."""
        _check_travel(dx, dy, self.model)
        k0, kx, ky, kxx, kyy, kxy = self._coef
        dx2, dy2, dxy = dx * dx, dy * dy, dx * dy
        inertia = tuple(
            k0[i] + kx[i] * dx + ky[i] * dy + kxx[i] * dx2 + kyy[i] * dy2 + kxy[i] * dxy
            for i in range(6)
        )
        c0, cx, cy = self._cog
        return c0[0] + cx[0] * dx + cy[0] * dy, c0[1] + cx[1] * dx + cy[1] * dy, inertia

    def __call__(self, dx, dy):
        """Return ``(cog, inertia, torque_arms)`` as arrays."""
        _check_travel(dx, dy, self.model)
        cog = self.c0 + self.cx * dx + self.cy * dy
        inertia = (
            self.j0 + self.jx * dx + self.jy * dy
            + self.jxx * dx * dx + self.jyy * dy * dy + self.jxy * dx * dy
        )
        motors = motor_positions((dx, dy), self.model)
        return cog, inertia, motors[:, :2] - cog[:2]

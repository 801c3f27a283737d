"""SVG figures from telemetry.

Output is deterministic (fixed hash salt, no timestamp) so regenerated
plots diff cleanly.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .simulation import Telemetry  # noqa: E402

__all__ = ["emit_plots", "LABELS"]

matplotlib.rcParams["svg.hashsalt"] = "morphsim"
matplotlib.rcParams["svg.fonttype"] = "none"

LABELS = {
    "conventional": "Conventional Quad",
    "sliding": "Sliding Arm Quad Only",
    "combined": "Conventional + Sliding Arm Quad",
}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


MAX_POINTS = 3000


def _thin(tel):
    step = max(1, -(-len(tel) // MAX_POINTS))
    return Telemetry(tel.data[::step], tel.measured_euler[::step], tel.mode)


def _runs(telemetry):
    if isinstance(telemetry, Telemetry):
        telemetry = {telemetry.mode.value: telemetry}
    runs = dict(telemetry)
    if not runs or any(len(t) == 0 for t in runs.values()):
        raise ValueError("cannot plot empty telemetry")
    return {mode: _thin(tel) for mode, tel in runs.items()}


def _trajectory_3d(runs, path):
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    first = next(iter(runs.values()))
    ax.plot(first["xd"], first["yd"], first["zd"], "k:", lw=1, label="Target")
    for mode, tel in runs.items():
        ax.plot(tel["x"], tel["y"], tel["z"], lw=1.2, label=LABELS.get(mode, mode))
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_zlabel("z (m)")
    ax.legend(fontsize=7)
    ax.set_title("Three dimensional trajectory")
    return _save(fig, path)


def _trajectory_2d(runs, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    first = next(iter(runs.values()))
    ax.plot(first["xd"], first["yd"], "k:", lw=1, label="Desired")
    for mode, tel in runs.items():
        ax.plot(tel["x"], tel["y"], lw=1.2, label=LABELS.get(mode, mode))
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(fontsize=7)
    ax.set_title("Two dimensional trajectory")
    fig.tight_layout()
    return _save(fig, path)


def _series(runs, path, panels, title):
    fig, axes = plt.subplots(len(panels), 1, figsize=(6, 1.8 * len(panels) + 0.6), sharex=True)
    for ax, (ylabel, columns) in zip(axes, panels):
        for mode, tel in runs.items():
            for suffix, col, transform in columns:
                label = LABELS.get(mode, mode) + (f" {suffix}" if suffix else "")
                ax.plot(tel["t"], transform(tel[col]), lw=1, label=label)
        ax.set_ylabel(ylabel)
        ax.grid(alpha=0.3)
    axes[0].legend(fontsize=6)
    axes[0].set_title(title)
    axes[-1].set_xlabel("t (s)")
    fig.tight_layout()
    return _save(fig, path)


def emit_plots(telemetry, kind, out_dir, prefix, l_nominal=0.25):
    """Write the figure set for one run or an overlay of several.

    ``telemetry`` is a Telemetry or a ``{mode: Telemetry}`` mapping;
    ``kind`` is "waypoint" (3D trajectory) or "figure8" (2D overlay).
    Returns the list of written paths.
    """
    runs = _runs(telemetry)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ident = lambda v: v  # noqa: E731
    paths = []
    if kind == "waypoint":
        paths.append(_trajectory_3d(runs, out / f"{prefix}_trajectory.svg"))
    else:
        paths.append(_trajectory_2d(runs, out / f"{prefix}_trajectory.svg"))
    paths.append(
        _series(
            runs,
            out / f"{prefix}_euler.svg",
            [
                ("roll (rad)", [("", "phi", ident)]),
                ("pitch (rad)", [("", "theta", ident)]),
                ("yaw (rad)", [("", "psi", ident)]),
            ],
            "Euler angles",
        )
    )
    paths.append(
        _series(
            runs,
            out / f"{prefix}_rotors.svg",
            [(f"w{i} (rad/s)", [("", f"w{i}", ident)]) for i in range(1, 5)],
            "Rotor angular speeds",
        )
    )
    # arm lengths on each side of the body: l + d and l - d
    paths.append(
        _series(
            runs,
            out / f"{prefix}_arms.svg",
            [
                ("x-arm length (m)", [("l+dx", "dx", lambda d: l_nominal + d), ("l-dx", "dx", lambda d: l_nominal - d)]),
                ("y-arm length (m)", [("l+dy", "dy", lambda d: l_nominal + d), ("l-dy", "dy", lambda d: l_nominal - d)]),
            ],
            "Arm lengths (l +/- displacement)",
        )
    )
    return paths

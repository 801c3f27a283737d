"""JSON run configuration.

Every key is optional; absent keys take the library defaults. Layout::

    {
      "mass_model": {"total_mass": 1.56, "l_nominal": 0.25, ...},
      "servo": {"omega_n": 15.0, "zeta": 0.7, "d_max": 0.15, "rate_max": 0.5},
      "rotor": {"k_f": 2.2e-4, "k_m": 5.4e-6, "omega_max": 800.0},
      "gains": {"x": {"kp": 4, "ki": 0.05, "kd": 4}, "l_theta": [0.1, 0.05, 0.04], ...},
      "mode": "combined",
      "controller_hz": 250,
      "dt_physics": 0.001,
      "duration": null,
      "seed": 0,
      "noise_deg": 0.0,
      "tilt_max": 0.5,
      "mission": "waypoint",
      "waypoint": {"points": [[1, 1, 1], ...], "capture_radius": 0.1},
      "figure8": {"amplitude_x": 2.0, "amplitude_y": 1.0, "rate": 0.4,
                  "altitude": 1.5, "ramp": 5.0}
    }
"""

import dataclasses
import json
from pathlib import Path

from .actuation import ServoParams
from .control import ControllerGains, Mode
from .dynamics import K_F, K_M, OMEGA_MAX
from .morphology import MassModel
from .simulation import FigureEight, SimConfig, Waypoints

__all__ = ["ConfigError", "load_config", "config_from_dict", "default_config_dict"]

TOP_LEVEL_KEYS = {
    "mass_model",
    "servo",
    "rotor",
    "gains",
    "mode",
    "controller_hz",
    "dt_physics",
    "duration",
    "seed",
    "noise_deg",
    "tilt_max",
    "mission",
    "waypoint",
    "figure8",
}


class ConfigError(ValueError):
    """Configuration could not be parsed or violates model invariants.

    ``problems`` lists ``(key_path, message)`` pairs.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        text = "; ".join(f"{key}: {msg}" for key, msg in self.problems)
        super().__init__(f"invalid configuration: {text}")


def _section(data, key, problems):
    value = data.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        problems.append((key, "must be a JSON object"))
        return {}
    return value


def _build(key, factory, kwargs, problems, known=None):
    if known is not None:
        unknown = set(kwargs) - known
        if unknown:
            problems.append((key, f"unknown keys {sorted(unknown)}"))
            return None
    try:
        return factory(**kwargs)
    except (TypeError, ValueError) as exc:
        problems.append((key, str(exc)))
        return None


def _names(cls):
    return {f.name for f in dataclasses.fields(cls)}


def config_from_dict(data, mission=None):
    """Validate a parsed config mapping and build the run objects.

    ``mission`` ("waypoint" or "figure8") overrides the file's ``mission``.
    Returns ``(SimConfig, MassModel, ControllerGains)``; raises
    :class:`ConfigError` listing every violated invariant.
    """
    problems = []
    if not isinstance(data, dict):
        raise ConfigError([("<root>", "top level must be a JSON object")])
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        problems.append(("<root>", f"unknown keys {sorted(unknown)}"))

    mm = _section(data, "mass_model", problems)
    model = _build("mass_model", MassModel, mm, problems, _names(MassModel))

    sv = dict(_section(data, "servo", problems))
    if model is not None:
        sv.setdefault("d_max", model.d_max)
    servo = _build("servo", ServoParams, sv, problems, _names(ServoParams))
    if servo is not None and model is not None and servo.d_max > model.d_max:
        problems.append(("servo.d_max", f"exceeds mass_model.d_max={model.d_max}"))

    rotor = _section(data, "rotor", problems)
    unknown_rotor = set(rotor) - {"k_f", "k_m", "omega_max"}
    if unknown_rotor:
        problems.append(("rotor", f"unknown keys {sorted(unknown_rotor)}"))

    gains = None
    raw_gains = _section(data, "gains", problems)
    try:
        gains = ControllerGains.from_dict(raw_gains)
        for msg in gains.violations():
            problems.append(("gains", msg))
    except (TypeError, ValueError) as exc:
        problems.append(("gains", str(exc)))

    try:
        mode = Mode.parse(data.get("mode", "combined"))
    except ValueError as exc:
        problems.append(("mode", str(exc)))
        mode = Mode.COMBINED

    kind = mission or data.get("mission", "waypoint")
    mission_obj = None
    if kind == "waypoint":
        wp = dict(_section(data, "waypoint", problems))
        if "points" in wp:
            wp["points"] = tuple(tuple(p) for p in wp["points"])
        mission_obj = _build("waypoint", Waypoints, wp, problems, {"points", "capture_radius"})
    elif kind == "figure8":
        f8 = _section(data, "figure8", problems)
        mission_obj = _build("figure8", FigureEight, f8, problems, _names(FigureEight))
    else:
        problems.append(("mission", f"unknown mission {kind!r}; expected waypoint or figure8"))

    sim = None
    if not problems:
        seed = data.get("seed", 0)
        sim_kwargs = dict(
            dt_physics=data.get("dt_physics", 1e-3),
            controller_hz=data.get("controller_hz", 250.0),
            duration=data.get("duration"),
            rng_seed=seed,
            noise_deg=data.get("noise_deg", 0.0),
            mode=mode,
            mission=mission_obj,
            servo=servo,
            k_f=rotor.get("k_f", K_F),
            k_m=rotor.get("k_m", K_M),
            omega_max=rotor.get("omega_max", OMEGA_MAX),
            tilt_max=data.get("tilt_max", 0.5),
        )
        try:
            sim = SimConfig(**sim_kwargs)
        except (TypeError, ValueError):
            # re-run the checks to report every violation with its key
            probe = object.__new__(SimConfig)
            for k, v in sim_kwargs.items():
                object.__setattr__(probe, k, v)
            for msg in SimConfig.violations(probe):
                problems.append((_sim_key(msg), msg))
    if problems:
        raise ConfigError(problems)
    return sim, model, gains


def _sim_key(message):
    if message.startswith("controller period"):
        return "controller_hz"
    if message.startswith("rng_seed"):
        return "seed"
    if message.startswith(("k_f", "k_m", "omega_max")):
        return "rotor." + message.split()[0]
    return message.split()[0]


def load_config(path, mission=None):
    """Read and validate a JSON config file.

    Parse failures raise :class:`ConfigError` with line and column context.
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        context = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise ConfigError(
            [(str(path), f"JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}: {context!r}")]
        ) from exc
    return config_from_dict(data, mission)


def default_config_dict():
    """The full default configuration as a JSON-ready mapping."""
    model = MassModel()
    servo = ServoParams()
    mission = Waypoints()
    fig8 = FigureEight()
    return {
        "mass_model": model.to_dict(),
        "servo": dataclasses.asdict(servo),
        "rotor": {"k_f": K_F, "k_m": K_M, "omega_max": OMEGA_MAX},
        "gains": ControllerGains().to_dict(),
        "mode": Mode.COMBINED.value,
        "controller_hz": 250.0,
        "dt_physics": 1e-3,
        "duration": None,
        "seed": 0,
        "noise_deg": 0.0,
        "tilt_max": 0.5,
        "mission": "waypoint",
        "waypoint": {"points": [list(p) for p in mission.points], "capture_radius": mission.capture_radius},
        "figure8": dataclasses.asdict(fig8),
    }

"""Command-line front end.

    morphsim waypoint [--config C] [--out DIR] [--seed N] [--mode M] [--duration S]
    morphsim figure8  [...]
    morphsim compare  [waypoint|figure8] [...]
    morphsim validate [--config C]

Set ``MORPHSIM_LOG`` (DEBUG, INFO, WARNING, ...) for log verbosity.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, config_from_dict, load_config
from .control import Mode
from .simulation import SimulationAbort, run_mission

log = logging.getLogger("morphsim")

MODE_ORDER = (Mode.CONVENTIONAL, Mode.SLIDING, Mode.COMBINED)


def _write_json(path, data):
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _simulate(sim, model, gains):
    """Run one mission; on abort return the partial result and the error."""
    try:
        return run_mission(sim, model, gains), None
    except SimulationAbort as exc:
        log.error("%s mission aborted in %s mode: %s", sim.mission.kind, sim.mode.value, exc)
        return exc.result, exc


def run_single(sim, model, gains, out_dir, plots=True):
    """Run one mission and write ``<mission>_<mode>`` CSV, JSON and SVGs.

    Returns ``(MissionResult, exit_code)``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prefix = f"{sim.mission.kind}_{sim.mode.value}"
    result, abort = _simulate(sim, model, gains)
    result.telemetry.to_csv(out / f"{prefix}.csv")
    _write_json(out / f"{prefix}_summary.json", result.summary)
    if plots and len(result.telemetry):
        from .plots import emit_plots

        emit_plots(result.telemetry, sim.mission.kind, out, prefix, model.l_nominal)
    code = 0 if abort is None and result.summary["ok"] else 1
    return result, code


def run_compare(sim, model, gains, out_dir, plots=True):
    """Run all three actuation modes with the same mission and seed.

    Writes one CSV and summary per mode, a merged
    ``compare_<mission>_summary.json`` and overlay plots. Returns
    ``(results_by_mode, merged_summary, exit_code)``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results, code = {}, 0
    for mode in MODE_ORDER:
        res, rc = run_single(dataclasses.replace(sim, mode=mode), model, gains, out, plots=False)
        results[mode.value] = res
        code = max(code, rc)
    summaries = {m: r.summary for m, r in results.items()}
    merged = {
        "mission": sim.mission.kind,
        "seed": int(sim.rng_seed),
        "noise_deg": sim.noise_deg,
        "rms_error": {m: s.get("rms_lateral_error") for m, s in summaries.items()},
        "peak_phi_plus_theta": {m: s.get("peak_phi_plus_theta") for m, s in summaries.items()},
        "max_tilt": {m: s.get("max_tilt") for m, s in summaries.items()},
        "modes": summaries,
    }
    if sim.mission.kind == "waypoint":
        merged["arrival_times"] = {m: s["arrival_times"] for m, s in summaries.items()}
        merged["waypoints_captured"] = {m: s["waypoints_captured"] for m, s in summaries.items()}
    _write_json(out / f"compare_{sim.mission.kind}_summary.json", merged)
    if plots:
        from .plots import emit_plots

        tel = {m: r.telemetry for m, r in results.items() if len(r.telemetry)}
        if tel:
            emit_plots(tel, sim.mission.kind, out, f"compare_{sim.mission.kind}", model.l_nominal)
    return results, merged, code


def run_validate(model):
    from .validation import run_checks

    checks = run_checks(model)
    for c in checks:
        print(c.line())
    return 0 if all(c.passed for c in checks) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="morphsim", description="Sliding-arm quadcopter simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="JSON configuration file")
        p.add_argument("--out", type=Path, default=Path("morphsim_out"), help="output directory")
        p.add_argument("--seed", type=int, help="override the noise RNG seed")
        p.add_argument("--mode", choices=[m.value for m in Mode], help="override the actuation mode")
        p.add_argument("--duration", type=float, help="override simulated duration (s)")
        p.add_argument("--noise-deg", type=float, help="override roll/pitch noise half-width (deg)")
        p.add_argument("--no-plots", action="store_true", help="skip SVG output")

    common(sub.add_parser("waypoint", help="waypoint navigation mission"))
    common(sub.add_parser("figure8", help="figure-eight tracking mission"))
    p = sub.add_parser("compare", help="run all three actuation modes")
    p.add_argument("mission", nargs="?", choices=["waypoint", "figure8"], default="figure8")
    common(p)
    p = sub.add_parser("validate", help="run model property checks")
    p.add_argument("--config", type=Path, help="JSON configuration file")
    return parser


def _load(args, mission):
    if args.config is not None:
        sim, model, gains = load_config(args.config, mission)
    else:
        sim, model, gains = config_from_dict({}, mission)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["rng_seed"] = args.seed
    if getattr(args, "mode", None) is not None:
        overrides["mode"] = Mode.parse(args.mode)
    if getattr(args, "duration", None) is not None:
        overrides["duration"] = args.duration
    if getattr(args, "noise_deg", None) is not None:
        overrides["noise_deg"] = args.noise_deg
    if overrides:
        sim = dataclasses.replace(sim, **overrides)
    return sim, model, gains


def main(argv=None):
    level = os.environ.get("MORPHSIM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    mission = {"waypoint": "waypoint", "figure8": "figure8"}.get(args.command)
    if args.command == "compare":
        mission = args.mission
    try:
        sim, model, gains = _load(args, mission or "waypoint")
    except (ConfigError, ValueError, OSError) as exc:
        print(f"morphsim: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        return run_validate(model)
    if args.command == "compare":
        _, merged, code = run_compare(sim, model, gains, args.out, plots=not args.no_plots)
        print(json.dumps({k: merged[k] for k in ("mission", "rms_error", "peak_phi_plus_theta")}, indent=2))
        return code
    result, code = run_single(sim, model, gains, args.out, plots=not args.no_plots)
    s = result.summary
    print(
        f"{s['mission']} {s['mode']}: rms lateral error {s['rms_lateral_error']:.4f} m, "
        f"peak |phi|+|theta| {s['peak_phi_plus_theta']:.3f} rad"
        + (f", {s['waypoints_captured']}/{s['waypoints_total']} waypoints" if "waypoints_total" in s else "")
    )
    return code


if __name__ == "__main__":
    sys.exit(main())

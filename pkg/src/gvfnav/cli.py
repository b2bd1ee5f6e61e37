"""Batch entry points: validate splines, run and analyze scenarios, serve."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import analysis
from .bezier import (configurable_points, convex_hull, joint_defects,
                     spline_from_dict)
from .errors import GvfNavError, ScenarioError
from .gvf import GuidanceGains, field_grid_csv
from .sim import Scenario, SimLog, SimSession, load_scenario

log = logging.getLogger("gvfnav")


def _setup_logging():
    level = os.environ.get("GVFNAV_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(payload: dict, out: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    try:
        spec = _load_json(args.spline)
        spline, warnings = spline_from_dict(spec)
    except (OSError, json.JSONDecodeError, GvfNavError) as exc:
        _emit({"ok": False, "errors": [str(exc)]}, args.out)
        return 1
    segments = []
    for i, seg in enumerate(spline.segments):
        hull = convex_hull(seg)
        segments.append({
            "points": [[float(x), float(y)] for x, y in seg.points],
            "hull": [[float(x), float(y)] for x, y in hull],
        })
    report = {
        "ok": True,
        "degree": spline.degree,
        "continuity": spline.continuity.name,
        "num_segments": spline.num_segments,
        "warnings": warnings,
        "joint_defects": [
            {"joint": j, "what": what, "error": err}
            for j, what, err in joint_defects(spline.segments, spline.continuity)
        ],
        "configurable_points": [
            {"segment": fp.segment, "index": fp.index, "role": fp.role.value}
            for fp in configurable_points(spline)
        ],
        "locked_points": [
            {"segment": i, "index": k,
             "x": float(spline.segments[i].points[k][0]),
             "y": float(spline.segments[i].points[k][1])}
            for i in range(1, spline.num_segments)
            for k in range(1, spline.continuity.order + 1)
        ],
        "segments": segments,
    }
    _emit(report, args.out)
    return 0


def _scenario_with_overrides(args) -> Scenario:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario.seed = args.seed
    if args.dt is not None:
        scenario.dt = args.dt
    if args.duration is not None:
        scenario.duration = args.duration
    return scenario


def cmd_simulate(args) -> int:
    try:
        scenario = _scenario_with_overrides(args)
        session = SimSession(scenario)
    except (OSError, json.JSONDecodeError, ScenarioError) as exc:
        if isinstance(exc, ScenarioError):
            _emit({"ok": False,
                   "errors": [{"path": p, "message": m} for p, m in exc.errors]}, None)
        else:
            _emit({"ok": False, "errors": [str(exc)]}, None)
        return 1
    simlog = session.run()
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "log.csv")
    sidecar = os.path.join(args.out, "scenario.json")
    simlog.write(csv_path, sidecar)
    log.info("wrote %s (%d records)", csv_path, len(simlog))
    print(csv_path)
    return 0


def _read_log(args) -> SimLog:
    sidecar = args.sidecar
    if sidecar is None:
        candidate = os.path.join(os.path.dirname(args.log), "scenario.json")
        sidecar = candidate if os.path.exists(candidate) else None
    return SimLog.read(args.log, sidecar)


def cmd_analyze(args) -> int:
    try:
        simlog = _read_log(args)
    except (OSError, ValueError) as exc:
        _emit({"ok": False, "errors": [str(exc)]}, None)
        return 1
    gains = None
    spline = None
    if simlog.scenario:
        g = simlog.scenario.get("guidance", {})
        if g:
            gains = GuidanceGains(**g)
        try:
            spline, _ = spline_from_dict(simlog.scenario["spline"])
        except Exception:
            spline = None
    if args.bound is not None and gains is None:
        _emit({"ok": False,
               "errors": ["bound check needs the scenario sidecar for the gains"]}, None)
        return 1
    if args.out:
        summary = analysis.write_report(simlog, args.out, bound_d=args.bound,
                                        gains=gains, spline=spline)
    else:
        summary = analysis.summarize(simlog, bound_d=args.bound, gains=gains,
                                     spline=spline)
    _emit(summary, None)
    return 0


def cmd_field(args) -> int:
    try:
        spec = _load_json(args.spline)
        spline, _ = spline_from_dict(spec)
        bbox = [float(v) for v in args.bbox.split(",")]
        if len(bbox) != 4:
            raise ValueError("bbox must be x0,y0,x1,y1")
    except (OSError, json.JSONDecodeError, ValueError, GvfNavError) as exc:
        _emit({"ok": False, "errors": [str(exc)]}, None)
        return 1
    gains = GuidanceGains(k1=args.k1, k2=args.k2, k_theta=1.0)
    csv = field_grid_csv(spline, gains, args.w, bbox, args.res)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)
    return 0


def cmd_replay(args) -> int:
    """Re-derive the plot-panel data from an existing log, no re-simulation."""
    try:
        simlog = _read_log(args)
    except (OSError, ValueError) as exc:
        _emit({"ok": False, "errors": [str(exc)]}, None)
        return 1
    os.makedirs(args.out, exist_ok=True)
    for panel, cols in analysis.PANELS.items():
        arrays = [simlog.array(c) for c in cols]
        path = os.path.join(args.out, f"{panel}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(cols) + "\n")
            for row in zip(*arrays):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    print(args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gvfnav",
                                     description="Vector-field path following toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a spline spec and report its joints")
    p.add_argument("--spline", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="run a scenario headlessly")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--duration", type=float, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="metrics report for a recorded log")
    p.add_argument("--log", required=True)
    p.add_argument("--sidecar", default=None)
    p.add_argument("--bound", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("field", help="export the projected field on a grid as CSV")
    p.add_argument("--spline", required=True)
    p.add_argument("--w", type=float, default=0.0)
    p.add_argument("--bbox", required=True)
    p.add_argument("--res", type=int, default=20)
    p.add_argument("--k1", type=float, default=0.5)
    p.add_argument("--k2", type=float, default=0.5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("replay", help="re-derive plot data from a log")
    p.add_argument("--log", required=True)
    p.add_argument("--sidecar", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the ground-control service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", default=None, help="directory of built UI files to mount at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GvfNavError as exc:
        _emit({"ok": False, "errors": [str(exc)]}, None)
        return 1


if __name__ == "__main__":
    sys.exit(main())

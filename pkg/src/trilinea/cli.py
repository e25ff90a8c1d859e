"""Command-line front end.

Exit codes: 0 success, 1 infeasible / no placement, 2 bad input,
3 internal inconsistency. Summaries are printed to stdout as JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import (
    DegenerateScene,
    DegenerateTriangle,
    EdgeTooShort,
    InfeasibleMotion,
    InternalInconsistency,
    NoThirdVertex,
    NotPlanarizable,
    ParseError,
    ValidationError,
)
from .io import parse_scene, trace_to_csv, write_atomic
from .mechanism import (
    DEFAULT_TOLERANCE,
    Verdict,
    circumcircle_check,
    feasibility,
    rolling_equivalence,
    trace,
)
from .solver import match_configurations, oracle_sweep, solve_configurations
from .svg import render_scene

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2, 3
ENV_TOLERANCE = "TRILINEA_TOLERANCE"


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def resolve_tolerance(flag: Optional[float], environ=os.environ) -> float:
    """``--tolerance`` wins over the environment, which wins over the default."""
    if flag is not None:
        return flag
    raw = environ.get(ENV_TOLERANCE)
    if raw is None or raw == "":
        return DEFAULT_TOLERANCE
    try:
        value = float(raw)
    except ValueError:
        raise _Fail(EXIT_INVALID, f"{ENV_TOLERANCE}={raw!r} is not a number")
    if not value > 0:
        raise _Fail(EXIT_INVALID, f"{ENV_TOLERANCE} must be positive")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError("must be a positive number")
    return value


def _side(text: str) -> int:
    if text not in ("1", "+1", "-1"):
        raise argparse.ArgumentTypeError("must be +1 or -1")
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trilinea", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scene", help="scene JSON file")
        p.add_argument("--tolerance", type=_positive_float, default=None,
                       help=f"feasibility tolerance (default: ${ENV_TOLERANCE} or {DEFAULT_TOLERANCE:g})")
        p.add_argument("--allow-degenerate", action="store_true",
                       help="accept a collinear triangle with a warning")
        return p

    add("feasibility", "classify the scene and decide whether the triangle can move")
    for name, help_text in (("simulate", "sample the motion"), ("render", "draw the motion as SVG")):
        p = add(name, help_text)
        p.add_argument("--samples", type=int, default=None, help="number of samples (default from scene, else 1024)")
        p.add_argument("--side", type=_side, default=None, help="orientation of p3 (+1 or -1)")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--rolling", action="store_true", help="overlay the fixed and rolling circles")
        if name == "simulate":
            p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p = add("solve", "enumerate static placements")
    p.add_argument("--oracle", action="store_true", help="cross-check against a brute-force sweep")
    p = add("verify", "check circumcircle and rolling-circle properties of the motion")
    p.add_argument("--samples", type=int, default=None)
    return parser


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _vec(x) -> list[float]:
    return [float(v) for v in np.asarray(x).ravel()]


def _samples(args, scene) -> int:
    n = args.samples if args.samples is not None else scene.samples
    if n < 2:
        raise _Fail(EXIT_INVALID, f"need at least 2 samples, got {n}")
    return n


def _report_json(report) -> dict:
    out = {
        "verdict": report.verdict.value,
        "scene_class": report.scene_class.tag.value,
        "reason": report.reason,
        "side": report.side,
        "warnings": list(report.warnings) + list(report.scene_class.warnings),
    }
    if report.ratios is not None:
        out["ratios"] = [float(r) for r in report.ratios]
    if report.ranges is not None:
        out["ranges"] = [{"center": float(r.center_t), "length": float(r.length)} for r in report.ranges]
    return out


def _cmd_feasibility(args, scene, tol) -> int:
    report = feasibility(scene.lines, scene.triangle, tolerance=tol)
    _emit(_report_json(report))
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _motion(args, scene, tol):
    report = feasibility(scene.lines, scene.triangle, tolerance=tol)
    if not report.feasible:
        raise _Fail(EXIT_INFEASIBLE, report.reason or "infeasible")
    return report


def _write_or_print(args, text: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _cmd_simulate(args, scene, tol) -> int:
    _motion(args, scene, tol)
    side = args.side if args.side is not None else scene.side
    n = _samples(args, scene)
    if args.format == "svg":
        _write_or_print(args, render_scene(scene.lines, scene.triangle, n, side, rolling=args.rolling))
        if args.out:
            _emit({"samples": n, "format": "svg", "out": args.out})
        return EXIT_OK
    tr = trace(scene.lines, scene.triangle, side=side, n_samples=n)
    _write_or_print(args, trace_to_csv(tr))
    if args.out:
        _emit({
            "samples": n,
            "format": "csv",
            "out": args.out,
            "max_edge_residual": float(tr.edge_residuals().max()),
            "max_line_residual": float(tr.line_residuals().max()),
        })
    return EXIT_OK


def _cmd_render(args, scene, tol) -> int:
    _motion(args, scene, tol)
    side = args.side if args.side is not None else scene.side
    _write_or_print(args, render_scene(scene.lines, scene.triangle, _samples(args, scene), side,
                                       rolling=args.rolling))
    return EXIT_OK


def _config_json(cfg) -> dict:
    return {"t": _vec(cfg.coords), "p1": _vec(cfg.p1), "p2": _vec(cfg.p2), "p3": _vec(cfg.p3),
            "residual": float(cfg.residual), "near_tangent": bool(cfg.near_tangent)}


def _cmd_solve(args, scene, tol) -> int:
    try:
        result = solve_configurations(scene.lines, scene.triangle)
    except EdgeTooShort as exc:
        _emit({"status": "count=0 (bound 8)", "kind": "finite", "count": 0, "configurations": [],
               "notes": [str(exc)]})
        return EXIT_INFEASIBLE
    out = {"status": result.status_line(), "kind": result.kind, "count": result.count,
           "configurations": [_config_json(c) for c in result.configs], "notes": list(result.notes)}
    code = EXIT_OK
    if not result.within_bound:
        code = EXIT_INTERNAL
    if args.oracle and not result.is_continuum:
        oracle = oracle_sweep(scene.lines, scene.triangle)
        agree = match_configurations(result.configs, oracle.configs, 1e-6 * max(scene.triangle.scale, 1.0))
        out["oracle"] = {"count": oracle.count, "agree": agree}
        if not agree:
            code = EXIT_INTERNAL
    _emit(out)
    if code == EXIT_OK and not result.is_continuum and result.count == 0:
        return EXIT_INFEASIBLE
    return code


def _cmd_verify(args, scene, tol) -> int:
    report = _motion(args, scene, tol)
    n = _samples(args, scene)
    if report.verdict is Verdict.FEASIBLE_PARALLEL:
        tr = trace(scene.lines, scene.triangle, n_samples=n)
        worst = float(max(tr.edge_residuals().max(), tr.line_residuals().max()))
        ok = worst <= 1e-9 * scene.triangle.scale
        _emit({"verdict": report.verdict.value, "max_residual": worst, "pass": ok,
               "notes": ["circle checks do not apply to a translation"]})
        return EXIT_OK if ok else EXIT_INTERNAL
    tr = trace(scene.lines, scene.triangle, n_samples=n)
    check = circumcircle_check(tr)
    R = float(np.mean(report.ratios))
    roll = rolling_equivalence(scene.lines, scene.triangle, n_samples=n)
    circle_ok = check.max_dev <= tol * max(R, 1.0) and abs(check.radius - R / 2) <= tol * max(R, 1.0)
    roll_ok = roll <= tol * max(R, 1.0)
    _emit({
        "verdict": report.verdict.value,
        "R": R,
        "circumcircle": {"center": _vec(check.center), "radius": check.radius,
                         "max_dev": check.max_dev, "pass": bool(circle_ok)},
        "rolling": {"discrepancy": roll, "pass": bool(roll_ok)},
        "pass": bool(circle_ok and roll_ok),
    })
    return EXIT_OK if circle_ok and roll_ok else EXIT_INTERNAL


_COMMANDS = {
    "feasibility": _cmd_feasibility,
    "simulate": _cmd_simulate,
    "render": _cmd_render,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = resolve_tolerance(args.tolerance)
        scene = parse_scene(args.scene, allow_degenerate=args.allow_degenerate)
        return _COMMANDS[args.command](args, scene, tol)
    except _Fail as exc:
        print(f"trilinea: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, ValidationError, DegenerateTriangle, DegenerateScene) as exc:
        print(f"trilinea: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InfeasibleMotion, NoThirdVertex, NotPlanarizable, EdgeTooShort) as exc:
        print(f"trilinea: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InternalInconsistency as exc:
        print(f"trilinea: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

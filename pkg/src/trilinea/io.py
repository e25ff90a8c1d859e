"""Scene files (JSON) and trace files (CSV).

Scene file layout::

    {
      "dimension": 2,
      "lines": [{"anchor": [0, 0], "direction": [1, 0]}, ...three records...],
      "triangle": {"d12": 1.7, "d13": 1.7, "d23": 1.7},
      "options": {"side": 1, "samples": 1024, "seed": 0}
    }

Trace files have one header row and one row per sample: ``theta``, the
coordinates of p1, p2, p3, then the edge residuals ``| |p_i-p_j| - d_ij |``
and the point-to-line distances. Numbers carry 17 significant digits.
"""

from __future__ import annotations

import io
import json
import math
import os
import tempfile
from dataclasses import dataclass
from numbers import Real
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateTriangle, ParseError, ValidationError
from .geometry import Line
from .mechanism import Trace, TriangleSpec

__all__ = [
    "SceneFile",
    "parse_scene",
    "loads_scene",
    "dumps_scene",
    "write_scene",
    "trace_header",
    "trace_to_csv",
    "write_trace",
    "read_trace",
    "write_atomic",
]


@dataclass(frozen=True, eq=False)
class SceneFile:
    dimension: int
    lines: tuple[Line, Line, Line]
    triangle: TriangleSpec
    side: Optional[int] = None
    samples: int = 1024
    seed: Optional[int] = None


def _is_number(x) -> bool:
    return isinstance(x, Real) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _vector(value, dim, where):
    if not isinstance(value, list) or not all(_is_number(v) for v in value):
        raise ValidationError(f"{where}: expected an array of finite numbers")
    if len(value) != dim:
        raise ValidationError(f"{where}: dimension mismatch (length {len(value)}, dimension {dim})")
    return [float(v) for v in value]


def loads_scene(text: str, source: str = "<string>", allow_degenerate: bool = False) -> SceneFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{source}: top level must be an object")

    dim = doc.get("dimension")
    if not _is_int(dim) or dim < 2:
        raise ValidationError(f"{source}: dimension: expected an integer >= 2")

    raw_lines = doc.get("lines")
    if not isinstance(raw_lines, list) or len(raw_lines) != 3:
        raise ValidationError(f"{source}: lines: expected exactly 3 records")
    lines = []
    for k, rec in enumerate(raw_lines):
        where = f"{source}: lines[{k}]"
        if not isinstance(rec, dict):
            raise ValidationError(f"{where}: expected an object")
        anchor = _vector(rec.get("anchor"), dim, f"{where}.anchor")
        direction = _vector(rec.get("direction"), dim, f"{where}.direction")
        if not any(direction):
            raise ValidationError(f"{where}.direction: zero direction")
        lines.append(Line(anchor, direction))

    tri_doc = doc.get("triangle")
    if not isinstance(tri_doc, dict):
        raise ValidationError(f"{source}: triangle: expected an object")
    lengths = []
    for name in ("d12", "d13", "d23"):
        value = tri_doc.get(name)
        if not _is_number(value) or value <= 0:
            raise ValidationError(f"{source}: triangle.{name}: expected a positive number")
        lengths.append(float(value))

    opts = doc.get("options", {})
    if not isinstance(opts, dict):
        raise ValidationError(f"{source}: options: expected an object")
    side = opts.get("side")
    if side is not None and side not in (1, -1):
        raise ValidationError(f"{source}: options.side: expected +1 or -1")
    samples = opts.get("samples", 1024)
    if not _is_int(samples) or samples < 2:
        raise ValidationError(f"{source}: options.samples: expected an integer >= 2")
    seed = opts.get("seed")
    if seed is not None and not _is_int(seed):
        raise ValidationError(f"{source}: options.seed: expected an integer")
    allow = allow_degenerate or bool(opts.get("allow_degenerate", False))
    try:
        tri = TriangleSpec(*lengths, allow_degenerate=allow)
    except DegenerateTriangle as exc:
        raise ValidationError(f"{source}: triangle: {exc}") from exc
    return SceneFile(dim, tuple(lines), tri, None if side is None else int(side), samples, seed)


def parse_scene(path, allow_degenerate: bool = False) -> SceneFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    return loads_scene(text, str(path), allow_degenerate)


def dumps_scene(scene: SceneFile) -> str:
    options = {"samples": scene.samples}
    if scene.side is not None:
        options["side"] = scene.side
    if scene.seed is not None:
        options["seed"] = scene.seed
    doc = {
        "dimension": scene.dimension,
        "lines": [
            {"anchor": L.anchor.tolist(), "direction": L.direction.tolist()} for L in scene.lines
        ],
        "triangle": {"d12": scene.triangle.d12, "d13": scene.triangle.d13, "d23": scene.triangle.d23},
        "options": options,
    }
    return json.dumps(doc, indent=2) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary sibling file and rename over *path*."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_scene(scene: SceneFile, path) -> None:
    write_atomic(path, dumps_scene(scene))


# -- traces -----------------------------------------------------------------

def trace_header(dim: int) -> list[str]:
    cols = ["theta"]
    for k in (1, 2, 3):
        cols += [f"p{k}_{i}" for i in range(dim)]
    cols += ["res_d12", "res_d13", "res_d23", "res_L1", "res_L2", "res_L3"]
    return cols


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _residual_columns(points, lines, tri):
    edge = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        edge.append(np.abs(np.linalg.norm(points[:, i] - points[:, j], axis=-1) - tri.length(i, j)))
    incid = [L.distance_to(points[:, k]) for k, L in enumerate(lines)]
    return np.stack(edge + incid, axis=-1)


def trace_to_csv(tr: Trace) -> str:
    n, _, dim = tr.points.shape
    rows = np.hstack([
        tr.thetas[:, None],
        tr.points.reshape(n, 3 * dim),
        _residual_columns(tr.points, tr.lines, tr.tri),
    ])
    out = io.StringIO()
    out.write(",".join(trace_header(dim)) + "\n")
    for row in rows:
        out.write(",".join(_fmt(x) for x in row) + "\n")
    return out.getvalue()


def write_trace(tr: Trace, path) -> None:
    write_atomic(path, trace_to_csv(tr))


def read_trace(path, lines: Sequence[Line], tri: TriangleSpec, tol: float = 1e-12) -> Trace:
    """Load a trace file and re-check its residual columns against the scene."""
    text = Path(path).read_text()
    rows = [r for r in text.split("\n") if r]
    if not rows:
        raise ParseError(f"{path}: empty trace file")
    dim = lines[0].dim
    header = rows[0].split(",")
    if header != trace_header(dim):
        raise ValidationError(f"{path}: header does not match a {dim}-dimensional trace")
    try:
        data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != 1 + 3 * dim + 6:
        raise ValidationError(f"{path}: expected {1 + 3 * dim + 6} columns")
    thetas = data[:, 0]
    if np.any(np.diff(thetas) <= 0):
        raise ValidationError(f"{path}: theta is not strictly increasing")
    points = data[:, 1:1 + 3 * dim].reshape(-1, 3, dim)
    stored = data[:, 1 + 3 * dim:]
    fresh = _residual_columns(points, lines, tri)
    worst = float(np.max(np.abs(fresh - stored)))
    if worst > tol:
        raise ValidationError(f"{path}: stored residuals differ from recomputed ones by {worst:.3g}")
    return Trace(thetas, points, tuple(lines), tri, None, kind="loaded")

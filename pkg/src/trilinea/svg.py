"""Deterministic SVG drawings of planar (or planarizable) traces."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import NotPlanarizable
from .geometry import Line, SceneTag, classify_scene
from .mechanism import Trace, TriangleSpec, _circumcenters, trace as make_trace

__all__ = ["render_svg", "render_scene", "PHASES"]

PHASES = 8
_COLORS = ("#1f77b4", "#d62728", "#2ca02c")


def _num(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


class _Frame:
    """Affine map from the scene to 2-D drawing coordinates."""

    def __init__(self, origin, basis):
        self.origin = np.asarray(origin, dtype=float)
        self.basis = np.asarray(basis, dtype=float)

    def __call__(self, x):
        return (np.asarray(x) - self.origin) @ self.basis.T


def _parallel_frame(lines: Sequence[Line]) -> _Frame:
    dim = lines[0].dim
    v = lines[0].direction
    if dim == 2:
        return _Frame(np.zeros(2), np.eye(2))
    rel = [L.anchor - lines[0].anchor for L in lines[1:]]
    perp = [r - (r @ v) * v for r in rel]
    norms = [np.linalg.norm(p) for p in perp]
    k = int(np.argmax(norms))
    if norms[k] == 0.0:
        # all three lines coincide up to labelling; any plane works
        e2 = np.linalg.svd(v[None, :])[2][1]
    else:
        e2 = perp[k] / norms[k]
    for p in perp:
        if np.linalg.norm(p - (p @ e2) * e2) > 1e-9 * max(1.0, np.linalg.norm(p)):
            raise NotPlanarizable("parallel lines are not coplanar")
    return _Frame(lines[0].anchor, np.vstack([v, e2]))


def render_svg(tr: Trace, rolling: bool = False, width: int = 640) -> str:
    """SVG text for *tr*: the three lines, vertex paths and 8 snapshots.

    With ``rolling=True`` the fixed circle of radius R and the rolling
    circle of radius R/2 (at the first sample) are added.
    """
    if tr.mechanism is not None:
        red = tr.mechanism.reduction
        frame = _Frame(red.origin, red.basis)
        feet2d = [np.asarray(f, dtype=float) for f in red.planar_feet]
        dirs2d = [u / np.linalg.norm(u) for u in red.u]
        R = tr.mechanism.radius
        ends = [f + s * R * u for f, u in zip(feet2d, dirs2d) for s in (-1.0, 1.0)]
    elif tr.kind == "parallel":
        frame = _parallel_frame(tr.lines)
        feet2d = [frame(L.anchor) for L in tr.lines]
        d = frame.basis @ tr.lines[0].direction
        dirs2d = [d, d, d]
        R = None
        ends = []
    else:
        raise NotPlanarizable(f"cannot draw a trace of kind {tr.kind!r}")

    P = frame(tr.points)  # (n, 3, 2)
    cloud = np.vstack([P.reshape(-1, 2)] + ([np.array(ends)] if ends else []))
    if rolling and R is not None:
        m = feet2d[0]
        cloud = np.vstack([cloud, m - R, m + R])
    lo, hi = cloud.min(axis=0), cloud.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-9)
    margin = 0.1 * span
    lo, hi = lo - margin, hi + margin
    w, h = hi - lo
    reach = 2.0 * float(np.hypot(w, h))
    height = int(round(width * h / w))
    stroke = _num(span / 400.0)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_num(lo[0])} {_num(-hi[1])} {_num(w)} {_num(h)}">',
        f'<g fill="none" stroke-width="{stroke}">',
    ]
    for k, (f, u) in enumerate(zip(feet2d, dirs2d)):
        a, b = f - reach * u, f + reach * u
        out.append(f'<line id="L{k + 1}" x1="{_num(a[0])}" y1="{_num(-a[1])}" '
                   f'x2="{_num(b[0])}" y2="{_num(-b[1])}" stroke="#888888"/>')
    if rolling and R is not None:
        m = feet2d[0]
        out.append(f'<circle id="fixed" cx="{_num(m[0])}" cy="{_num(-m[1])}" r="{_num(R)}" stroke="#bbbbbb"/>')
        c, _ = _circumcenters(P[:1, 0], P[:1, 1], P[:1, 2])
        out.append(f'<circle id="rolling" cx="{_num(c[0, 0])}" cy="{_num(-c[0, 1])}" '
                   f'r="{_num(R / 2.0)}" stroke="#ff7f0e"/>')
    for k in range(3):
        pts = " ".join(f"{_num(x)},{_num(-y)}" for x, y in P[:, k])
        out.append(f'<polyline id="path{k + 1}" points="{pts}" stroke="{_COLORS[k]}"/>')
    n = len(tr)
    for j in range(PHASES):
        tri = P[(j * n) // PHASES]
        pts = " ".join(f"{_num(x)},{_num(-y)}" for x, y in tri)
        out.append(f'<polygon class="snapshot" points="{pts}" stroke="#000000"/>')
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def render_scene(lines: Sequence[Line], tri: TriangleSpec, n_samples: int = 1024,
                 side: Optional[int] = None, rolling: bool = False) -> str:
    """Classify, simulate and draw in one step."""
    scene = classify_scene(*lines)
    if not scene.planarizable and scene.tag is not SceneTag.ALL_PARALLEL:
        raise NotPlanarizable(f"scene class {scene.tag.value} has no drawing plane")
    if scene.tag is SceneTag.ALL_PARALLEL:
        _parallel_frame(lines)
    return render_svg(make_trace(lines, tri, side=side, n_samples=n_samples), rolling=rolling)

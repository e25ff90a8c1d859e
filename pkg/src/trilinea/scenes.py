"""Ready-made scenes: the classic drawer, its lifts, and random instances."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .geometry import Line
from .mechanism import TriangleSpec


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def concurrent_scene(angles_deg: Sequence[float], R: float = 1.0, meet=(0.0, 0.0),
                     slide: Sequence[float] = (0.0, 0.0, 0.0)):
    """Lines through *meet* at the given angles and the triangle that moves on them.

    Edge lengths are ``R * sin(angle between lines)``, i.e. the chords of a
    circle of diameter R through the meet. ``slide`` moves each anchor
    along its line so the anchor frame differs from the foot frame.
    """
    meet = np.asarray(meet, dtype=float)
    rad = [math.radians(a) for a in angles_deg]
    lines = [Line(meet + s * np.array([math.cos(t), math.sin(t)]), [math.cos(t), math.sin(t)])
             for t, s in zip(rad, slide)]
    d = lambda i, j: R * abs(math.sin(rad[i] - rad[j]))
    return lines, TriangleSpec(d(0, 1), d(0, 2), d(1, 2))


def equilateral_scene(r: float = 1.0):
    """Lines at 0, 60 and 120 degrees through the origin; side ``sqrt(3) r``."""
    return concurrent_scene((0.0, 60.0, 120.0), R=2.0 * r)


def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def lifted_scene(angles_deg: Sequence[float], R: float, heights: Sequence[float], dim: int = 3,
                 rotation: Optional[np.ndarray] = None, origin=None, slide=(0.0, 0.0, 0.0),
                 normal_offsets: Optional[Sequence[Sequence[float]]] = None):
    """Concurrent planar drawer lifted to R^dim.

    Line ``i`` lies in the coordinate plane e1e2 translated by
    ``heights[i]`` along e3 (plus ``normal_offsets[i]`` along e4.. when
    given), then the whole scene is rotated and moved. Every line meets the
    e3 axis orthogonally when ``normal_offsets`` is omitted.
    """
    rotation = np.eye(dim) if rotation is None else np.asarray(rotation, dtype=float)
    origin = np.zeros(dim) if origin is None else np.asarray(origin, dtype=float)
    rad = [math.radians(a) for a in angles_deg]
    lines, offs = [], []
    for k, t in enumerate(rad):
        off = np.zeros(dim)
        off[2] = heights[k]
        if normal_offsets is not None:
            off[3:] = normal_offsets[k]
        direction = np.zeros(dim)
        direction[:2] = (math.cos(t), math.sin(t))
        anchor = off + slide[k] * direction
        lines.append(Line(origin + rotation @ anchor, rotation @ direction))
        offs.append(off)
    lengths = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        planar = R * abs(math.sin(rad[i] - rad[j]))
        lengths.append(math.hypot(planar, float(np.linalg.norm(offs[i] - offs[j]))))
    return lines, TriangleSpec(*lengths)


def random_feasible_scene(rng: np.random.Generator, dim: int = 2, planar: bool = True,
                          min_gap_deg: float = 15.0):
    """Random mechanism: concurrent in the plane for ``dim == 2``, lifted otherwise."""
    while True:
        angles = np.sort(rng.uniform(0.0, 180.0, 3))
        gaps = np.diff(np.r_[angles, angles[0] + 180.0])
        if gaps.min() >= min_gap_deg:
            break
    angles = rng.permutation(angles)
    R = rng.uniform(0.5, 3.0)
    slide = rng.uniform(-2.0, 2.0, 3)
    if dim == 2:
        return concurrent_scene(angles, R=R, meet=rng.uniform(-3, 3, 2), slide=slide)
    heights = rng.uniform(-2.0, 2.0, 3)
    return lifted_scene(angles, R, heights, dim=dim, rotation=random_rotation(dim, rng),
                        origin=rng.uniform(-3, 3, dim), slide=slide)


def random_generic_scene(rng: np.random.Generator, dim: int = 3, spread: float = 1.5):
    """Three random lines plus edge lengths read off one random placement."""
    lines = [Line(rng.standard_normal(dim), _unit(rng.standard_normal(dim))) for _ in range(3)]
    s = rng.uniform(-spread, spread, 3)
    pts = [L.point_at(x) for L, x in zip(lines, s)]
    d = lambda i, j: float(np.linalg.norm(pts[i] - pts[j]))
    return lines, TriangleSpec(d(0, 1), d(0, 2), d(1, 2)), s

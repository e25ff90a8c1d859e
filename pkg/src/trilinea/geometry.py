"""Dimension-generic lines, common perpendiculars and scene classification.

Lines live in R^n (n >= 2) and are stored as an anchor point plus a unit
direction. A position on a line is always the signed distance from its
anchor; the common-perpendicular feet provide the alternative origin used
by the kinematics (the "q-frame").
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateScene, NotPerpendicular, ParallelLines

PARALLEL_TOL = 1e-12
NEAR_PARALLEL_BAND = 1e-9
INCIDENCE_TOL = 1e-8
ORTHO_TOL = 1e-10
UNIT_TOL = 1e-12

__all__ = [
    "Line",
    "PairGeometry",
    "SceneTag",
    "SceneClass",
    "as_point",
    "common_perpendicular",
    "foot_offset",
    "classify_scene",
    "project_out",
    "direction_rank",
    "plane_basis",
]


def as_point(x) -> np.ndarray:
    """Read-only float copy of *x*; rejects non-finite or short input."""
    arr = np.array(x, dtype=float).reshape(-1)
    if arr.size < 2:
        raise ValueError("points need at least two coordinates")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point has non-finite components")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Line:
    """Affine line ``anchor + t * direction``; the direction is normalised."""

    anchor: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        anchor = as_point(self.anchor)
        direction = np.array(self.direction, dtype=float).reshape(-1)
        if direction.shape != anchor.shape:
            raise ValueError("anchor and direction dimensions differ")
        if not np.all(np.isfinite(direction)):
            raise ValueError("direction has non-finite components")
        norm = np.linalg.norm(direction)
        if norm == 0.0:
            raise ValueError("zero direction")
        # unit vectors that are only rounding away from norm 1 are kept
        # verbatim so that serialising and re-loading a line is a fixed point
        if abs(norm - 1.0) > 4.0 * np.finfo(float).eps:
            direction = direction / norm
        direction.setflags(write=False)
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "direction", direction)

    @property
    def dim(self) -> int:
        return self.anchor.size

    def point_at(self, t):
        """Point(s) at signed coordinate(s) *t*; vectorised over *t*."""
        t = np.asarray(t, dtype=float)
        return self.anchor + t[..., None] * self.direction

    def coordinate(self, x) -> np.ndarray:
        """Coordinate of the orthogonal projection of *x* onto the line."""
        return (np.asarray(x, dtype=float) - self.anchor) @ self.direction

    def distance_to(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        rel = x - self.anchor
        perp = rel - (rel @ self.direction)[..., None] * self.direction
        return np.linalg.norm(perp, axis=-1)

    def __repr__(self):
        return f"Line(anchor={self.anchor.tolist()}, direction={self.direction.tolist()})"


@dataclass(frozen=True, eq=False)
class PairGeometry:
    """Invariants of an ordered pair of non-parallel lines.

    ``q_i`` is the foot of the common perpendicular on ``line_i`` and
    ``t_foot_i`` its coordinate in ``line_i``'s anchor frame (likewise for
    ``j``). ``dist`` is the distance between the lines.
    """

    line_i: Line
    line_j: Line
    c: float
    alpha: float
    q_i: np.ndarray
    q_j: np.ndarray
    dist: float
    t_foot_i: float
    t_foot_j: float

    @property
    def sin_alpha(self) -> float:
        return math.sin(self.alpha)

    def swapped(self) -> "PairGeometry":
        return PairGeometry(
            self.line_j, self.line_i, self.c, self.alpha,
            self.q_j, self.q_i, self.dist, self.t_foot_j, self.t_foot_i,
        )

    def oriented(self, line: Line) -> "PairGeometry":
        """This geometry with *line* on the ``i`` side."""
        if line is self.line_i:
            return self
        if line is self.line_j:
            return self.swapped()
        if _same_line(line, self.line_i):
            return self
        if _same_line(line, self.line_j):
            return self.swapped()
        raise ValueError("line is not part of this pair")


def _same_line(a: Line, b: Line) -> bool:
    return bool(
        np.allclose(a.anchor, b.anchor, rtol=0, atol=1e-15)
        and np.allclose(a.direction, b.direction, rtol=0, atol=1e-15)
    )


def _cosine(vi, vj) -> float:
    return float(np.clip(vi @ vj, -1.0, 1.0))


def common_perpendicular(Li: Line, Lj: Line) -> PairGeometry:
    """Closest points between two non-parallel lines.

    Raises ParallelLines when ``|cos| >= 1 - 1e-12``.
    """
    if Li.dim != Lj.dim:
        raise ValueError("lines live in different dimensions")
    vi, vj = Li.direction, Lj.direction
    c = _cosine(vi, vj)
    if abs(c) >= 1.0 - PARALLEL_TOL:
        raise ParallelLines(f"line directions are parallel (cos={c!r})")
    one_minus_c2 = (1.0 - c) * (1.0 + c)

    def solve(w):
        dd, ee = vi @ w, vj @ w
        return (c * ee - dd) / one_minus_c2, (ee - c * dd) / one_minus_c2

    s, t = solve(Li.anchor - Lj.anchor)
    # one step of iterative refinement on the normal equations
    ds, dt = solve(Li.point_at(s) - Lj.point_at(t))
    s, t = s + ds, t + dt
    q_i, q_j = Li.point_at(s), Lj.point_at(t)
    q_i.setflags(write=False)
    q_j.setflags(write=False)
    sin_a = float(np.linalg.norm(vj - c * vi))
    return PairGeometry(
        line_i=Li,
        line_j=Lj,
        c=c,
        alpha=math.atan2(sin_a, c),
        q_i=q_i,
        q_j=q_j,
        dist=float(np.linalg.norm(q_i - q_j)),
        t_foot_i=float(s),
        t_foot_j=float(t),
    )


def foot_offset(Li: Line, gj: PairGeometry, gk: PairGeometry) -> float:
    """Shift ``e`` between the two q-frames on *Li*: ``t_ij = t_ik + e``."""
    gj, gk = gj.oriented(Li), gk.oriented(Li)
    return gk.t_foot_i - gj.t_foot_i


def direction_rank(lines: Sequence[Line], tol: float = ORTHO_TOL) -> int:
    V = np.array([L.direction for L in lines])
    sv = np.linalg.svd(V, compute_uv=False)
    return int(np.sum(sv > tol * sv[0]))


def plane_basis(v1, v2) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of span(v1, v2); the identity basis in R^2.

    For n >= 3 the first vector is ``v1`` and ``v2`` lies at a positive
    angle, which fixes the orientation used by carry sides.
    """
    n = len(v1)
    if n == 2:
        return np.array([1.0, 0.0]), np.array([0.0, 1.0])
    e1 = np.asarray(v1, dtype=float)
    e2 = np.asarray(v2, dtype=float) - (e1 @ v2) * e1
    return e1, e2 / np.linalg.norm(e2)


class SceneTag(str, enum.Enum):
    ALL_PARALLEL = "AllParallel"
    CONCURRENT_PLANAR = "ConcurrentPlanar"
    COMMON_PERPENDICULAR_AXIS = "CommonPerpendicularAxis"
    # directions span a plane and every line has a single foot, but the
    # three feet are not collinear; only possible for n >= 4
    PLANAR_LIFT = "PlanarLift"
    GENERIC = "Generic"


@dataclass(frozen=True, eq=False)
class SceneClass:
    tag: SceneTag
    axis: Optional[Line] = None
    meet: Optional[np.ndarray] = None
    warnings: tuple[str, ...] = ()
    pairs: tuple = field(default=(), repr=False)
    direction_rank: int = 0

    @property
    def planarizable(self) -> bool:
        return self.tag in (
            SceneTag.CONCURRENT_PLANAR,
            SceneTag.COMMON_PERPENDICULAR_AXIS,
            SceneTag.PLANAR_LIFT,
        ) and self.direction_rank == 2


PAIR_INDEX = ((0, 1), (0, 2), (1, 2))


def _check_lines(lines: Sequence[Line]) -> tuple[Line, Line, Line]:
    if len(lines) != 3:
        raise ValueError("a scene has exactly three lines")
    dims = {L.dim for L in lines}
    if len(dims) != 1:
        raise DegenerateScene("lines live in different dimensions")
    return tuple(lines)


def classify_scene(L1: Line, L2: Line, L3: Line) -> SceneClass:
    """Sort three lines into the families relevant for continuous motion."""
    lines = _check_lines((L1, L2, L3))
    warnings = []
    parallel = []
    for i, j in PAIR_INDEX:
        c = _cosine(lines[i].direction, lines[j].direction)
        gap = 1.0 - abs(c)
        if gap < PARALLEL_TOL:
            parallel.append((i, j))
            scale = 1.0 + max(np.linalg.norm(lines[i].anchor), np.linalg.norm(lines[j].anchor))
            if lines[i].distance_to(lines[j].anchor) <= ORTHO_TOL * scale:
                raise DegenerateScene(f"lines L{i + 1} and L{j + 1} coincide")
        elif gap < NEAR_PARALLEL_BAND:
            warnings.append(f"L{i + 1} and L{j + 1} are nearly parallel (1-|cos|={gap:.3g})")
    rank = direction_rank(lines)
    if len(parallel) == 3:
        return SceneClass(SceneTag.ALL_PARALLEL, warnings=tuple(warnings), direction_rank=rank)
    if parallel:
        return SceneClass(SceneTag.GENERIC, warnings=tuple(warnings), direction_rank=rank)

    g12 = common_perpendicular(L1, L2)
    g13 = common_perpendicular(L1, L3)
    g23 = common_perpendicular(L2, L3)
    pairs = (g12, g13, g23)
    feet = np.array([g12.q_i, g13.q_i, g12.q_j, g23.q_i, g13.q_j, g23.q_j])
    mean = feet.mean(axis=0)
    common = dict(warnings=tuple(warnings), pairs=pairs, direction_rank=rank)

    if rank == 2 and np.max(np.linalg.norm(feet - mean, axis=1)) <= INCIDENCE_TOL:
        mean.setflags(write=False)
        return SceneClass(SceneTag.CONCURRENT_PLANAR, meet=mean, **common)

    per_line = [(g12.q_i, g13.q_i), (g12.q_j, g23.q_i), (g13.q_j, g23.q_j)]
    if any(np.linalg.norm(a - b) > INCIDENCE_TOL for a, b in per_line):
        return SceneClass(SceneTag.GENERIC, **common)
    f = np.array([(a + b) / 2 for a, b in per_line])

    axis = _perpendicular_axis(lines, f)
    if axis is not None:
        return SceneClass(SceneTag.COMMON_PERPENDICULAR_AXIS, axis=axis, **common)
    if rank == 2:
        return SceneClass(SceneTag.PLANAR_LIFT, **common)
    return SceneClass(SceneTag.GENERIC, **common)


def _perpendicular_axis(lines, feet) -> Optional[Line]:
    """Line through the per-line feet meeting every line orthogonally."""
    V = np.array([L.direction for L in lines])
    gaps = {(i, j): np.linalg.norm(feet[i] - feet[j]) for i, j in PAIR_INDEX}
    (i, j), far = max(gaps.items(), key=lambda kv: kv[1])
    if far <= INCIDENCE_TOL:
        # all feet coincide: any direction normal to the three directions
        _, sv, vt = np.linalg.svd(V)
        rank = int(np.sum(sv > ORTHO_TOL * sv[0]))
        if rank >= V.shape[1]:
            return None
        w = vt[rank]
        anchor = feet.mean(axis=0)
    else:
        w = (feet[j] - feet[i]) / far
        anchor = feet[i]
    if np.max(np.abs(V @ w)) > ORTHO_TOL:
        return None
    axis = Line(anchor, w)
    if np.max(axis.distance_to(feet)) > INCIDENCE_TOL:
        return None
    return axis


def project_out(lines: Sequence[Line], w) -> list[Line]:
    """Orthogonally project every line along the unit normal *w*.

    The ambient dimension is kept; the projected coordinates satisfy
    ``x . w = 0``.
    """
    w = np.asarray(w, dtype=float)
    if abs(np.linalg.norm(w) - 1.0) > 1e-10:
        raise NotPerpendicular("projection normal must be a unit vector")
    out = []
    for L in lines:
        if abs(L.direction @ w) > ORTHO_TOL:
            raise NotPerpendicular("projection normal is not orthogonal to every line")
        anchor = L.anchor - (L.anchor @ w) * w
        direction = L.direction - (L.direction @ w) * w
        out.append(Line(anchor, direction))
    return out

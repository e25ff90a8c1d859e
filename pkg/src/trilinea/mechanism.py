"""Continuous rigid motion of a triangle whose vertices ride on three lines.

A motion exists only if the lines are parallel, or if their directions span
a plane and each line carries a single common-perpendicular foot (planar
concurrent lines, or such lines lifted along perpendicular offsets). In the
latter case the motion is the hypocycloid straight-line drawer: the segment
on lines 1 and 2 walks its ellipse and vertex 3 is carried along rigidly.

Everything for the lifted cases is computed in a reduced plane through the
foot of line 1 spanned by the first two directions. Vertex offsets normal to
that plane are constant, so the planar picture uses effective lengths
``sqrt(d_ij^2 - D_ij^2)``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    AmbiguousSide,
    DegenerateTriangle,
    EdgeTooShort,
    InfeasibleMotion,
    InternalInconsistency,
    InvalidSampleCount,
    NoThirdVertex,
    NotPlanarizable,
)
from .geometry import (
    Line,
    PairGeometry,
    SceneClass,
    SceneTag,
    as_point,
    classify_scene,
    plane_basis,
)
from .pairwise import (
    EllipseParams,
    RangeInterval,
    effective_length,
    ellipse_params,
    range_interval,
    segment_position,
)

DEFAULT_TOLERANCE = 1e-8
NEAR_FEASIBLE_BAND = 1e-5

__all__ = [
    "TriangleSpec",
    "Verdict",
    "FeasibilityReport",
    "MotionState",
    "Mechanism",
    "Trace",
    "CircleCheck",
    "RollingCircleModel",
    "feasibility",
    "parallel_placement",
    "carry_third_vertex",
    "motion_state",
    "trace",
    "observed_range",
    "circumcircle_check",
    "rolling_model",
    "rolling_circle_point",
    "rolling_equivalence",
]


@dataclass(frozen=True)
class TriangleSpec:
    """Fixed edge lengths; index pairs are 1-based as in ``d12``."""

    d12: float
    d13: float
    d23: float
    allow_degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("d12", "d13", "d23"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise DegenerateTriangle(f"{name} must be a positive finite length, got {value!r}")
            object.__setattr__(self, name, value)
        a, b, c = sorted(self.lengths)
        if a + b <= c * (1.0 + 1e-12):
            msg = f"edge lengths {self.lengths} do not form a proper triangle"
            if not self.allow_degenerate:
                raise DegenerateTriangle(msg)
            warnings.warn(msg, stacklevel=2)

    @property
    def lengths(self) -> tuple[float, float, float]:
        return (self.d12, self.d13, self.d23)

    def length(self, i: int, j: int) -> float:
        """Edge between 0-based vertices *i* and *j*."""
        key = tuple(sorted((i, j)))
        return {(0, 1): self.d12, (0, 2): self.d13, (1, 2): self.d23}[key]

    @property
    def scale(self) -> float:
        return max(max(self.lengths), 1.0)

    def permuted(self, perm: Sequence[int]) -> "TriangleSpec":
        """Triangle with relabelled vertices: new vertex k is old vertex perm[k]."""
        return TriangleSpec(
            self.length(perm[0], perm[1]),
            self.length(perm[0], perm[2]),
            self.length(perm[1], perm[2]),
            allow_degenerate=self.allow_degenerate,
        )


class Verdict(str, enum.Enum):
    FEASIBLE_PARALLEL = "FeasibleParallel"
    FEASIBLE_MECHANISM = "FeasibleMechanism"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    verdict: Verdict
    scene_class: SceneClass
    ratios: Optional[tuple[float, float, float]] = None
    ranges: Optional[tuple[RangeInterval, RangeInterval, RangeInterval]] = None
    reason: Optional[str] = None
    side: Optional[int] = None
    warnings: tuple[str, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.verdict is not Verdict.INFEASIBLE


@dataclass(frozen=True, eq=False)
class MotionState:
    """One placement along a motion.

    ``t`` holds the q-frame coordinates ordered
    ``(t12, t13, t21, t23, t31, t32)``, where ``t_ij`` is measured on line
    ``i`` from its common-perpendicular foot with line ``j``.
    """

    theta: float
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    t: tuple[float, float, float, float, float, float]

    _T_INDEX = {(1, 2): 0, (1, 3): 1, (2, 1): 2, (2, 3): 3, (3, 1): 4, (3, 2): 5}

    def t_ij(self, i: int, j: int) -> float:
        return self.t[self._T_INDEX[(i, j)]]

    @property
    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.p1, self.p2, self.p3)


# -- static placement for parallel lines ------------------------------------

def parallel_placement(lines: Sequence[Line], tri: TriangleSpec, tol: float = 1e-9):
    """Anchor coordinates ``(s1, s2, s3)`` of one placement on parallel lines.

    Returns None when the triangle cannot be embedded.
    """
    v = lines[0].direction
    sigma = [1.0 if L.direction @ v > 0 else -1.0 for L in lines]
    along = [float(L.anchor @ v) for L in lines]
    perp = [L.anchor - (L.anchor @ v) * v for L in lines]
    scale = tri.scale
    heights = {}
    for i, j in ((0, 1), (0, 2), (1, 2)):
        gap = float(np.linalg.norm(perp[i] - perp[j]))
        d = tri.length(i, j)
        if d < gap - tol * scale:
            return None
        heights[i, j] = math.sqrt(max(d * d - gap * gap, 0.0))
    for e12 in (1.0, -1.0):
        for e13 in (1.0, -1.0):
            z = (0.0, e12 * heights[0, 1], e13 * heights[0, 2])
            if abs(abs(z[2] - z[1]) - heights[1, 2]) <= tol * scale:
                return tuple(sigma[k] * (z[k] - along[k]) for k in range(3))
    return None


# -- the reduced plane ------------------------------------------------------

class _Reduction:
    """Planar picture of a planarizable scene, anchored at line 1's foot."""

    def __init__(self, lines, scene: SceneClass):
        if not scene.planarizable:
            raise NotPlanarizable(f"scene class {scene.tag.value} has no motion plane")
        self.lines = lines
        g12, g13, g23 = scene.pairs
        self.pairs = (g12, g13, g23)
        self.origin = g12.q_i
        self.e1, self.e2 = plane_basis(lines[0].direction, lines[1].direction)
        self.basis = np.vstack([self.e1, self.e2])
        self.u = [self.basis @ L.direction for L in lines]
        feet = (g12.q_i, g12.q_j, g13.q_j)
        self.feet = feet
        self.planar_feet = [self.to_plane(f) for f in feet]
        self.offsets = [
            (f - self.origin) - self.basis.T @ self.to_plane(f) for f in feet
        ]

    def to_plane(self, x):
        return (np.asarray(x) - self.origin) @ self.basis.T

    def lift(self, P, k):
        return self.origin + P @ self.basis + self.offsets[k]

    def line3_distance(self, P3):
        rel = P3 - self.planar_feet[2]
        u = self.u[2]
        return np.abs(rel[..., 0] * u[1] - rel[..., 1] * u[0])


def _carry_planar(P1, P2, d13, d23, side):
    """Apex of a triangle on base P1P2, left of P1->P2 for side=+1."""
    diff = P2 - P1
    base = np.linalg.norm(diff, axis=-1)
    u = diff / base[..., None]
    lam = (d13 * d13 - d23 * d23 + base * base) / (2.0 * base)
    h2 = d13 * d13 - lam * lam
    h = np.sqrt(np.maximum(h2, 0.0))
    perp = np.stack([-u[..., 1], u[..., 0]], axis=-1)
    P3 = P1 + lam[..., None] * u + (side * h)[..., None] * perp
    return P3, h2


def carry_third_vertex(p1, p2, tri: TriangleSpec, *, frame=None, line: Optional[Line] = None,
                       side: int = 1, tol: float = 1e-9):
    """Place vertex 3 rigidly given vertices 1 and 2.

    With a plane frame ``(origin, e1, e2)`` (or plain 2-D points) the two
    mirror apexes are candidates and ``side=+1`` picks the one left of
    ``p1 -> p2``. With ``line`` the candidates are the points of *line* at
    distances ``d13``/``d23`` from ``p1``/``p2``; ``side=+1`` picks the one
    with larger line coordinate.
    """
    p1, p2 = as_point(p1), as_point(p2)
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    scale = tri.scale
    base = float(np.linalg.norm(p2 - p1))
    if abs(base - tri.d12) > 1e-9 * tri.d12:
        raise ValueError(f"|p1-p2|={base!r} does not match d12={tri.d12!r}")

    if line is not None:
        return _carry_onto_line(p1, p2, tri, line, side, tol)

    if frame is None:
        if p1.size != 2:
            raise ValueError("a plane frame or a target line is required above 2-D")
        origin, e1, e2 = np.zeros(2), np.array([1.0, 0.0]), np.array([0.0, 1.0])
    else:
        origin, e1, e2 = (np.asarray(x, dtype=float) for x in frame)
    basis = np.vstack([e1, e2])
    P1, P2 = (p1 - origin) @ basis.T, (p2 - origin) @ basis.T
    P3, h2 = _carry_planar(P1, P2, tri.d13, tri.d23, side)
    if h2 < -tol * scale * scale:
        raise NoThirdVertex("edges d13 and d23 cannot close over the base")
    if math.sqrt(max(h2, 0.0)) <= 1e-12 * scale:
        raise AmbiguousSide("both apex candidates coincide")
    return origin + P3 @ basis


def _carry_onto_line(p1, p2, tri, line, side, tol):
    scale = tri.scale
    foot = float(line.coordinate(p1))
    miss = float(line.distance_to(p1))
    disc = tri.d13 ** 2 - miss ** 2
    if disc < -tol * scale * scale:
        raise NoThirdVertex("sphere about p1 misses the third line")
    root = math.sqrt(max(disc, 0.0))
    good = []
    for s in (foot + root, foot - root):
        p3 = line.point_at(s)
        if abs(np.linalg.norm(p3 - p2) - tri.d23) <= tol * scale:
            good.append(s)
    if not good:
        raise NoThirdVertex("no point of the third line fits both edge lengths")
    if len(good) == 2:
        if abs(good[0] - good[1]) <= 1e-12 * scale:
            raise AmbiguousSide("the two line intersections coincide")
        s = max(good) if side == 1 else min(good)
    else:
        s = good[0]
    return line.point_at(s)


# -- feasibility ------------------------------------------------------------

def _resolve_tolerance(tolerance: Optional[float]) -> float:
    return DEFAULT_TOLERANCE if tolerance is None else float(tolerance)


def feasibility(lines: Sequence[Line], tri: TriangleSpec, tolerance: Optional[float] = None) -> FeasibilityReport:
    """Decide whether the triangle can move continuously on the three lines.

    For non-parallel scenes the test is: the scene reduces to a plane, every
    edge spans its gap, and ``sqrt(d_ij^2 - D_ij^2) / sin(alpha_ij)`` agrees
    across the three pairs (that common value is the diameter of the fixed
    circle of the hypocycloid drawer).
    """
    tol = _resolve_tolerance(tolerance)
    lines = tuple(lines)
    scene = classify_scene(*lines)
    notes = list(scene.warnings)

    if scene.tag is SceneTag.ALL_PARALLEL:
        if parallel_placement(lines, tri) is None:
            return FeasibilityReport(Verdict.INFEASIBLE, scene, reason="triangle does not fit across the parallel lines",
                                     warnings=tuple(notes))
        return FeasibilityReport(Verdict.FEASIBLE_PARALLEL, scene, warnings=tuple(notes))

    if not scene.planarizable:
        if scene.tag is SceneTag.GENERIC:
            reason = "lines are not parallel and no plane reduction exists (no common perpendicular axis)"
        else:
            reason = f"line directions span {scene.direction_rank} dimensions"
        return FeasibilityReport(Verdict.INFEASIBLE, scene, reason=reason, warnings=tuple(notes))

    g12, g13, g23 = scene.pairs
    ratios = []
    for g, d, name in ((g12, tri.d12, "d12"), (g13, tri.d13, "d13"), (g23, tri.d23, "d23")):
        try:
            d_eff = effective_length(d, g.dist)
        except EdgeTooShort:
            return FeasibilityReport(Verdict.INFEASIBLE, scene,
                                     reason=f"{name}={d!r} does not exceed the line gap {g.dist!r}",
                                     warnings=tuple(notes))
        ratios.append(d_eff / g.sin_alpha)
    ratios = tuple(ratios)
    spread = (max(ratios) - min(ratios)) / max(ratios)
    if spread > tol:
        if spread <= NEAR_FEASIBLE_BAND:
            notes.append(f"near-feasible: ratio spread {spread:.3g} exceeds tolerance {tol:.3g}")
        return FeasibilityReport(
            Verdict.INFEASIBLE, scene, ratios=ratios,
            reason=f"range ratios differ (relative spread {spread:.3g})",
            warnings=tuple(notes),
        )

    e12 = ellipse_params(tri.d12, g12)
    e13 = ellipse_params(tri.d13, g13)
    ranges = (
        range_interval(e12, g12, "i"),
        range_interval(e12, g12, "j"),
        range_interval(e13, g13, "j"),
    )
    try:
        side = _mechanism_side(_Reduction(lines, scene), tri)
    except InternalInconsistency as exc:
        if spread <= DEFAULT_TOLERANCE:
            raise
        # only a loosened tolerance let this scene through; the motion
        # itself does not close, so the honest answer is "infeasible"
        return FeasibilityReport(
            Verdict.INFEASIBLE, scene, ratios=ratios,
            reason=f"ratio spread {spread:.3g} is within tolerance but the motion does not close: {exc}",
            warnings=tuple(notes),
        )
    return FeasibilityReport(Verdict.FEASIBLE_MECHANISM, scene, ratios=ratios, ranges=ranges,
                             side=side, warnings=tuple(notes))


def _effective_lengths(red: _Reduction, tri: TriangleSpec):
    g12, g13, g23 = red.pairs
    return (
        effective_length(tri.d12, g12.dist),
        effective_length(tri.d13, g13.dist),
        effective_length(tri.d23, g23.dist),
    )


def _planar_pair(red: _Reduction, tri: TriangleSpec, theta):
    g12 = red.pairs[0]
    e12 = ellipse_params(tri.d12, g12)
    t12, t21 = segment_position(np.asarray(theta, dtype=float), e12)
    t12, t21 = np.asarray(t12), np.asarray(t21)
    p1 = g12.q_i + t12[..., None] * g12.line_i.direction
    p2 = g12.q_j + t21[..., None] * g12.line_j.direction
    return p1, p2


def _mechanism_side(red: _Reduction, tri: TriangleSpec) -> int:
    _, d13, d23 = _effective_lengths(red, tri)
    probe = np.array([0.37, 1.91, 2.8, 4.1, 5.5])
    p1, p2 = _planar_pair(red, tri, probe)
    P1, P2 = red.to_plane(p1), red.to_plane(p2)
    limit = 1e-7 * tri.scale
    fits = []
    for side in (1, -1):
        P3, _ = _carry_planar(P1, P2, d13, d23, side)
        fits.append(float(np.max(red.line3_distance(P3))))
    if fits[0] <= limit and fits[0] <= fits[1]:
        return 1
    if fits[1] <= limit:
        return -1
    raise InternalInconsistency(
        f"ratio test passed but the carried vertex leaves L3 (misfit {min(fits):.3g})"
    )


# -- motion -----------------------------------------------------------------

class Mechanism:
    """A feasible hypocycloid mechanism ready for evaluation at any angle."""

    def __init__(self, lines: Sequence[Line], tri: TriangleSpec, side: Optional[int] = None,
                 report: Optional[FeasibilityReport] = None):
        self.lines = tuple(lines)
        self.tri = tri
        self.report = report if report is not None else feasibility(self.lines, tri)
        if self.report.verdict is not Verdict.FEASIBLE_MECHANISM:
            raise InfeasibleMotion(self.report.reason or f"verdict is {self.report.verdict.value}")
        self.reduction = _Reduction(self.lines, self.report.scene_class)
        self.effective = _effective_lengths(self.reduction, tri)
        if side is None:
            side = self.report.side
        if side not in (1, -1):
            raise ValueError("side must be +1 or -1")
        self.side = side
        if side != self.report.side:
            raise NoThirdVertex(
                f"side {side:+d} carries p3 off L3; this scene moves with side {self.report.side:+d}"
            )

    @property
    def scale(self) -> float:
        return self.tri.scale

    @property
    def radius(self) -> float:
        """Fixed-circle radius R: half of every range length."""
        return float(np.mean(self.report.ratios))

    def positions(self, theta):
        """Vertex positions at *theta*; arrays of shape ``theta.shape + (n,)``."""
        red = self.reduction
        p1, p2 = _planar_pair(red, self.tri, theta)
        _, d13, d23 = self.effective
        P3, h2 = _carry_planar(red.to_plane(p1), red.to_plane(p2), d13, d23, self.side)
        p3 = red.lift(P3, 2)
        return p1, p2, p3

    def q_coordinates(self, p1, p2, p3):
        """Six q-frame coordinates ``(t12, t13, t21, t23, t31, t32)``."""
        g12, g13, g23 = self.reduction.pairs
        v1, v2, v3 = (L.direction for L in self.lines)
        return np.stack([
            (p1 - g12.q_i) @ v1,
            (p1 - g13.q_i) @ v1,
            (p2 - g12.q_j) @ v2,
            (p2 - g23.q_i) @ v2,
            (p3 - g13.q_j) @ v3,
            (p3 - g23.q_j) @ v3,
        ], axis=-1)

    def state(self, theta: float) -> MotionState:
        p1, p2, p3 = self.positions(float(theta))
        miss = float(self.lines[2].distance_to(p3))
        if miss > 1e-6 * self.scale:
            raise InternalInconsistency(f"carried vertex is {miss:.3g} off L3 on a feasible scene")
        t = self.q_coordinates(p1, p2, p3)
        return MotionState(float(theta), p1, p2, p3, tuple(float(x) for x in t))

    def trace(self, n_samples: int) -> "Trace":
        thetas = _theta_grid(n_samples)
        p1, p2, p3 = self.positions(thetas)
        return Trace(thetas, np.stack([p1, p2, p3], axis=1), self.lines, self.tri, self)


def _theta_grid(n_samples: int) -> np.ndarray:
    if int(n_samples) != n_samples or n_samples < 2:
        raise InvalidSampleCount(f"need at least 2 samples, got {n_samples!r}")
    return 2.0 * np.pi * np.arange(int(n_samples)) / int(n_samples)


@dataclass(frozen=True, eq=False)
class Trace:
    """Uniformly sampled motion over one period.

    ``points`` has shape ``(n_samples, 3, dim)``. ``mechanism`` is None for
    the translation motion of parallel lines.
    """

    thetas: np.ndarray
    points: np.ndarray
    lines: tuple
    tri: TriangleSpec
    mechanism: Optional[Mechanism] = None
    kind: str = "mechanism"

    def __len__(self):
        return len(self.thetas)

    def __getitem__(self, k) -> MotionState:
        p1, p2, p3 = self.points[k]
        if self.mechanism is not None:
            t = tuple(float(x) for x in self.mechanism.q_coordinates(p1, p2, p3))
        else:
            s = [float(L.coordinate(p)) for L, p in zip(self.lines, (p1, p2, p3))]
            t = (s[0], s[0], s[1], s[1], s[2], s[2])
        return MotionState(float(self.thetas[k]), p1, p2, p3, t)

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    @property
    def states(self) -> list[MotionState]:
        return list(self)

    def edge_residuals(self) -> np.ndarray:
        """``| |p_i - p_j| - d_ij |`` per sample, columns 12, 13, 23."""
        out = []
        for (i, j) in ((0, 1), (0, 2), (1, 2)):
            dist = np.linalg.norm(self.points[:, i] - self.points[:, j], axis=-1)
            out.append(np.abs(dist - self.tri.length(i, j)))
        return np.stack(out, axis=-1)

    def line_residuals(self) -> np.ndarray:
        return np.stack([L.distance_to(self.points[:, k]) for k, L in enumerate(self.lines)], axis=-1)

    def with_points(self, points) -> "Trace":
        return replace(self, points=np.asarray(points, dtype=float))


def _parallel_trace(lines, tri, n_samples) -> Trace:
    thetas = _theta_grid(n_samples)
    s = parallel_placement(lines, tri)
    if s is None:
        raise InfeasibleMotion("triangle does not fit across the parallel lines")
    v = lines[0].direction
    shift = tri.scale * np.sin(thetas)
    pts = []
    for k, L in enumerate(lines):
        base = L.point_at(s[k])
        pts.append(base + shift[:, None] * v)
    return Trace(thetas, np.stack(pts, axis=1), tuple(lines), tri, None, kind="parallel")


def motion_state(theta: float, lines: Sequence[Line], tri: TriangleSpec, side: Optional[int] = None) -> MotionState:
    return Mechanism(lines, tri, side).state(theta)


def trace(lines: Sequence[Line], tri: TriangleSpec, side: Optional[int] = None, n_samples: int = 1024) -> Trace:
    """Sample the motion on ``theta = 2 pi k / n_samples``.

    Parallel lines translate the triangle by ``scale * sin(theta)`` along
    their common direction.
    """
    _theta_grid(n_samples)
    report = feasibility(lines, tri)
    if report.verdict is Verdict.FEASIBLE_PARALLEL:
        return _parallel_trace(tuple(lines), tri, n_samples)
    return Mechanism(lines, tri, side, report=report).trace(n_samples)


def observed_range(tr: Trace, k: int) -> RangeInterval:
    """Extent of vertex *k* (0-based) along its line, in anchor coordinates.

    The sampled extremes are polished by a bounded 1-D search on the
    mechanism itself, so the result does not depend on the grid phase.
    """
    line = tr.lines[k]
    s = line.coordinate(tr.points[:, k])
    if tr.mechanism is None:
        return RangeInterval((s.max() + s.min()) / 2, (s.max() - s.min()) / 2)
    mech = tr.mechanism
    step = 2.0 * np.pi / len(tr)

    def coord(theta):
        return float(line.coordinate(mech.positions(theta)[k]))

    ends = []
    for sign, idx in ((1.0, int(np.argmax(s))), (-1.0, int(np.argmin(s)))):
        th = tr.thetas[idx]
        res = minimize_scalar(lambda x: -sign * coord(x), bounds=(th - step, th + step),
                              method="bounded", options={"xatol": 1e-12})
        ends.append(max(sign * s[idx], -res.fun) * sign)
    high, low = ends
    return RangeInterval((high + low) / 2, (high - low) / 2)


# -- circumcircle -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CircleCheck:
    """Circumcircle consistency of a planar trace.

    ``center``/``radius`` describe the circle on which the moving
    circumcentre travels (centred at the meet). ``max_dev`` is the largest of
    ``|r_theta - radius|`` and ``| |c_theta - center| - radius |``.
    """

    center: Optional[np.ndarray]
    radius: float
    max_dev: float
    applicable: bool = True
    radii: Optional[np.ndarray] = None

    def __iter__(self):
        return iter((self.center, self.radius, self.max_dev))


def _circumcenters(A, B, C):
    b, c = B - A, C - A
    d = 2.0 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    bb, cc = (b * b).sum(1), (c * c).sum(1)
    ux = (c[:, 1] * bb - b[:, 1] * cc) / d
    uy = (b[:, 0] * cc - c[:, 0] * bb) / d
    rel = np.stack([ux, uy], axis=1)
    return A + rel, np.linalg.norm(rel, axis=1)


def circumcircle_check(tr: Trace) -> CircleCheck:
    if tr.kind == "parallel":
        return CircleCheck(None, math.nan, math.nan, applicable=False)
    scene = classify_scene(*tr.lines)
    red = tr.mechanism.reduction if tr.mechanism is not None else _Reduction(tr.lines, scene)
    P = red.to_plane(tr.points)
    centers, radii = _circumcenters(P[:, 0], P[:, 1], P[:, 2])
    radius = float(np.mean(radii))
    meet = red.planar_feet[0]
    orbit = np.linalg.norm(centers - meet, axis=1)
    max_dev = float(max(np.max(np.abs(radii - radius)), np.max(np.abs(orbit - radius))))
    return CircleCheck(red.origin + meet @ red.basis, radius, max_dev, True, radii)


# -- rolling circle ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RollingCircleModel:
    """Circle of radius ``r = R/2`` rolling inside a fixed circle of radius R.

    ``phases`` are the angles of the three line directions in the plane
    frame ``(e1, e2)`` centred on ``center``.
    """

    center: np.ndarray
    R: float
    phases: tuple[float, float, float]
    e1: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))
    e2: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0]))

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        object.__setattr__(self, "center", as_point(self.center))

    @property
    def r(self) -> float:
        return self.R / 2.0

    def direction(self, phi):
        return np.cos(phi) * self.e1 + np.sin(phi) * self.e2

    def inner_center(self, theta):
        """Centre of the rolling circle at *theta*."""
        theta = np.asarray(theta, dtype=float)
        return self.center + self.r * (np.cos(theta)[..., None] * self.e1 + np.sin(theta)[..., None] * self.e2)


def rolling_model(lines: Sequence[Line], tri: TriangleSpec, R: Optional[float] = None) -> RollingCircleModel:
    """Rolling-circle model matched to a feasible mechanism."""
    mech = Mechanism(lines, tri)
    red = mech.reduction
    phases = tuple(float(math.atan2(u[1], u[0]) % (2 * math.pi)) for u in red.u)
    return RollingCircleModel(red.origin, mech.radius if R is None else R, phases, red.e1, red.e2)


def rolling_circle_point(model: RollingCircleModel, theta, phi: float):
    """Point of the rolling circle that rides the diameter at angle *phi*."""
    theta = np.asarray(theta, dtype=float)
    return model.center + (model.R * np.cos(theta - phi))[..., None] * model.direction(phi)


def _rolling_positions(model, mech, theta):
    red = mech.reduction
    return [rolling_circle_point(model, theta, model.phases[k]) + red.offsets[k] for k in range(3)]


def _phase_misfit(model, mech, thetas, shift, sense=1):
    mech_pts = mech.positions(thetas)
    roll_pts = _rolling_positions(model, mech, sense * thetas + shift)
    return sum(float(np.sum((a - b) ** 2)) for a, b in zip(mech_pts, roll_pts))


def rolling_equivalence(lines: Sequence[Line], tri: TriangleSpec, model: Optional[RollingCircleModel] = None,
                        n_samples: int = 4096) -> float:
    """Largest distance between mechanism and rolling-circle vertices.

    The two angle origins are aligned by one least-squares phase shift
    fitted on 8 samples before comparing on ``n_samples`` angles. The
    mechanism may run through the rolling motion in either sense, so both
    ``theta -> shift + theta`` and ``theta -> shift - theta`` are fitted.
    """
    mech = Mechanism(lines, tri)
    if model is None:
        model = rolling_model(lines, tri)
    fit = 2.0 * np.pi * np.arange(8) / 8
    coarse = 2.0 * np.pi * np.arange(720) / 720
    step = coarse[1]
    best = None
    for sense in (1, -1):
        errs = [_phase_misfit(model, mech, fit, s, sense) for s in coarse]
        start = coarse[int(np.argmin(errs))]
        res = minimize_scalar(lambda s: _phase_misfit(model, mech, fit, s, sense),
                              bounds=(start - step, start + step), method="bounded",
                              options={"xatol": 1e-13})
        if best is None or res.fun < best[0]:
            best = (res.fun, res.x, sense)
    _, shift, sense = best
    thetas = _theta_grid(n_samples)
    mech_pts = mech.positions(thetas)
    roll_pts = _rolling_positions(model, mech, sense * thetas + shift)
    return float(max(np.max(np.linalg.norm(a - b, axis=-1)) for a, b in zip(mech_pts, roll_pts)))

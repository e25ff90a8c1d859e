"""Static placements of a rigid triangle with one vertex on each of three lines.

Vertices 1 and 2 are parametrised by the ellipse angle of their pair. The
two quadrics that involve vertex 3 share the same ``t31^2`` term, so their
difference is linear, ``A(theta) t31 + B(theta) = 0``. Substituting back
leaves the pole-free trigonometric polynomial

    H(theta) = B^2 + 2 c13 t13 A B + A^2 (t13^2 - k13)

of degree 4, whose real roots are the placements (hence at most 8).
``oracle_sweep`` checks the same answer by brute force without the
elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import EdgeTooShort, InternalInconsistency, ParallelLines
from .geometry import PARALLEL_TOL, Line, SceneTag, common_perpendicular
from .mechanism import (
    TriangleSpec,
    Trace,
    Verdict,
    feasibility,
    parallel_placement,
    trace,
)
from .pairwise import EDGE_TOL

BEZOUT_BOUND = 8
RESIDUAL_TOL = 1e-8
DEGENERATE_TOL = 1e-9
_RTOL = 4 * np.finfo(float).eps

__all__ = [
    "Configuration",
    "ConfigurationSet",
    "Elimination",
    "OracleResult",
    "eliminate_t3",
    "solve_configurations",
    "oracle_sweep",
    "match_configurations",
    "BEZOUT_BOUND",
]


@dataclass(frozen=True, eq=False)
class Configuration:
    """One placement; ``t1, t2, t3`` are anchor-frame line coordinates."""

    t1: float
    t2: float
    t3: float
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    residual: float
    theta: float = math.nan
    near_tangent: bool = False

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.t1, self.t2, self.t3])


@dataclass(frozen=True, eq=False)
class ConfigurationSet:
    kind: str
    configs: tuple[Configuration, ...] = ()
    witness: Optional[Trace] = None
    notes: tuple[str, ...] = ()

    @property
    def is_continuum(self) -> bool:
        return self.kind == "continuum"

    @property
    def count(self) -> Optional[int]:
        return None if self.is_continuum else len(self.configs)

    @property
    def within_bound(self) -> bool:
        return self.is_continuum or len(self.configs) <= BEZOUT_BOUND

    def status_line(self) -> str:
        if self.is_continuum:
            return "count=continuum"
        return f"count={len(self.configs)} (bound {BEZOUT_BOUND})"


@dataclass(frozen=True)
class Elimination:
    """Linear elimination of vertex 3 at one angle.

    ``t3`` is the anchor coordinate of vertex 3 (None when ``A`` vanishes);
    ``residual`` is ``H(theta) / scale^4``. ``degenerate`` is set when ``A``
    vanishes or when the residual vanishes on a neighbourhood of ``theta``,
    i.e. the 12 and 13 constraints already imply the 23 one.
    """

    theta: float
    t3: Optional[float]
    t31: Optional[float]
    A: float
    B: float
    residual: float
    degenerate: bool


# -- the eliminated system --------------------------------------------------

@dataclass(frozen=True)
class _PairQuadric:
    """``t_i^2 + t_j^2 - 2 c t_i t_j = k`` with ``t = s - foot``."""

    c: float
    foot_i: float
    foot_j: float
    k: float


def _pair_quadric(Li: Line, Lj: Line, d: float, scale: float) -> _PairQuadric:
    c = float(np.clip(Li.direction @ Lj.direction, -1.0, 1.0))
    if abs(c) >= 1.0 - PARALLEL_TOL:
        # any perpendicular pair of points works as feet on parallel lines
        c = math.copysign(1.0, c)
        foot_j = float(Lj.coordinate(Li.anchor))
        gap = float(np.linalg.norm(Li.anchor - Lj.point_at(foot_j)))
        foot_i = 0.0
    else:
        g = common_perpendicular(Li, Lj)
        foot_i, foot_j, gap = g.t_foot_i, g.t_foot_j, g.dist
    if d - gap <= EDGE_TOL * scale:
        raise EdgeTooShort(f"edge length {d!r} does not exceed line gap {gap!r}")
    return _PairQuadric(c, foot_i, foot_j, (d - gap) * (d + gap))


def _theta_pair_order(lines: Sequence[Line]) -> tuple[int, int, int]:
    """Relabelling that puts a non-parallel pair first."""
    for perm in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        a, b = lines[perm[0]].direction, lines[perm[1]].direction
        if abs(a @ b) < 1.0 - PARALLEL_TOL:
            return perm
    raise ParallelLines("all three lines are parallel")


class _System:
    def __init__(self, lines: Sequence[Line], tri: TriangleSpec, perm=(0, 1, 2)):
        self.perm = tuple(perm)
        self.lines = tuple(lines[k] for k in perm)
        self.tri = tri.permuted(perm)
        self.scale = tri.scale
        L1, L2, L3 = self.lines
        if abs(L1.direction @ L2.direction) >= 1.0 - PARALLEL_TOL:
            raise ParallelLines("vertex 1 and 2 lines are parallel")
        t = self.tri
        self.q12 = _pair_quadric(L1, L2, t.d12, self.scale)
        self.q13 = _pair_quadric(L1, L3, t.d13, self.scale)
        self.q23 = _pair_quadric(L2, L3, t.d23, self.scale)
        c = self.q12.c
        d_eff = math.sqrt(self.q12.k)
        self.a = d_eff / math.sqrt(2.0 * (1.0 - c))
        self.b = d_eff / math.sqrt(2.0 * (1.0 + c))
        # t_ij = t_ik + e_ijk
        self.e123 = self.q13.foot_i - self.q12.foot_i
        self.e213 = self.q23.foot_i - self.q12.foot_j
        self.e321 = self.q13.foot_j - self.q23.foot_j

    def evaluate(self, theta):
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        t12 = self.a * cos_t - self.b * sin_t
        t21 = self.a * cos_t + self.b * sin_t
        t13 = t12 - self.e123
        t23 = t21 - self.e213
        e = self.e321
        c13, c23 = self.q13.c, self.q23.c
        k13, k23 = self.q13.k, self.q23.k
        A = 2.0 * (e - c23 * t23 + c13 * t13)
        B = e * e + t23 * t23 - 2.0 * c23 * e * t23 - k23 - t13 * t13 + k13
        H = B * B + 2.0 * c13 * t13 * A * B + A * A * (t13 * t13 - k13)
        return t12, t21, t13, A, B, H

    def H(self, theta) -> float:
        return float(self.evaluate(theta)[5]) / self.scale ** 4

    def degenerate_mask(self, theta_grid):
        _, _, _, A, _, H = self.evaluate(theta_grid)
        small = np.abs(H) / self.scale ** 4 <= DEGENERATE_TOL
        dependent = small & np.roll(small, 1) & np.roll(small, -1)
        return (np.abs(A) <= 1e-12 * self.scale) | dependent

    def anchor_coords(self, t12, t21, t31):
        return (
            self.q12.foot_i + t12,
            self.q12.foot_j + t21,
            self.q13.foot_j + t31,
        )

    def candidates(self, theta):
        """Anchor coordinates of every vertex-3 choice worth checking at *theta*."""
        t12, t21, t13, A, B, _ = (float(x) for x in self.evaluate(theta))
        c13, k13 = self.q13.c, self.q13.k
        options = []
        if abs(A) > 1e-12 * self.scale:
            options.append(-B / A)
        disc = k13 - (1.0 - c13 * c13) * t13 * t13
        if disc >= -1e-9 * self.scale ** 2:
            root = math.sqrt(max(disc, 0.0))
            options += [c13 * t13 + root, c13 * t13 - root]
        return [self.anchor_coords(t12, t21, t31) for t31 in options]


# -- residuals and polishing ------------------------------------------------

_EDGES = ((0, 1), (0, 2), (1, 2))


def _residual(lines, tri, s) -> float:
    pts = [L.point_at(x) for L, x in zip(lines, s)]
    return max(abs(float(np.linalg.norm(pts[i] - pts[j])) - tri.length(i, j)) for i, j in _EDGES)


def _newton_polish(lines, tri, s, iters: int):
    s = np.array(s, dtype=float)
    V = [L.direction for L in lines]
    for _ in range(iters):
        pts = [L.point_at(x) for L, x in zip(lines, s)]
        F = np.array([np.sum((pts[i] - pts[j]) ** 2) - tri.length(i, j) ** 2 for i, j in _EDGES])
        J = np.zeros((3, 3))
        for row, (i, j) in enumerate(_EDGES):
            diff = pts[i] - pts[j]
            J[row, i] = 2.0 * diff @ V[i]
            J[row, j] = -2.0 * diff @ V[j]
        if np.linalg.cond(J) > 1e12:
            break
        step = np.linalg.solve(J, F)
        s = s - step
        if np.max(np.abs(step)) <= 1e-15 * (1.0 + np.max(np.abs(s))):
            break
    return s


def _make_config(lines, tri, s, theta=math.nan, near_tangent=False) -> Configuration:
    pts = [L.point_at(x) for L, x in zip(lines, s)]
    return Configuration(float(s[0]), float(s[1]), float(s[2]), *pts,
                         residual=_residual(lines, tri, s), theta=float(theta),
                         near_tangent=near_tangent)


def _dedup(configs: list[Configuration], radius: float) -> list[Configuration]:
    kept: list[Configuration] = []
    for cfg in sorted(configs, key=lambda c: c.residual):
        if all(np.max(np.abs(cfg.coords - k.coords)) > radius for k in kept):
            kept.append(cfg)
    return sorted(kept, key=lambda c: (c.theta % (2 * math.pi), c.t1, c.t2, c.t3))


def _unpermute(perm, s):
    out = [0.0, 0.0, 0.0]
    for k, orig in enumerate(perm):
        out[orig] = s[k]
    return out


# -- public operations ------------------------------------------------------

def eliminate_t3(theta: float, lines: Sequence[Line], tri: TriangleSpec, grid_size: int = 4096) -> Elimination:
    """Solve the linear difference of the 13 and 23 quadrics for vertex 3."""
    system = _System(lines, tri)
    h = 2.0 * math.pi / grid_size
    thetas = np.array([theta - h, theta, theta + h])
    t12, t21, _, A, B, H = system.evaluate(thetas)
    scale = system.scale
    a, b = float(A[1]), float(B[1])
    Hn = np.abs(H) / scale ** 4
    degenerate = abs(a) <= 1e-12 * scale or bool(np.all(Hn <= DEGENERATE_TOL))
    t31 = t3 = None
    if abs(a) > 1e-12 * scale:
        t31 = -b / a
        t3 = system.q13.foot_j + t31
    return Elimination(float(theta), t3, t31, a, b, float(H[1]) / scale ** 4, degenerate)


def _find_roots(fn, grid, values):
    """Roots of a smooth periodic function sampled on ``grid``.

    Returns ``(theta, near_tangent)`` pairs from sign changes plus polished
    local minima of ``|fn|`` that touch or cross zero inside one cell pair.
    """
    n = len(grid)
    step = grid[1] - grid[0]
    roots = []
    nxt = np.roll(values, -1)
    for k in np.nonzero(values == 0.0)[0]:
        roots.append((float(grid[k]), False))
    for k in np.nonzero(values * nxt < 0.0)[0]:
        lo = grid[k]
        roots.append((brentq(fn, lo, lo + step, xtol=1e-15, rtol=_RTOL, maxiter=200), False))
    mag = np.abs(values)
    prev = np.roll(mag, 1)
    after = np.roll(mag, -1)
    sign_prev = np.roll(values, 1) * values
    sign_next = nxt * values
    is_min = (mag < prev) & (mag <= after) & (sign_prev > 0) & (sign_next > 0)
    for k in np.nonzero(is_min)[0]:
        lo, hi = grid[k] - step, grid[k] + step
        # minimise the signed value so that a dip through zero is found
        # even when both of its roots sit inside the same grid cell
        sgn = 1.0 if values[k] > 0 else -1.0
        res = minimize_scalar(lambda x: sgn * fn(x), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14})
        tm, fm = float(res.x), fn(float(res.x))
        if fm * values[k] < 0.0:
            roots.append((brentq(fn, lo, tm, xtol=1e-15, rtol=_RTOL), False))
            roots.append((brentq(fn, tm, hi, xtol=1e-15, rtol=_RTOL), False))
        elif abs(fm) <= 1e-8:
            roots.append((tm, True))
    return roots


def solve_configurations(lines: Sequence[Line], tri: TriangleSpec, grid_size: int = 4096,
                         newton_iters: int = 50, dedup_radius: Optional[float] = None) -> ConfigurationSet:
    """Enumerate every placement, or report a continuum of them.

    Raises EdgeTooShort when some edge cannot span its pair of lines; a
    scene with no placement otherwise yields an empty finite set.
    """
    lines = tuple(lines)
    scale = tri.scale
    radius = 1e-6 * scale if dedup_radius is None else dedup_radius
    report = feasibility(lines, tri)
    scene = report.scene_class

    if scene.tag is SceneTag.ALL_PARALLEL:
        if report.verdict is Verdict.FEASIBLE_PARALLEL:
            return ConfigurationSet("continuum", witness=trace(lines, tri, n_samples=64),
                                    notes=("parallel lines: the triangle translates freely",))
        return ConfigurationSet("finite", notes=("triangle does not fit across the parallel lines",))

    perm = _theta_pair_order(lines)
    system = _System(lines, tri, perm)
    grid = 2.0 * np.pi * np.arange(grid_size) / grid_size
    degenerate = system.degenerate_mask(grid)
    mechanism = report.verdict is Verdict.FEASIBLE_MECHANISM
    if degenerate.mean() > 0.5:
        if not mechanism:
            raise InternalInconsistency(
                f"elimination degenerate on {degenerate.mean():.0%} of the grid but verdict is {report.verdict.value}"
            )
        return ConfigurationSet("continuum", witness=trace(lines, tri, n_samples=64),
                                notes=("elimination is degenerate: the 12 and 13 constraints imply the 23 one",))
    if mechanism:
        raise InternalInconsistency("feasibility reports a mechanism but the elimination is not degenerate")

    values = system.evaluate(grid)[5] / scale ** 4
    found = []
    for theta, tangent in _find_roots(system.H, grid, values):
        for s in system.candidates(theta):
            if _residual(system.lines, system.tri, s) > 1e-6 * scale:
                continue
            polished = _newton_polish(system.lines, system.tri, s, newton_iters)
            if (np.max(np.abs(polished - s)) <= 1e-6 * scale
                    and _residual(system.lines, system.tri, polished) <= _residual(system.lines, system.tri, s)):
                s = polished
            s_orig = _unpermute(perm, s)
            cfg = _make_config(lines, tri, s_orig, theta, tangent)
            if cfg.residual <= RESIDUAL_TOL * scale:
                found.append(cfg)
    configs = _dedup(found, radius)
    notes = []
    if any(c.near_tangent for c in configs):
        notes.append("near-tangent root(s) reported once, without multiplicity")
    if len(configs) > BEZOUT_BOUND:
        notes.append(f"count {len(configs)} exceeds the Bezout bound {BEZOUT_BOUND}")
    return ConfigurationSet("finite", tuple(configs), notes=tuple(notes))


# -- brute-force oracle -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class OracleResult:
    configs: tuple[Configuration, ...]
    near_zero_fraction: float
    continuum: bool

    @property
    def count(self) -> int:
        return len(self.configs)


def _golden_min(f, lo, hi, iters=80):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


class _Sweep:
    """Vertex 3 candidates on L3 at distance d13 from vertex 1; misfit to d23."""

    def __init__(self, lines, tri, perm):
        self.lines = tuple(lines[k] for k in perm)
        self.tri = tri.permuted(perm)
        L1, L2, _ = self.lines
        g = common_perpendicular(L1, L2)
        self.g = g
        d = self.tri.d12
        d_eff = math.sqrt((d - g.dist) * (d + g.dist))
        self.a = d_eff / math.sqrt(2.0 * (1.0 - g.c))
        self.b = d_eff / math.sqrt(2.0 * (1.0 + g.c))

    def pair(self, theta):
        theta = np.asarray(theta, dtype=float)
        t1 = self.a * np.cos(theta) - self.b * np.sin(theta)
        t2 = self.a * np.cos(theta) + self.b * np.sin(theta)
        p1 = self.g.q_i + t1[..., None] * self.lines[0].direction
        p2 = self.g.q_j + t2[..., None] * self.lines[1].direction
        return p1, p2

    def _sphere(self, p1):
        L3 = self.lines[2]
        rel = p1 - L3.anchor
        foot = rel @ L3.direction
        disc = self.tri.d13 ** 2 - (np.einsum("...k,...k->...", rel, rel) - foot * foot)
        return foot, disc

    def disc(self, theta):
        return self._sphere(self.pair(theta)[0])[1]

    def misfits(self, theta):
        """Signed misfit per branch (NaN where the sphere misses L3) and vertex-3 coordinates."""
        p1, p2 = self.pair(theta)
        L3 = self.lines[2]
        foot, disc = self._sphere(p1)
        root = np.sqrt(np.where(disc >= 0.0, disc, np.nan))
        rel = L3.anchor - p2
        out = {}
        for sign in (1.0, -1.0):
            s3 = foot + sign * root
            gap = rel + s3[..., None] * L3.direction
            misfit = np.sqrt(np.einsum("...k,...k->...", gap, gap)) - self.tri.d23
            out[sign] = (misfit, s3)
        return out

    def branch(self, theta, sign):
        return self.misfits(theta)[sign]

    def coords(self, theta, sign):
        p1, p2 = self.pair(theta)
        _, s3 = self.branch(theta, sign)
        return [float(self.lines[0].coordinate(p1)), float(self.lines[1].coordinate(p2)), float(s3)]


def oracle_sweep(lines: Sequence[Line], tri: TriangleSpec, n: int = 200_000) -> OracleResult:
    """Dense-grid search for placements, independent of the elimination."""
    if n < 100_000:
        raise ValueError("oracle_sweep needs n >= 1e5 samples")
    lines = tuple(lines)
    scale = tri.scale
    try:
        perm = _theta_pair_order(lines)
    except ParallelLines:
        return OracleResult((), 1.0 if parallel_placement(lines, tri) else 0.0,
                            parallel_placement(lines, tri) is not None)
    for i, j in _EDGES:
        Li, Lj = lines[i], lines[j]
        if abs(Li.direction @ Lj.direction) < 1.0 - PARALLEL_TOL:
            gap = common_perpendicular(Li, Lj).dist
        else:
            gap = float(Li.distance_to(Lj.anchor))
        if tri.length(i, j) <= gap:
            return OracleResult((), 0.0, False)
    sweep = _Sweep(lines, tri, perm)
    grid = 2.0 * np.pi * np.arange(n) / n
    step = grid[1]
    branches = {sign: v[0] for sign, v in sweep.misfits(grid).items()}
    best = np.fmin(np.abs(branches[1.0]), np.abs(branches[-1.0]))
    near_zero = float(np.mean(np.nan_to_num(best, nan=np.inf) < 1e-9 * scale))
    if near_zero > 0.1:
        return OracleResult((), near_zero, True)

    roots = []
    # the two branches meet where the sphere about vertex 1 touches L3; a
    # root hiding between that junction and the first valid sample would
    # be missed by the grid, so bracket from the junction explicitly
    valid = np.isfinite(branches[1.0])
    for k in np.nonzero(valid != np.roll(valid, -1))[0]:
        inside, outside = (k, k + 1) if valid[k] else (k + 1, k)
        th_in = grid[inside % n] if inside < n else grid[0] + 2.0 * np.pi
        th_out = grid[outside % n] if outside < n else grid[0] + 2.0 * np.pi
        th_j = _domain_edge(sweep, th_in, th_out)
        for sign in (1.0, -1.0):
            fn = lambda x, sign=sign: float(sweep.branch(x, sign)[0])
            f_j, f_in = fn(th_j), branches[sign][inside % n]
            if f_j == 0.0:
                roots.append((sign, th_j))
            elif f_j * f_in < 0.0:
                roots.append((sign, _bisect(fn, min(th_j, th_in), max(th_j, th_in))))
    for sign, f in branches.items():
        fn = lambda x, sign=sign: float(sweep.branch(x, sign)[0])
        nxt = np.roll(f, -1)
        for k in np.nonzero(f * nxt < 0.0)[0]:
            roots.append((sign, _bisect(fn, grid[k], grid[k] + step)))
        for k in np.nonzero(f == 0.0)[0]:
            roots.append((sign, float(grid[k])))
        mag = np.nan_to_num(np.abs(f), nan=np.inf)
        prev, after = np.roll(mag, 1), np.roll(mag, -1)
        crossing = (f * nxt < 0.0) | (np.roll(f, 1) * f < 0.0)
        cand = np.nonzero((mag <= prev) & (mag <= after) & (mag < 1e-3 * scale) & ~crossing)[0]
        for k in cand:
            lo, hi = grid[k] - step, grid[k] + step
            if not np.isfinite(prev[k]):
                lo = _domain_edge(sweep, grid[k], grid[k] - step)
            if not np.isfinite(after[k]):
                hi = _domain_edge(sweep, grid[k], grid[k] + step)

            # follow the dip of the signed misfit: if it passes through
            # zero there are two roots inside the window, one on each side
            sgn = 1.0 if f[k] > 0 else -1.0

            def dip(x, fn=fn, sgn=sgn):
                v = fn(x)
                return sgn * v if math.isfinite(v) else math.inf

            tm, fm = _golden_min(dip, lo, hi)
            if fm > 1e-7 * scale:
                continue
            if fm < 0.0:
                roots.append((sign, _bisect(fn, lo, tm)))
                roots.append((sign, _bisect(fn, tm, hi)))
            else:
                roots.append((sign, tm))

    configs = []
    for sign, theta in roots:
        s = sweep.coords(theta, sign)
        if not all(math.isfinite(x) for x in s):
            continue
        cfg = _make_config(lines, tri, _unpermute(perm, s), theta)
        if cfg.residual <= 1e-6 * scale:
            configs.append(cfg)
    return OracleResult(tuple(_dedup(configs, 1e-6 * scale)), near_zero, False)


def _bisect(fn, lo, hi, iters=200):
    flo = fn(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _domain_edge(sweep, inside, outside, iters=100):
    """Angle where the sphere about vertex 1 starts touching L3."""
    for _ in range(iters):
        mid = 0.5 * (inside + outside)
        if sweep.disc(mid) >= 0.0:
            inside = mid
        else:
            outside = mid
    return inside


def match_configurations(a: Sequence[Configuration], b: Sequence[Configuration], tol: float) -> bool:
    """Same count and a one-to-one pairing within *tol* in line coordinates."""
    if len(a) != len(b):
        return False
    unused = list(b)
    for cfg in a:
        gaps = [np.max(np.abs(cfg.coords - o.coords)) for o in unused]
        if not gaps:
            return False
        k = int(np.argmin(gaps))
        if gaps[k] > tol:
            return False
        unused.pop(k)
    return True

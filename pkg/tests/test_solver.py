import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.optimize import minimize_scalar

from conftest import seeds
from trilinea import (
    BEZOUT_BOUND,
    Line,
    TriangleSpec,
    common_perpendicular,
    ellipse_params,
    eliminate_t3,
    match_configurations,
    oracle_sweep,
    solve_configurations,
)
from trilinea.errors import EdgeTooShort
from trilinea.pairwise import segment_points
from trilinea.scenes import equilateral_scene, random_feasible_scene, random_generic_scene

SQ3 = math.sqrt(3.0)


def check_configuration(cfg, lines, tri):
    for k, (L, p) in enumerate(zip(lines, (cfg.p1, cfg.p2, cfg.p3))):
        assert L.distance_to(p) < 1e-10
    for (i, j), (a, b) in zip(((0, 1), (0, 2), (1, 2)), ((cfg.p1, cfg.p2), (cfg.p1, cfg.p3), (cfg.p2, cfg.p3))):
        assert abs(np.linalg.norm(a - b) - tri.length(i, j)) < 1e-8 * tri.scale


class TestEliminate:
    def test_generic_matches_brute_force(self, rng):
        lines, tri, _ = random_generic_scene(rng)
        theta = 1.0
        el = eliminate_t3(theta, lines, tri)
        assert not el.degenerate
        g12 = common_perpendicular(lines[0], lines[1])
        p1, p2 = segment_points(theta, ellipse_params(tri.d12, g12), g12)

        def f13(t):
            return np.sum((lines[2].point_at(t) - p1) ** 2) - tri.d13 ** 2

        def f23(t):
            return np.sum((lines[2].point_at(t) - p2) ** 2) - tri.d23 ** 2

        # the difference of the two residuals is affine in t: the grid
        # minimum of its magnitude pins down the eliminated coordinate
        grid = np.linspace(-20, 20, 40_001)
        gap = np.abs([f13(t) - f23(t) for t in grid])
        k = int(np.argmin(gap))
        res = minimize_scalar(lambda t: abs(f13(t) - f23(t)), bounds=(grid[k] - 1e-3, grid[k] + 1e-3),
                              method="bounded", options={"xatol": 1e-13})
        assert el.t3 == pytest.approx(res.x, abs=1e-8)
        # back substitution into the 13 equation: H = A^2 * F13
        assert el.residual * tri.scale ** 4 == pytest.approx(el.A ** 2 * f13(el.t3), rel=1e-8, abs=1e-10)

    def test_equilateral_degenerate_everywhere(self, equilateral):
        lines, tri = equilateral
        for theta in 2 * np.pi * np.arange(1000) / 1000:
            assert eliminate_t3(theta, lines, tri).degenerate

    def test_lifted_degenerate(self, rng):
        lines, tri = random_feasible_scene(rng, dim=3)
        assert all(eliminate_t3(th, lines, tri).degenerate for th in np.linspace(0, 6, 50))

    @given(seeds)
    def test_residual_vanishes_at_solutions(self, seed):
        rng = np.random.default_rng(seed)
        lines, tri, _ = random_generic_scene(rng)
        for cfg in solve_configurations(lines, tri).configs:
            # only configurations whose vertex 3 is the linear solution
            el = eliminate_t3(cfg.theta, lines, tri)
            if el.t3 is not None:
                assert abs(el.residual) < 1e-6


class TestSolve:
    def test_ratio_mismatch_scene(self, equilateral):
        lines, _ = equilateral
        tri = TriangleSpec(SQ3, SQ3, 2.0)
        result = solve_configurations(lines, tri)
        assert result.kind == "finite"
        assert 0 < result.count <= BEZOUT_BOUND
        for cfg in result.configs:
            assert cfg.residual < 1e-8 * tri.scale
            check_configuration(cfg, lines, tri)
        oracle = oracle_sweep(lines, tri, n=1_000_000)
        assert oracle.count == result.count
        assert match_configurations(result.configs, oracle.configs, 1e-6)
        assert result.status_line() == f"count={result.count} (bound 8)"

    def test_equilateral_continuum(self, equilateral):
        lines, tri = equilateral
        result = solve_configurations(lines, tri)
        assert result.is_continuum and result.count is None
        assert np.max(result.witness.edge_residuals()) < 1e-9
        assert np.max(result.witness.line_residuals()) < 1e-10

    def test_parallel_continuum(self):
        lines = [Line([0, 0], [0, 1]), Line([1, 0], [0, 1]), Line([3, 0], [0, 1])]
        tri = TriangleSpec(math.hypot(1, 0.8), math.hypot(3, 0.5), math.hypot(2, 1.3))
        assert solve_configurations(lines, tri).is_continuum

    def test_no_solutions(self):
        lines = [Line([0, 0, 0], [1, 0, 0]), Line([0, 0, 10], [0, 1, 0]), Line([0, 0, -10], [1, 1, 0])]
        tri = TriangleSpec(0.1, 0.1, 0.1)
        with pytest.raises(EdgeTooShort):
            solve_configurations(lines, tri)
        assert oracle_sweep(lines, tri, n=100_000).count == 0

    def test_oracle_rejects_coarse_grid(self, equilateral):
        with pytest.raises(ValueError):
            oracle_sweep(*equilateral, n=1000)

    def test_oracle_sees_continuum(self, equilateral):
        res = oracle_sweep(*equilateral, n=100_000)
        assert res.continuum
        assert res.near_zero_fraction > 0.1

    def test_mirror_pairs(self):
        # reflection y -> -y maps each line onto itself
        lines = [Line([0, 0], [1, 0]), Line([1, 0], [0, 1]), Line([-2, 0], [0, 1])]
        tri = TriangleSpec(1.9, 2.7, 3.4)
        result = solve_configurations(lines, tri)
        assert result.count > 0
        flip = np.array([1.0, -1.0])
        for cfg in result.configs:
            mirrored = [p * flip for p in (cfg.p1, cfg.p2, cfg.p3)]
            assert any(
                max(np.max(np.abs(a - b)) for a, b in zip(mirrored, (o.p1, o.p2, o.p3))) < 1e-6
                for o in result.configs
            )

    @given(seeds)
    def test_generic_bound_and_oracle(self, seed):
        rng = np.random.default_rng(seed)
        lines, tri, s = random_generic_scene(rng)
        result = solve_configurations(lines, tri)
        assert result.kind == "finite"
        assert result.count <= BEZOUT_BOUND
        # the placement the scene was built from is among the solutions
        assert any(np.max(np.abs(c.coords - s)) < 1e-6 for c in result.configs)
        for cfg in result.configs:
            check_configuration(cfg, lines, tri)
        oracle = oracle_sweep(lines, tri, n=100_000)
        assert match_configurations(result.configs, oracle.configs, 1e-6)

    @settings(max_examples=15)
    @given(seeds)
    def test_relabel_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        lines, tri, _ = random_generic_scene(rng)
        base = solve_configurations(lines, tri)
        for perm in itertools.permutations(range(3)):
            other = solve_configurations([lines[k] for k in perm], tri.permuted(perm))
            assert other.count == base.count
            # new vertex k is old vertex perm[k]
            back = [np.array([c.coords[perm.index(j)] for j in range(3)]) for c in other.configs]
            for cfg in base.configs:
                assert min(np.max(np.abs(cfg.coords - b)) for b in back) < 1e-6


class TestMatch:
    def test_count_mismatch(self, equilateral):
        lines, _ = equilateral
        res = solve_configurations(lines, TriangleSpec(SQ3, SQ3, 2.0))
        assert not match_configurations(res.configs, res.configs[1:], 1e-6)
        assert match_configurations(res.configs, tuple(reversed(res.configs)), 1e-12)

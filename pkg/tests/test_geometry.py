import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from scipy.optimize import minimize

from conftest import move_lines, rigid_motion, seeds
from trilinea import (
    Line,
    SceneTag,
    classify_scene,
    common_perpendicular,
    foot_offset,
    project_out,
)
from trilinea.errors import DegenerateScene, NotPerpendicular, ParallelLines
from trilinea.scenes import lifted_scene, random_generic_scene


def brute_force_distance(Li, Lj, span=4.0, n=2001):
    """Grid minimum of |Li(s) - Lj(t)| followed by local descent."""
    s = np.linspace(-span, span, n)
    Pi = Li.point_at(s)
    Pj = Lj.point_at(s)
    best, arg = math.inf, (0.0, 0.0)
    # row-by-row keeps memory bounded on the 2001 x 2001 grid
    for k in range(n):
        d = np.linalg.norm(Pj - Pi[k], axis=1)
        m = int(np.argmin(d))
        if d[m] < best:
            best, arg = float(d[m]), (s[k], s[m])
    res = minimize(lambda x: np.sum((Li.point_at(x[0]) - Lj.point_at(x[1])) ** 2), arg,
                   method="BFGS", options={"gtol": 1e-14})
    return math.sqrt(max(res.fun, 0.0)), res.x


class TestLine:
    def test_direction_is_normalised(self):
        L = Line([1.0, 2.0, 3.0], [0.0, 3.0, 4.0])
        assert abs(np.linalg.norm(L.direction) - 1.0) < 1e-12
        np.testing.assert_allclose(L.direction, [0.0, 0.6, 0.8])

    def test_point_at_is_affine(self):
        L = Line([1.0, -1.0], [2.0, 1.0])
        t = np.array([-1.5, 0.0, 2.25])
        pts = L.point_at(t)
        np.testing.assert_allclose(pts, L.anchor + t[:, None] * L.direction, rtol=0, atol=0)
        assert np.allclose(L.coordinate(pts), t)

    def test_zero_direction_rejected(self):
        with pytest.raises(ValueError, match="zero direction"):
            Line([0.0, 0.0], [0.0, 0.0])

    def test_anchor_is_read_only(self):
        L = Line([0.0, 0.0], [1.0, 0.0])
        with pytest.raises(ValueError):
            L.anchor[0] = 3.0


class TestCommonPerpendicular:
    def test_skew_axes_example(self):
        Li = Line([0, 0, 0], [1, 0, 0])
        Lj = Line([0, 1, 1], [0, 1, 0])
        g = common_perpendicular(Li, Lj)
        dist, _ = brute_force_distance(Li, Lj)
        np.testing.assert_allclose(g.q_i, [0, 0, 0], atol=1e-12)
        np.testing.assert_allclose(g.q_j, [0, 0, 1], atol=1e-12)
        assert abs(g.dist - 1.0) < 1e-12
        assert abs(g.dist - dist) < 1e-8
        assert g.c == 0.0
        assert abs(g.alpha - math.pi / 2) < 1e-12

    def test_intersecting_lines_meet_at_intersection(self):
        p = np.array([0.3, -1.2, 2.0])
        Li = Line(p + 2.0 * np.array([1.0, 1.0, 0.0]), [1.0, 1.0, 0.0])
        Lj = Line(p - np.array([0.0, 0.5, 1.5]), [0.0, 0.5, 1.5])
        g = common_perpendicular(Li, Lj)
        assert g.dist < 1e-12
        np.testing.assert_allclose(g.q_i, p, atol=1e-12)
        np.testing.assert_allclose(g.q_j, p, atol=1e-12)

    def test_parallel_lines_raise(self):
        with pytest.raises(ParallelLines):
            common_perpendicular(Line([0, 0], [1, 0]), Line([0, 2], [-1, 0]))

    def test_swap_symmetry(self, rng):
        for _ in range(20):
            Li = Line(rng.standard_normal(3), rng.standard_normal(3))
            Lj = Line(rng.standard_normal(3), rng.standard_normal(3))
            g, h = common_perpendicular(Li, Lj), common_perpendicular(Lj, Li)
            np.testing.assert_allclose(g.q_i, h.q_j, atol=1e-12)
            np.testing.assert_allclose(g.q_j, h.q_i, atol=1e-12)
            assert g.dist == pytest.approx(h.dist, abs=1e-12)
            assert g.c == pytest.approx(h.c, abs=1e-15)

    @pytest.mark.slow
    def test_matches_grid_oracle(self, rng):
        for _ in range(3):
            Li = Line(rng.uniform(-1, 1, 3), rng.standard_normal(3))
            Lj = Line(rng.uniform(-1, 1, 3), rng.standard_normal(3))
            g = common_perpendicular(Li, Lj)
            dist, _ = brute_force_distance(Li, Lj, span=6.0)
            assert abs(g.dist - dist) < 1e-8

    @given(seeds)
    def test_invariants(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(2, 6))
        Li = Line(rng.standard_normal(dim), rng.standard_normal(dim))
        Lj = Line(rng.standard_normal(dim), rng.standard_normal(dim))
        g = common_perpendicular(Li, Lj)
        seg = g.q_i - g.q_j
        tol = 1e-10 * (1.0 + np.linalg.norm(seg))
        assert abs(seg @ Li.direction) < tol
        assert abs(seg @ Lj.direction) < tol
        assert abs(g.dist - np.linalg.norm(seg)) < 1e-12
        assert abs(g.c - math.cos(g.alpha)) < 1e-12
        np.testing.assert_allclose(Li.point_at(g.t_foot_i), g.q_i, atol=1e-12)
        np.testing.assert_allclose(Lj.point_at(g.t_foot_j), g.q_j, atol=1e-12)


class TestFootOffset:
    def test_feet_three_apart(self):
        # L1 is the x-axis; L2 crosses it at x=0 and L3 at x=3
        L1 = Line([0, 0, 0], [1, 0, 0])
        L2 = Line([0, 0, 1], [0, 1, 0])
        L3 = Line([3, 0, -1], [0, 1, 1])
        g12, g13 = common_perpendicular(L1, L2), common_perpendicular(L1, L3)
        # line coordinates of the brute-force feet
        _, (s12, _) = brute_force_distance(L1, L2, span=5.0, n=401)
        _, (s13, _) = brute_force_distance(L1, L3, span=5.0, n=401)
        e = foot_offset(L1, g12, g13)
        assert e == pytest.approx(s13 - s12, abs=1e-6)
        assert e == pytest.approx(3.0, abs=1e-12)
        assert abs(e) == pytest.approx(np.linalg.norm(g12.q_i - g13.q_i), abs=1e-12)

    def test_coordinates_shift_between_frames(self):
        L1 = Line([0, 0, 0], [1, 0, 0])
        g12 = common_perpendicular(L1, Line([0, 0, 1], [0, 1, 0]))
        g13 = common_perpendicular(L1, Line([3, 0, -1], [0, 1, 1]))
        e = foot_offset(L1, g12, g13)
        x = L1.point_at(1.7)
        t12 = (x - g12.q_i) @ L1.direction
        t13 = (x - g13.q_i) @ L1.direction
        assert t12 == pytest.approx(t13 + e, abs=1e-12)

    def test_concurrent_lines_give_zero(self, equilateral):
        lines, _ = equilateral
        g12 = common_perpendicular(lines[0], lines[1])
        g13 = common_perpendicular(lines[0], lines[2])
        assert abs(foot_offset(lines[0], g12, g13)) < 1e-15

    @given(seeds)
    def test_antisymmetry(self, seed):
        rng = np.random.default_rng(seed)
        lines, _, _ = random_generic_scene(rng, dim=3)
        g12 = common_perpendicular(lines[0], lines[1])
        g13 = common_perpendicular(lines[0], lines[2])
        assert foot_offset(lines[0], g12, g13) + foot_offset(lines[0], g13, g12) == 0.0


class TestClassifyScene:
    def test_concurrent_planar(self, equilateral):
        lines, _ = equilateral
        sc = classify_scene(*lines)
        assert sc.tag is SceneTag.CONCURRENT_PLANAR
        np.testing.assert_allclose(sc.meet, [0.0, 0.0], atol=1e-12)
        for L in lines:
            assert L.distance_to(sc.meet) < 1e-8

    def test_common_perpendicular_axis(self):
        lines = [
            Line([0, 0, 0], [1, 0, 0]),
            Line([0, 0, 1], [0, 1, 0]),
            Line([0, 0, -2], [1, 1, 0]),
        ]
        sc = classify_scene(*lines)
        assert sc.tag is SceneTag.COMMON_PERPENDICULAR_AXIS
        w = sc.axis.direction
        assert abs(abs(w[2]) - 1.0) < 1e-12
        for L in lines:
            assert abs(L.direction @ w) < 1e-10
            assert common_perpendicular(L, sc.axis).dist < 1e-8
        assert sc.axis.distance_to(np.zeros(3)) < 1e-8

    def test_generic_skew_lines(self, rng):
        for _ in range(10):
            lines, _, _ = random_generic_scene(rng, dim=3)
            assert classify_scene(*lines).tag is SceneTag.GENERIC

    def test_all_parallel(self):
        lines = [Line([0, 0], [0, 1]), Line([1, 0], [0, -1]), Line([3, 0], [0, 2])]
        assert classify_scene(*lines).tag is SceneTag.ALL_PARALLEL

    def test_identical_lines_rejected(self):
        L = Line([0, 0], [1, 1])
        with pytest.raises(DegenerateScene):
            classify_scene(L, Line([2, 2], [-1, -1]), Line([0, 1], [1, 0]))

    def test_near_parallel_pair_warns(self):
        lines = [Line([0, 0], [1, 0]), Line([0, 1], [1, 1e-5]), Line([0, 0], [0, 1])]
        sc = classify_scene(*lines)
        assert any("nearly parallel" in w for w in sc.warnings)

    def test_lift_to_four_dimensions_without_axis(self):
        lines, _ = lifted_scene((0, 70, 125), 1.5, (0.0, 0.8, -0.5), dim=4,
                                normal_offsets=[[0.0], [0.4], [-0.3]])
        assert classify_scene(*lines).tag is SceneTag.PLANAR_LIFT

    @given(seeds)
    def test_invariant_under_rigid_motion_and_relabeling(self, seed):
        rng = np.random.default_rng(seed)
        kind = int(rng.integers(0, 3))
        if kind == 0:
            lines, _, _ = random_generic_scene(rng, dim=3)
        elif kind == 1:
            angles = rng.choice(np.arange(0, 180, 7), size=3, replace=False)
            lines, _ = lifted_scene(angles, 1.0, rng.uniform(-2, 2, 3), dim=3)
        else:
            angles = rng.choice(np.arange(0, 180, 7), size=3, replace=False)
            lines, _ = lifted_scene(angles, 1.0, (0.0, 0.0, 0.0), dim=3)
        tag = classify_scene(*lines).tag
        Q, shift = rigid_motion(3, rng)
        moved = move_lines(lines, Q, shift)
        assert classify_scene(*moved).tag is tag
        for perm in itertools.permutations(range(3)):
            assert classify_scene(*[moved[k] for k in perm]).tag is tag


class TestProjectOut:
    def test_drops_fourth_coordinate(self):
        lines = [
            Line([1, 2, 3, 4], [1, 0, 0, 0]),
            Line([0, 1, 0, -2], [0, 1, 1, 0]),
            Line([5, 0, 1, 7], [1, 1, 1, 0]),
        ]
        out = project_out(lines, [0, 0, 0, 1])
        for L, P in zip(lines, out):
            assert P.anchor[3] == 0.0
            np.testing.assert_array_equal(P.anchor[:3], L.anchor[:3])
            np.testing.assert_allclose(P.direction, L.direction, atol=1e-15)
        for (i, j) in ((0, 1), (0, 2), (1, 2)):
            assert abs(lines[i].direction @ lines[j].direction - out[i].direction @ out[j].direction) < 1e-12

    def test_rejects_non_perpendicular_normal(self):
        lines = [Line([0, 0, 0], [1, 0, 0]), Line([0, 0, 1], [0, 1, 0]), Line([0, 0, 2], [1, 0, 1])]
        with pytest.raises(NotPerpendicular):
            project_out(lines, [0, 0, 1])

    @given(seeds)
    def test_quadric_right_hand_sides_preserved(self, seed):
        rng = np.random.default_rng(seed)
        angles = rng.choice(np.arange(5, 180, 11), size=3, replace=False)
        offsets = rng.uniform(-1, 1, (3, 1))
        lines, tri = lifted_scene(angles, rng.uniform(0.5, 2), rng.uniform(-1, 1, 3), dim=4,
                                  normal_offsets=offsets)
        w = np.array([0.0, 0.0, 0.0, 1.0])
        proj = project_out(lines, w)
        # the w-coordinate of every point of L_i is constant, so distances
        # lose exactly (h_i - h_j)^2 under the projection
        h = [L.anchor @ w for L in lines]
        for (i, j) in ((0, 1), (0, 2), (1, 2)):
            d = tri.length(i, j)
            d_proj = math.sqrt(d * d - (h[i] - h[j]) ** 2)
            g = common_perpendicular(lines[i], lines[j])
            gp = common_perpendicular(proj[i], proj[j])
            assert abs((d * d - g.dist ** 2) - (d_proj ** 2 - gp.dist ** 2)) < 1e-12 * max(1.0, d * d)
            assert abs(g.c - gp.c) < 1e-12

"""Polytope machinery: hull reduction, Minkowski sums, feasibility tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tropical_regions as tr
from tropical_regions import (
    EnumerationCapExceeded,
    Polytope,
    ValidationError,
    eliminate_redundant,
    minkowski_candidates,
    newton_polytope,
    nonparallel_generator_count,
    normal_cone_contains,
    strict_feasibility,
    upper_hull_vertices,
)
from tropical_regions import rng as trng

from util import canon, random_polynomial, scipy_vertex_rows, triangle_maxout


class TestPolytope:
    def test_dimension_checks(self):
        with pytest.raises(ValidationError):
            Polytope(3, [[1.0, 2.0]])
        with pytest.raises(ValidationError):
            Polytope(2, np.empty((0, 2)))
        with pytest.raises(ValidationError):
            Polytope(1, [[np.inf]])

    def test_points_read_only(self):
        P = Polytope(2, [[0.0, 1.0]])
        with pytest.raises(ValueError):
            P.points[0, 0] = 5.0


class TestNewtonPolytope:
    def test_triangle(self):
        P = newton_polytope(triangle_maxout())
        assert P.ambient_dim == 3 and not P.is_reduced
        np.testing.assert_array_equal(
            canon(P.points), canon([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        )

    def test_relu_segment(self):
        P = newton_polytope(tr.make_relu([1, 0], 0))
        np.testing.assert_array_equal(canon(P.points), canon([[0, 0, 0], [0, 1, 0]]))

    def test_rank3_summand_projects_to_triangle(self):
        p = tr.make_maxout([[1, 1], [2, 0], [1, 2]], [0, 0, 0])
        P = newton_polytope(p)
        assert np.all(P.points[:, 0] == 0.0)
        np.testing.assert_array_equal(canon(P.points[:, 1:]), canon([[1, 1], [1, 2], [2, 0]]))


class TestEliminateRedundant:
    def test_midpoint_dropped(self):
        P = eliminate_redundant(Polytope(1, [[0.0], [1.0], [0.5]]))
        assert P.is_reduced
        np.testing.assert_array_equal(canon(P.points), [[0.0], [1.0]])

    def test_minimal_triangle_unchanged(self):
        pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
        P = eliminate_redundant(Polytope(2, pts))
        np.testing.assert_array_equal(canon(P.points), canon(pts))

    def test_projected_sum_fixture(self):
        # sums of the two summand triangles; hull recomputed by brute force
        A = np.array([[1, 1], [1, 2], [2, 0]], dtype=float)
        B = np.array([[0, 0], [0, -1], [2, -2]], dtype=float)
        cands = np.array([a + b for a in A for b in B])
        reduced = eliminate_redundant(Polytope(2, cands))
        expected = [[1, 0], [1, 2], [2, -1], [3, 0], [4, -2]]
        np.testing.assert_allclose(canon(reduced.points), canon(expected), atol=1e-12)
        # independent oracle: scipy convex-combination check over all candidates
        oracle_rows = scipy_vertex_rows(cands)
        np.testing.assert_allclose(canon(cands[oracle_rows]), canon(expected), atol=1e-12)

    def test_exact_duplicates_keep_one_vertex(self):
        P = eliminate_redundant(Polytope(1, [[0.0], [1.0], [1.0], [0.25]]))
        np.testing.assert_array_equal(canon(P.points), [[0.0], [1.0]])

    @pytest.mark.parametrize("seed,dim", [(0, 2), (1, 2), (2, 3), (3, 3)])
    def test_matches_scipy_oracle_on_random_clouds(self, seed, dim):
        pts = trng.standard_normal(40 + seed, 0, 12, dim) * 3
        mine = eliminate_redundant(Polytope(dim, pts))
        oracle = pts[scipy_vertex_rows(pts)]
        np.testing.assert_allclose(canon(mine.points), canon(oracle), atol=1e-9)


class TestMinkowskiCandidates:
    def test_unit_square(self):
        segs = [Polytope(2, [[0, 0], [1, 0]]), Polytope(2, [[0, 0], [0, 1]])]
        cand, origin = minkowski_candidates(segs)
        np.testing.assert_array_equal(canon(cand.points), canon([[0, 0], [1, 0], [0, 1], [1, 1]]))
        assert sum(len(v) for v in origin.values()) == 4

    def test_three_generic_segments_hexagon(self):
        dirs = trng.standard_normal(77, 0, 3, 2)
        segs = [Polytope(2, [np.zeros(2), d]) for d in dirs]
        cand, _ = minkowski_candidates(segs)
        assert len(cand) == 8
        hull = eliminate_redundant(cand)
        assert len(hull) == 6  # 2*(C(2,0)+C(2,1))

    def test_fixture_nine_candidates(self):
        p1 = tr.make_maxout([[1, 1], [2, 0], [1, 2]], [0, 0, 0])
        p2 = tr.make_maxout([[0, 0], [0, -1], [2, -2]], [0, 0, 0])
        cand, origin = minkowski_candidates([newton_polytope(p1), newton_polytope(p2)])
        assert sum(len(v) for v in origin.values()) == 9
        assert len(cand) == 8  # one exact sum collision

    def test_duplicate_sums_keep_all_configurations(self):
        segs = [Polytope(1, [[0.0], [1.0]]), Polytope(1, [[0.0], [1.0]])]
        cand, origin = minkowski_candidates(segs)
        assert len(cand) == 3
        assert {c.indices for c in origin[(1.0,)]} == {(0, 1), (1, 0)}

    def test_cap_exceeded(self):
        segs = [Polytope(1, [[0.0], [1.0]])] * 4
        with pytest.raises(EnumerationCapExceeded):
            minkowski_candidates(segs, cap=15)

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValidationError):
            minkowski_candidates([Polytope(1, [[0.0]]), Polytope(2, [[0.0, 0.0]])])


class TestStrictFeasibility:
    def test_triangle_vertex(self):
        res = strict_feasibility([1.0, 0.0], [[0.0, 1.0], [0.0, 0.0]])
        assert res.feasible and res.margin > 0
        assert res.witness is not None

    def test_segment_midpoint_infeasible(self):
        res = strict_feasibility([0.5], [[0.0], [1.0]])
        assert not res.feasible
        assert res.witness is None

    def test_flat_bias_triangle_all_region_defining(self):
        pts = newton_polytope(triangle_maxout()).points
        for i in range(3):
            others = np.delete(pts, i, axis=0)
            res = strict_feasibility(pts[i], list(others), fix_first=True)
            assert res.feasible

    def test_witness_slack_at_least_margin(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            pts = rng.normal(size=(6, 3)) * 2
            res = strict_feasibility(pts[0], list(pts[1:]))
            if res.feasible:
                slacks = (pts[0] - pts[1:]) @ res.witness
                assert np.all(slacks >= res.margin - 1e-9)

    def test_monotone_under_competitor_removal(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            pts = rng.normal(size=(7, 3))
            full = strict_feasibility(pts[0], list(pts[1:]))
            sub = strict_feasibility(pts[0], list(pts[1:4]))
            if full.feasible:
                assert sub.feasible
                assert sub.margin >= full.margin - 1e-9

    def test_multi_summand_targets(self):
        # two summands, each a segment: joint direction must split both
        res = strict_feasibility(
            [[1.0, 0.0], [0.0, 1.0]],
            [[[0.0, 0.0]], [[0.0, 0.0]]],
        )
        assert res.feasible

    def test_fix_first_witness_normalizes(self):
        pts = newton_polytope(tr.make_relu([1.0, 0.0], -2.0)).points
        res = strict_feasibility(pts[1], [pts[0]], fix_first=True)
        assert res.feasible
        x = res.witness[1:] / res.witness[0]
        assert x[0] > 2.0  # active region of max(0, x1 - 2)


class TestUpperHull:
    def test_bias_dominated_point_dropped(self):
        P = Polytope(2, [[0, 0], [1, 0], [0, 1]])
        np.testing.assert_array_equal(canon(upper_hull_vertices(P)), canon([[1, 0], [0, 1]]))

    def test_flat_bias_triangle_keeps_all(self):
        P = newton_polytope(triangle_maxout())
        assert len(upper_hull_vertices(P)) == 3

    def test_square_top_edge(self):
        P = Polytope(2, [[0, 0], [0, 1], [1, 0], [1, 1]])
        np.testing.assert_array_equal(canon(upper_hull_vertices(P)), canon([[1, 0], [1, 1]]))

    def test_subset_of_vertices(self):
        pts = trng.standard_normal(9, 0, 10, 3) * 2
        P = Polytope(3, pts)
        upper = {tuple(v) for v in upper_hull_vertices(P)}
        verts = {tuple(v) for v in eliminate_redundant(P).points}
        assert upper <= verts

    def test_needs_two_dims(self):
        with pytest.raises(ValidationError):
            upper_hull_vertices(Polytope(1, [[0.0]]))


class TestNormalCone:
    def test_square_corner(self):
        P = Polytope(2, [[1, 1], [1, -1], [-1, 1], [-1, -1]])
        assert normal_cone_contains(P, [1, 1], [1, 1])
        assert not normal_cone_contains(P, [1, 1], [-1, 0])
        assert normal_cone_contains(P, [1, 1], [0, 0])

    def test_unlisted_point_rejected(self):
        P = Polytope(2, [[1, 1], [-1, -1]])
        with pytest.raises(ValidationError):
            normal_cone_contains(P, [0.5, 0.5], [1, 0])

    def test_contains_feasibility_witness(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            pts = rng.normal(size=(6, 3))
            P = Polytope(3, pts)
            res = strict_feasibility(pts[0], list(pts[1:]))
            if res.feasible:
                assert normal_cone_contains(P, pts[0], res.witness)


class TestGenerators:
    def test_three_directions(self):
        segs = [((0, 0), (1, 0)), ((0, 0), (0, 1)), ((0, 0), (1, 1))]
        assert nonparallel_generator_count(segs) == 3

    def test_antiparallel_collapses(self):
        segs = [((0, 0), (1, 0)), ((0, 0), (-2, 0))]
        assert nonparallel_generator_count(segs) == 1

    def test_generic_relu_generators(self):
        dirs = trng.standard_normal(33, 0, 6, 3)
        segs = [(np.zeros(3), d) for d in dirs]
        assert nonparallel_generator_count(segs) == 6

    def test_zero_length_flagged_and_excluded(self):
        segs = [((0, 0), (1, 0)), ((1, 1), (1, 1))]
        with pytest.warns(UserWarning):
            assert nonparallel_generator_count(segs) == 1


class TestZonotopeVertexCounts:
    @pytest.mark.parametrize("dim,m", [(2, 3), (2, 5), (3, 4), (3, 6), (4, 5), (4, 8)])
    def test_generic_segment_sum_formula(self, dim, m):
        gens = trng.standard_normal(500 + 10 * dim + m, 0, m, dim)
        segs = [Polytope(dim, [np.zeros(dim), g]) for g in gens]
        cand, _ = minkowski_candidates(segs)
        reduced = eliminate_redundant(cand)
        expected = 2 * sum(math.comb(m - 1, j) for j in range(dim))
        assert len(reduced) == expected


class TestDuality:
    @pytest.mark.parametrize("seed", range(10))
    def test_product_newton_polytope_is_minkowski_sum(self, seed):
        n = 1 + seed % 3
        p = random_polynomial(900 + 2 * seed, n, 2 + seed % 3)
        q = random_polynomial(901 + 2 * seed, n, 2 + (seed // 2) % 3)
        left = eliminate_redundant(newton_polytope(tr.trop_mul(p, q)))
        cand, _ = minkowski_candidates([newton_polytope(p), newton_polytope(q)])
        right = eliminate_redundant(cand)
        assert len(left) == len(right)
        np.testing.assert_allclose(canon(left.points), canon(right.points), atol=1e-9)

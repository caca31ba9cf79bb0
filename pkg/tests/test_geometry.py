import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from favardkit.geometry import (
    Direction,
    DyadicSquare,
    Interval,
    IntervalSet,
    SquareSet,
    merge_intervals,
    min_strip_halfwidth,
    neighborhood,
)


class TestIntervals:
    def test_measure_of_disjoint_union(self):
        s = merge_intervals([(0.0, 1.0), (2.0, 2.5)])
        assert s.measure == 1.5
        assert len(s) == 2

    def test_touching_intervals_merge(self):
        s = merge_intervals([(0.0, 1.0), (1.0, 2.0)])
        assert len(s) == 1
        assert s.measure == 2.0

    def test_overlap_merges_and_order_is_irrelevant(self):
        a = merge_intervals([(0.5, 1.5), (0.0, 1.0)])
        b = merge_intervals([(0.0, 1.0), (0.5, 1.5)])
        assert a == b
        assert a.measure == 1.5

    @given(
        st.lists(
            st.tuples(
                st.floats(-10, 10, allow_nan=False),
                st.floats(0.001, 5, allow_nan=False),
            ),
            min_size=1,
            max_size=30,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_measure_between_max_piece_and_sum(self, pieces):
        ivs = [(a, a + w) for a, w in pieces]
        s = merge_intervals(ivs)
        total = sum(w for _, w in pieces)
        biggest = max(w for _, w in pieces)
        assert biggest - 1e-12 <= s.measure <= total + 1e-12

    def test_neighborhood_grows_by_at_most_2r_per_component(self):
        s = merge_intervals([(0.0, 1.0), (3.0, 4.0)])
        fat = neighborhood(s, 0.25)
        assert fat.measure == pytest.approx(2.0 + 4 * 0.25)

    def test_neighborhood_merges_close_components(self):
        s = merge_intervals([(0.0, 1.0), (1.5, 2.5)])
        fat = neighborhood(s, 0.5)
        assert len(fat) == 1
        assert fat.measure == pytest.approx(3.5)

    def test_neighborhood_needs_positive_radius(self):
        s = merge_intervals([(0.0, 1.0)])
        with pytest.raises(Exception):
            neighborhood(s, 0.0)


class TestDirection:
    def test_axis_vectors_are_exact(self):
        assert Direction(0.0).vector == (1.0, 0.0)
        assert Direction(math.pi / 2).vector == (0.0, 1.0)
        assert Direction(math.pi).vector == (-1.0, 0.0)
        assert Direction(3 * math.pi / 2).vector == (0.0, -1.0)

    def test_angle_normalized(self):
        d = Direction(-math.pi / 2)
        assert 0.0 <= d.theta < 2 * math.pi
        assert d.vector == (0.0, -1.0)

    @given(st.floats(-10, 10, allow_nan=False))
    @settings(max_examples=100, deadline=None)
    def test_unit_length(self, t):
        x, y = Direction(t).vector
        assert math.hypot(x, y) == pytest.approx(1.0, abs=1e-12)

    def test_perpendicular_is_quarter_turn(self):
        d = Direction(0.3)
        p = d.perpendicular()
        x, y = d.vector
        px, py = p.vector
        assert x * px + y * py == pytest.approx(0.0, abs=1e-12)


class TestSquareSet:
    def test_canonical_order_makes_sets_equal(self):
        a = SquareSet.from_cells(4, 1, [(0, 0), (3, 3), (0, 3)])
        b = SquareSet.from_cells(4, 1, [(3, 3), (0, 3), (0, 0)])
        assert a == b

    def test_area_and_side(self):
        s = SquareSet.from_cells(4, 2, [(0, 0), (1, 1)])
        assert s.side == 4.0**-2
        assert s.area == pytest.approx(2 * 4.0**-4)

    def test_corner_points_count(self):
        s = SquareSet.from_cells(2, 1, [(0, 0), (1, 1)])
        assert s.corner_points().shape == (8, 2)

    def test_json_roundtrip(self):
        s = SquareSet.from_cells(4, 2, [(0, 0), (5, 7), (15, 2)])
        assert SquareSet.from_json_obj(s.to_json_obj()) == s

    def test_subset(self):
        big = SquareSet.from_cells(4, 1, [(0, 0), (0, 3), (3, 0)])
        small = SquareSet.from_cells(4, 1, [(0, 3)])
        assert small.issubset(big)
        assert not big.issubset(small)


class TestStripWidth:
    def test_unit_square_corners(self):
        pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        assert min_strip_halfwidth(pts) == pytest.approx(0.5)

    def test_collinear_is_exactly_zero(self):
        pts = [(0.0, 0.0), (0.25, 0.25), (1.0, 1.0)]
        assert min_strip_halfwidth(pts) == 0.0

    def test_thin_rectangle(self):
        pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 0.1), (1.0, 0.1)]
        assert min_strip_halfwidth(pts) == pytest.approx(0.05)

    @given(
        st.lists(
            st.tuples(st.floats(0, 1, allow_nan=False), st.floats(0, 1, allow_nan=False)),
            min_size=3,
            max_size=12,
        ),
        st.floats(0.1, 2.0),
        st.floats(-1, 1),
        st.floats(-1, 1),
    )
    @settings(max_examples=150, deadline=None)
    def test_similarity_covariance(self, pts, scale, dx, dy):
        base = min_strip_halfwidth(pts)
        moved = [(scale * x + dx, scale * y + dy) for x, y in pts]
        assert min_strip_halfwidth(moved) == pytest.approx(scale * base, rel=1e-9, abs=1e-12)

    @given(
        st.lists(
            st.tuples(st.floats(0, 1, allow_nan=False), st.floats(0, 1, allow_nan=False)),
            min_size=1,
            max_size=10,
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_brute_force_directional_width(self, pts):
        # oracle: min over sampled directions of half the projected spread,
        # which upper-bounds the true optimum and is tight at the sampled grid
        got = min_strip_halfwidth(pts)
        arr = np.asarray(pts)
        best = math.inf
        for theta in np.linspace(0, math.pi, 721):
            w = arr[:, 0] * math.cos(theta) + arr[:, 1] * math.sin(theta)
            best = min(best, (w.max() - w.min()) / 2)
        assert got <= best + 1e-12


class TestDyadicSquare:
    def test_tripled_bounds(self):
        q = DyadicSquare(1, 1, 0, base=2)
        assert q.expanded3() == (0.0, -0.5, 1.5, 1.0)

    def test_interval_validation(self):
        with pytest.raises(Exception):
            Interval(1.0, 0.5)

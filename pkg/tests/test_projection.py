import math

import numpy as np
import pytest

from favardkit.cantor import cantor_intervals, cantor_squares
from favardkit.errors import ConfigError
from favardkit.geometry import SquareSet, neighborhood
from favardkit.projection import favard, favard_mc, favard_table, project

UNIT = SquareSet.from_cells(2, 0, [(0, 0)])


class TestProject:
    @pytest.mark.parametrize("n", range(1, 11))
    def test_axis_shadow_is_interval_model(self, n):
        shadow = project(cantor_squares(n), 0.0)
        model = cantor_intervals(n)
        assert shadow.lo.tolist() == model.lo.tolist()
        assert shadow.hi.tolist() == model.hi.tolist()
        assert shadow.measure == 2.0**-n

    def test_unit_square_diagonal(self):
        shadow = project(UNIT, math.pi / 4.0)
        assert len(shadow) == 1
        assert shadow.measure == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_xy_symmetry(self):
        a = project(cantor_squares(3), 0.3).measure
        b = project(cantor_squares(3), math.pi / 2.0 - 0.3).measure
        assert a == pytest.approx(b, abs=1e-12)

    def test_half_turn_covariance(self):
        for theta in (0.1, 0.7, 1.3):
            a = project(cantor_squares(2), theta).measure
            b = project(cantor_squares(2), theta + math.pi / 2.0).measure
            assert a == pytest.approx(b, abs=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 0.2, math.pi / 4, 1.1])
    def test_monotone_under_generation(self, theta):
        for n in range(0, 5):
            big = project(cantor_squares(n), theta).measure
            small = project(cantor_squares(n + 1), theta).measure
            assert small <= big

    @pytest.mark.parametrize("n", range(2, 11))
    def test_neighborhood_law_bit_exact(self, n):
        # thickening the axis shadow by a coarser block size fills each
        # coarse block plus its two flanks: three half-blocks per pair
        shadow = project(cantor_squares(n), 0.0)
        for k in range(1, n):
            fat = neighborhood(shadow, 4.0**-k)
            assert fat.measure == 3.0 * 2.0**-k


class TestFavard:
    def test_unit_square_buffon(self):
        est = favard(UNIT, 1e-3)
        assert est.error_bound <= 1e-3
        assert abs(est.value - 4.0 / math.pi) <= 1e-3

    def test_empty_set(self):
        est = favard(SquareSet.empty(), 1e-3)
        assert est.value == 0.0 and est.error_bound == 0.0

    def test_subadditive_on_split(self):
        full = cantor_squares(2)
        left = SquareSet(full.base, full.level, full.ix[:8], full.iy[:8])
        right = SquareSet(full.base, full.level, full.ix[8:], full.iy[8:])
        tol = 1e-3
        whole = favard(full, tol).value
        parts = favard(left, tol).value + favard(right, tol).value
        assert whole <= parts + 2.0 * tol

    def test_thread_count_does_not_change_bits(self):
        a = favard(cantor_squares(3), 1e-3, threads=1)
        b = favard(cantor_squares(3), 1e-3, threads=4)
        assert a.value == b.value
        assert a.error_bound == b.error_bound

    def test_bad_tol_rejected(self):
        with pytest.raises(ConfigError):
            favard(UNIT, -1.0)


@pytest.fixture(scope="module")
def table():
    return favard_table(4, 1e-3)


class TestFavardTable:

    def test_row_zero_is_unit_square(self, table):
        assert table.rows[0].n == 0
        assert abs(table.rows[0].value - 4.0 / math.pi) <= 1e-3

    def test_nonincreasing_within_tolerance(self, table):
        tol = 1e-3
        vals = [r.value for r in table.rows]
        for a, b in zip(vals, vals[1:]):
            assert b <= a + 2.0 * tol

    def test_scaled_values_bounded_below(self, table):
        floor = min(r.n * r.value for r in table.rows if r.n >= 1)
        assert floor > 0.0

    def test_tail_fit_reported(self, table):
        assert table.tail_exponent < 0.0
        assert 0.0 <= table.tail_r2 <= 1.0


class TestNeedleOracle:
    def test_mc_agrees_with_quadrature(self):
        est = favard(UNIT, 1e-4)
        mc = favard_mc(UNIT, samples=10**6, seed=7)
        assert mc.stderr > 0.0
        assert abs(mc.value - est.value) <= 3.0 * mc.stderr

    def test_mc_deterministic_given_seed(self):
        a = favard_mc(cantor_squares(2), samples=10**5, seed=3)
        b = favard_mc(cantor_squares(2), samples=10**5, seed=3)
        assert a.value == b.value and a.stderr == b.stderr

import math

import numpy as np
import pytest

from favardkit.cantor import cantor_squares
from favardkit.errors import BudgetError, ConfigError
from favardkit.geometry import Direction, Interval, SquareSet
from favardkit.rectifiability import (
    LipschitzPath,
    RectEstimate,
    RectQuery,
    frame_from_angle,
    rect_lower_dp,
    rect_lower_sweep,
    rect_upper_beta,
    rect_upper_twoproj,
)

# Brute-force reference for the path DP: enumerate every quantized height
# profile, apply the slope mask, credit columns whose endpoints share a
# merged admissible band.  Kept deliberately independent of the module's
# internals (plain Python loops, numpy only for the digit unpacking).


def _ref_bands(E, c1, s1, c2, s2, eps):
    x0 = E.ix * E.side
    y0 = E.iy * E.side
    out = []
    for k in range(len(x0)):
        xs = (x0[k], x0[k] + E.side)
        ys = (y0[k], y0[k] + E.side)
        us = [x * c1 + y * s1 for x in xs for y in ys]
        vs = [x * c2 + y * s2 for x in xs for y in ys]
        if c1 == 0.0 or s1 == 0.0:
            out.append((min(us), max(us), min(vs) - eps, max(vs) + eps))
        else:
            cu = (x0[k] + E.side / 2) * c1 + (y0[k] + E.side / 2) * s1
            cv = (x0[k] + E.side / 2) * c2 + (y0[k] + E.side / 2) * s2
            ih = E.side / (2 * (abs(c1) + abs(s1)))
            out.append((cu - ih, cu + ih, cv - ih - eps, cv + ih + eps))
    return out


def _ref_column_bands(bands, J, resolution):
    h = J.length / resolution
    cols = []
    for i in range(resolution):
        ua = J.lo + i * h
        ub = J.lo + (i + 1) * h
        segs = sorted((blo, bhi) for (ulo, uhi, blo, bhi) in bands if ulo <= ua and uhi >= ub)
        merged = []
        for blo, bhi in segs:
            if merged and blo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], bhi)
            else:
                merged.append([blo, bhi])
        cols.append(merged)
    return cols


def _ref_state_count(E, q, frame):
    om1, om2 = frame
    bands = _ref_bands(E, *om1.vector, *om2.vector, q.epsilon)
    qs = q.epsilon / 2.0
    vmin = math.floor(min(b[2] for b in bands) / qs) * qs
    return int(math.ceil((max(b[3] for b in bands) - vmin) / qs)) + 1


def _ref_exhaustive(E, q, frame, resolution):
    om1, om2 = frame
    bands = _ref_bands(E, *om1.vector, *om2.vector, q.epsilon)
    if not bands:
        return 0.0
    h = q.J.length / resolution
    qs = q.epsilon / 2.0
    vmin = math.floor(min(b[2] for b in bands) / qs) * qs
    S = int(math.ceil((max(b[3] for b in bands) - vmin) / qs)) + 1
    K = int((q.M * h) / qs + 1e-12)
    colsets = []
    for merged in _ref_column_bands(bands, q.J, resolution):
        sets = []
        for blo, bhi in merged:
            b0 = max(0, int(math.ceil((blo - vmin) / qs - 1e-12)))
            b1 = min(S - 1, int(math.floor((bhi - vmin) / qs + 1e-12)))
            if b0 <= b1:
                sets.append((b0, b1))
        colsets.append(sets)
    npaths = S ** (resolution + 1)
    best = 0
    for start in range(0, npaths, 200_000):
        idx = np.arange(start, min(start + 200_000, npaths), dtype=np.int64)
        digits = np.empty((resolution + 1, idx.size), dtype=np.int64)
        rem = idx
        for d in range(resolution + 1):
            digits[d] = rem % S
            rem = rem // S
        ok = np.ones(idx.size, dtype=bool)
        for d in range(resolution):
            ok &= np.abs(digits[d + 1] - digits[d]) <= K
        credit = np.zeros(idx.size, dtype=np.int64)
        for d in range(resolution):
            colcredit = np.zeros(idx.size, dtype=bool)
            for b0, b1 in colsets[d]:
                colcredit |= (
                    (digits[d] >= b0)
                    & (digits[d] <= b1)
                    & (digits[d + 1] >= b0)
                    & (digits[d + 1] <= b1)
                )
            credit += colcredit
        credit[~ok] = -1
        best = max(best, int(credit.max()) if credit.size else 0)
    return best / resolution


def _random_instance(rng):
    base = int(rng.choice([2, 4]))
    level = int(rng.integers(1, 3))
    grid = base**level
    ncells = min(int(rng.integers(1, 7)), grid * grid)
    cells = set()
    while len(cells) < ncells:
        cells.add((int(rng.integers(0, grid)), int(rng.integers(0, grid))))
    E = SquareSet.from_cells(base, level, cells)
    if rng.random() < 0.34:
        theta = float(rng.choice([0.0, math.pi / 2]))
    else:
        theta = float(rng.uniform(0, math.pi / 2))
    resolution = int(rng.integers(2, 7))
    eps = float(rng.uniform(0.1, 0.8))
    M = float(rng.choice([0.5, 1.0, 2.0, 5.0]))
    q = RectQuery(eps, 0.5, M, Interval(0.0, 1.0))
    return E, q, frame_from_angle(theta), resolution


class TestFrames:
    def test_axis_angles_snap_exactly(self):
        om1, om2 = frame_from_angle(0.0)
        assert om1.vector == (1.0, 0.0) and om2.vector == (0.0, 1.0)
        om1, om2 = frame_from_angle(math.pi / 2)
        assert om1.vector == (0.0, 1.0) and om2.vector == (-1.0, 0.0)

    @pytest.mark.parametrize("theta", [0.3, 1.0, 2.2])
    def test_orthonormal(self, theta):
        om1, om2 = frame_from_angle(theta)
        x1, y1 = om1.vector
        x2, y2 = om2.vector
        assert abs(x1 * x2 + y1 * y2) < 1e-14
        assert abs(x1 * y2 - y1 * x2 - 1.0) < 1e-14


class TestValidation:
    def test_query_rejects_negative_eps(self):
        with pytest.raises(ConfigError):
            RectQuery(-0.1, 0.5, 1.0, Interval(0.0, 1.0))

    def test_query_rejects_short_window(self):
        with pytest.raises(ConfigError):
            RectQuery(0.1, 0.5, 1.0, Interval(0.0, 0.25))

    def test_estimate_range(self):
        path = LipschitzPath(frame_from_angle(0.0), 0.5, (0.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            RectEstimate(1.5, path, 1)

    def test_bad_frame_rejected(self):
        bad = (Direction(0.0), Direction(0.1))
        q = RectQuery(0.25, 0.5, 1.0, Interval(0.0, 1.0))
        with pytest.raises(ConfigError):
            rect_lower_dp(cantor_squares(1), q, bad, 4)

    def test_path_needs_two_nodes(self):
        with pytest.raises(ConfigError):
            LipschitzPath(frame_from_angle(0.0), 0.5, (1.0,))


class TestLipschitzPath:
    def test_max_slope(self):
        p = LipschitzPath(frame_from_angle(0.0), 0.5, (0.0, 1.0, 0.5))
        assert p.max_slope == pytest.approx(2.0)

    def test_points_world_axis_frame(self):
        p = LipschitzPath(frame_from_angle(0.0), 0.25, (0.1, 0.2), origin=1.0)
        pts = p.points_world()
        assert pts[0].tolist() == [1.0, 0.1]
        assert pts[1].tolist() == [1.25, 0.2]


class TestDPAgainstExhaustive:
    def test_random_instances(self):
        rng = np.random.default_rng(909)
        done = 0
        while done < 60:
            E, q, frame, resolution = _random_instance(rng)
            S = _ref_state_count(E, q, frame)
            if S > 10 or S ** (resolution + 1) > 3_000_000:
                continue
            est = rect_lower_dp(E, q, frame, resolution)
            ref = _ref_exhaustive(E, q, frame, resolution)
            assert abs(est.lower - ref) < 1e-12
            done += 1

    def test_witness_coverage_recomputes(self):
        rng = np.random.default_rng(27)
        done = 0
        while done < 25:
            E, q, frame, resolution = _random_instance(rng)
            if _ref_state_count(E, q, frame) > 30:
                continue
            est = rect_lower_dp(E, q, frame, resolution)
            om1, om2 = frame
            bands = _ref_bands(E, *om1.vector, *om2.vector, q.epsilon)
            cols = _ref_column_bands(bands, q.J, resolution)
            hs = est.witness.heights
            cov = 0
            for i, merged in enumerate(cols):
                for blo, bhi in merged:
                    if blo - 1e-9 <= hs[i] <= bhi + 1e-9 and blo - 1e-9 <= hs[i + 1] <= bhi + 1e-9:
                        cov += 1
                        break
            assert abs(cov / resolution - est.lower) < 1e-12
            done += 1


class TestDPStructure:
    def test_cantor_axis_equals_shadow_measure(self):
        # with slack matching the cell size, credited columns are exactly the
        # shadow of the set, so the score is the projection measure
        E = cantor_squares(2)
        q = RectQuery(4.0**-2, 1.0, 1.0, Interval(0.0, 1.0))
        est = rect_lower_dp(E, q, frame_from_angle(0.0), 16)
        assert est.lower == 0.25

    @pytest.mark.parametrize("seed", range(12))
    def test_monotone_in_epsilon(self, seed):
        rng = np.random.default_rng(seed)
        E, q, frame, resolution = _random_instance(rng)
        wide = RectQuery(2.0 * q.epsilon, q.r, q.M, q.J)
        a = rect_lower_dp(E, q, frame, resolution).lower
        b = rect_lower_dp(E, wide, frame, resolution).lower
        assert b >= a - 1e-12

    @pytest.mark.parametrize("seed", range(12, 24))
    def test_monotone_in_slope_cap(self, seed):
        rng = np.random.default_rng(seed)
        E, q, frame, resolution = _random_instance(rng)
        loose = RectQuery(q.epsilon, q.r, 4.0 * q.M, q.J)
        a = rect_lower_dp(E, q, frame, resolution).lower
        b = rect_lower_dp(E, loose, frame, resolution).lower
        assert b >= a - 1e-12

    @pytest.mark.parametrize("seed", range(24, 36))
    def test_monotone_under_inclusion(self, seed):
        rng = np.random.default_rng(seed)
        E, q, frame, resolution = _random_instance(rng)
        if E.count < 2:
            return
        keep = np.zeros(E.count, dtype=bool)
        keep[: max(1, E.count // 2)] = True
        sub = SquareSet(E.base, E.level, E.ix[keep], E.iy[keep])
        a = rect_lower_dp(sub, q, frame, resolution).lower
        b = rect_lower_dp(E, q, frame, resolution).lower
        assert b >= a - 1e-12

    @pytest.mark.parametrize("seed", range(36, 44))
    def test_quarter_scale_invariance_exact(self, seed):
        # shrinking the set, the tolerance and the window by the same power
        # of two leaves every quantized quantity identical
        rng = np.random.default_rng(seed)
        E, q, frame, resolution = _random_instance(rng)
        E4 = SquareSet(E.base, E.level + 1, E.ix, E.iy)
        scale = 1.0 / E.base
        q4 = RectQuery(
            q.epsilon * scale, q.r * scale, q.M, Interval(q.J.lo * scale, q.J.hi * scale)
        )
        a = rect_lower_dp(E, q, frame, resolution).lower
        b = rect_lower_dp(E4, q4, frame, resolution).lower
        assert a == b

    def test_budget_error(self):
        q = RectQuery(1e-5, 0.5, 1.0, Interval(0.0, 1.0))
        with pytest.raises(BudgetError):
            rect_lower_dp(cantor_squares(2), q, frame_from_angle(0.3), 64, state_budget=1000)


class TestSweep:
    def test_cantor_family_frozen_values(self):
        for m in (2, 3, 4):
            E = cantor_squares(m)
            q = RectQuery(4.0**-m, 1.0, 1.0, Interval(0.0, 1.0))
            est = rect_lower_sweep(E, q, 4, 4**m)
            assert est.lower == 2.0**-m
            assert est.frames_searched == 4
            assert est.notes

    def test_sweep_result_validates(self):
        E = cantor_squares(2)
        q = RectQuery(4.0**-2, 1.0, 1.0, Interval(0.0, 1.0))
        est = rect_lower_sweep(E, q, 2, 8)
        assert 0.0 <= est.lower <= 1.0
        assert est.witness.max_slope <= q.M + 1e-9


class TestUpperBounds:
    def test_twoproj_value(self):
        got = rect_upper_twoproj(6, 2, 1.0, C=2.0, alpha=0.5)
        assert got == pytest.approx(2.0 * math.log(5.0) ** -0.5)

    def test_twoproj_warns_outside_regime(self):
        with pytest.warns(RuntimeWarning):
            rect_upper_twoproj(6, 2, 50.0)

    def test_twoproj_requires_order(self):
        with pytest.raises(ConfigError):
            rect_upper_twoproj(2, 2, 1.0)

    def test_beta_route_value(self):
        assert rect_upper_beta(10, 2, 3.0, C=2.0) == pytest.approx(2.0 * 4.0 / 8.0)

    def test_beta_route_requires_order(self):
        with pytest.raises(ConfigError):
            rect_upper_beta(3, 3, 1.0)

"""Directional projections and the averaged projection functional.

The average over angles of the projection measure is computed by a
panel-adaptive quadrature whose per-panel evaluations return certified
enclosures (see _favard_kernel).  Four-corner Cantor products use the
self-similar recursion and quarter-period folding; any other square set is
handled by the flat per-cell path over a half period.

All reductions use math.fsum, so results are independent of panel order and
thread count.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _favard_kernel as _fk
from .cantor import cantor_level_of
from .errors import BudgetError, ConfigError
from .geometry import IntervalSet, SquareSet, merge_interval_arrays

DEFAULT_PANEL_CAP = 2**18
DEFAULT_COMPONENT_CAP = 2**16
_INITIAL_PANELS = 64
_MIN_PANEL_WIDTH = 1e-12
_PER_ANGLE_SAMPLES = 65

__all__ = [
    "FavardEstimate",
    "FavardRow",
    "FavardTable",
    "MCNeedleEstimate",
    "project",
    "favard",
    "favard_table",
    "favard_mc",
    "warmup",
]


@dataclass(frozen=True)
class FavardEstimate:
    """Certified two-sided estimate of the angle-averaged projection measure.

    value carries the quadrature estimate, error_bound a rigorous bound on
    its distance from the true average, angle_count the number of quadrature
    panels used, and per_angle exact (theta, measure) samples at a subset of
    panel midpoints.
    """

    value: float
    error_bound: float
    angle_count: int
    per_angle: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class FavardRow:
    n: int
    value: float
    error_bound: float
    angle_count: int


@dataclass(frozen=True)
class FavardTable:
    """Per-generation averages plus a log-log tail fit.

    tail_exponent is the slope of log(value) against log(n) over n >= 1
    (negative for decay); tail_r2 the fit's coefficient of determination.
    """

    rows: tuple[FavardRow, ...]
    tail_exponent: float
    tail_r2: float

    def to_csv_rows(self):
        out = [("n", "value", "error_bound", "angles")]
        for r in self.rows:
            out.append((str(r.n), repr(r.value), repr(r.error_bound), str(r.angle_count)))
        return out


@dataclass(frozen=True)
class MCNeedleEstimate:
    value: float
    stderr: float
    samples: int


def project(E: SquareSet, theta: float) -> IntervalSet:
    """Exact merged projection of a square set onto the direction theta."""
    if E.count == 0:
        return IntervalSet.empty()
    th = float(theta)
    c = math.cos(th)
    s = math.sin(th)
    side = E.side
    base = E.ix * (side * c) + E.iy * (side * s)
    lo = base + side * (min(c, 0.0) + min(s, 0.0))
    hi = base + side * (max(c, 0.0) + max(s, 0.0))
    return merge_interval_arrays(lo, hi)


class _Workspaces(threading.local):
    def __init__(self):
        self.by_cap = {}

    def get(self, cap):
        ws = self.by_cap.get(cap)
        if ws is None:
            buf0 = np.empty((_fk.NFIELDS, cap), dtype=np.float64)
            buf1 = np.empty((_fk.NFIELDS, cap), dtype=np.float64)
            buf2 = np.empty((_fk.NFIELDS, 4 * cap), dtype=np.float64)
            order = np.empty(4 * cap, dtype=np.int64)
            ws = (buf0, buf1, buf2, order)
            self.by_cap[cap] = ws
        return ws


_WORK = _Workspaces()


def _eval_cantor(n, a, b, cap):
    buf0, buf1, buf2, order = _WORK.get(cap)
    est, err, comp = _fk.cantor_panel(n, a, b, buf0, buf1, buf2, order)
    if comp < 0:
        return a, b, 0.0, math.inf
    return a, b, est, err


def _flat_records(E: SquareSet, quadrant2: bool):
    side = E.side
    x0 = E.ix * side
    y0 = E.iy * side
    recs = np.zeros((_fk.NFIELDS, E.count), dtype=np.float64)
    if quadrant2:
        recs[0] = x0 + side
        recs[1] = y0
        recs[4] = x0
        recs[5] = y0 + side
    else:
        recs[0] = x0
        recs[1] = y0
        recs[4] = x0 + side
        recs[5] = y0 + side
    return recs


def _eval_flat(E, a, b, cap):
    buf0, _, _, order = _WORK.get(cap)
    if E.count > cap:
        return a, b, 0.0, math.inf
    tm = 0.5 * (a + b)
    recs = _flat_records(E, math.cos(tm) < 0.0)
    keys = recs[0] * math.cos(tm) + recs[1] * math.sin(tm)
    idx = np.argsort(keys, kind="stable")
    est, err, comp = _fk.flat_panel(np.ascontiguousarray(recs[:, idx]), a, b, buf0, order[: E.count])
    if comp < 0:
        return a, b, 0.0, math.inf
    return a, b, est, err


def _integrate_adaptive(eval_one, pieces, err_target, panel_cap, threads, what):
    """Refine panels until the certified error meets err_target.

    pieces are (a, b) seed intervals; eval_one(a, b) returns
    (a, b, est, err).  Panels are bisected in deterministic waves, worst
    first.  Raises BudgetError when the cap or the width floor is hit.
    """
    panels = []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:

        def run_batch(jobs):
            if pool is not None and len(jobs) > 1:
                return list(pool.map(lambda ab: eval_one(*ab), jobs))
            return [eval_one(a, b) for a, b in jobs]

        seed_jobs = []
        for a0, b0 in pieces:
            k = max(1, round(_INITIAL_PANELS * (b0 - a0) / math.pi * 2))
            edges = np.linspace(a0, b0, k + 1)
            seed_jobs.extend((float(edges[i]), float(edges[i + 1])) for i in range(k))
        panels.extend(run_batch(seed_jobs))

        while True:
            total_err = math.fsum(p[3] for p in panels)
            if total_err <= err_target:
                break
            if len(panels) >= panel_cap:
                raise BudgetError(
                    f"{what}: certified error {total_err:.3e} exceeds target "
                    f"{err_target:.3e} at the panel cap ({panel_cap}); raise "
                    "the cap or loosen tol"
                )
            # wave size scales with the panel count but never with the thread
            # count, or the refinement trajectory (and hence the result bits)
            # would too
            wave = max(32, len(panels) // 8)
            order = sorted(range(len(panels)), key=lambda i: (-panels[i][3], panels[i][0]))
            picked = []
            for i in order[: min(wave, panel_cap - len(panels))]:
                if panels[i][3] <= 0.0:
                    break
                picked.append(i)
            if not picked:
                break
            jobs = []
            for i in picked:
                a, b, _, _ = panels[i]
                if b - a < _MIN_PANEL_WIDTH:
                    raise BudgetError(
                        f"{what}: panel at [{a!r}, {b!r}] cannot be refined "
                        "further; component capacity is too small for this set"
                    )
                m = 0.5 * (a + b)
                jobs.append((a, m))
                jobs.append((m, b))
            results = run_batch(jobs)
            for i in sorted(picked, reverse=True):
                del panels[i]
            panels.extend(results)
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    panels.sort(key=lambda p: p[0])
    value = math.fsum(p[2] for p in panels)
    err = math.fsum(p[3] for p in panels)
    return panels, value, err


def _per_angle_samples(E, panels, k):
    if not panels:
        return ()
    idx = np.unique(np.linspace(0, len(panels) - 1, min(k, len(panels))).round().astype(int))
    out = []
    for i in idx:
        a, b, _, _ = panels[i]
        th = 0.5 * (a + b)
        out.append((th, project(E, th).measure))
    return tuple(out)


def favard(
    E: SquareSet,
    tol: float = 1e-3,
    *,
    threads: int = 1,
    panel_cap: int = DEFAULT_PANEL_CAP,
    component_cap: int = DEFAULT_COMPONENT_CAP,
) -> FavardEstimate:
    """Angle-averaged projection measure with a certified error bound.

    The result's error_bound is at most tol; if the panel budget cannot
    achieve that, a BudgetError reports the shortfall instead of returning a
    silently degraded value.
    """
    if not (tol > 0.0) or not math.isfinite(tol):
        raise ConfigError(f"tol must be a positive finite number, got {tol!r}")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    if E.count == 0:
        return FavardEstimate(0.0, 0.0, 0, ())
    n = cantor_level_of(E)
    if n is not None:
        # the four-corner product is symmetric under both reflections, so a
        # quarter period determines the average
        factor = 4.0 / math.pi
        pieces = [(0.0, math.pi / 4.0)]
        eval_one = lambda a, b: _eval_cantor(n, a, b, component_cap)
        what = f"favard(cantor n={n})"
    else:
        factor = 1.0 / math.pi
        pieces = [(0.0, math.pi / 2.0), (math.pi / 2.0, math.pi)]
        eval_one = lambda a, b: _eval_flat(E, a, b, component_cap)
        what = f"favard({E.count} cells)"
    panels, raw_value, raw_err = _integrate_adaptive(
        eval_one, pieces, tol / factor, panel_cap, threads, what
    )
    return FavardEstimate(
        value=factor * raw_value,
        error_bound=factor * raw_err,
        angle_count=len(panels),
        per_angle=_per_angle_samples(E, panels, _PER_ANGLE_SAMPLES),
    )


def favard_table(
    n_max: int,
    tol: float = 1e-3,
    *,
    threads: int = 1,
    panel_cap: int = DEFAULT_PANEL_CAP,
    component_cap: int = DEFAULT_COMPONENT_CAP,
) -> FavardTable:
    """Certified averages for generations 0..n_max with a log-log tail fit."""
    from .cantor import cantor_squares

    if n_max < 0:
        raise ConfigError(f"n_max must be >= 0, got {n_max}")
    rows = []
    for n in range(n_max + 1):
        est = favard(
            cantor_squares(n),
            tol,
            threads=threads,
            panel_cap=panel_cap,
            component_cap=component_cap,
        )
        rows.append(FavardRow(n, est.value, est.error_bound, est.angle_count))
    xs = [math.log(r.n) for r in rows if r.n >= 1]
    ys = [math.log(r.value) for r in rows if r.n >= 1]
    if len(xs) >= 2:
        slope, intercept = np.polyfit(xs, ys, 1)
        pred = np.polyval([slope, intercept], xs)
        res = np.asarray(ys) - pred
        tot = np.asarray(ys) - np.mean(ys)
        denom = float(tot @ tot)
        r2 = 1.0 - float(res @ res) / denom if denom > 0 else 1.0
    else:
        slope, r2 = math.nan, math.nan
    return FavardTable(tuple(rows), float(slope), float(r2))


def favard_mc(E: SquareSet, samples: int = 10**6, seed: int = 0) -> MCNeedleEstimate:
    """Monte Carlo needle-dropping estimate of the angle-averaged measure.

    Uncertified sampling oracle: lines are drawn uniformly against a disk
    covering the set and the hit rate is rescaled.  Useful only as an
    independent cross-check of the certified quadrature.
    """
    if samples < 1:
        raise ConfigError(f"samples must be >= 1, got {samples}")
    if E.count == 0:
        return MCNeedleEstimate(0.0, 0.0, samples)
    x0, y0, x1, y1 = E.bounding_box()
    cx = 0.5 * (x0 + x1)
    cy = 0.5 * (y0 + y1)
    rho = 0.5 * math.hypot(x1 - x0, y1 - y0)
    rng = np.random.default_rng(seed)
    centers = E.centers()
    halfside = 0.5 * E.side
    hits = 0
    # keep the cells x block scratch matrix around 32 MB
    block = int(max(64, min(4096, 2**22 // max(1, E.count))))
    done = 0
    while done < samples:
        m = min(block, samples - done)
        theta = rng.uniform(0.0, math.pi, m)
        u = rng.uniform(-1.0, 1.0, m)
        ct = np.cos(theta)
        st = np.sin(theta)
        c = cx * ct + cy * st + u * rho
        proj = centers[:, 0][:, None] * ct[None, :] + centers[:, 1][:, None] * st[None, :]
        hw = halfside * (np.abs(ct) + np.abs(st))
        hit = np.any(np.abs(proj - c[None, :]) <= hw[None, :], axis=0)
        hits += int(hit.sum())
        done += m
    p = hits / samples
    value = 2.0 * rho * p
    stderr = 2.0 * rho * math.sqrt(max(p * (1.0 - p), 0.0) / samples)
    return MCNeedleEstimate(value, stderr, samples)


def warmup():
    """Compile the quadrature kernels on a tiny instance."""
    buf0 = np.empty((_fk.NFIELDS, 64), dtype=np.float64)
    buf1 = np.empty((_fk.NFIELDS, 64), dtype=np.float64)
    buf2 = np.empty((_fk.NFIELDS, 256), dtype=np.float64)
    order = np.empty(256, dtype=np.int64)
    _fk.cantor_panel(1, 0.1, 0.2, buf0, buf1, buf2, order)
    recs = np.zeros((_fk.NFIELDS, 2), dtype=np.float64)
    recs[4] = 0.5
    recs[5] = 0.5
    _fk.flat_panel(recs, 0.1, 0.2, buf0, order[:2])

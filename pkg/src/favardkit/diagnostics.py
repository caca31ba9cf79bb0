"""Mass diagnostics for discrete cell measures: sector annuli, normal
directions, line multiplicity, and strip densities.

All mass queries use the center rule: a cell contributes its full mass
exactly when its center lies in the queried region.  This keeps every
diagnostic additive and reproducible; the bias is one cell width at region
boundaries and is the documented convention, not an approximation knob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cantor import DiscreteMeasure
from .errors import ConfigError
from .geometry import Direction, Interval, Line, SquareSet

SECTOR_SLOPE_DIVISOR = 10.0
NORMAL_GRID_RATIO = 2.0**0.25

__all__ = [
    "SectorQuery",
    "NormalResult",
    "sector_mass",
    "is_normal",
    "line_multiplicity",
    "strip_mass",
    "max_strip_density",
    "hl_maximal_density",
]


@dataclass(frozen=True)
class SectorQuery:
    """Annular sector: points within [r_inner, r_outer) of x whose
    displacement makes angle at most arcsin(1/M) with the plane of omega's
    normal, in the secant form |d . omega| <= |d| / M."""

    x: tuple[float, float]
    omega: Direction
    r_inner: float
    r_outer: float
    M: float

    def __post_init__(self):
        if not (0.0 <= self.r_inner < self.r_outer):
            raise ConfigError(
                f"need 0 <= r_inner < r_outer, got {self.r_inner!r}, {self.r_outer!r}"
            )
        if not (self.M > 0.0) or not math.isfinite(self.M):
            raise ConfigError(f"M must be positive and finite, got {self.M!r}")


@dataclass(frozen=True)
class NormalResult:
    normal: bool
    witness_r: float | None
    tested_radii: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.normal


def sector_mass(mu: DiscreteMeasure, q: SectorQuery, *, strict: bool = False) -> float:
    """Mass of the annular sector under the center rule.

    With M <= 1 the angular condition is vacuous and the query degenerates
    to a plain annulus; strict mode rejects that, permissive mode (default)
    allows it.
    """
    if strict and q.M <= 1.0:
        raise ConfigError(
            f"M={q.M} makes the sector the whole annulus; strict mode rejects it"
        )
    centers = mu.support.centers()
    dx = centers[:, 0] - q.x[0]
    dy = centers[:, 1] - q.x[1]
    d = np.hypot(dx, dy)
    wx, wy = q.omega.vector
    axial = np.abs(dx * wx + dy * wy)
    inside = (d >= q.r_inner) & (d < q.r_outer) & (axial * q.M <= d)
    return int(np.count_nonzero(inside)) * mu.mass_per_cell


def is_normal(
    mu: DiscreteMeasure,
    x: tuple[float, float],
    omega: Direction,
    schedule,
    n: int,
    M: float,
    threshold_alpha: float,
    *,
    offset: int = 1,
    slope_divisor: float = SECTOR_SLOPE_DIVISOR,
) -> NormalResult:
    """Whether omega carries sector mass above the schedule-scaled threshold
    at some radius of a geometric grid (ratio 2^(1/4)) spanning
    [r_{n+offset,-}, r_{n-offset,+}].

    The sector slope is softened to M/slope_divisor and the inner radius
    pinned at the bottom of the scanned range.  Only sampled radii are
    tested, so a True is a certificate while a False may under-report.
    """
    if offset < 1:
        raise ConfigError(f"offset must be >= 1, got {offset}")
    N = schedule.N
    if not (1 <= n - offset and n + offset <= N):
        raise ConfigError(
            f"schedule with N={N} levels cannot frame level n={n} at offset {offset}"
        )
    r_lo = schedule.pairs[n + offset - 1][0]
    r_hi = schedule.pairs[n - offset - 1][1]
    radii = []
    r = r_lo
    while r < r_hi * (1.0 - 1e-12):
        radii.append(r)
        r *= NORMAL_GRID_RATIO
    radii.append(r_hi)
    soft_M = M / slope_divisor
    threshold_base = float(N) ** (-threshold_alpha) / M
    witness = None
    for r in radii[1:]:
        q = SectorQuery(x, omega, r_lo, r, max(soft_M, 1e-9))
        if sector_mass(mu, q) > threshold_base * r:
            witness = r
            break
    return NormalResult(witness is not None, witness, tuple(radii))


def _line_pieces(E: SquareSet, line: Line):
    """Closed parameter intervals (possibly degenerate) of the line inside
    each cell, along the unit parametrization p(t) = c*omega + t*omega_perp."""
    wx, wy = line.omega.vector
    px = line.c * wx
    py = line.c * wy
    tx, ty = -wy, wx
    side = E.side
    x0 = E.ix * side
    y0 = E.iy * side
    n = x0.size
    t_lo = np.full(n, -np.inf)
    t_hi = np.full(n, np.inf)
    ok = np.ones(n, dtype=bool)
    for p0, tv, lo, hi in ((px, tx, x0, x0 + side), (py, ty, y0, y0 + side)):
        if tv == 0.0:
            ok &= (p0 >= lo) & (p0 <= hi)
        else:
            a = (lo - p0) / tv
            b = (hi - p0) / tv
            slab_lo = np.minimum(a, b)
            slab_hi = np.maximum(a, b)
            t_lo = np.maximum(t_lo, slab_lo)
            t_hi = np.minimum(t_hi, slab_hi)
    ok &= t_lo <= t_hi
    return t_lo[ok], t_hi[ok]


def line_multiplicity(E: SquareSet, line: Line, sep: float) -> int:
    """Largest number of points on line inside E's cells with pairwise
    distance at least sep (closed comparison), by the optimal greedy sweep.

    Earliest-point greedy is optimal on a union of 1-d intervals, so the
    count is exact; separation exactly equal to sep counts as admissible,
    with a 1e-9 relative slack absorbing parametrization rounding.
    """
    if not (sep > 0.0) or not math.isfinite(sep):
        raise ConfigError(f"sep must be positive and finite, got {sep!r}")
    tol = 1e-9 * sep
    t_lo, t_hi = _line_pieces(E, line)
    if t_lo.size == 0:
        return 0
    order = np.argsort(t_lo, kind="stable")
    t_lo = t_lo[order]
    t_hi = t_hi[order]
    merged: list[list[float]] = []
    for a, b in zip(t_lo.tolist(), t_hi.tolist()):
        if merged and a <= merged[-1][1]:
            if b > merged[-1][1]:
                merged[-1][1] = b
        else:
            merged.append([a, b])
    count = 0
    prev = -math.inf
    for a, b in merged:
        p = a if prev == -math.inf else max(a, prev + sep - tol)
        while p <= b + tol:
            count += 1
            prev = p
            p = prev + sep - tol
    return count


def _projected_centers(mu: DiscreteMeasure, omega: Direction) -> np.ndarray:
    centers = mu.support.centers()
    wx, wy = omega.vector
    return centers[:, 0] * wx + centers[:, 1] * wy


def strip_mass(mu: DiscreteMeasure, omega: Direction, J: Interval) -> float:
    """Mass of centers whose omega-projection lies in [J.lo, J.hi).

    The half-open convention makes strip masses over a partition of the
    projection range add up exactly to the total mass.
    """
    t = _projected_centers(mu, omega)
    inside = (t >= J.lo) & (t < J.hi)
    return int(np.count_nonzero(inside)) * mu.mass_per_cell


def max_strip_density(mu: DiscreteMeasure, omega: Direction, width: float) -> float:
    """Max of strip_mass over all width-wide windows, divided by the width.

    The maximizing window can be taken to start at a projected center, so
    the sorted two-pointer scan is exact.
    """
    if not (width > 0.0) or not math.isfinite(width):
        raise ConfigError(f"width must be positive and finite, got {width!r}")
    t = np.sort(_projected_centers(mu, omega))
    if t.size == 0:
        return 0.0
    ends = np.searchsorted(t, t + width, side="left")
    best = int((ends - np.arange(t.size)).max())
    return best * mu.mass_per_cell / width


def hl_maximal_density(
    mu: DiscreteMeasure, omega: Direction, width: float, *, doublings: int = 30
) -> float:
    """Maximal-function style exposure: the largest window density over the
    geometric ladder width, 2*width, 4*width, ... up to the projected span."""
    t = _projected_centers(mu, omega)
    if t.size == 0:
        return 0.0
    span = float(t.max() - t.min()) + width
    best = 0.0
    w = width
    for _ in range(doublings):
        best = max(best, max_strip_density(mu, omega, w))
        if w > span:
            break
        w *= 2.0
    return best

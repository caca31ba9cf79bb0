"""Middle-half Cantor approximants and their product structure.

Generation n of the middle-half Cantor set keeps the base-4 digits {0, 3}:
2^n intervals of length 4^-n.  The planar product has 4^n cells of side 4^-n.
All coordinates are dyadic, hence exact in binary floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ConfigError
from .geometry import IntervalSet, SquareSet

__all__ = [
    "DEFAULT_MAX_N",
    "CantorGeneration",
    "DiscreteMeasure",
    "cantor_start_indices",
    "cantor_intervals",
    "cantor_squares",
    "cantor_generation",
    "cantor_level_of",
    "boundary_squares",
    "natural_measure",
    "spherical_content_upper",
]

DEFAULT_MAX_N = 12

# cell enumeration cap for the greedy ball covers
_COVER_CELL_BUDGET = 50_000_000


def _check_n(n: int, max_n: int) -> None:
    if n < 0:
        raise ConfigError("generation must be nonnegative")
    if n > max_n:
        raise BudgetError(
            f"generation {n} exceeds the configured maximum {max_n}: "
            f"4^{n} = {4**n} product cells ({4**n * 16 / 1e6:.0f} MB of indices)"
        )


def cantor_start_indices(n: int) -> np.ndarray:
    """Sorted integer start indices of the generation-n intervals on the 4^-n grid.

    These are the n-digit base-4 integers with digits in {0, 3}.
    """
    idx = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        idx = (idx[:, None] * 4 + np.array([0, 3], dtype=np.int64)).ravel()
    return idx


def cantor_intervals(n: int, *, max_n: int = DEFAULT_MAX_N) -> IntervalSet:
    """The 2^n closed intervals of generation n, exactly."""
    _check_n(n, max_n)
    s = 4.0 ** (-n)
    starts = cantor_start_indices(n) * s
    return IntervalSet(starts, starts + s, _trusted=True)


def cantor_squares(n: int, *, max_n: int = DEFAULT_MAX_N) -> SquareSet:
    """The product cell set of generation n: 4^n cells of side 4^-n in the unit square."""
    _check_n(n, max_n)
    idx = cantor_start_indices(n)
    k = idx.size
    ix = np.repeat(idx, k)
    iy = np.tile(idx, k)
    return SquareSet(4, n, ix, iy, _trusted=True)


@dataclass(frozen=True)
class CantorGeneration:
    """Bundle of one generation: the 1-d intervals and the 2-d product cells."""

    n: int
    intervals: IntervalSet
    squares: SquareSet

    def __post_init__(self) -> None:
        if len(self.intervals) != 2**self.n or self.squares.count != 4**self.n:
            raise ValueError("inconsistent generation data")


def cantor_generation(n: int, *, max_n: int = DEFAULT_MAX_N) -> CantorGeneration:
    return CantorGeneration(n, cantor_intervals(n, max_n=max_n), cantor_squares(n, max_n=max_n))


def cantor_level_of(E: SquareSet) -> int | None:
    """Return n if E is exactly the generation-n product cell set, else None."""
    if E.base != 4 or E.count != 4**E.level:
        return None
    n = E.level
    if n > DEFAULT_MAX_N:
        return None
    idx = cantor_start_indices(n)
    k = idx.size
    if not np.array_equal(E.ix, np.repeat(idx, k)):
        return None
    if not np.array_equal(E.iy, np.tile(idx, k)):
        return None
    return n


def boundary_squares(n: int, depth: int, *, max_n: int = DEFAULT_MAX_N) -> SquareSet:
    """Level-depth cells meeting the topological boundary of the generation-n product.

    The product cells are pairwise separated, so the boundary is the union of
    the 4 edge rings of each cell; at refinement factor f = 4^(depth-n) each
    cell contributes its border ring of 4f-4 cells (f >= 2), or itself (f = 1).
    """
    _check_n(n, max_n)
    if depth < n:
        raise ConfigError(f"depth {depth} must be at least the generation {n}")
    _check_n(depth, max_n)
    base = cantor_squares(n, max_n=max_n)
    f = 4 ** (depth - n)
    if f == 1:
        return SquareSet(4, depth, base.ix, base.iy, _trusted=True)
    # ring offsets within an f x f block
    span = np.arange(f, dtype=np.int64)
    off_x = np.concatenate([span, span, np.zeros(f - 2, dtype=np.int64), np.full(f - 2, f - 1, dtype=np.int64)])
    off_y = np.concatenate([np.zeros(f, dtype=np.int64), np.full(f, f - 1, dtype=np.int64), span[1:-1], span[1:-1]])
    ix = (base.ix[:, None] * f + off_x[None, :]).ravel()
    iy = (base.iy[:, None] * f + off_y[None, :]).ravel()
    order = np.lexsort((iy, ix))
    return SquareSet(4, depth, ix[order], iy[order], _trusted=True)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Uniform mass on the cells of a SquareSet."""

    support: SquareSet
    mass_per_cell: float

    def __post_init__(self) -> None:
        if not self.mass_per_cell > 0:
            raise ValueError("mass_per_cell must be positive")

    @property
    def total(self) -> float:
        return self.mass_per_cell * self.support.count


def natural_measure(E: SquareSet) -> DiscreteMeasure:
    """Mass base^-level per cell; totals 1 on a full generation product."""
    return DiscreteMeasure(E, float(E.base) ** (-E.level))


def _cover_count(E: SquareSet, r: float, sx: float, sy: float) -> int:
    """Number of spacing-g grid squares meeting E, grid origin shifted by (sx, sy).

    g is chosen so an open r-ball centered in a grid square covers it.
    """
    g = r * np.sqrt(2.0) * (1.0 - 1e-9)
    s = E.side
    x0 = E.ix * s - sx
    y0 = E.iy * s - sy
    gx0 = np.floor(x0 / g).astype(np.int64)
    gx1 = np.floor((x0 + s) / g).astype(np.int64)
    gy0 = np.floor(y0 / g).astype(np.int64)
    gy1 = np.floor((y0 + s) / g).astype(np.int64)
    spans = (gx1 - gx0 + 1) * (gy1 - gy0 + 1)
    total = int(spans.sum())
    if total > _COVER_CELL_BUDGET:
        raise BudgetError(
            f"ball cover enumeration needs {total} grid entries, over the budget {_COVER_CELL_BUDGET}"
        )
    if E.count and int((gx1 - gx0).max()) <= 1 and int((gy1 - gy0).max()) <= 1:
        # common case: each cell meets at most a 2 x 2 block of grid squares
        gx = np.concatenate([gx0, gx1, gx0, gx1])
        gy = np.concatenate([gy0, gy0, gy1, gy1])
        return np.unique(gx * (1 << 32) + (gy - gy.min())).size
    keys = []
    for i in range(E.count):
        xs = np.arange(gx0[i], gx1[i] + 1, dtype=np.int64)
        ys = np.arange(gy0[i], gy1[i] + 1, dtype=np.int64)
        keys.append((xs[:, None] * (1 << 32) + (ys[None, :] + (1 << 30))).ravel())
    return np.unique(np.concatenate(keys)).size


def spherical_content_upper(E: SquareSet, r_lo: float, r_hi: float) -> float:
    """Upper bound on the restricted spherical content by explicit greedy covers.

    Tries a ladder of admissible radii r_lo * 2^k <= r_hi, each over a 3 x 3
    family of shifted grids, and returns the smallest sum of ball diameters.
    Monotone nonincreasing in r_hi (the ladder only gains rungs) and monotone
    under set inclusion (each cover count is).
    """
    if not (0 < r_lo <= r_hi):
        raise ConfigError("need 0 < r_lo <= r_hi")
    if E.is_empty():
        return 0.0
    best = np.inf
    r = r_lo
    rungs = 0
    while r <= r_hi * (1.0 + 1e-12) and rungs < 40:
        g = r * np.sqrt(2.0) * (1.0 - 1e-9)
        for sx in (0.0, g / 3.0, 2.0 * g / 3.0):
            for sy in (0.0, g / 3.0, 2.0 * g / 3.0):
                count = _cover_count(E, r, sx, sy)
                total = 2.0 * r * count
                if total < best:
                    best = total
        r *= 2.0
        rungs += 1
    return float(best)

"""Flatness coefficients on dyadic squares, their square-function sum, and
per-level occupancy deficits for slope-bounded graphs.

The coefficient of a square Q measures how far the part of a set inside the
tripled square 3Q sits from the best-fitting line, normalized by diam(3Q)
so the value lies in [0, 1].  For a cell set the points tested are the
corners of each cell clipped to 3Q; the farthest point of an axis rectangle
from any line is one of its corners, so clipping loses nothing and keeps
the value scale-correct near the boundary of 3Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ConfigError
from .geometry import DyadicSquare, SquareSet, _convex_hull, min_strip_halfwidth
from .rectifiability import LipschitzPath

DEFAULT_LEVEL_BUDGET = 20
FLAT_THRESHOLD = 0.01

__all__ = [
    "BetaResult",
    "JonesSum",
    "LevelDeficit",
    "DeficitReport",
    "beta_number",
    "jones_sum",
    "tent_graph_squares",
    "path_cells",
    "square_count_deficit",
]


@dataclass(frozen=True)
class BetaResult:
    square: DyadicSquare
    beta: float
    witness_points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not (-1e-12 <= self.beta <= 1.0 + 1e-12):
            raise ValueError(f"flatness coefficient {self.beta!r} outside [0, 1]")


@dataclass(frozen=True)
class JonesSum:
    total: float
    per_level: tuple[tuple[int, float], ...]
    truncation_level: int


def _clipped_cell_corners(
    ix: np.ndarray, iy: np.ndarray, side: float, rect: tuple[float, float, float, float]
) -> np.ndarray:
    """Corners of each cell intersected with rect; cells missing rect dropped.

    All coordinates are dyadic floats, so the comparisons and the clip are
    exact.  Degenerate (edge or corner touch) intersections are kept.
    """
    X0, Y0, X1, Y1 = rect
    x0 = ix * side
    y0 = iy * side
    keep = (x0 <= X1) & (x0 + side >= X0) & (y0 <= Y1) & (y0 + side >= Y0)
    x0 = x0[keep]
    y0 = y0[keep]
    cx0 = np.maximum(x0, X0)
    cx1 = np.minimum(x0 + side, X1)
    cy0 = np.maximum(y0, Y0)
    cy1 = np.minimum(y0 + side, Y1)
    n = cx0.size
    pts = np.empty((4 * n, 2), dtype=np.float64)
    pts[0::4, 0] = cx0
    pts[0::4, 1] = cy0
    pts[1::4, 0] = cx1
    pts[1::4, 1] = cy0
    pts[2::4, 0] = cx1
    pts[2::4, 1] = cy1
    pts[3::4, 0] = cx0
    pts[3::4, 1] = cy1
    return pts


def _beta_of_points(pts: np.ndarray, sq: DyadicSquare) -> BetaResult:
    if pts.shape[0] == 0:
        return BetaResult(sq, 0.0, ())
    hull = _convex_hull(pts)
    hw = min_strip_halfwidth(pts)
    beta = min(1.0, 2.0 * hw / (3.0 * sq.side * math.sqrt(2.0)))
    return BetaResult(sq, beta, tuple(hull))


def beta_number(K, Q: DyadicSquare) -> BetaResult:
    """Flatness coefficient of Q against a SquareSet or a point cloud.

    Cells (or points) are tested against the closed tripled square; an empty
    intersection gives 0 exactly.
    """
    rect = Q.expanded3()
    if isinstance(K, SquareSet):
        pts = _clipped_cell_corners(K.ix, K.iy, K.side, rect)
    else:
        pts = np.asarray(K, dtype=np.float64).reshape(-1, 2)
        X0, Y0, X1, Y1 = rect
        inside = (pts[:, 0] >= X0) & (pts[:, 0] <= X1) & (pts[:, 1] >= Y0) & (pts[:, 1] <= Y1)
        pts = pts[inside]
    return _beta_of_points(pts, Q)


def _pow2_shift(base: int, level: int) -> int:
    """Cell side as an exact power of two exponent: side = 2**(-shift)."""
    t = (base.bit_length() - 1) * level
    if base != 1 << (base.bit_length() - 1):
        raise ConfigError(f"grid base {base} is not a power of two")
    return t


def jones_sum(K: SquareSet, max_level: int, *, level_budget: int = DEFAULT_LEVEL_BUDGET) -> JonesSum:
    """Sum of squared flatness coefficients, weighted by side length, over
    binary dyadic squares of levels 0..max_level.

    Only squares whose tripled square meets a cell of K are enumerated;
    every other square in the nominal domain contributes exactly 0, so the
    totals agree with the full sum over the bounding region.  Index ranges
    are computed in integer arithmetic, so no candidate is missed.
    """
    if max_level < 0:
        raise ConfigError(f"max_level must be >= 0, got {max_level}")
    if max_level > level_budget:
        raise BudgetError(
            f"max_level {max_level} exceeds the depth budget {level_budget} "
            "(raise level_budget explicitly to go deeper)"
        )
    t = _pow2_shift(K.base, K.level)
    ixs = K.ix.tolist()
    iys = K.iy.tolist()
    per_level = []
    for j in range(max_level + 1):
        sj = 2.0**-j
        buckets: dict[tuple[int, int], list[int]] = {}
        for idx in range(len(ixs)):
            cx = ixs[idx]
            cy = iys[idx]
            if j >= t:
                jx_lo = (cx << (j - t)) - 2
                jx_hi = ((cx + 1) << (j - t)) + 1
                jy_lo = (cy << (j - t)) - 2
                jy_hi = ((cy + 1) << (j - t)) + 1
            else:
                sh = t - j
                jx_lo = -((-cx) >> sh) - 2
                jx_hi = ((cx + 1) >> sh) + 1
                jy_lo = -((-cy) >> sh) - 2
                jy_hi = ((cy + 1) >> sh) + 1
            for jx in range(jx_lo, jx_hi + 1):
                for jy in range(jy_lo, jy_hi + 1):
                    buckets.setdefault((jx, jy), []).append(idx)
        terms = []
        side = K.side
        for (jx, jy) in sorted(buckets):
            sq = DyadicSquare(j, jx, jy, base=2)
            rect = sq.expanded3()
            sel = buckets[(jx, jy)]
            pts = _clipped_cell_corners(
                np.array([ixs[i] for i in sel]), np.array([iys[i] for i in sel]), side, rect
            )
            if pts.shape[0] == 0:
                continue
            hw = min_strip_halfwidth(pts)
            beta = min(1.0, 2.0 * hw / (3.0 * sj * math.sqrt(2.0)))
            terms.append(beta * beta * sj)
        per_level.append((j, math.fsum(terms)))
    total = math.fsum(p for _, p in per_level)
    return JonesSum(total, tuple(per_level), max_level)


def tent_graph_squares(slope: float, level: int, *, base: int = 2) -> SquareSet:
    """Cells met by the graph of x -> slope*|x - 1/2| over [0, 1] (closed).

    Exact for dyadic slopes at level >= 1: the kink lands on a column
    boundary and the function is monotone on each column.
    """
    if level < 1:
        raise ConfigError("level must be >= 1 so the kink sits on a column edge")
    n = base**level
    s = 1.0 / n
    cells = []
    for cx in range(n):
        x0 = cx * s
        x1 = (cx + 1) * s
        v0 = slope * abs(x0 - 0.5)
        v1 = slope * abs(x1 - 0.5)
        if v0 > v1:
            v0, v1 = v1, v0
        m0 = v0 * n
        m1 = v1 * n
        lo = int(math.floor(m0))
        if m0 == lo and lo > 0:
            lo -= 1
        hi = int(math.floor(m1))
        for cy in range(lo, hi + 1):
            cells.append((cx, cy))
    return SquareSet.from_cells(base, level, cells)


def _seg_meets_rect(p, q, x0, y0, x1, y1) -> bool:
    """Closed segment versus closed axis rectangle, exact orientation test."""
    from .geometry import _orient

    if max(p[0], q[0]) < x0 or min(p[0], q[0]) > x1:
        return False
    if max(p[1], q[1]) < y0 or min(p[1], q[1]) > y1:
        return False
    if p == q:
        return True
    signs = [
        _orient(p, q, (x0, y0)),
        _orient(p, q, (x1, y0)),
        _orient(p, q, (x1, y1)),
        _orient(p, q, (x0, y1)),
    ]
    return min(signs) <= 0 <= max(signs)


def path_cells(points: np.ndarray, level: int, *, base: int = 4) -> SquareSet:
    """Grid cells whose closed square meets the closed polyline."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] == 0:
        return SquareSet.empty(base, level)
    s = float(base) ** (-level)
    cells = set()
    for k in range(max(1, pts.shape[0] - 1)):
        p = (float(pts[k, 0]), float(pts[k, 1]))
        q = (float(pts[min(k + 1, pts.shape[0] - 1), 0]), float(pts[min(k + 1, pts.shape[0] - 1), 1]))
        ix_lo = int(math.floor(min(p[0], q[0]) / s)) - 1
        ix_hi = int(math.floor(max(p[0], q[0]) / s)) + 1
        iy_lo = int(math.floor(min(p[1], q[1]) / s)) - 1
        iy_hi = int(math.floor(max(p[1], q[1]) / s)) + 1
        for cx in range(ix_lo, ix_hi + 1):
            for cy in range(iy_lo, iy_hi + 1):
                if (cx, cy) in cells:
                    continue
                if _seg_meets_rect(p, q, cx * s, cy * s, (cx + 1) * s, (cy + 1) * s):
                    cells.add((cx, cy))
    return SquareSet.from_cells(base, level, cells)


def _clip_segment_to_rect(p, q, rect):
    """Liang-Barsky clip of closed segment to closed rect; None if disjoint."""
    X0, Y0, X1, Y1 = rect
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    t0, t1 = 0.0, 1.0
    for delta, lo_gap, hi_gap in (
        (dx, p[0] - X0, X1 - p[0]),
        (dy, p[1] - Y0, Y1 - p[1]),
    ):
        if delta == 0.0:
            if lo_gap < 0.0 or hi_gap < 0.0:
                return None
            continue
        ta = -lo_gap / delta
        tb = hi_gap / delta
        if delta < 0.0:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return None
    a = (p[0] + t0 * dx, p[1] + t0 * dy)
    b = (p[0] + t1 * dx, p[1] + t1 * dy)
    return a, b


@dataclass(frozen=True)
class LevelDeficit:
    level: int
    occupied: int
    flat: int
    flat_missing_descendant: int
    violations: int


@dataclass(frozen=True)
class DeficitReport:
    levels: tuple[LevelDeficit, ...]
    offset: int
    threshold: float
    measure_estimate: float

    @property
    def total_violations(self) -> int:
        return sum(rec.violations for rec in self.levels)


def square_count_deficit(
    n: int,
    offset: int = 2,
    graph: LipschitzPath | np.ndarray | None = None,
    *,
    threshold: float = FLAT_THRESHOLD,
    base: int = 4,
) -> DeficitReport:
    """Classify occupied squares by flatness and audit descendant losses.

    For levels j = 0..n-offset, each occupied level-j square is flat when
    its tripled-square flatness coefficient falls below the threshold; a
    flat square should be missing at least one of its base**(2*offset)
    level-(j+offset) descendants, and squares breaking that rule are counted
    as violations.  With graph=None the fully occupied grid is analyzed (no
    square is flat, so there is nothing to audit).  measure_estimate is the
    mean over audited levels of (non-flat count) * side, a length-like
    density of the non-flat part.
    """
    if offset < 1:
        raise ConfigError(f"offset must be >= 1, got {offset}")
    if n < offset:
        raise ConfigError(f"need n >= offset, got n={n}, offset={offset}")
    if n > 10:
        raise BudgetError(f"n={n} exceeds the depth budget 10")

    seg_pts: np.ndarray | None
    if graph is None:
        seg_pts = None
        occupied = None
    elif isinstance(graph, LipschitzPath):
        seg_pts = graph.points_world()
    else:
        seg_pts = np.asarray(graph, dtype=np.float64).reshape(-1, 2)
    if seg_pts is not None:
        occupied = {j: path_cells(seg_pts, j, base=base).cell_tuples() for j in range(n + 1)}

    child_count = (base**offset) ** 2
    records = []
    densities = []
    for j in range(n - offset + 1):
        sj = float(base) ** (-j)
        flat = 0
        missing = 0
        violations = 0
        if occupied is None:
            occ_j = [(a, b) for a in range(base**j) for b in range(base**j)]
        else:
            occ_j = sorted(occupied[j])
        for (jx, jy) in occ_j:
            sq = DyadicSquare(j, jx, jy, base=base)
            rect = sq.expanded3()
            if seg_pts is None:
                # every cell is occupied, so the clipped corner cloud fills
                # the window rectangle and its hull is the rectangle itself
                X0, Y0, X1, Y1 = rect
                X0, X1 = max(X0, 0.0), min(X1, 1.0)
                Y0, Y1 = max(Y0, 0.0), min(Y1, 1.0)
                pts = np.array([[X0, Y0], [X1, Y0], [X1, Y1], [X0, Y1]])
            else:
                chunks = []
                for k in range(seg_pts.shape[0] - 1):
                    clipped = _clip_segment_to_rect(
                        (seg_pts[k, 0], seg_pts[k, 1]),
                        (seg_pts[k + 1, 0], seg_pts[k + 1, 1]),
                        rect,
                    )
                    if clipped is not None:
                        chunks.append(clipped[0])
                        chunks.append(clipped[1])
                pts = np.array(chunks, dtype=np.float64).reshape(-1, 2)
            hw = min_strip_halfwidth(pts) if pts.shape[0] else 0.0
            beta = min(1.0, 2.0 * hw / (3.0 * sj * math.sqrt(2.0)))
            if beta < threshold:
                flat += 1
                if occupied is None:
                    present = child_count
                else:
                    kids = occupied[j + offset]
                    lo_x = jx * base**offset
                    lo_y = jy * base**offset
                    present = 0
                    for a in range(lo_x, lo_x + base**offset):
                        for b in range(lo_y, lo_y + base**offset):
                            if (a, b) in kids:
                                present += 1
                if present < child_count:
                    missing += 1
                else:
                    violations += 1
        records.append(LevelDeficit(j, len(occ_j), flat, missing, violations))
        densities.append((len(occ_j) - flat) * sj)
    estimate = math.fsum(densities) / len(densities)
    return DeficitReport(tuple(records), offset, threshold, estimate)

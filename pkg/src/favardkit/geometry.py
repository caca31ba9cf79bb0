"""Exact one- and two-dimensional primitives.

Interval algebra on the line, directions and lines in the plane, dyadic
squares, and minimal-strip widths of point sets.  All interval endpoints are
binary floats; inputs on dyadic grids (any base that is a power of two, and
base 4 in particular) are represented exactly, so gap comparisons use exact
zero rather than an epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Interval",
    "IntervalSet",
    "Direction",
    "Line",
    "DyadicSquare",
    "SquareSet",
    "merge_intervals",
    "neighborhood",
    "min_strip_halfwidth",
]


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with lo < hi; empty intervals are never stored."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


class IntervalSet:
    """Canonical disjoint union of intervals.

    Invariants: strictly sorted by lo, pairwise positive gaps (touching
    intervals are merged on construction).  Backed by a pair of float arrays.
    """

    __slots__ = ("_lo", "_hi")

    def __init__(self, lo: np.ndarray, hi: np.ndarray, *, _trusted: bool = False):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        if not _trusted:
            if lo.shape != hi.shape or lo.ndim != 1:
                raise ValueError("lo and hi must be 1-d arrays of equal length")
            if lo.size:
                if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
                    raise ValueError("non-finite endpoints")
                if not np.all(lo < hi):
                    raise ValueError("each interval needs lo < hi")
                if not np.all(lo[1:] > hi[:-1]):
                    raise ValueError("intervals must be sorted with positive gaps")
        self._lo = lo
        self._hi = hi

    @classmethod
    def empty(cls) -> "IntervalSet":
        z = np.empty(0, dtype=np.float64)
        return cls(z, z, _trusted=True)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "IntervalSet":
        return merge_intervals(list(pairs))

    @property
    def lo(self) -> np.ndarray:
        return self._lo

    @property
    def hi(self) -> np.ndarray:
        return self._hi

    @property
    def measure(self) -> float:
        # fixed left-to-right summation: bit-stable for a given interval set
        return float(np.add.reduce(self._hi - self._lo))

    @property
    def intervals(self) -> tuple[Interval, ...]:
        return tuple(Interval(float(a), float(b)) for a, b in zip(self._lo, self._hi))

    def __len__(self) -> int:
        return int(self._lo.size)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return (
            self._lo.shape == other._lo.shape
            and bool(np.all(self._lo == other._lo))
            and bool(np.all(self._hi == other._hi))
        )

    def __repr__(self) -> str:
        return f"IntervalSet({len(self)} intervals, measure={self.measure:.6g})"

    def contains_point(self, x: float) -> bool:
        i = int(np.searchsorted(self._lo, x, side="right")) - 1
        return i >= 0 and x <= self._hi[i]

    def to_json_obj(self) -> list[list[float]]:
        return [[float(a), float(b)] for a, b in zip(self._lo, self._hi)]

    def to_csv_rows(self) -> list[str]:
        return [f"{a!r},{b!r}" for a, b in zip(self._lo, self._hi)]

    @classmethod
    def from_json_obj(cls, obj: Sequence[Sequence[float]]) -> "IntervalSet":
        return merge_intervals([(float(p[0]), float(p[1])) for p in obj])


def _merge_sorted(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge intervals already sorted by lo; gap <= 0 merges (exact comparison)."""
    if lo.size == 0:
        return lo, hi
    cm = np.maximum.accumulate(hi)
    keep = np.empty(lo.size, dtype=bool)
    keep[0] = True
    keep[1:] = lo[1:] > cm[:-1]
    starts = np.flatnonzero(keep)
    ends = np.append(starts[1:], lo.size)
    return lo[starts], cm[ends - 1]


def merge_intervals(raw: Iterable[Interval | tuple[float, float]]) -> IntervalSet:
    """Canonicalize a finite interval list into a disjoint sorted IntervalSet.

    Overlapping or touching inputs merge; measure never exceeds the sum of
    input lengths.  Non-finite endpoints are rejected.
    """
    items = list(raw)
    if not items:
        return IntervalSet.empty()
    lo = np.empty(len(items), dtype=np.float64)
    hi = np.empty(len(items), dtype=np.float64)
    for i, it in enumerate(items):
        if isinstance(it, Interval):
            lo[i], hi[i] = it.lo, it.hi
        else:
            lo[i], hi[i] = float(it[0]), float(it[1])
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("non-finite interval endpoints")
    if not np.all(lo < hi):
        raise ValueError("each interval needs lo < hi")
    order = np.argsort(lo, kind="stable")
    mlo, mhi = _merge_sorted(lo[order], hi[order])
    return IntervalSet(mlo, mhi, _trusted=True)


def merge_interval_arrays(lo: np.ndarray, hi: np.ndarray) -> IntervalSet:
    """Array-input variant of merge_intervals (no per-element boxing)."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if lo.size == 0:
        return IntervalSet.empty()
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("non-finite interval endpoints")
    if not np.all(lo < hi):
        raise ValueError("each interval needs lo < hi")
    order = np.argsort(lo, kind="stable")
    mlo, mhi = _merge_sorted(lo[order], hi[order])
    return IntervalSet(mlo, mhi, _trusted=True)


def neighborhood(s: IntervalSet, r: float) -> IntervalSet:
    """Open r-neighborhood of an interval set, r > 0.

    Measure grows by at most 2r per component; gaps of width <= 2r close
    exactly (dyadic endpoints stay exact).
    """
    if not (r > 0):
        raise ValueError("neighborhood radius must be positive")
    if len(s) == 0:
        return IntervalSet.empty()
    mlo, mhi = _merge_sorted(s.lo - r, s.hi + r)
    return IntervalSet(mlo, mhi, _trusted=True)


# ---------------------------------------------------------------------------
# directions and lines


@dataclass(frozen=True)
class Direction:
    """Unit direction, stored as an angle in [0, 2*pi)."""

    theta: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta):
            raise ValueError("angle must be finite")
        t = math.fmod(self.theta, 2.0 * math.pi)
        if t < 0.0:
            t += 2.0 * math.pi
        object.__setattr__(self, "theta", t)

    @property
    def vector(self) -> tuple[float, float]:
        # cos(pi/2) rounds to 6.1e-17, which would tilt axis-parallel lines
        # off the grid; angles this close to a quarter turn mean the axis
        k = round(self.theta / (0.5 * math.pi))
        if abs(self.theta - k * (0.5 * math.pi)) < 1e-15:
            return [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][k % 4]
        return (math.cos(self.theta), math.sin(self.theta))

    @classmethod
    def from_vector(cls, x: float, y: float) -> "Direction":
        if x == 0.0 and y == 0.0:
            raise ValueError("zero vector has no direction")
        return cls(math.atan2(y, x))

    def perpendicular(self) -> "Direction":
        return Direction(self.theta + 0.5 * math.pi)

    def dot(self, x: float, y: float) -> float:
        c, s = self.vector
        return x * c + y * s


@dataclass(frozen=True)
class Line:
    """The line {p : p . omega = c}."""

    c: float
    omega: Direction

    def signed_offset(self, x: float, y: float) -> float:
        return self.omega.dot(x, y) - self.c


# ---------------------------------------------------------------------------
# dyadic squares and square sets


@dataclass(frozen=True)
class DyadicSquare:
    """Grid square [ix, ix+1] x [iy, iy+1] scaled by base**(-level)."""

    level: int
    ix: int
    iy: int
    base: int = 2

    def __post_init__(self) -> None:
        if self.level < 0 or self.base < 2:
            raise ValueError("level must be >= 0 and base >= 2")

    @property
    def side(self) -> float:
        return float(self.base) ** (-self.level)

    @property
    def x0(self) -> float:
        return self.ix * self.side

    @property
    def y0(self) -> float:
        return self.iy * self.side

    def center(self) -> tuple[float, float]:
        s = self.side
        return ((self.ix + 0.5) * s, (self.iy + 0.5) * s)

    def corners(self) -> list[tuple[float, float]]:
        s = self.side
        x0, y0 = self.ix * s, self.iy * s
        return [(x0, y0), (x0 + s, y0), (x0, y0 + s), (x0 + s, y0 + s)]

    def expanded3(self) -> tuple[float, float, float, float]:
        """Bounds (x0, y0, x1, y1) of the concentric square of triple side."""
        s = self.side
        return ((self.ix - 1) * s, (self.iy - 1) * s, (self.ix + 2) * s, (self.iy + 2) * s)


class SquareSet:
    """Finite set of distinct grid cells at one level of a base-b grid.

    Cells are stored canonically sorted by (ix, iy) so identical sets compare
    equal regardless of construction order.
    """

    __slots__ = ("base", "level", "_ix", "_iy")

    def __init__(self, base: int, level: int, ix: np.ndarray, iy: np.ndarray, *, _trusted: bool = False):
        if base < 2 or level < 0:
            raise ValueError("base must be >= 2 and level >= 0")
        ix = np.asarray(ix, dtype=np.int64)
        iy = np.asarray(iy, dtype=np.int64)
        if not _trusted:
            if ix.shape != iy.shape or ix.ndim != 1:
                raise ValueError("ix and iy must be 1-d arrays of equal length")
            order = np.lexsort((iy, ix))
            ix, iy = ix[order], iy[order]
            if ix.size > 1:
                same = (ix[1:] == ix[:-1]) & (iy[1:] == iy[:-1])
                if np.any(same):
                    raise ValueError("duplicate cells")
        self.base = int(base)
        self.level = int(level)
        self._ix = ix
        self._iy = iy

    @classmethod
    def from_cells(cls, base: int, level: int, cells: Iterable[tuple[int, int]]) -> "SquareSet":
        arr = np.array(sorted(set((int(a), int(b)) for a, b in cells)), dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        return cls(base, level, arr[:, 0], arr[:, 1], _trusted=True)

    @classmethod
    def empty(cls, base: int = 4, level: int = 0) -> "SquareSet":
        z = np.empty(0, dtype=np.int64)
        return cls(base, level, z, z, _trusted=True)

    @property
    def ix(self) -> np.ndarray:
        return self._ix

    @property
    def iy(self) -> np.ndarray:
        return self._iy

    @property
    def count(self) -> int:
        return int(self._ix.size)

    @property
    def side(self) -> float:
        return float(self.base) ** (-self.level)

    @property
    def area(self) -> float:
        return self.count * self.side * self.side

    def is_empty(self) -> bool:
        return self.count == 0

    def bounding_box(self) -> tuple[float, float, float, float]:
        if self.count == 0:
            return (0.0, 0.0, 0.0, 0.0)
        s = self.side
        return (
            float(self._ix.min()) * s,
            float(self._iy.min()) * s,
            float(self._ix.max() + 1) * s,
            float(self._iy.max() + 1) * s,
        )

    def centers(self) -> np.ndarray:
        s = self.side
        return np.stack([(self._ix + 0.5) * s, (self._iy + 0.5) * s], axis=1)

    def corner_points(self) -> np.ndarray:
        """All 4 corners of every cell, shape (4n, 2); duplicates not removed."""
        s = self.side
        x0 = self._ix * s
        y0 = self._iy * s
        xs = np.concatenate([x0, x0 + s, x0, x0 + s])
        ys = np.concatenate([y0, y0, y0 + s, y0 + s])
        return np.stack([xs, ys], axis=1)

    def cell_tuples(self) -> set[tuple[int, int]]:
        return set(zip(self._ix.tolist(), self._iy.tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SquareSet):
            return NotImplemented
        return (
            self.base == other.base
            and self.level == other.level
            and self._ix.shape == other._ix.shape
            and bool(np.all(self._ix == other._ix))
            and bool(np.all(self._iy == other._iy))
        )

    def __repr__(self) -> str:
        return f"SquareSet(base={self.base}, level={self.level}, cells={self.count})"

    def issubset(self, other: "SquareSet") -> bool:
        if self.base != other.base or self.level != other.level:
            raise ValueError("subset test requires matching base and level")
        return self.cell_tuples() <= other.cell_tuples()

    def to_json_obj(self) -> dict:
        return {
            "base": self.base,
            "level": self.level,
            "cells": [[int(a), int(b)] for a, b in zip(self._ix, self._iy)],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SquareSet":
        cells = [(int(c[0]), int(c[1])) for c in obj["cells"]]
        return cls.from_cells(int(obj["base"]), int(obj["level"]), cells)


# ---------------------------------------------------------------------------
# minimal-strip halfwidth


def _orient(o: tuple[float, float], a: tuple[float, float], b: tuple[float, float]) -> int:
    """Sign of the cross product (a-o) x (b-o); exact via rational fallback."""
    d = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    # error filter: products of exact differences round once each
    mags = (
        abs(a[0] - o[0]) * abs(b[1] - o[1]) + abs(a[1] - o[1]) * abs(b[0] - o[0])
    )
    if abs(d) > 4.0 * np.finfo(np.float64).eps * mags:
        return 1 if d > 0 else -1
    dd = Fraction(a[0]) * Fraction(b[1]) - Fraction(a[1]) * Fraction(b[0])
    dd -= Fraction(o[0]) * (Fraction(b[1]) - Fraction(a[1]))
    dd += Fraction(o[1]) * (Fraction(b[0]) - Fraction(a[0]))
    return (dd > 0) - (dd < 0)


def _convex_hull(points: np.ndarray) -> list[tuple[float, float]]:
    """Andrew monotone chain with exact orientation; collinear points dropped."""
    pts = sorted(set(map(tuple, points.tolist())))
    if len(pts) <= 2:
        return pts
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def min_strip_halfwidth(points: Sequence[tuple[float, float]] | np.ndarray) -> float:
    """Half the minimal width over all strips containing the points.

    Equals inf over lines of the max point-to-line distance.  The optimum is
    attained with the line parallel to a convex hull edge, so the search runs
    over hull edges only.  Collinear inputs give exactly 0.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise ValueError("expected a nonempty list of planar points")
    hull = _convex_hull(pts)
    if len(hull) <= 2:
        return 0.0
    h = np.asarray(hull, dtype=np.float64)
    nh = h.shape[0]
    best = math.inf
    for i in range(nh):
        x0, y0 = h[i]
        x1, y1 = h[(i + 1) % nh]
        ex, ey = x1 - x0, y1 - y0
        norm = math.hypot(ex, ey)
        # max distance of hull vertices to the edge-supported line
        cross = np.abs((h[:, 0] - x0) * ey - (h[:, 1] - y0) * ex)
        w = float(cross.max()) / norm
        if w < best:
            best = w
    return 0.5 * best

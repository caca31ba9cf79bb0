"""Lower bounds on the rectifiability constant by slope-bounded path search.

The quantity estimated: the best fraction of a window J that a Lipschitz
graph of slope at most M, thickened vertically by epsilon in a rotated
frame, can cover inside the set.  The search class is a quantized path
family (heights on a grid of step epsilon/2, slopes bounded through the
column width), optimized exactly by dynamic programming, so every returned
value is achieved by an explicit witness path and is therefore a certified
lower bound.  Upper bounds come only from the closed-form envelopes
rect_upper_twoproj and rect_upper_beta.

Column credit rule: a column counts as covered only when both its endpoint
heights lie in the same merged admissible band, which for frame-aligned
cells certifies full-column coverage exactly; for rotated frames the bands
come from inscribed sub-squares and under-report, keeping the bound valid.
Band membership carries a 1e-12 absolute float tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import maximum_filter1d

from .errors import BudgetError, ConfigError
from .geometry import Direction, Interval, SquareSet

DEFAULT_STATE_BUDGET = 60_000_000

__all__ = [
    "LipschitzPath",
    "RectQuery",
    "RectEstimate",
    "frame_from_angle",
    "rect_lower_dp",
    "rect_lower_sweep",
    "rect_upper_twoproj",
    "rect_upper_beta",
]


def frame_from_angle(theta: float) -> tuple[Direction, Direction]:
    """Orthonormal frame at angle theta; exact axis vectors at multiples of pi/2."""
    th = float(theta)
    k = round(th / (math.pi / 2))
    if abs(th - k * (math.pi / 2)) < 1e-15:
        c, s = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][k % 4]
        return (Direction.from_vector(c, s), Direction.from_vector(-s, c))
    return (Direction(th), Direction(th + math.pi / 2))


def _check_frame(frame) -> tuple[Direction, Direction]:
    try:
        omega1, omega2 = frame
    except (TypeError, ValueError):
        raise ConfigError("frame must be a pair of Directions")
    if not isinstance(omega1, Direction) or not isinstance(omega2, Direction):
        raise ConfigError("frame must be a pair of Directions")
    c1, s1 = omega1.vector
    c2, s2 = omega2.vector
    if abs(c1 * c2 + s1 * s2) > 1e-12 or abs(c1 * s2 - s1 * c2 - 1.0) > 1e-12:
        raise ConfigError("frame Directions must be orthonormal (right-handed) within 1e-12")
    return omega1, omega2


@dataclass(frozen=True)
class LipschitzPath:
    """Heights of a slope-bounded graph over an even grid in a rotated frame.

    heights[i] sits at frame coordinate origin + i*grid_step along omega1;
    the world point is u*omega1 + v*omega2.  The slope bound is declared by
    the query that produced the path, not stored here; max_slope reports the
    realized one.
    """

    frame: tuple[Direction, Direction]
    grid_step: float
    heights: tuple[float, ...]
    origin: float = 0.0

    def __post_init__(self):
        _check_frame(self.frame)
        if not (self.grid_step > 0.0) or not math.isfinite(self.grid_step):
            raise ConfigError(f"grid_step must be positive, got {self.grid_step!r}")
        object.__setattr__(self, "heights", tuple(float(v) for v in self.heights))
        if len(self.heights) < 2:
            raise ConfigError("a path needs at least 2 height nodes")

    @property
    def max_slope(self) -> float:
        h = self.heights
        return max(abs(h[i + 1] - h[i]) for i in range(len(h) - 1)) / self.grid_step

    def points_world(self) -> np.ndarray:
        omega1, omega2 = self.frame
        c1, s1 = omega1.vector
        c2, s2 = omega2.vector
        u = self.origin + self.grid_step * np.arange(len(self.heights))
        v = np.array(self.heights)
        return np.stack([u * c1 + v * c2, u * s1 + v * s2], axis=1)


@dataclass(frozen=True)
class RectQuery:
    epsilon: float
    r: float
    M: float
    J: Interval

    def __post_init__(self):
        for name in ("epsilon", "r", "M"):
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise ConfigError(f"{name} must be positive and finite, got {v!r}")
        if self.J.length < self.r * (1.0 - 1e-12):
            raise ConfigError(
                f"window J has length {self.J.length!r} below the minimum scale {self.r!r}"
            )


@dataclass(frozen=True)
class RectEstimate:
    lower: float
    witness: LipschitzPath | None
    frames_searched: int
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not (-1e-12 <= self.lower <= 1.0 + 1e-12):
            raise ValueError(f"lower bound {self.lower!r} outside [0, 1]")


def _cell_bands(E: SquareSet, omega1: Direction, omega2: Direction, eps: float):
    """Per-cell admissible (u-span, v-band): exact for frame-aligned cells,
    inscribed-square under-approximation otherwise."""
    c1, s1 = omega1.vector
    c2, s2 = omega2.vector
    side = E.side
    x0 = E.ix * side
    y0 = E.iy * side
    if c1 == 0.0 or s1 == 0.0:
        base_u = x0 * c1 + y0 * s1
        ulo = base_u + side * (min(c1, 0.0) + min(s1, 0.0))
        uhi = base_u + side * (max(c1, 0.0) + max(s1, 0.0))
        base_v = x0 * c2 + y0 * s2
        vlo = base_v + side * (min(c2, 0.0) + min(s2, 0.0)) - eps
        vhi = base_v + side * (max(c2, 0.0) + max(s2, 0.0)) + eps
    else:
        cu = (x0 + side * 0.5) * c1 + (y0 + side * 0.5) * s1
        cv = (x0 + side * 0.5) * c2 + (y0 + side * 0.5) * s2
        ih = side / (2.0 * (abs(c1) + abs(s1)))
        ulo = cu - ih
        uhi = cu + ih
        vlo = cv - ih - eps
        vhi = cv + ih + eps
    return ulo, uhi, vlo, vhi


def _merge_bands(bl: np.ndarray, bh: np.ndarray):
    order = np.argsort(bl, kind="stable")
    bl = bl[order]
    bh = bh[order]
    out = []
    cur_lo = bl[0]
    cur_hi = bh[0]
    for i in range(1, bl.size):
        if bl[i] > cur_hi:
            out.append((cur_lo, cur_hi))
            cur_lo, cur_hi = bl[i], bh[i]
        else:
            if bh[i] > cur_hi:
                cur_hi = bh[i]
    out.append((cur_lo, cur_hi))
    return out


def _flat_witness(frame, J: Interval, resolution: int, height: float = 0.0) -> LipschitzPath:
    h = J.length / resolution
    return LipschitzPath(frame, h, (height,) * (resolution + 1), origin=J.lo)


def rect_lower_dp(
    E: SquareSet,
    q: RectQuery,
    frame,
    resolution: int,
    *,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> RectEstimate:
    """Exact optimum of the column-coverage objective over the quantized path class.

    Returns a certified lower bound for the given frame together with the
    witness path achieving it.  Ties break toward the smallest height index,
    so the witness is deterministic.
    """
    omega1, omega2 = _check_frame(frame)
    if resolution < 2:
        raise ConfigError(f"resolution must be >= 2, got {resolution}")
    if E.count == 0:
        return RectEstimate(0.0, _flat_witness((omega1, omega2), q.J, resolution), 1)
    ulo, uhi, vlo, vhi = _cell_bands(E, omega1, omega2, q.epsilon)
    h = q.J.length / resolution
    qs = q.epsilon / 2.0
    vmin = math.floor(float(vlo.min()) / qs) * qs
    vmax = float(vhi.max())
    S = int(math.ceil((vmax - vmin) / qs)) + 1
    entries = (resolution + 1) * S
    if entries > state_budget:
        raise BudgetError(
            f"path search needs {entries} node states "
            f"({entries * 4 / 1e6:.0f} MB); budget is {state_budget} "
            "(raise state_budget or lower resolution)"
        )
    K = int((q.M * h) / qs + 1e-12)
    size = 2 * K + 1

    col_bands: list[list[tuple[int, int]]] = []
    for i in range(resolution):
        ua = q.J.lo + i * h
        ub = q.J.lo + (i + 1) * h
        mask = (ulo <= ua) & (uhi >= ub)
        if not mask.any():
            col_bands.append([])
            continue
        bands = []
        for blo, bhi in _merge_bands(vlo[mask], vhi[mask]):
            b0 = max(0, int(math.ceil((blo - vmin) / qs - 1e-12)))
            b1 = min(S - 1, int(math.floor((bhi - vmin) / qs + 1e-12)))
            if b0 <= b1:
                bands.append((b0, b1))
        col_bands.append(bands)

    NEG = -(2**30)
    dp = np.zeros((resolution + 1, S), dtype=np.int32)
    for i in range(resolution):
        prev = dp[i]
        new = maximum_filter1d(prev, size=size, mode="constant", cval=NEG)
        for b0, b1 in col_bands[i]:
            seg = maximum_filter1d(prev[b0 : b1 + 1], size=size, mode="constant", cval=NEG)
            np.maximum(new[b0 : b1 + 1], seg + 1, out=new[b0 : b1 + 1])
        dp[i + 1] = new

    final = dp[resolution]
    best = int(final.max())
    v = int(np.flatnonzero(final == best)[0])
    states = [v]
    for i in range(resolution - 1, -1, -1):
        prev = dp[i]
        target = dp[i + 1][v]
        bands = col_bands[i]
        found = -1
        for u in range(max(0, v - K), min(S - 1, v + K) + 1):
            credit = 0
            for b0, b1 in bands:
                if b0 <= u <= b1 and b0 <= v <= b1:
                    credit = 1
                    break
            if prev[u] + credit == target:
                found = u
                break
        v = found if found >= 0 else max(0, v - K)
        states.append(v)
    states.reverse()
    heights = tuple(vmin + s * qs for s in states)
    witness = LipschitzPath((omega1, omega2), h, heights, origin=q.J.lo)
    return RectEstimate(min(1.0, best / resolution), witness, 1)


def rect_lower_sweep(
    E: SquareSet,
    q: RectQuery,
    frame_count: int,
    resolution: int,
    *,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> RectEstimate:
    """Best rect_lower_dp over a uniform frame grid and sliding length-r windows.

    Frames sample theta in [0, pi/2); windows of length exactly r slide by
    r/2 through q.J.  Longer windows are not searched; this restriction is
    recorded in the result notes.
    """
    if frame_count < 1:
        raise ConfigError(f"frame_count must be >= 1, got {frame_count}")
    notes = (
        "windows restricted to length exactly r (heuristic: longer windows "
        "are approximated by unions of length-r ones)",
        "frame grid over [0, pi/2) exploits the quarter-turn symmetry class",
    )
    windows = []
    a = q.J.lo
    while a + q.r <= q.J.hi + 1e-12:
        windows.append((a, min(a + q.r, q.J.hi)))
        a += q.r / 2.0
    if not windows or windows[-1][1] < q.J.hi - 1e-12:
        windows.append((q.J.hi - q.r, q.J.hi))
    best: RectEstimate | None = None
    for k in range(frame_count):
        frame = frame_from_angle(k * (math.pi / 2) / frame_count)
        for wa, wb in windows:
            sub = RectQuery(q.epsilon, q.r, q.M, Interval(wa, wb))
            est = rect_lower_dp(E, sub, frame, resolution, state_budget=state_budget)
            if best is None or est.lower > best.lower:
                best = est
    assert best is not None
    return RectEstimate(best.lower, best.witness, frame_count, notes)


def rect_upper_twoproj(
    m: int, l: int, M: float, *, C: float = 1.0, alpha: float = 0.01, c_hyp: float = 1.0
) -> float:
    """Closed-form small-projection upper envelope C*log(m-l+1)^(-alpha).

    The envelope's validity regime needs 1 <= M <= c_hyp*log(m-l+1)^alpha;
    outside it a warning is issued and the value still returned.
    """
    if not (m > l >= 0):
        raise ConfigError(f"need m > l >= 0, got m={m}, l={l}")
    lg = math.log(m - l + 1)
    hyp_hi = c_hyp * lg**alpha
    if not (1.0 <= M <= hyp_hi):
        warnings.warn(
            f"slope bound M={M} outside the envelope's regime [1, {hyp_hi:.4g}]; "
            "value returned anyway",
            RuntimeWarning,
            stacklevel=2,
        )
    return C * lg ** (-alpha)


def rect_upper_beta(m: int, l: int, M: float, *, C: float = 1.0) -> float:
    """Closed-form flatness-counting upper envelope C*(1+M)/(m-l)."""
    if not (m > l):
        raise ConfigError(f"need m > l, got m={m}, l={l}")
    return C * (1.0 + M) / (m - l)

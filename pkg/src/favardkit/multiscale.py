"""Greedy construction and audit of descending scale schedules.

A schedule is a chain of scale pairs 0 < r_{N,-} <= r_{N,+} <= ... <=
r_{1,+} <= 1 with a factor-2 separation between consecutive levels.  Both
builders restrict candidates to negative powers of two, record every
inequality they checked as a certificate with its measured slack, and leave
re-verification to an independent checker pass that recomputes the chain
and separation conditions from the stored numbers alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConfigError, HypothesisFailure

LOG_STAR_SLACK = 1e-9

__all__ = [
    "CheckRecord",
    "ScaleSchedule",
    "BoundReport",
    "PigeonholeResult",
    "pigeonhole",
    "log_star",
    "build_schedule_twoproj",
    "build_schedule_main",
    "favar_bound",
]


@dataclass(frozen=True)
class CheckRecord:
    level: int
    name: str
    lhs: float
    rhs: float
    note: str = ""

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs


@dataclass(frozen=True)
class ScaleSchedule:
    mode: str
    pairs: tuple[tuple[float, float], ...]
    certificates: tuple[CheckRecord, ...]

    @property
    def N(self) -> int:
        return len(self.pairs)

    def verify(self) -> list[str]:
        """Independent audit: chain ordering, separation, dyadic scales,
        and every stored certificate; returns human-readable violations."""
        bad = []
        prev_minus = 1.0
        for i, (rm, rp) in enumerate(self.pairs, start=1):
            if not (0.0 < rm <= rp <= 1.0):
                bad.append(f"level {i}: pair ({rm}, {rp}) breaks 0 < r- <= r+ <= 1")
            if i > 1 and rp > prev_minus / 2.0:
                bad.append(f"level {i}: r+ = {rp} exceeds half the previous r- = {prev_minus}")
            if self.mode == "twoproj":
                for r in (rm, rp):
                    m, e = math.frexp(r)
                    if m != 0.5:
                        bad.append(f"level {i}: scale {r} is not a power of two")
            prev_minus = rm
        for rec in self.certificates:
            if not rec.ok:
                bad.append(
                    f"certificate {rec.name} at level {rec.level}: {rec.lhs} > {rec.rhs}"
                )
        return bad

    def to_json_obj(self) -> dict:
        return {
            "mode": self.mode,
            "pairs": [[rm, rp] for rm, rp in self.pairs],
            "certificates": [
                {
                    "level": c.level,
                    "name": c.name,
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "slack": c.slack,
                    "ok": c.ok,
                    "note": c.note,
                }
                for c in self.certificates
            ],
        }


@dataclass(frozen=True)
class BoundReport:
    L: float
    N: int
    alpha: float
    C: float
    predicted: float


@dataclass(frozen=True)
class PigeonholeResult:
    n: int
    m: int
    gap_mass: float

    def __iter__(self):
        return iter((self.n, self.m, self.gap_mass))


def pigeonhole(masses, eps: float) -> PigeonholeResult:
    """Flattest window of relative width eps in a nondecreasing mass profile.

    Scans all windows of index width ceil(eps*N) and returns the first one
    minimizing the mass gap.  The minimum provably never exceeds
    4*eps*masses[N]: disjoint windows partition the total rise, and with
    eps >= 1/N there are at least 1/(4*eps) of them.
    """
    vals = [float(v) for v in masses]
    N = len(vals) - 1
    if N < 2:
        raise ConfigError(f"need at least 3 mass values, got {len(vals)}")
    for i in range(N):
        if vals[i + 1] < vals[i]:
            raise ConfigError(f"masses must be nondecreasing; drop at index {i + 1}")
    if not (1.0 / N - 1e-12 <= eps <= 0.5 + 1e-12):
        raise ConfigError(f"eps {eps!r} outside [1/N, 1/2] for N={N}")
    k = math.ceil(eps * N - LOG_STAR_SLACK)
    k = max(1, min(k, N))
    best_n = 0
    best_gap = vals[k] - vals[0]
    for i in range(1, N - k + 1):
        gap = vals[i + k] - vals[i]
        if gap < best_gap:
            best_gap = gap
            best_n = i
    return PigeonholeResult(best_n, best_n + k, best_gap)


def log_star(y: float) -> int:
    """Number of natural-log applications taking y down to at most 1.

    A 1e-9 additive slack on the stopping test absorbs float rounding at
    the exact fixed points (1, e, e^e, ...).
    """
    y = float(y)
    if not (y > 0.0) or not math.isfinite(y):
        raise ConfigError(f"log_star needs a positive finite argument, got {y!r}")
    count = 0
    while y > 1.0 + LOG_STAR_SLACK:
        y = math.log(y)
        count += 1
        if count > 100:
            raise RuntimeError("iterated log failed to descend; argument corrupt")
    return count


def _dyadic(j: int) -> float:
    return math.ldexp(1.0, -j)


def build_schedule_twoproj(
    nbhd: Callable[[float], tuple[float, float]],
    r_min: float,
    N_target: int = 64,
) -> ScaleSchedule:
    """Greedy chain of power-of-two scales where both projection
    thicknesses at each new scale fit under the previous scale.

    nbhd(r) must return the two neighborhood measures at radius r and be
    nondecreasing in r, so the first passing candidate in the descending
    scan is the largest admissible one.  Fewer than 2 achievable levels is
    reported as a failure naming the first blocked radius.
    """
    if not (0.0 < r_min < 0.5):
        raise ConfigError(f"r_min must lie in (0, 1/2), got {r_min!r}")
    if N_target < 2:
        raise ConfigError(f"N_target must be >= 2, got {N_target}")
    j_min = int(math.floor(-math.log2(r_min) + 1e-9))
    pairs = [(0.5, 0.5)]
    certs = [CheckRecord(1, "anchor", 0.5, 0.5, note="top scale fixed at 1/2")]
    j_prev = 1
    blocked_at = None
    while len(pairs) < N_target:
        accepted = False
        for j in range(j_prev + 1, j_min + 1):
            r = _dyadic(j)
            m1, m2 = nbhd(r)
            bound = _dyadic(j_prev)
            if m1 <= bound and m2 <= bound:
                level = len(pairs) + 1
                certs.append(
                    CheckRecord(level, "proj-thickness-1", m1, bound, note=f"r = 2^-{j}")
                )
                certs.append(
                    CheckRecord(level, "proj-thickness-2", m2, bound, note=f"r = 2^-{j}")
                )
                certs.append(
                    CheckRecord(level, "separation", r, bound / 2.0, note=f"r = 2^-{j}")
                )
                pairs.append((r, r))
                j_prev = j
                accepted = True
                break
            if blocked_at is None:
                blocked_at = r
        if not accepted:
            break
    if len(pairs) < 2:
        raise HypothesisFailure(
            f"no second scale admissible above r_min={r_min}; "
            f"first blocked candidate r={blocked_at}"
        )
    return ScaleSchedule("twoproj", tuple(pairs), tuple(certs))


def build_schedule_main(
    content: Callable[[float, float], float],
    rect: Callable[[float, float, float], float],
    L: float,
    N_target: int,
    alpha: float,
    *,
    C: float = 1.0,
    max_exponent: int = 40,
) -> tuple[ScaleSchedule, BoundReport]:
    """Greedy dyadic schedule enforcing content, separation, and low
    rectifiability at every step.

    Each accepted scale r satisfies content(r, r) <= L, r <= previous/2,
    and rect(r, previous, 1/previous) <= N_target**(-alpha).  The rect
    oracle is a certified lower bound standing in for the true constant,
    which is flagged in the certificates.  Falling short of N_target raises
    with the inequality that blocked the last candidate.
    """
    if not (L > 0.0):
        raise ConfigError(f"L must be positive, got {L!r}")
    if N_target < 1:
        raise ConfigError(f"N_target must be >= 1, got {N_target}")
    if not (0.0 < alpha <= 1.0):
        raise ConfigError(f"alpha must lie in (0, 1], got {alpha!r}")
    threshold = float(N_target) ** (-alpha)
    pairs: list[tuple[float, float]] = []
    certs: list[CheckRecord] = []
    j_prev = 0
    last_block = "content"
    for _ in range(N_target):
        accepted = False
        for j in range(j_prev + 1, max_exponent + 1):
            r = _dyadic(j)
            level = len(pairs) + 1
            c_val = content(r, r)
            if c_val > L:
                last_block = "content"
                continue
            trial = [CheckRecord(level, "content", c_val, L, note=f"r = 2^-{j}")]
            if pairs:
                r_prev = pairs[-1][0]
                trial.append(CheckRecord(level, "separation", r, r_prev / 2.0))
                r_val = rect(r, r_prev, 1.0 / r_prev)
                if r > r_prev / 2.0:
                    last_block = "separation"
                    continue
                if r_val > threshold:
                    last_block = "rect"
                    continue
                trial.append(
                    CheckRecord(
                        level,
                        "rect",
                        r_val,
                        threshold,
                        note="lower-bound oracle substituted for the true constant",
                    )
                )
            certs.extend(trial)
            pairs.append((r, r))
            j_prev = j
            accepted = True
            break
        if not accepted:
            raise HypothesisFailure(
                f"schedule stalled at {len(pairs)} of {N_target} levels; "
                f"blocking inequality: {last_block}"
            )
    schedule = ScaleSchedule("pairs", tuple(pairs), tuple(certs))
    N = schedule.N
    report = BoundReport(L, N, alpha, C, C * float(N) ** (-alpha) * L)
    return schedule, report


def favar_bound(n: int, alpha: float, *, C: float = 1.0) -> float:
    """Iterated-log decay envelope C * log_star(n)**(-alpha); the zero
    iterated log (n = 1 would give it, excluded by the precondition) is
    guarded to return C."""
    if n < 2:
        raise ConfigError(f"need n >= 2, got {n}")
    if not (alpha > 0.0):
        raise ConfigError(f"alpha must be positive, got {alpha!r}")
    ls = log_star(float(n))
    if ls == 0:
        return C
    return C * float(ls) ** (-alpha)

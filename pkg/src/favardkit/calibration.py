"""Write-once store for desk-scale calibrated constants.

Each named constant is measured once by a fixed, seeded procedure and then
frozen together with the dataset name and the parameters of the producing
run.  A second calibration of the same constant is rejected instead of
silently overwritten; delete the store file to recalibrate deliberately.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

KNOWN_CONSTANTS = (
    "C_favard_lower",
    "C_rect_twoproj",
    "C_rect_beta",
    "C_pigeonhole",
    "C_favar",
)

__all__ = ["CalibrationRecord", "measure_constant", "KNOWN_CONSTANTS"]


@dataclass
class CalibrationRecord:
    constants: dict[str, dict] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str) -> "CalibrationRecord":
        if not os.path.exists(path):
            return cls()
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(dict(obj.get("constants", {})))

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"constants": self.constants}, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def get(self, name: str, default: float | None = None) -> float | None:
        entry = self.constants.get(name)
        return float(entry["value"]) if entry is not None else default

    def set_once(self, name: str, value: float, dataset: str, run: dict) -> None:
        if name in self.constants:
            prev = self.constants[name]
            raise ConfigError(
                f"constant {name} already calibrated to {prev['value']} "
                f"on dataset {prev['dataset']}; calibration is write-once"
            )
        self.constants[name] = {"value": float(value), "dataset": dataset, "run": dict(run)}


def measure_constant(name: str, dataset: str, *, alpha: float = 0.25, tol: float = 1e-3):
    """Run the fixed measurement procedure for one constant.

    Returns (value, run_params).  Procedures are deterministic: fixed seeds,
    fixed instance sizes, and they embed their parameters in run_params.
    """
    if name == "C_pigeonhole":
        from .multiscale import pigeonhole

        rng = np.random.default_rng(0)
        worst = 0.0
        trials = 2000
        for _ in range(trials):
            N = int(rng.integers(2, 65))
            masses = np.cumsum(rng.random(N + 1))
            eps = float(rng.uniform(1.0 / N, 0.5))
            res = pigeonhole(masses.tolist(), eps)
            worst = max(worst, res.gap_mass / (eps * float(masses[-1])))
        return worst, {"seed": 0, "trials": trials, "max_N": 64}

    if name == "C_favard_lower":
        from .projection import favard_table

        table = favard_table(4, tol)
        value = min(row.n * row.value for row in table.rows if row.n >= 1)
        return value, {"dataset": dataset, "n_max": 4, "tol": tol}

    if name in ("C_rect_twoproj", "C_rect_beta"):
        from .cantor import cantor_squares
        from .geometry import Interval
        from .rectifiability import RectQuery, rect_lower_sweep

        m, l, M = 2, 0, 1.0
        E = cantor_squares(m)
        q = RectQuery(4.0**-m, 1.0, M, Interval(0.0, 1.0))
        lower = rect_lower_sweep(E, q, 4, 4**m).lower
        run = {"dataset": dataset, "m": m, "l": l, "M": M, "frames": 4, "resolution": 4**m}
        if name == "C_rect_twoproj":
            a = 0.01
            run["alpha"] = a
            return lower * math.log(m - l + 1) ** a, run
        return lower * (m - l) / (1.0 + M), run

    if name == "C_favar":
        from .multiscale import log_star
        from .projection import favard_table

        table = favard_table(4, tol)
        value = max(
            row.value * max(log_star(float(row.n)), 1) ** alpha
            for row in table.rows
            if row.n >= 1
        )
        return value, {"dataset": dataset, "n_max": 4, "tol": tol, "alpha": alpha}

    raise ConfigError(f"unknown constant {name!r}; known: {', '.join(KNOWN_CONSTANTS)}")

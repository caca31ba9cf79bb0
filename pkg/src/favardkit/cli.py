"""Batch command line driver.

Every run is reproducible: outputs embed the package version, seed, and
tolerance parameters, never timestamps, and the computed bytes do not
depend on the thread count (worker threads only split identical panel
evaluations).  Failures print a machine-readable error object and map to
stable exit codes: 2 for configuration errors, 3 for exhausted budgets,
4 for violated mathematical hypotheses.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import BudgetError, ConfigError, HypothesisFailure
from .geometry import Direction, Interval, Line, SquareSet, neighborhood

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_HYPOTHESIS = 4


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so errors reach the JSON path."""

    def error(self, message):
        raise ConfigError(message)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: str, meta: dict, header: list[str], rows) -> None:
    lines = [f"# {k}={_fmt(v)}" for k, v in meta.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _write_json(path: str, meta: dict, payload: dict) -> None:
    obj = {"meta": meta, **payload}
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _meta(args, command: str, **extra) -> dict:
    meta = {
        "version": __version__,
        "command": command,
        "seed": args.seed,
        "alpha": args.alpha,
    }
    meta.update(extra)
    return meta


def _dataset(args) -> SquareSet:
    kind = args.set
    if kind == "cantor":
        from .cantor import cantor_squares

        return cantor_squares(args.n)
    if kind == "boundary":
        from .cantor import boundary_squares

        depth = args.depth if args.depth is not None else args.n
        return boundary_squares(args.n, depth)
    if kind == "squares":
        if not args.file:
            raise ConfigError("--set squares needs --file pointing at a cell JSON")
        with open(args.file, "r", encoding="utf-8") as fh:
            return SquareSet.from_json_obj(json.load(fh))
    raise ConfigError(f"unknown dataset kind {kind!r}")


def _add_dataset_flags(p) -> None:
    p.add_argument("--set", default="cantor", choices=["cantor", "boundary", "squares"])
    p.add_argument("--n", type=int, default=2, help="generation index for grid datasets")
    p.add_argument("--depth", type=int, default=None, help="cell level for boundary sets")
    p.add_argument("--file", default=None, help="cell JSON path for --set squares")


def build_parser() -> _Parser:
    top = _Parser(prog="favardkit", description=__doc__)
    top.add_argument("--threads", type=int, default=1)
    top.add_argument("--seed", type=int, default=0)
    top.add_argument("--alpha", type=float, default=0.25)
    top.add_argument("--config", default=None, help="JSON file of default flag values")
    top.add_argument("--oracle", action="store_true", help="add Monte Carlo cross-checks")
    top.add_argument("--calibration", default="calibration.json")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cantor", help="materialize a dataset's cells")
    _add_dataset_flags(p)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", default=None)

    p = sub.add_parser("favard", help="certified average projection length")
    _add_dataset_flags(p)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--table", type=int, default=None, metavar="N_MAX")
    p.add_argument("--csv", default=None)
    p.add_argument("--json", default=None)

    p = sub.add_parser("project", help="exact shadow of a dataset in one direction")
    _add_dataset_flags(p)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", default=None)

    p = sub.add_parser("beta", help="flatness square-function over binary squares")
    _add_dataset_flags(p)
    p.add_argument("--max-level", type=int, default=6)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", default=None)

    p = sub.add_parser("rect", help="certified graph-coverage lower bound")
    _add_dataset_flags(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--M", type=float, default=1.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--frames", type=int, default=8)
    p.add_argument("--resolution", type=int, default=128)
    p.add_argument("--j-lo", type=float, default=0.0)
    p.add_argument("--j-hi", type=float, default=1.0)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", default=None)

    p = sub.add_parser("scales", help="greedy descending scale schedules")
    _add_dataset_flags(p)
    p.add_argument("--mode", choices=["twoproj", "main"], default="twoproj")
    p.add_argument("--rmin", type=float, default=1e-9)
    p.add_argument("--L", type=float, default=8.0)
    p.add_argument("--n-target", type=int, default=2)
    p.add_argument("--frames", type=int, default=4)
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--json", default=None)

    p = sub.add_parser("diag", help="pointwise mass diagnostics")
    _add_dataset_flags(p)
    p.add_argument("--op", choices=["sector", "line", "strip", "density"], default="sector")
    p.add_argument("--x", default="0.5,0.5", help="center point as x,y")
    p.add_argument("--omega", type=float, default=0.0, help="direction angle")
    p.add_argument("--r-inner", type=float, default=0.0)
    p.add_argument("--r-outer", type=float, default=0.5)
    p.add_argument("--M", type=float, default=2.0)
    p.add_argument("--line-c", type=float, default=0.0)
    p.add_argument("--sep", type=float, default=0.25)
    p.add_argument("--width", type=float, default=0.25)
    p.add_argument("--j-lo", type=float, default=0.0)
    p.add_argument("--j-hi", type=float, default=1.0)
    p.add_argument("--json", default=None)

    p = sub.add_parser("pipeline", help="summary table of lengths and bounds")
    p.add_argument("--full", action="store_true")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", default=None)

    p = sub.add_parser("calibrate", help="measure and freeze a named constant")
    p.add_argument("--constant", required=True)
    p.add_argument("--dataset", default="cantor")
    p.add_argument("--tol", type=float, default=1e-3)
    return top


def _apply_config_file(args) -> None:
    if not args.config:
        return
    with open(args.config, "r", encoding="utf-8") as fh:
        overrides = json.load(fh)
    if not isinstance(overrides, dict):
        raise ConfigError("--config file must hold a JSON object of flag values")
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"config key {key!r} is not a known flag")
        setattr(args, attr, value)


def _cmd_cantor(args) -> int:
    E = _dataset(args)
    meta = _meta(args, "cantor", set=args.set, n=args.n, level=E.level, base=E.base)
    rows = list(zip(E.ix.tolist(), E.iy.tolist()))
    if args.csv:
        _write_csv(args.csv, meta, ["ix", "iy"], rows)
    if args.json:
        _write_json(args.json, meta, {"squares": E.to_json_obj()})
    print(f"{args.set} n={args.n}: {E.count} cells at level {E.level} (base {E.base})", file=sys.stderr)
    return EXIT_OK


def _cmd_favard(args) -> int:
    from .projection import favard, favard_table

    E = _dataset(args)
    meta = _meta(args, "favard", set=args.set, n=args.n, tol=args.tol)
    if args.table is not None:
        table = favard_table(args.table, args.tol, threads=args.threads)
        meta["tail_exponent"] = table.tail_exponent
        meta["tail_r2"] = table.tail_r2
        if args.csv:
            csv_rows = table.to_csv_rows()
            _write_csv(args.csv, meta, list(csv_rows[0]), csv_rows[1:])
        if args.json:
            _write_json(
                args.json,
                meta,
                {
                    "rows": [
                        {
                            "n": r.n,
                            "value": r.value,
                            "error_bound": r.error_bound,
                            "angles": r.angle_count,
                        }
                        for r in table.rows
                    ]
                },
            )
        last = table.rows[-1]
        print(
            f"table up to n={args.table}: last value {last.value:.6f} "
            f"+- {last.error_bound:.2e}, tail exponent {table.tail_exponent:.3f}",
            file=sys.stderr,
        )
        return EXIT_OK
    est = favard(E, args.tol, threads=args.threads)
    meta["value"] = est.value
    meta["error_bound"] = est.error_bound
    if args.csv:
        _write_csv(
            args.csv,
            meta,
            ["theta", "measure"],
            [(t, m) for t, m in est.per_angle],
        )
    if args.json:
        _write_json(
            args.json,
            meta,
            {"value": est.value, "error_bound": est.error_bound, "angles": est.angle_count},
        )
    print(f"value {est.value:.8f} +- {est.error_bound:.2e} ({est.angle_count} angles)", file=sys.stderr)
    return EXIT_OK


def _cmd_project(args) -> int:
    from .projection import project

    E = _dataset(args)
    shadow = project(E, args.theta)
    meta = _meta(args, "project", set=args.set, n=args.n, theta=args.theta)
    meta["measure"] = shadow.measure
    if args.csv:
        _write_csv(args.csv, meta, ["lo", "hi"], zip(shadow.lo.tolist(), shadow.hi.tolist()))
    if args.json:
        _write_json(args.json, meta, {"intervals": shadow.to_json_obj(), "measure": shadow.measure})
    print(f"shadow at theta={args.theta}: measure {shadow.measure:.8f}, {len(shadow)} intervals", file=sys.stderr)
    return EXIT_OK


def _cmd_beta(args) -> int:
    from .beta import jones_sum

    E = _dataset(args)
    js = jones_sum(E, args.max_level)
    meta = _meta(args, "beta", set=args.set, n=args.n, max_level=args.max_level)
    meta["total"] = js.total
    if args.csv:
        _write_csv(args.csv, meta, ["level", "partial"], js.per_level)
    if args.json:
        _write_json(
            args.json,
            meta,
            {
                "total": js.total,
                "per_level": [[lv, p] for lv, p in js.per_level],
                "truncation_level": js.truncation_level,
            },
        )
    print(f"square-function total {js.total:.6f} through level {js.truncation_level}", file=sys.stderr)
    return EXIT_OK


def _cmd_rect(args) -> int:
    from .rectifiability import RectQuery, rect_lower_sweep

    E = _dataset(args)
    q = RectQuery(args.eps, args.r, args.M, Interval(args.j_lo, args.j_hi))
    est = rect_lower_sweep(E, q, args.frames, args.resolution)
    meta = _meta(
        args,
        "rect",
        set=args.set,
        n=args.n,
        eps=args.eps,
        M=args.M,
        r=args.r,
        frames=args.frames,
        resolution=args.resolution,
    )
    meta["lower"] = est.lower
    w = est.witness
    if args.json:
        _write_json(
            args.json,
            meta,
            {
                "lower": est.lower,
                "frames_searched": est.frames_searched,
                "notes": list(est.notes),
                "witness": {
                    "theta": w.frame[0].theta,
                    "origin": w.origin,
                    "grid_step": w.grid_step,
                    "heights": list(w.heights),
                    "max_slope": w.max_slope,
                },
            },
        )
    if args.csv:
        rows = [(i, w.origin + i * w.grid_step, h) for i, h in enumerate(w.heights)]
        _write_csv(args.csv, meta, ["i", "u", "height"], rows)
    print(f"certified lower bound {est.lower:.6f} over {est.frames_searched} frames", file=sys.stderr)
    return EXIT_OK


def _cmd_scales(args) -> int:
    E = _dataset(args)
    meta = _meta(args, "scales", set=args.set, n=args.n, mode=args.mode)
    if args.mode == "twoproj":
        from .multiscale import build_schedule_twoproj
        from .projection import project

        P1 = project(E, 0.0)
        P2 = project(E, math.pi / 2)

        def nbhd(r: float):
            return (neighborhood(P1, r).measure, neighborhood(P2, r).measure)

        schedule = build_schedule_twoproj(nbhd, args.rmin)
        payload = {"schedule": schedule.to_json_obj(), "violations": schedule.verify()}
        print(f"twoproj schedule: {schedule.N} levels down to {schedule.pairs[-1][0]:.3e}", file=sys.stderr)
    else:
        from .cantor import spherical_content_upper
        from .multiscale import build_schedule_main
        from .rectifiability import RectQuery, rect_lower_sweep

        def content(rm: float, rp: float) -> float:
            return spherical_content_upper(E, rm, rp)

        def rect(eps: float, r: float, M: float) -> float:
            q = RectQuery(eps, r, M, Interval(0.0, 1.0))
            return rect_lower_sweep(E, q, args.frames, args.resolution).lower

        schedule, report = build_schedule_main(
            content, rect, args.L, args.n_target, args.alpha
        )
        payload = {
            "schedule": schedule.to_json_obj(),
            "violations": schedule.verify(),
            "bound": {
                "L": report.L,
                "N": report.N,
                "alpha": report.alpha,
                "C": report.C,
                "predicted": report.predicted,
            },
        }
        print(
            f"main schedule: {schedule.N} levels, predicted bound {report.predicted:.4f}",
            file=sys.stderr,
        )
    if args.json:
        _write_json(args.json, meta, payload)
    return EXIT_OK


def _cmd_diag(args) -> int:
    from .cantor import natural_measure
    from .diagnostics import (
        SectorQuery,
        line_multiplicity,
        max_strip_density,
        sector_mass,
        strip_mass,
    )

    E = _dataset(args)
    mu = natural_measure(E)
    omega = Direction(args.omega)
    meta = _meta(args, "diag", set=args.set, n=args.n, op=args.op)
    payload: dict
    if args.op == "sector":
        x = tuple(float(t) for t in args.x.split(","))
        if len(x) != 2:
            raise ConfigError(f"--x must be two comma-separated floats, got {args.x!r}")
        q = SectorQuery(x, omega, args.r_inner, args.r_outer, args.M)
        value = sector_mass(mu, q)
        payload = {"sector_mass": value}
        if args.oracle:
            rng = np.random.default_rng(args.seed)
            N = 10**6
            pts = rng.random((N, 2))
            dx = pts[:, 0] - x[0]
            dy = pts[:, 1] - x[1]
            d = np.hypot(dx, dy)
            wx, wy = omega.vector
            hit = (
                (d >= args.r_inner)
                & (d < args.r_outer)
                & (np.abs(dx * wx + dy * wy) * args.M <= d)
            )
            p = float(hit.mean())
            payload["mc_area"] = p
            payload["mc_stderr"] = math.sqrt(p * (1 - p) / N)
            payload["mc_samples"] = N
        print(f"sector mass {value:.6f}", file=sys.stderr)
    elif args.op == "line":
        line = Line(args.line_c, omega)
        value = line_multiplicity(E, line, args.sep)
        payload = {"line_multiplicity": value}
        print(f"line multiplicity {value}", file=sys.stderr)
    elif args.op == "strip":
        value = strip_mass(mu, omega, Interval(args.j_lo, args.j_hi))
        payload = {"strip_mass": value}
        print(f"strip mass {value:.6f}", file=sys.stderr)
    else:
        value = max_strip_density(mu, omega, args.width)
        payload = {"max_strip_density": value}
        print(f"max strip density {value:.6f}", file=sys.stderr)
    if args.json:
        _write_json(args.json, meta, payload)
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    from .calibration import CalibrationRecord
    from .cantor import cantor_squares
    from .geometry import Interval as _Iv
    from .multiscale import favar_bound
    from .projection import favard_table
    from .rectifiability import RectQuery, rect_lower_sweep, rect_upper_beta, rect_upper_twoproj

    if not args.full:
        raise ConfigError("pipeline currently only supports --full")
    record = CalibrationRecord.load(args.calibration)
    C_fav = record.get("C_favar", 1.0)
    C_two = record.get("C_rect_twoproj", 1.0)
    C_beta = record.get("C_rect_beta", 1.0)
    table = favard_table(args.n, args.tol, threads=args.threads)
    rows = []
    for r in table.rows:
        n = r.n
        fb = favar_bound(n, args.alpha, C=C_fav) if n >= 2 else ""
        up2 = rect_upper_twoproj(n, 0, 1.0, C=C_two) if n >= 1 else ""
        upb = rect_upper_beta(n, 0, 1.0, C=C_beta) if n >= 1 else ""
        if 1 <= n <= 4:
            q = RectQuery(4.0**-n, 1.0, 1.0, _Iv(0.0, 1.0))
            sweep = rect_lower_sweep(cantor_squares(n), q, 4, 4**n).lower
        else:
            sweep = ""
        rows.append((n, r.value, r.error_bound, fb, up2, upb, sweep))
    meta = _meta(args, "pipeline", n=args.n, tol=args.tol)
    meta["tail_exponent"] = table.tail_exponent
    meta["tail_r2"] = table.tail_r2
    header = [
        "n",
        "favard_value",
        "favard_error",
        "favar_bound",
        "twoproj_upper",
        "beta_upper",
        "sweep_lower",
    ]
    if args.csv:
        _write_csv(args.csv, meta, header, rows)
    if args.json:
        _write_json(
            args.json,
            meta,
            {"rows": [dict(zip(header, row)) for row in rows]},
        )
    print(f"pipeline summary over n=0..{args.n}: tail exponent {table.tail_exponent:.3f}", file=sys.stderr)
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    from .calibration import CalibrationRecord, measure_constant

    record = CalibrationRecord.load(args.calibration)
    value, run = measure_constant(
        args.constant, args.dataset, alpha=args.alpha, tol=args.tol
    )
    record.set_once(args.constant, value, args.dataset, run)
    record.save(args.calibration)
    print(f"{args.constant} = {value!r} (dataset {args.dataset}) -> {args.calibration}", file=sys.stderr)
    return EXIT_OK


_HANDLERS = {
    "cantor": _cmd_cantor,
    "favard": _cmd_favard,
    "project": _cmd_project,
    "beta": _cmd_beta,
    "rect": _cmd_rect,
    "scales": _cmd_scales,
    "diag": _cmd_diag,
    "pipeline": _cmd_pipeline,
    "calibrate": _cmd_calibrate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config_file(args)
        if args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
        return _HANDLERS[args.command](args)
    except (ConfigError, BudgetError, HypothesisFailure) as exc:
        code = exc.exit_code
        sys.stdout.write(
            json.dumps(
                {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}},
                sort_keys=True,
            )
            + "\n"
        )
        return code


if __name__ == "__main__":
    sys.exit(main())

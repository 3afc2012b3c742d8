"""Command-line driver: verify | flow | cp | interp.

Each command writes one delimited report file (CSV with a versioned
header comment, or JSON), renders a companion PNG figure next to the
report unless --no-plot is given, and prints a one-line machine-readable
JSON summary (sorted keys) to stdout.

Exit codes: 0 success, 1 certified violation of a checked inequality,
2 configuration or I/O failure.

Flag precedence: command line over --config file over built-in defaults.
Identical configuration and seed produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os

import numpy as np

from .bounds import (
    RatioReport,
    _ratio,
    check_permanent_bound,
    check_subperm_bound,
    check_subperm_p_bound,
    report_csv_header,
    report_csv_row,
    report_json_dict,
    sharp_constant_lower,
    sharp_constant_upper,
)
from .interpolation import (
    MultilinearForm,
    logconvexity_check,
    logconvexity_csv_header,
    logconvexity_csv_rows,
    permanent_tensor,
)
from .matrices import matrix_from_json_dict
from .optimize import (
    OptimizationConfig,
    sweep_csv_header,
    sweep_csv_row,
    sweep_exponents,
)
from .symgroup import (
    circulant_flow,
    default_time_grid,
    flow_trace,
    trace_csv_lines,
    trace_json_dict,
)

__all__ = ["main", "build_parser"]

CSV_SCHEMA = "permbounds-csv v1"
JSON_SCHEMA = "permbounds-json v1"

# the hidden test hook scales the checked bound down by this factor
CORRUPT_FACTOR = 1e-6

DEFAULTS = {
    "verify": {
        "n": 4,
        "k": None,
        "p": 1.5,
        "trials": 1000,
        "seed": 0,
        "tol": 1e-9,
        "out": None,
        "format": "csv",
        "plot": True,
        "threads": 1,
        "corrupt_bound": False,
    },
    "flow": {
        "n": 4,
        "p": 2.0,
        "seed": 0,
        "t_max": None,
        "t_points": 30,
        "method": "reduced",
        "circulant": None,
        "matrix": None,
        "out": None,
        "format": "csv",
        "plot": True,
        "threads": 1,
        "tol": 1e-9,
    },
    "cp": {
        "n": 3,
        "p": None,
        "p_grid": "1:2:11",
        "seed": 0,
        "starts": 8,
        "iters": 400,
        "tol": 1e-6,
        "out": None,
        "format": "csv",
        "plot": True,
        "threads": 1,
    },
    "interp": {
        "n": 3,
        "m": None,
        "perm_tensor": False,
        "random_form": False,
        "q": None,
        "r": None,
        "t_points": 5,
        "seed": 0,
        "starts": 8,
        "iters": 400,
        "tol": 1e-9,
        "out": None,
        "format": "csv",
        "plot": True,
        "threads": 1,
    },
}


def _add_shared(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=int, help="matrix order / vector length")
    sub.add_argument("--seed", type=int, help="RNG seed (default 0)")
    sub.add_argument("--tol", type=float, help="violation tolerance")
    sub.add_argument("--out", help="report file path (default permbounds_<cmd>.<fmt>)")
    sub.add_argument("--format", choices=("csv", "json"), help="report format (default csv)")
    sub.add_argument(
        "--threads",
        type=int,
        help="parallelism cap, reserved; current engines are single-threaded",
    )
    sub.add_argument(
        "--plot",
        action=argparse.BooleanOptionalAction,
        help="render a PNG figure next to the report (default on)",
    )
    sub.add_argument("--config", help="JSON config file; flags override its values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permbounds",
        description="Permanent bounds: verification suites, heat-flow traces, "
        "sharp-constant estimation, and log-convexity checks.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser(
        "verify", help="batch-check the permanent and sub-permanent bounds"
    )
    _add_shared(verify)
    verify.add_argument("--k", type=int, help="row count: check the K-row bounds instead")
    verify.add_argument("--p", type=float, help="exponent for the p-aggregated bound (default 1.5)")
    verify.add_argument("--trials", type=int, help="number of random instances (default 1000)")
    verify.add_argument("--corrupt-bound", action="store_true", default=None, help=argparse.SUPPRESS)

    flow = commands.add_parser("flow", help="trace the column heat flow")
    _add_shared(flow)
    flow.add_argument("--p", type=float, help="column exponent (default 2)")
    flow.add_argument("--t-max", type=float, help="largest sample time (default 5/n)")
    flow.add_argument("--t-points", type=int, help="geometric grid size (default 30)")
    flow.add_argument("--method", choices=("reduced", "brute"), help="flow path (default reduced)")
    flow.add_argument(
        "--circulant",
        nargs=2,
        type=float,
        metavar=("X", "Y"),
        help="trace the 3x3 circulant family from (x, y)",
    )
    flow.add_argument("--matrix", help="JSON matrix file to flow instead of a random one")

    cp = commands.add_parser("cp", help="estimate the sharp constant across exponents")
    _add_shared(cp)
    cp.add_argument("--p", type=float, help="single exponent instead of a grid")
    cp.add_argument("--p-grid", help="exponent grid start:stop:count (default 1:2:11)")
    cp.add_argument("--starts", type=int, help="random starts per exponent (default 8)")
    cp.add_argument("--iters", type=int, help="ascent iteration cap (default 400)")

    interp = commands.add_parser("interp", help="log-convexity segment check")
    _add_shared(interp)
    interp.add_argument(
        "--perm-tensor",
        action="store_true",
        default=None,
        help="use the permanent tensor of order n (default form)",
    )
    interp.add_argument(
        "--random-form",
        action="store_true",
        default=None,
        help="use a seeded random nonnegative tensor of arity m",
    )
    interp.add_argument("--m", type=int, help="arity for --random-form (default 2)")
    interp.add_argument("--q", nargs="+", type=float, help="segment endpoint reciprocals (default all 1)")
    interp.add_argument("--r", nargs="+", type=float, help="segment endpoint reciprocals (default all 0.5)")
    interp.add_argument("--t-points", type=int, help="interior points on the segment (default 5)")
    interp.add_argument("--starts", type=int, help="random starts per estimate (default 8)")
    interp.add_argument("--iters", type=int, help="ascent sweep cap (default 400)")

    return parser


def _effective(args: argparse.Namespace) -> dict:
    merged = dict(DEFAULTS[args.command])
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a JSON object")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in merged:
                raise ValueError(f"unknown config key {key!r} for command {args.command!r}")
            merged[key] = value
    for key in merged:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _out_paths(opts: dict, command: str):
    out = opts["out"] or f"permbounds_{command}.{opts['format']}"
    plot = os.path.splitext(out)[0] + ".png" if opts["plot"] else None
    return out, plot


def _write_lines(path: str, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _corrupted(report: RatioReport) -> RatioReport:
    rhs = report.rhs * CORRUPT_FACTOR
    return dataclasses.replace(
        report, rhs=rhs, ratio=_ratio(report.lhs, rhs), slack=rhs - report.lhs
    )


def _cmd_verify(opts: dict):
    n = int(opts["n"])
    trials = int(opts["trials"])
    tol = float(opts["tol"])
    k = None if opts["k"] is None else int(opts["k"])
    p = float(opts["p"])
    corrupt = bool(opts["corrupt_bound"])
    rng = np.random.default_rng(int(opts["seed"]))
    rows = []
    records = []
    ratios = []
    violations = 0

    def add(i, check, rep):
        nonlocal violations
        if corrupt:
            rep = _corrupted(rep)
        if rep.slack < -tol * rep.rhs:
            violations += 1
        rows.append(f"{i},{check}," + report_csv_row(rep))
        records.append({"i": i, "check": check, **report_json_dict(rep)})
        ratios.append(rep.ratio)

    for i in range(trials):
        if k is None:
            a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            add(i, "perm", check_permanent_bound(a))
        else:
            a = rng.random((k, n))
            add(i, "subperm2", check_subperm_bound(a))
            add(i, "subperm_p", check_subperm_p_bound(a, p))

    out, plot = _out_paths(opts, "verify")
    summary_stats = {
        "trials": trials,
        "checks": len(rows),
        "violations": violations,
        "max_ratio": max(ratios),
    }
    if opts["format"] == "csv":
        lines = [f"# {CSV_SCHEMA} command=verify", "i,check," + report_csv_header()]
        lines += rows
        lines.append(
            f"# summary trials={trials} checks={len(rows)} violations={violations}"
        )
        _write_lines(out, lines)
    else:
        _write_json(
            out,
            {"schema": JSON_SCHEMA, "command": "verify", "reports": records, "summary": summary_stats},
        )
    if plot:
        from .plots import save_ratio_histogram

        save_ratio_histogram(ratios, plot, f"verify n={n}" + (f" k={k}" if k else ""))
    code = 1 if violations else 0
    summary = {
        "command": "verify",
        "exit": code,
        "n": n,
        "k": k,
        "p": p if k is not None else None,
        "trials": trials,
        "violations": violations,
        "out": out,
        "plot": plot,
    }
    return code, summary


def _flow_times(n: int, opts: dict) -> np.ndarray:
    t_max = opts["t_max"]
    grid = default_time_grid(n, t_max=t_max, points=int(opts["t_points"]))
    return np.concatenate([[0.0], grid])


def _cmd_flow(opts: dict):
    p = float(opts["p"])
    tol = float(opts["tol"])
    method = opts["method"]
    if opts["circulant"] is not None:
        x0, y0 = (float(v) for v in opts["circulant"])
        times = _flow_times(3, opts)
        trace = circulant_flow(x0, y0, p, times)
        n = 3
    elif opts["matrix"] is not None:
        with open(opts["matrix"], encoding="utf-8") as fh:
            m = matrix_from_json_dict(json.load(fh))
        n = m.n_rows
        trace = flow_trace(m, p, _flow_times(n, opts), method)
    else:
        n = int(opts["n"])
        a = np.random.default_rng(int(opts["seed"])).random((n, n))
        trace = flow_trace(a, p, _flow_times(n, opts), method)

    monitored = trace.eta if trace.phi is None else trace.phi
    scale = max(1.0, float(np.abs(monitored).max()))
    monotone = bool((np.diff(monitored) >= -tol * scale).all())
    slope = float((monitored[1] - monitored[0]) / (trace.times[1] - trace.times[0]))

    out, plot = _out_paths(opts, "flow")
    if opts["format"] == "csv":
        lines = [f"# {CSV_SCHEMA} command=flow"] + trace_csv_lines(trace)
        _write_lines(out, lines)
    else:
        _write_json(out, {"schema": JSON_SCHEMA, "command": "flow", **trace_json_dict(trace)})
    if plot:
        from .plots import save_flow_figure

        save_flow_figure(trace, plot)
    # at p = 2 the monitored quantity is provably nondecreasing, so a drop is a failure
    code = 1 if (p == 2.0 and not monotone) else 0
    summary = {
        "command": "flow",
        "exit": code,
        "n": n,
        "p": p,
        "method": method if opts["circulant"] is None else "reduced",
        "circulant": opts["circulant"],
        "monotone": monotone,
        "initial_slope": slope,
        "start": float(monitored[0]),
        "end": float(monitored[-1]),
        "out": out,
        "plot": plot,
    }
    return code, summary


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("p-grid must be start:stop:count")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("p-grid count must be >= 1")
    return np.linspace(start, stop, count)


def _cmd_cp(opts: dict):
    n = int(opts["n"])
    tol = float(opts["tol"])
    grid = [float(opts["p"])] if opts["p"] is not None else _parse_grid(opts["p_grid"])
    cfg = OptimizationConfig(
        num_starts=int(opts["starts"]),
        max_iters=int(opts["iters"]),
        seed=int(opts["seed"]),
    )
    results = sweep_exponents(n, grid, cfg)
    lower = [sharp_constant_lower(n, r.p) for r in results]
    upper = [sharp_constant_upper(n, r.p) for r in results]
    bracket_violations = sum(
        1
        for r, lo, up in zip(results, lower, upper)
        if r.best_ratio < lo - tol or r.best_ratio > up + tol
    )
    out, plot = _out_paths(opts, "cp")
    if opts["format"] == "csv":
        lines = [f"# {CSV_SCHEMA} command=cp", sweep_csv_header()]
        lines += [sweep_csv_row(r) for r in results]
        _write_lines(out, lines)
    else:
        _write_json(
            out,
            {
                "schema": JSON_SCHEMA,
                "command": "cp",
                "results": [
                    {
                        "n": r.n,
                        "p": r.p,
                        "best_ratio": r.best_ratio,
                        "lower_bound": lo,
                        "upper_bound": up,
                        "conjecture_gap": r.best_ratio - lo,
                        "starts_to_best": r.starts_converged_to_best,
                        "iters": r.iterations,
                    }
                    for r, lo, up in zip(results, lower, upper)
                ],
            },
        )
    if plot:
        from .plots import save_sweep_figure

        save_sweep_figure(results, lower, upper, plot)
    code = 1 if bracket_violations else 0
    summary = {
        "command": "cp",
        "exit": code,
        "n": n,
        "p_min": float(grid[0]),
        "p_max": float(grid[-1]),
        "best_first": results[0].best_ratio,
        "best_last": results[-1].best_ratio,
        "bracket_violations": bracket_violations,
        "out": out,
        "plot": plot,
    }
    return code, summary


def _cmd_interp(opts: dict):
    n = int(opts["n"])
    seed = int(opts["seed"])
    if opts["random_form"]:
        m = int(opts["m"]) if opts["m"] is not None else 2
        coeffs = np.random.default_rng(seed).random((n,) * m)
        form = MultilinearForm(coeffs)
    else:
        form = permanent_tensor(n)
        m = form.m
    q = [float(v) for v in opts["q"]] if opts["q"] is not None else [1.0] * m
    r = [float(v) for v in opts["r"]] if opts["r"] is not None else [0.5] * m
    t_points = int(opts["t_points"])
    if t_points < 1:
        raise ValueError("t-points must be >= 1")
    t_grid = np.linspace(0.0, 1.0, t_points + 2)[1:-1]
    cfg = OptimizationConfig(
        num_starts=int(opts["starts"]), max_iters=int(opts["iters"]), seed=seed
    )
    report = logconvexity_check(form, q, r, t_grid, cfg)
    out, plot = _out_paths(opts, "interp")
    if opts["format"] == "csv":
        lines = [f"# {CSV_SCHEMA} command=interp", logconvexity_csv_header(m)]
        lines += logconvexity_csv_rows(report)
        lines.append(
            f"# summary q_value={report.q_value!r} r_value={report.r_value!r} "
            f"passed={int(report.passed)}"
        )
        _write_lines(out, lines)
    else:
        _write_json(
            out,
            {
                "schema": JSON_SCHEMA,
                "command": "interp",
                "q_value": report.q_value,
                "r_value": report.r_value,
                "passed": report.passed,
                "points": [
                    {
                        "t": pt.t,
                        "pvec": list(pt.pvec),
                        "midpoint_estimate": pt.midpoint_estimate,
                        "endpoint_bound": pt.endpoint_bound,
                        "violation": pt.violation,
                    }
                    for pt in report.points
                ],
            },
        )
    if plot:
        from .plots import save_interp_figure

        save_interp_figure(report, plot)
    code = 0 if report.passed else 1
    summary = {
        "command": "interp",
        "exit": code,
        "n": n,
        "m": m,
        "passed": report.passed,
        "q_value": report.q_value,
        "r_value": report.r_value,
        "max_relative_excess": report.max_relative_excess,
        "out": out,
        "plot": plot,
    }
    return code, summary


_HANDLERS = {
    "verify": _cmd_verify,
    "flow": _cmd_flow,
    "cp": _cmd_cp,
    "interp": _cmd_interp,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _effective(args)
        code, summary = _HANDLERS[args.command](opts)
    except (OSError, ValueError) as exc:
        print(json.dumps({"command": args.command, "error": str(exc), "exit": 2}, sort_keys=True))
        return 2
    print(json.dumps(summary, sort_keys=True))
    return code

"""Command-line driver: solve problem files, rerun the worked examples, fit rates.

Exit status is 0 on success, 2 for bad input (unparsable files, out-of-range
parameters) and 3 when the solver itself fails.  ``rates`` on a valid history
whose series is too short or not positive reports "fit unavailable" and
exits 0.
"""
import argparse
import sys

import numpy as np

from . import oracle, rates
from .errors import DescentViolation, ProblemFileError, ProjectionError
from .model import feasibility_residuals
from .problems import load_problem
from .solver import SolverConfig, read_history_csv, solve, write_history_csv

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3

PATH_GRID = np.geomspace(1e-1, 1e-3, 13)


class _Parser(argparse.ArgumentParser):
    """argparse that exits with status 2 and our message format."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"error: {message}\n")


def _fmt_vec(x):
    # shortest round-trip form, so a printed point can be compared exactly
    return "[" + ", ".join(repr(float(e)) for e in x) + "]"


def cmd_solve(args):
    try:
        inst = load_problem(args.problem)
        cfg = SolverConfig(max_sweeps=args.max_sweeps, step_tol=args.step_tol,
                           residual_tol=args.residual_tol, record_every=args.record_every)
    except (ProblemFileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        res = solve(inst, cfg, d_star=args.dstar)
    except (ProjectionError, DescentViolation, ArithmeticError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if args.history_out:
        write_history_csv(res.history, args.history_out, emit_x=args.emit_x)
    print(f"x = {_fmt_vec(res.x)}")
    print(f"max feasibility residual = {max(feasibility_residuals(inst, res.x)):.3e}")
    print(f"termination = {res.reason} after {res.sweeps} sweeps")
    return EXIT_OK


def _reproduce_tight(args):
    p = args.p
    if not (1.0 < p <= 2.0):
        print(f"error: --p must lie in (1, 2], got {p}", file=sys.stderr)
        return EXIT_INPUT
    expected = p / (p - 1.0)
    gap_exp = rates.fit_path_exponent(p, PATH_GRID)
    dist_exp = rates.fit_path_dist_exponent(PATH_GRID)
    print(f"gap exponent along path = {gap_exp:.4f} (expected p/(p-1) = {expected:.4f})")
    print(f"dist exponent along path = {dist_exp:.6f} (expected 1)")
    inst = oracle.tight_instance(p)
    res = solve(inst, SolverConfig(max_sweeps=args.sweeps), d_star=oracle.TIGHT_D_STAR)
    err = float(np.max(np.abs(res.x - oracle.TIGHT_X_STAR)))
    print(f"solver x = {_fmt_vec(res.x)}, error vs (1, 0) = {err:.3e}, {res.reason} after {res.sweeps} sweeps")
    if args.out:
        write_history_csv(res.history, args.out)
    return EXIT_OK


def _reproduce_nonlinear(args):
    T = args.sweeps
    if T < 100:
        print("error: --sweeps must be at least 100 for the nonlinear example", file=sys.stderr)
        return EXIT_INPUT
    inst = oracle.nonlinear_instance()
    check_T = min(T, 10**4)
    trajectory = oracle.example_fails_recurrence(check_T)
    dev = [0.0]

    def compare(t, y, x):
        if t <= check_T:
            _, y1, y2, _ = trajectory[t]
            dev[0] = max(dev[0], float(np.max(np.abs(y[0] - y1))), float(np.max(np.abs(y[1] - y2))))

    cfg = SolverConfig(max_sweeps=T, step_tol=0.0, residual_tol=0.0)
    res = solve(inst, cfg, d_star=oracle.NONLINEAR_D_STAR, dist_fn=oracle.nonlinear_dist, callback=compare)
    print(f"max iterate deviation from recurrence (t <= {check_T}) = {dev[0]:.3e}")
    t = np.array([r.t for r in res.history], dtype=float)
    dist_sq = np.array([r.dist_argmin**2 for r in res.history])
    skip = int(np.searchsorted(t, min(1000, T // 10)))
    report = rates.fit_power_law(dist_sq, skip=skip, t=t)
    print(f"dist^2 power-law exponent = {report.parameter:.4f} (expected -1), R^2 = {report.r_squared:.6f}, "
          f"window = {report.window[0]}..{report.window[1]}")
    lin = rates.fit_linear_ratio([r.gap for r in res.history], t=t, d_star=oracle.NONLINEAR_D_STAR)
    print(f"gap linear-fit ratio over tail = {lin.parameter:.6f} (no linear rate: ratio -> 1)")
    if args.out:
        write_history_csv(res.history, args.out)
    return EXIT_OK


def cmd_reproduce(args):
    if args.example == "tight":
        return _reproduce_tight(args)
    return _reproduce_nonlinear(args)


def cmd_rates(args):
    try:
        hist = read_history_csv(args.history)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    column = args.column
    if column is None:
        column = "gap" if not np.all(np.isnan(hist["gap"])) else "step_norm"
    values = hist[column]
    t = hist["sweep"]
    keep = ~np.isnan(values)
    values, t = values[keep], t[keep]
    d_star = None
    if column == "gap":
        # d* = d - gap on any record with a finite d
        finite = np.isfinite(hist["d_value"]) & ~np.isnan(hist["gap"])
        if np.any(finite):
            i = np.flatnonzero(finite)[-1]
            d_star = float(hist["d_value"][i] - hist["gap"][i])
    try:
        if args.mode == "linear":
            report = rates.fit_linear_ratio(values, t=t, d_star=d_star)
        else:
            report = rates.fit_power_law(values, skip=args.skip, t=t)
    except ValueError as exc:
        # the file is valid; the series just cannot support this fit
        print(f"column = {column}")
        print(f"fit unavailable: {exc}")
        return EXIT_OK
    name = "ratio" if report.mode == "linear" else "exponent"
    print(f"column = {column}")
    print(f"mode = {report.mode}")
    print(f"{name} = {report.parameter:.12g}")
    print(f"r_squared = {report.r_squared:.6f}")
    print(f"window = {report.window[0]}..{report.window[1]}")
    print(f"convergent = {report.convergent}")
    if args.out:
        rates.write_rate_report([report], args.out)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="dykstra-msf", description="Projection onto intersections of preimages of convex sets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("problem")
    p.add_argument("--max-sweeps", type=int, default=10**6)
    p.add_argument("--step-tol", type=float, default=1e-10)
    p.add_argument("--residual-tol", type=float, default=1e-9)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--history-out")
    p.add_argument("--dstar", type=float, help="optimal dual value, adds a gap column")
    p.add_argument("--emit-x", action="store_true", help="add x_0..x_{n-1} columns to the history")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reproduce", help="rerun a worked example")
    p.add_argument("example", choices=["tight", "nonlinear"])
    p.add_argument("--p", type=float, default=1.5)
    p.add_argument("--sweeps", type=int, default=10**4)
    p.add_argument("--out", help="write the solver history CSV here")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("rates", help="fit a convergence rate to a history CSV")
    p.add_argument("history")
    p.add_argument("--mode", choices=["linear", "power_law"], default="linear")
    p.add_argument("--skip", type=int, default=0)
    p.add_argument("--column", choices=["gap", "step_norm", "residual_norm", "dist_argmin"])
    p.add_argument("--out", help="write the rate report CSV here")
    p.set_defaults(func=cmd_rates)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Dykstra-type projection sweeps and the driver loop.

One sweep visits the blocks in order.  For block i with current primal point
x, dual block y_i and step constant gamma_i it computes

    P   = Proj_{C_i}(gamma_i * y_i + A_i x)
    r   = (A_i x - P) / gamma_i
    y_i <- y_i + r
    x   <- x - A_i^T r

so that x = v - sum_i A_i^T y_i is maintained throughout.  The same dual
iterate is obtained by cyclic proximal coordinate descent on the dual
objective; :func:`sweep_cgd_reference` computes it that way, independently.
"""
import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DescentViolation
from .model import (
    dual_diff_norm,
    dual_norm,
    dual_objective,
    primal_from_dual,
    residual_map,
)

DESCENT_RTOL = 1e-9


@dataclass
class SolverConfig:
    max_sweeps: int = 10**6
    step_tol: float = 1e-10
    residual_tol: float = 1e-9
    record_every: int = 1
    assert_descent: bool = False

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be positive")
        if self.step_tol < 0 or self.residual_tol < 0:
            raise ValueError("tolerances must be nonnegative")


@dataclass
class SweepRecord:
    """Diagnostics of sweep ``t``, which maps y^t to y^{t+1}.

    ``d_value``, ``residual_norm``, ``x``, ``gap`` and ``dist_argmin`` refer to
    y^t; ``step_norm`` is ||y^{t+1} - y^t||.
    """

    t: int
    d_value: float
    step_norm: float
    residual_norm: float
    x: np.ndarray
    gap: Optional[float] = None
    dist_argmin: Optional[float] = None

    @property
    def d_finite(self):
        return math.isfinite(self.d_value)


@dataclass
class SolveResult:
    y: list
    x: np.ndarray
    reason: str
    sweeps: int
    history: list = field(default_factory=list)


def sweep_dykstra(inst, y, x_in, check=False):
    """One Gauss-Seidel sweep; returns the new dual point and primal point."""
    if check:
        expected = primal_from_dual(inst, y)
        if np.linalg.norm(expected - x_in) > 1e-10 * (1.0 + np.linalg.norm(inst.anchor)):
            raise AssertionError("x_in does not match v - A^T y")
    x = np.array(x_in, dtype=float, copy=True)
    y_new = []
    for blk, yi, gam, eye in zip(inst.blocks, y, inst.gamma, inst.identity):
        Ax = x if eye else blk.A @ x
        P = blk.set.project(gam * yi + Ax)
        r = (Ax - P) / gam
        y_new.append(yi + r)
        if eye:
            x = P
        else:
            x = x - blk.A.T @ r
    return y_new, x


def sweep_cgd_reference(inst, y):
    """One cyclic proximal coordinate-descent sweep on the dual objective.

    Each block takes a prox step on gamma_i^{-1} * support(C_i) from
    y_i - gamma_i^{-1} grad_i g, with the gradient evaluated afresh at the
    partially updated point.  No primal point is carried between blocks.
    """
    y = [np.array(yi, dtype=float, copy=True) for yi in inst.check_dual(y)]
    for i, (blk, gam) in enumerate(zip(inst.blocks, inst.gamma)):
        grad_i = blk.A @ (sum(b.A.T @ yj for b, yj in zip(inst.blocks, y)) - inst.anchor)
        y[i] = blk.set.prox_scaled_support(y[i] - grad_i / gam, 1.0 / gam)
    return y


def block_descent_check(inst, y, tol=DESCENT_RTOL):
    """Run one sweep and verify the per-block decrease of the dual objective.

    For every block i, d after updating block i must not exceed d before it by
    more than -gamma_i/2 ||dy_i||^2 (up to ``tol * (1 + |d|)``).  Returns the
    list of slacks (negative or zero means satisfied).
    """
    y = [np.array(yi, dtype=float) for yi in inst.check_dual(y)]
    slacks = []
    d_prev = dual_objective(inst, y)
    for i, (blk, gam) in enumerate(zip(inst.blocks, inst.gamma)):
        x = primal_from_dual(inst, y)
        P = blk.set.project(gam * y[i] + blk.A @ x)
        new_i = y[i] + (blk.A @ x - P) / gam
        step = float(np.sum((new_i - y[i]) ** 2))
        y[i] = new_i
        d_new = dual_objective(inst, y)
        slacks.append(d_new - d_prev + 0.5 * gam * step - tol * (1.0 + abs(d_prev)))
        d_prev = d_new
    return slacks


def stationarity_constant(inst):
    """M = l L_g + (l + sum gamma_i) sqrt(l), bounding ||G(y^t)|| by M ||y^{t+1} - y^t||."""
    ell = inst.n_blocks
    return ell * inst.lipschitz() + (ell + sum(inst.gamma)) * math.sqrt(ell)


def _descent_bound(inst, d_before, step):
    return -0.5 * min(inst.gamma) * step**2 + DESCENT_RTOL * (1.0 + abs(d_before))


def solve(
    inst,
    cfg: Optional[SolverConfig] = None,
    d_star: Optional[float] = None,
    dist_fn: Optional[Callable] = None,
    callback: Optional[Callable] = None,
):
    """Run sweeps from y = 0, x = v until a stopping rule fires.

    Parameters
    ----------
    inst : Instance
    cfg : SolverConfig, optional
    d_star : float, optional
        Optimal dual value; when given every record carries ``gap = d - d_star``.
    dist_fn : callable, optional
        ``dist_fn(y)`` returning the distance of a dual point to the solution
        set, for instances where that set is known in closed form.
    callback : callable, optional
        Called as ``callback(t, y, x)`` with the state after ``t`` sweeps,
        starting at ``t = 0``.

    Stopping rules are checked after each sweep in the order step_tol,
    residual_tol; max_sweeps applies otherwise.  A tolerance of 0 switches
    its rule off.  The final record is always
    kept regardless of ``record_every``.
    """
    cfg = cfg or SolverConfig()
    y = inst.zero_dual()
    x = inst.anchor.copy()
    history = []
    need_residual = cfg.residual_tol > 0
    d_cur = None
    reason = "max_sweeps"
    t = 0
    if callback is not None:
        callback(0, y, x)
    for t in range(cfg.max_sweeps):
        record = t % cfg.record_every == 0
        res = None
        if need_residual or record:
            res = dual_norm(residual_map(inst, y))
        if d_cur is None and (record or cfg.assert_descent):
            d_cur = dual_objective(inst, y)
        y_new, x_new = sweep_dykstra(inst, y, x)
        step = dual_diff_norm(y_new, y)
        d_next = None
        if cfg.assert_descent:
            d_next = dual_objective(inst, y_new)
            if not (math.isinf(d_cur) or math.isinf(d_next)):
                bound = _descent_bound(inst, d_cur, step)
                if d_next - d_cur > bound:
                    raise DescentViolation(t, d_cur, d_next, bound)
        stop = None
        if cfg.step_tol > 0 and step <= cfg.step_tol:
            stop = "step_tol"
        elif need_residual and res <= cfg.residual_tol:
            stop = "residual_tol"
        elif t == cfg.max_sweeps - 1:
            stop = "max_sweeps"
        if record or stop:
            if res is None:
                res = dual_norm(residual_map(inst, y))
            if d_cur is None:
                d_cur = dual_objective(inst, y)
            history.append(
                SweepRecord(
                    t=t,
                    d_value=d_cur,
                    step_norm=step,
                    residual_norm=res,
                    x=x,
                    gap=None if d_star is None else d_cur - d_star,
                    dist_argmin=None if dist_fn is None else float(dist_fn(y)),
                )
            )
        y, x = y_new, x_new
        d_cur = d_next
        if callback is not None:
            callback(t + 1, y, x)
        if stop:
            reason = stop
            break
    return SolveResult(y=y, x=x, reason=reason, sweeps=t + 1, history=history)


def descent_violations(history, min_gamma):
    """Consecutive record pairs that break the sufficient-decrease inequality.

    Only pairs with adjacent sweep indices are checked; returns a list of
    ``(t, excess)`` with positive excess.
    """
    out = []
    for a, b in zip(history, history[1:]):
        if b.t != a.t + 1 or not (a.d_finite and b.d_finite):
            continue
        bound = -0.5 * min_gamma * a.step_norm**2 + DESCENT_RTOL * (1.0 + abs(a.d_value))
        excess = (b.d_value - a.d_value) - bound
        if excess > 0:
            out.append((a.t, excess))
    return out


HISTORY_COLUMNS = ["sweep", "d_value", "step_norm", "residual_norm", "gap", "dist_argmin"]


def _fmt(v):
    if v is None:
        return ""
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def write_history_csv(history, path_or_file, emit_x=False):
    """Write records as CSV with 17 significant digits and '\\n' line endings."""
    n = len(history[0].x) if history else 0
    header = list(HISTORY_COLUMNS)
    if emit_x:
        header += [f"x_{i}" for i in range(n)]

    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in history:
            row = [str(r.t), _fmt(r.d_value), _fmt(r.step_norm), _fmt(r.residual_norm),
                   _fmt(r.gap), _fmt(r.dist_argmin)]
            if emit_x:
                row += [_fmt(xi) for xi in r.x]
            w.writerow(row)

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


def read_history_csv(path):
    """Parse a history CSV into a dict of column name -> numpy array (NaN for blanks)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError("empty history file")
    header = rows[0]
    if header[: len(HISTORY_COLUMNS)] != HISTORY_COLUMNS:
        raise ValueError(f"history header {header[:len(HISTORY_COLUMNS)]} does not match {HISTORY_COLUMNS}")
    extra = header[len(HISTORY_COLUMNS):]
    if any(not (c.startswith("x_") and c[2:].isdigit()) for c in extra):
        raise ValueError("unexpected history columns: " + ", ".join(extra))
    body = rows[1:]
    if not body:
        raise ValueError("history file has no records")
    cols = {name: [] for name in header}
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        for name, cell in zip(header, row):
            try:
                cols[name].append(float(cell) if cell != "" else math.nan)
            except ValueError:
                raise ValueError(f"line {lineno}: column {name}: not a number: {cell!r}") from None
    return {k: np.array(v) for k, v in cols.items()}


__all__ = [
    "SolverConfig",
    "SweepRecord",
    "SolveResult",
    "sweep_dykstra",
    "sweep_cgd_reference",
    "block_descent_check",
    "stationarity_constant",
    "solve",
    "descent_violations",
    "write_history_csv",
    "read_history_csv",
]

"""Empirical convergence rates from sweep histories.

Two fits are offered: a geometric fit (log value linear in t, ratio
r = exp(slope)) and a power-law fit (log value linear in log(t + 1), exponent
kappa).  Both are plain least squares, so identical inputs give identical
reports.
"""
import csv
import math
from dataclasses import dataclass

import numpy as np

from .model import dual_objective
from .oracle import TIGHT_D_STAR, tight_instance

EPS = np.finfo(float).eps
FLOOR_FACTOR = 1e2
TAIL_FRACTION = 0.5
MIN_LINEAR_POINTS = 20
MIN_POWER_POINTS = 50
MIN_WINDOW = 2
NONCONVERGENT_MARGIN = 1e-9


@dataclass(frozen=True)
class RateReport:
    """Outcome of a rate fit.

    ``parameter`` is the ratio r for ``mode == "linear"`` and the exponent
    kappa for ``mode == "power_law"``.  ``window`` holds the first and last
    sweep index used.  ``fit_residual`` is the RMS residual of the fit in log
    space.
    """

    mode: str
    parameter: float
    r_squared: float
    window: tuple
    fit_residual: float
    convergent: bool

    def as_row(self):
        return [self.mode, format(self.parameter, ".17g"), format(self.r_squared, ".17g"),
                str(self.window[0]), str(self.window[1])]


def _lstsq_line(xs, ys):
    """Slope, R^2 and RMS residual of the least-squares line through (xs, ys)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    xc = xs - xs.mean()
    yc = ys - ys.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise ValueError("fit needs at least two distinct abscissae")
    slope = float(xc @ yc) / sxx
    resid = yc - slope * xc
    ss_res = float(resid @ resid)
    ss_tot = float(yc @ yc)
    # a flat sequence fitted exactly counts as a perfect fit
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return slope, r2, math.sqrt(ss_res / len(xs))


def _as_series(values, t):
    v = np.asarray(values, dtype=float).reshape(-1)
    if t is None:
        t = np.arange(v.size, dtype=float)
    else:
        t = np.asarray(t, dtype=float).reshape(-1)
        if t.shape != v.shape:
            raise ValueError(f"t has {t.size} entries but values has {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    return v, t


def fit_linear_ratio(gaps, t=None, d_star=None, tail=TAIL_FRACTION):
    """Fit gap_t ~ C r^t on the tail of a sequence.

    The series is cut at the first entry that is non-positive or, when
    ``d_star`` is given, below ``1e2 * eps * max(|d_star|, 1)`` (rounding
    noise).  The last ``tail`` fraction of what remains is fitted, using at
    least two points.

    Raises
    ------
    ValueError
        fewer than 20 inputs, non-finite input, or fewer than two usable
        points before the cut.
    """
    v, t = _as_series(gaps, t)
    if v.size < MIN_LINEAR_POINTS:
        raise ValueError(f"fit_linear_ratio needs at least {MIN_LINEAR_POINTS} values, got {v.size}")
    floor = 0.0 if d_star is None else FLOOR_FACTOR * EPS * max(abs(d_star), 1.0)
    bad = np.flatnonzero(v <= floor)
    stop = int(bad[0]) if bad.size else v.size
    if stop < MIN_WINDOW:
        raise ValueError("gaps must be positive (above the rounding floor) for at least two sweeps")
    start = min(int(math.floor(stop * (1.0 - tail))), stop - MIN_WINDOW)
    ts, vs = t[start:stop], v[start:stop]
    slope, r2, res = _lstsq_line(ts, np.log(vs))
    ratio = math.exp(slope)
    return RateReport("linear", ratio, r2, (int(ts[0]), int(ts[-1])), res,
                      ratio < 1.0 - NONCONVERGENT_MARGIN)


def fit_power_law(values, skip=0, t=None):
    """Fit value_t ~ C (t + 1)^kappa over entries ``skip`` onwards.

    ``t`` defaults to 0, 1, 2, ...; pass the recorded sweep indices when the
    history was thinned.
    """
    v, t = _as_series(values, t)
    if skip < 0:
        raise ValueError("skip must be nonnegative")
    v, t = v[skip:], t[skip:]
    if v.size < MIN_POWER_POINTS:
        raise ValueError(f"fit_power_law needs at least {MIN_POWER_POINTS} values after skip, got {v.size}")
    if np.any(v <= 0.0):
        raise ValueError("values must be positive after skip")
    if np.any(t < 0):
        raise ValueError("sweep indices must be nonnegative")
    slope, r2, res = _lstsq_line(np.log(t + 1.0), np.log(v))
    return RateReport("power_law", slope, r2, (int(t[0]), int(t[-1])), res, slope < 0.0)


def _check_grid(eps_grid):
    eps = np.asarray(eps_grid, dtype=float).reshape(-1)
    if eps.size < 6:
        raise ValueError("eps_grid needs at least 6 points")
    if np.any(eps <= 0.0) or np.any(eps > 0.1):
        raise ValueError("eps_grid must lie in (0, 0.1]")
    return eps


def path_gaps(p, eps_grid):
    """d(y) - d* along y = (1, eps) on the tight p-ball instance."""
    if not (1.0 < p <= 2.0):
        raise ValueError("p must lie in (1, 2]")
    inst = tight_instance(p)
    return np.array([dual_objective(inst, [np.array([1.0, e])]) - TIGHT_D_STAR for e in eps_grid])


def fit_path_exponent(p, eps_grid):
    """Log-log slope of the dual gap against eps along y = (1, eps).

    The expected value is p / (p - 1).
    """
    eps = _check_grid(eps_grid)
    gaps = path_gaps(p, eps)
    if np.any(gaps <= 0.0):
        raise ValueError("dual gap along the path is not positive; grid too fine for double precision")
    slope, _, _ = _lstsq_line(np.log(eps), np.log(gaps))
    return slope


def fit_path_dist_exponent(eps_grid):
    """Log-log slope of dist((1, eps), (1, 0)) against eps; exactly 1."""
    eps = _check_grid(eps_grid)
    dist = np.array([math.hypot(0.0, e) for e in eps])
    slope, _, _ = _lstsq_line(np.log(eps), np.log(dist))
    return slope


REPORT_COLUMNS = ["mode", "parameter", "r_squared", "window_start", "window_end"]


def write_rate_report(reports, path_or_file):
    """Write reports as CSV; one row per report."""
    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in reports:
            w.writerow(r.as_row())

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


__all__ = [
    "RateReport",
    "fit_linear_ratio",
    "fit_power_law",
    "fit_path_exponent",
    "fit_path_dist_exponent",
    "path_gaps",
    "write_rate_report",
    "REPORT_COLUMNS",
]

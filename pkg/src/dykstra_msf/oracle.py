"""Independent ground truth for checking the solver.

Contents: an enumerative active-set solver for projections onto polyhedra,
closed forms for two small worked instances (a p-norm ball seen through a
rank-one map, and a pair of cones where the dual iterates follow an explicit
recurrence), and a Jacobi eigenvalue routine.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InfeasibleError
from .model import Instance
from .sets import Box, Halfspace, Hyperplane, NonnegativeOrthant, PNormBall, PolarReflectedCone

MAX_ROWS = 24


@dataclass(frozen=True, eq=False)
class PolyhedralQP:
    """min 0.5 ||x - anchor||^2 subject to G x <= h."""

    anchor: np.ndarray
    G: np.ndarray
    h: np.ndarray
    # index pairs of rows that together encode one equality
    equality_pairs: tuple = ()

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.G, dtype=float))
        h = np.asarray(self.h, dtype=float).reshape(-1)
        v = np.asarray(self.anchor, dtype=float).reshape(-1)
        if G.shape != (h.shape[0], v.shape[0]):
            raise ValueError(f"constraint rows {G.shape} do not match h {h.shape} and anchor {v.shape}")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "anchor", v)

    @property
    def n_rows(self):
        return self.G.shape[0]

    @classmethod
    def from_instance(cls, inst):
        """Collect the inequality rows of an instance built from polyhedral sets."""
        rows, rhs, pairs = [], [], []
        for i, blk in enumerate(inst.blocks):
            A, C = blk.A, blk.set
            if isinstance(C, Halfspace):
                rows.append(A.T @ C.a)
                rhs.append(C.b)
            elif isinstance(C, Hyperplane):
                g = A.T @ C.a
                pairs.append((len(rows), len(rows) + 1))
                rows += [g, -g]
                rhs += [C.b, -C.b]
            elif isinstance(C, Box):
                for k in range(C.dim):
                    if math.isfinite(C.upper[k]):
                        rows.append(A[k].copy())
                        rhs.append(C.upper[k])
                    if math.isfinite(C.lower[k]):
                        rows.append(-A[k])
                        rhs.append(-C.lower[k])
            elif isinstance(C, NonnegativeOrthant):
                for k in range(C.dim):
                    rows.append(-A[k])
                    rhs.append(0.0)
            else:
                raise ValueError(f"block {i}: {C.kind} is not supported by the polyhedral oracle")
        G = np.array(rows) if rows else np.zeros((0, inst.n))
        return cls(inst.anchor.copy(), G, np.array(rhs), tuple(pairs))


@dataclass
class QPSolution:
    x: np.ndarray
    active: tuple
    multipliers: np.ndarray
    subsets_checked: int

    def equality_multipliers(self, qp):
        """Signed multiplier of each equality, as the difference of its two rows."""
        lookup = dict(zip(self.active, self.multipliers))
        return [lookup.get(i, 0.0) - lookup.get(j, 0.0) for i, j in qp.equality_pairs]


def solve_qp_activeset(qp, feas_tol=1e-9, mult_tol=1e-9):
    """Exact projection by enumerating active sets in order of size.

    Returns the first subset whose equality-constrained minimizer is feasible
    with nonnegative multipliers; by KKT sufficiency that point is the
    projection.  Subsets with linearly dependent rows are skipped.
    """
    if qp.n_rows > MAX_ROWS:
        raise ValueError(f"active-set enumeration is limited to {MAX_ROWS} rows, got {qp.n_rows}")
    if qp.n_rows == 0:
        return QPSolution(qp.anchor.copy(), (), np.zeros(0), 1)
    x, active, mu, checked = kernels.activeset_solve(qp.G, qp.h, qp.anchor, feas_tol, mult_tol)
    if x is None:
        raise InfeasibleError(f"no feasible KKT point among {checked} active sets; constraints are infeasible")
    return QPSolution(np.asarray(x), tuple(int(i) for i in active), np.asarray(mu), int(checked))


def eig_max_sym(M, tol=1e-13):
    """Largest eigenvalue of (M + M^T) / 2 by cyclic Jacobi rotations."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("eig_max_sym needs a square matrix")
    if M.shape[0] > 50:
        raise ValueError("eig_max_sym is meant for matrices up to 50 x 50")
    S = 0.5 * (M + M.T)
    vals, _, _ = kernels.jacobi_eigvalsh(np.ascontiguousarray(S), tol)
    return float(np.max(vals))


# --- p-norm ball through a rank-one map -------------------------------------


def tight_instance(p):
    """Project (2, 0) onto {x : (x_1, 0) in unit p-ball}; solution (1, 0)."""
    A = np.array([[1.0, 0.0], [0.0, 0.0]])
    return Instance(np.array([2.0, 0.0]), [(A, PNormBall(np.zeros(2), 1.0, p))])


TIGHT_X_STAR = np.array([1.0, 0.0])
TIGHT_Y_STAR = (np.array([1.0, 0.0]),)
TIGHT_D_STAR = -0.5


def example_tight(p, eps):
    """Closed-form (gap, dist) at the dual point (1, eps) of :func:`tight_instance`.

    gap = (1 + eps^q)^(1/q) - 1 with q = p / (p - 1), and dist = eps.
    """
    if not (1.0 < p <= 2.0):
        raise ValueError("p must lie in (1, 2]")
    if not (0.0 <= eps <= 1.0):
        raise ValueError("eps must lie in [0, 1]")
    q = p / (p - 1.0)
    # expm1/log1p keep the gap accurate when eps^q is tiny
    gap = math.expm1(math.log1p(eps**q) / q)
    return gap, float(eps)


# --- two cones where linear convergence fails -------------------------------


def nonlinear_instance():
    """Project (1, -1, 1) onto {x_3 <= -||(x_1, x_2)||} intersected with {x_1 = 0}."""
    eye = np.eye(3)
    C1 = PolarReflectedCone((-1, -2, -3))
    C2 = Hyperplane(np.array([1.0, 0.0, 0.0]), 0.0)
    return Instance(np.array([1.0, -1.0, 1.0]), [(eye, C1), (eye, C2)])


NONLINEAR_X_STAR = np.zeros(3)
NONLINEAR_Y_STAR = (np.array([0.0, -1.0, 1.0]), np.array([1.0, 0.0, 0.0]))
NONLINEAR_D_STAR = -1.5


def nonlinear_dist(y):
    """Distance of a dual point to the (single-point) solution set."""
    return math.sqrt(sum(float(np.sum((yi - si) ** 2)) for yi, si in zip(y, NONLINEAR_Y_STAR)))


def example_fails_recurrence(T):
    """Analytic dual trajectory of :func:`nonlinear_instance` for t = 0..T.

    Returns a list of ``(a_t, y1_t, y2_t, dist_sq_t)``.  With a_0 = 1,
    a_{t+1} = (1 + 1/sqrt(a_t^2 + 1)) a_t / 2 and for t >= 0

        y1_{t+1} = (a_{t+1}, -(1 + 1/s_t)/2, (1 + s_t)/2),  s_t = sqrt(a_t^2 + 1)
        y2_{t+1} = (1 - a_{t+1}, 0, 0)

    while y1_0 = y2_0 = 0.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    y1 = np.zeros(3)
    y2 = np.zeros(3)
    a = 1.0
    out = [(a, y1, y2, nonlinear_dist((y1, y2)) ** 2)]
    for _ in range(T):
        s = math.sqrt(a * a + 1.0)
        a_next = 0.5 * (1.0 + 1.0 / s) * a
        y1 = np.array([a_next, -0.5 * (1.0 + 1.0 / s), 0.5 * (1.0 + s)])
        y2 = np.array([1.0 - a_next, 0.0, 0.0])
        a = a_next
        out.append((a, y1, y2, nonlinear_dist((y1, y2)) ** 2))
    return out


__all__ = [
    "PolyhedralQP",
    "QPSolution",
    "solve_qp_activeset",
    "eig_max_sym",
    "tight_instance",
    "example_tight",
    "nonlinear_instance",
    "nonlinear_dist",
    "example_fails_recurrence",
    "TIGHT_X_STAR",
    "TIGHT_Y_STAR",
    "TIGHT_D_STAR",
    "NONLINEAR_X_STAR",
    "NONLINEAR_Y_STAR",
    "NONLINEAR_D_STAR",
]

"""Problem instances and the dual quantities the solver works with.

An instance asks for the projection of an anchor ``v`` onto the set of points
``x`` with ``A_i x in C_i`` for every block ``i``.  Dual points are lists of
block vectors ``y = [y_1, ..., y_l]`` with ``y_i`` matching the rows of
``A_i``.  The dual objective is

    d(y) = 0.5 * ||sum_i A_i^T y_i - v||^2 - 0.5 * ||v||^2 + sum_i sigma_i(y_i)

and the primal point recovered from ``y`` is ``v - sum_i A_i^T y_i``.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError
from .sets import ConvexSet

GAMMA_SAFETY = 1e-6
POWER_MAXITER = 500
POWER_RTOL = 1e-12
POWER_SEED = 20240611


def power_iteration(A, maxiter=POWER_MAXITER, rtol=POWER_RTOL, seed=POWER_SEED):
    """Estimate the largest eigenvalue of A^T A by power iteration.

    Iterates on whichever of A^T A and A A^T is smaller (they share nonzero
    eigenvalues) from a seeded Gaussian start vector, stopping when the
    Rayleigh quotient changes by less than ``rtol`` relatively.
    """
    A = np.asarray(A, dtype=float)
    M = A.T @ A if A.shape[1] <= A.shape[0] else A @ A.T
    v = np.random.default_rng(seed).standard_normal(M.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(maxiter):
        w = M @ v
        lam_new = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(lam_new - lam) <= rtol * abs(lam_new):
            return lam_new
        lam = lam_new
    return lam


def compute_gamma(A):
    """Step constant for a block: the largest eigenvalue of A^T A, inflated by 1e-6."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or not np.any(A != 0):
        raise ValueError("compute_gamma needs a nonzero matrix")
    return (1.0 + GAMMA_SAFETY) * power_iteration(A)


def _is_identity(A):
    return A.shape[0] == A.shape[1] and np.array_equal(A, np.eye(A.shape[0]))


class Block(NamedTuple):
    A: np.ndarray
    set: ConvexSet


@dataclass(frozen=True, eq=False)
class Instance:
    """Anchor point plus an ordered list of (A_i, C_i) blocks.

    ``gamma`` is computed at construction.  Blocks whose matrix is exactly the
    identity get gamma = 1 so that the sweep coincides with classical Dykstra.
    """

    anchor: np.ndarray
    blocks: tuple

    def __post_init__(self):
        v = np.array(self.anchor, dtype=float).reshape(-1)
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ValueError("anchor must be a nonempty finite vector")
        v.flags.writeable = False
        if len(self.blocks) == 0:
            raise ValueError("an instance needs at least one block")
        blocks = []
        gammas = []
        identity = []
        for i, blk in enumerate(self.blocks):
            A, C = blk
            A = np.array(A, dtype=float)
            if A.ndim != 2 or A.shape[1] != v.shape[0]:
                raise DimensionError(f"block {i}: A must have {v.shape[0]} columns, got shape {A.shape}")
            if A.shape[0] != C.dim:
                raise DimensionError(f"block {i}: A has {A.shape[0]} rows but the set has dimension {C.dim}")
            if not np.all(np.isfinite(A)):
                raise ValueError(f"block {i}: A must be finite")
            if not np.any(A != 0):
                raise ValueError(f"block {i}: A must have a nonzero entry")
            A.flags.writeable = False
            eye = _is_identity(A)
            blocks.append(Block(A, C))
            identity.append(eye)
            gammas.append(1.0 if eye else compute_gamma(A))
        object.__setattr__(self, "anchor", v)
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "gamma", tuple(gammas))
        object.__setattr__(self, "identity", tuple(identity))

    @property
    def n(self):
        return self.anchor.shape[0]

    @property
    def n_blocks(self):
        return len(self.blocks)

    @property
    def block_dims(self):
        return tuple(b.A.shape[0] for b in self.blocks)

    def zero_dual(self):
        return [np.zeros(m) for m in self.block_dims]

    def check_dual(self, y):
        if len(y) != self.n_blocks:
            raise DimensionError(f"dual point has {len(y)} blocks, instance has {self.n_blocks}")
        out = []
        for i, (yi, m) in enumerate(zip(y, self.block_dims)):
            yi = np.asarray(yi, dtype=float)
            if yi.shape != (m,):
                raise DimensionError(f"dual block {i} has shape {yi.shape}, expected ({m},)")
            out.append(yi)
        return out

    def lipschitz(self):
        """||A^T A|| for the stacked matrix, the Lipschitz constant of grad g."""
        stacked = np.vstack([b.A for b in self.blocks])
        return float(np.linalg.norm(stacked, 2) ** 2)


def dual_norm(y):
    return math.sqrt(sum(float(yi @ yi) for yi in y))


def dual_diff_norm(y, w):
    return math.sqrt(sum(float((a - b) @ (a - b)) for a, b in zip(y, w)))


def primal_from_dual(inst, y):
    """x = v - sum_i A_i^T y_i."""
    y = inst.check_dual(y)
    x = inst.anchor.copy()
    for blk, yi, eye in zip(inst.blocks, y, inst.identity):
        x -= yi if eye else blk.A.T @ yi
    return x


def smooth_part(inst, y):
    """g(y) = 0.5 ||A^T y - v||^2 - 0.5 ||v||^2."""
    x = primal_from_dual(inst, y)
    v = inst.anchor
    return 0.5 * float(x @ x) - 0.5 * float(v @ v)


def dual_gradient(inst, y):
    """Blocks A_i (A^T y - v) = -A_i x of the gradient of g."""
    x = primal_from_dual(inst, y)
    return [-(x if eye else blk.A @ x) for blk, eye in zip(inst.blocks, inst.identity)]


def dual_objective(inst, y):
    """g(y) + sum_i support(C_i, y_i); ``math.inf`` when any support term is."""
    y = inst.check_dual(y)
    total = 0.0
    for blk, yi in zip(inst.blocks, y):
        s = blk.set.support(yi)
        if math.isinf(s):
            return math.inf
        total += s
    return smooth_part(inst, y) + total


def residual_map(inst, y):
    """Prox-gradient residual y - prox_sigma(y - grad g(y)), blockwise."""
    y = inst.check_dual(y)
    grad = dual_gradient(inst, y)
    return [
        yi - blk.set.prox_scaled_support(yi - gi, 1.0)
        for blk, yi, gi in zip(inst.blocks, y, grad)
    ]


def feasibility_residuals(inst, x):
    """dist(A_i x, C_i) for every block."""
    x = np.asarray(x, dtype=float)
    return [blk.set.distance(blk.A @ x) for blk in inst.blocks]

"""Seeded random instances with a known feasible point.

Every generator draws a point ``x_feas`` and, for each block, a point
``target`` of the set (strictly inside when the set has interior).  A rank-one
correction then makes ``A x_feas = target``, so the intersection is nonempty.
"""
import numpy as np

from . import sets
from .model import Instance
from .oracle import PolyhedralQP, solve_qp_activeset

MIXED_KINDS = ("box", "halfspace", "hyperplane", "affine", "ball2", "ballp",
               "soc", "soc_reflected", "orthant")
INTERIOR_KINDS = ("box", "halfspace", "ball2", "ballp", "soc", "soc_reflected", "orthant")
POLYHEDRAL_KINDS = ("box", "halfspace")


def random_set(rng, kind, m):
    """Draw a set of the given kind and a point of it.

    ``m`` is the dimension (at least 2 for cones).  The point is strictly
    inside when the set has interior.
    """
    if kind == "box":
        lo = rng.uniform(-2.0, 0.0, m)
        hi = lo + rng.uniform(0.5, 2.0, m)
        # occasionally leave one side open
        if m > 1 and rng.random() < 0.3:
            j = rng.integers(m)
            if rng.random() < 0.5:
                lo[j] = -np.inf
                target = hi.copy() - 0.5
            else:
                hi[j] = np.inf
                target = lo.copy() + 0.5
            mask = np.isfinite(lo) & np.isfinite(hi)
            target[mask] = 0.5 * (lo[mask] + hi[mask])
        else:
            target = 0.5 * (lo + hi)
        return sets.Box(lo, hi), target
    if kind in ("halfspace", "hyperplane"):
        a = rng.standard_normal(m)
        target = rng.standard_normal(m)
        b = float(a @ target)
        if kind == "halfspace":
            return sets.Halfspace(a, b + rng.uniform(0.1, 1.0)), target
        return sets.Hyperplane(a, b), target
    if kind == "affine":
        k = int(rng.integers(0, m))
        B = rng.standard_normal((m, k))
        anchor = rng.standard_normal(m)
        return sets.AffineSubspace(B, anchor), anchor + B @ rng.standard_normal(k)
    if kind == "ball2":
        c = rng.standard_normal(m)
        r = rng.uniform(0.5, 2.0)
        return sets.EuclideanBall(c, r), c + 0.3 * r * rng.uniform(-1, 1, m) / np.sqrt(m)
    if kind == "ballp":
        c = rng.standard_normal(m)
        r = rng.uniform(0.5, 2.0)
        p = float(rng.choice([1.25, 1.5, 2.0, 3.0, 4.5]))
        return sets.PNormBall(c, r, p), c + 0.3 * r * rng.uniform(-1, 1, m) / m
    if kind == "soc":
        m = max(m, 2)
        target = np.zeros(m)
        target[:-1] = 0.3 * rng.standard_normal(m - 1)
        target[-1] = np.linalg.norm(target[:-1]) + rng.uniform(0.2, 1.0)
        return sets.SecondOrderCone(m), target
    if kind == "soc_reflected":
        m = max(m, 2)
        perm = rng.permutation(m) + 1
        signs = rng.choice([-1, 1], m)
        C = sets.PolarReflectedCone(tuple(int(s * k) for s, k in zip(signs, perm)))
        z = np.zeros(m)
        z[:-1] = 0.3 * rng.standard_normal(m - 1)
        z[-1] = np.linalg.norm(z[:-1]) + rng.uniform(0.2, 1.0)
        return C, C._backward(z)
    if kind == "orthant":
        return sets.NonnegativeOrthant(m), rng.uniform(0.2, 1.5, m)
    raise ValueError(f"unknown set kind {kind!r}")


def _set_rows(kind, m):
    if kind in ("halfspace", "hyperplane"):
        return 1
    if kind in ("soc", "soc_reflected"):
        return max(m, 2)
    return m


def _fit_matrix(rng, m, n, x_feas, target):
    A = rng.standard_normal((m, n))
    A += np.outer(target - A @ x_feas, x_feas) / float(x_feas @ x_feas)
    return A


def _draw_blocks(rng, kinds, n_max, l_max):
    """Return (x_feas, blocks).  Only the first block may be the identity;
    when it is, x_feas is taken to be that block's target."""
    n = int(rng.integers(2, n_max + 1))
    ell = int(rng.integers(1, l_max + 1))
    x_feas = rng.standard_normal(n)
    blocks = []
    for i in range(ell):
        kind = str(rng.choice(kinds))
        if i == 0 and _set_rows(kind, n) == n and rng.random() < 0.25:
            C, target = random_set(rng, kind, n)
            x_feas = target
            blocks.append((np.eye(n), C))
            continue
        m = _set_rows(kind, int(rng.integers(1, n + 1)))
        C, target = random_set(rng, kind, m)
        blocks.append((_fit_matrix(rng, C.dim, n, x_feas, target), C))
    return x_feas, blocks


def random_instance(rng, kinds=MIXED_KINDS, n_max=8, l_max=4, anchor_scale=3.0):
    """Instance with 1..l_max blocks of kinds drawn from ``kinds``, n in 2..n_max.

    The anchor is a Gaussian perturbation of a common feasible point.
    """
    x_feas, blocks = _draw_blocks(rng, kinds, n_max, l_max)
    v = x_feas + anchor_scale * rng.standard_normal(x_feas.size)
    return Instance(v, blocks)


def random_feasible_anchor_instance(rng, n_max=8, l_max=4):
    """Interior-type sets only, anchored at a point strictly inside every block."""
    x_feas, blocks = _draw_blocks(rng, INTERIOR_KINDS, n_max, l_max)
    return Instance(x_feas, blocks)


def random_polyhedral_instance(rng, n_max=6, max_rows=10, min_active=2):
    """Halfspace and box blocks with at most ``max_rows`` inequality rows in total.

    The anchor is drawn outside the feasible region, and draws are repeated
    until the projection has at least ``min_active`` active rows; with a
    single active row the sweep lands on the solution almost at once and
    there is no rate to observe.
    """
    while True:
        inst = _polyhedral_draw(rng, n_max, max_rows)
        qp = PolyhedralQP.from_instance(inst)
        if len(solve_qp_activeset(qp).active) >= min_active:
            return inst


def _polyhedral_draw(rng, n_max, max_rows):
    n = int(rng.integers(2, n_max + 1))
    x_feas = rng.standard_normal(n)
    blocks = []
    rows = 0
    while True:
        kind = str(rng.choice(POLYHEDRAL_KINDS))
        m = 1 if kind == "halfspace" else int(rng.integers(1, min(3, n) + 1))
        C, target = random_set(rng, kind, m)
        # box rows: one per finite bound
        cost = 1 if kind == "halfspace" else int(np.sum(np.isfinite(C.lower)) + np.sum(np.isfinite(C.upper)))
        if rows + cost > max_rows:
            break
        rows += cost
        blocks.append((_fit_matrix(rng, C.dim, n, x_feas, target), C))
        if len(blocks) >= 2 and rng.random() < 0.3:
            break
    if not blocks:
        C, target = random_set(rng, "halfspace", 1)
        blocks.append((_fit_matrix(rng, 1, n, x_feas, target), C))
    # redraw until the anchor is clearly outside, so the projection is not trivial
    while True:
        v = x_feas + 3.0 * rng.standard_normal(n)
        if max(C.distance(A @ v) for A, C in blocks) > 1e-2:
            return Instance(v, blocks)


__all__ = [
    "random_set",
    "random_instance",
    "random_feasible_anchor_instance",
    "random_polyhedral_instance",
    "MIXED_KINDS",
    "INTERIOR_KINDS",
]

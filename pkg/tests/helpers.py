"""Shared checks for projection properties, used by unit and acceptance tests."""
import math

import numpy as np

from dykstra_msf import sets
from dykstra_msf.random_instances import MIXED_KINDS, random_set

EPS = np.finfo(float).eps
ALL_KINDS = MIXED_KINDS


def draw_set(rng, kind):
    m = int(rng.integers(2, 6)) if kind in ("soc", "soc_reflected") else int(rng.integers(1, 6))
    return random_set(rng, kind, m)[0]


def sample_in_set(C, rng, k):
    """k points of C: projections of wide Gaussian draws, plus exact interior points for p-balls."""
    if isinstance(C, sets.PNormBall):
        w = rng.standard_normal((k, C.dim))
        norms = np.sum(np.abs(w) ** C.p, axis=1) ** (1.0 / C.p)
        t = rng.uniform(0.0, 1.0, k) ** (1.0 / C.dim)
        return C.center + C.radius * (t / norms)[:, None] * w
    return np.array([C.project(3.0 * rng.standard_normal(C.dim)) for _ in range(k)])


def projection_trial(C, rng, n_z=100):
    """Run every projection property on one random input; return a dict of failures."""
    fails = {}
    scale = 10.0 ** rng.uniform(-1, 1.5)
    u = scale * rng.standard_normal(C.dim)
    w = u + rng.standard_normal(C.dim) * 10.0 ** rng.uniform(-3, 1)
    P = C.project(u)
    nu = float(np.linalg.norm(u))

    if np.linalg.norm(C.project(P) - P) > 1e-10 * (1.0 + np.linalg.norm(P)):
        fails["idempotence"] = float(np.linalg.norm(C.project(P) - P))

    if np.linalg.norm(P - C.project(w)) > np.linalg.norm(u - w) * (1 + 1e-10) + 1e-12:
        fails["nonexpansive"] = (float(np.linalg.norm(P - C.project(w))), float(np.linalg.norm(u - w)))

    Z = sample_in_set(C, rng, n_z)
    lhs = (Z - P) @ (u - P)
    bound = 1e-8 * (1.0 + nu) * (1.0 + np.linalg.norm(Z, axis=1))
    if np.any(lhs > bound):
        fails["variational"] = float(np.max(lhs - bound))

    prox = C.prox_scaled_support(u, 1.0)
    if np.max(np.abs(P + prox - u)) > 4 * EPS * (1.0 + np.max(np.abs(u))):
        fails["moreau"] = float(np.max(np.abs(P + prox - u)))

    # the normal direction at P is a dual vector whose support is attained at P
    y = u - P
    s = C.support(y)
    if math.isinf(s):
        fails["support_normal_finite"] = float(np.linalg.norm(y))
    else:
        if abs(s - float(y @ P)) > 1e-8 * (1.0 + np.linalg.norm(y)) * (1.0 + np.linalg.norm(P)):
            fails["support_attained"] = (s, float(y @ P))
        if np.any(Z @ y > s + 1e-8 * (1.0 + np.linalg.norm(y)) * (1.0 + np.linalg.norm(Z, axis=1))):
            fails["support_upper_bound"] = float(np.max(Z @ y) - s)

    # an arbitrary dual vector: support is either +inf or an upper bound
    y2 = rng.standard_normal(C.dim)
    s2 = C.support(y2)
    if math.isfinite(s2) and np.any(Z @ y2 > s2 + 1e-8):
        fails["support_random"] = float(np.max(Z @ y2) - s2)

    if isinstance(C, sets.PNormBall):
        if C.kkt_residual(u) > 1e-10:
            fails["pball_kkt"] = C.kkt_residual(u)
    return fails

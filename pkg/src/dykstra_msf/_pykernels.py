"""Numpy implementations of the numerical kernels.

These mirror ``_ckernels.pyx`` operation for operation and are used whenever the
compiled module is unavailable (or ``DYKSTRA_MSF_PURE_PYTHON`` is set).
"""
from itertools import combinations

import numpy as np

EPS = np.finfo(float).eps

# status codes shared with the compiled kernels
OK = 0
OUTER_FAILED = 1
INNER_FAILED = 2


def _inner_solve(a, lam, p, maxiter):
    """Solve s + lam*p*s**(p-1) = a for s in [0, a], coordinatewise."""
    s = a.copy()
    if lam == 0.0:
        return s, True
    c = lam * p
    active = a > 0.0
    with np.errstate(over="ignore", divide="ignore"):
        cap = (a / c) ** (1.0 / (p - 1.0))
    s = np.where(active, np.minimum(a, cap), 0.0)
    lo = np.zeros_like(a)
    hi = a.copy()
    # a zero cap means the root lies below the smallest double
    todo = active & (cap > 0.0)
    for _ in range(maxiter):
        if not todo.any():
            return s, True
        st = s[todo]
        at = a[todo]
        sp = st ** (p - 1.0)
        h = st + c * sp - at
        lo_t = np.where(h < 0.0, st, lo[todo])
        hi_t = np.where(h > 0.0, st, hi[todo])
        dh = 1.0 + c * (p - 1.0) * sp / st
        s_new = st - h / dh
        bad = ~((s_new > lo_t) & (s_new < hi_t))
        s_new = np.where(bad, 0.5 * (lo_t + hi_t), s_new)
        s_new = np.where(h == 0.0, st, s_new)
        done = (h == 0.0) | (np.abs(s_new - st) <= 2.0 * EPS * s_new) | (hi_t - lo_t <= 4.0 * EPS * at)
        lo[todo] = lo_t
        hi[todo] = hi_t
        s[todo] = s_new
        idx = np.flatnonzero(todo)
        todo[idx[done]] = False
    return s, not todo.any()


def pball_project_unit(a, p, tol=1e-12, maxiter=200, inner_maxiter=100):
    """Project the nonnegative vector ``a`` onto the unit p-norm ball.

    The caller guarantees ``||a||_p > 1``.  Returns ``(s, lam, phi, iters,
    status)`` where ``s`` solves ``s_i + lam*p*s_i**(p-1) = a_i`` and
    ``phi = ||s||_p - 1``.
    """
    a = np.ascontiguousarray(a, dtype=float)
    lam = 0.0
    lo, hi = 0.0, np.inf
    s = a.copy()
    phi = np.inf
    for it in range(1, maxiter + 1):
        s, ok = _inner_solve(a, lam, p, inner_maxiter)
        if not ok:
            return s, lam, phi, it, INNER_FAILED
        sp1 = s ** (p - 1.0)
        norm = np.sum(s * sp1) ** (1.0 / p)
        phi = norm - 1.0
        if abs(phi) <= tol:
            return s, lam, phi, it, OK
        if phi > 0.0:
            lo = lam
        else:
            hi = lam
        pos = s > 0.0
        sp = s[pos]
        sp1p = sp1[pos]
        ds = -p * sp1p / (1.0 + lam * p * (p - 1.0) * sp1p / sp)
        dphi = norm ** (1.0 - p) * np.sum(sp1p * ds)
        lam_new = lam - phi / dphi if dphi < 0.0 else np.nan
        if np.isinf(hi):
            if not lam_new > lo:
                lam_new = 2.0 * max(lam, 1.0)
        elif not (lo < lam_new < hi):
            lam_new = 0.5 * (lo + hi)
        if lam_new == lam:
            return s, lam, phi, it, OUTER_FAILED
        lam = lam_new
    return s, lam, phi, maxiter, OUTER_FAILED


def soc_project(u):
    """Projection onto {(x, t): t >= ||x||}, last coordinate is t."""
    u = np.asarray(u, dtype=float)
    x = u[:-1]
    t = u[-1]
    nx = np.sqrt(np.dot(x, x))
    if nx <= t:
        return u.copy()
    if nx <= -t:
        return np.zeros_like(u)
    c = 0.5 * (nx + t)
    out = np.empty_like(u)
    out[:-1] = (c / nx) * x
    out[-1] = c
    return out


def _offdiag_norm(a):
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigvalsh(m, tol=1e-13, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, off_norm, sweeps)``; iteration stops once the
    off-diagonal Frobenius norm drops below ``tol * max(1, ||M||_F)``.
    """
    a = np.array(m, dtype=float, copy=True)
    n = a.shape[0]
    scale = max(1.0, float(np.sqrt(np.sum(a * a))))
    sweeps = 0
    off = _offdiag_norm(a)
    while off >= tol * scale and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * rowq
                a[q, :] = s * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
        sweeps += 1
        off = _offdiag_norm(a)
    return np.diag(a).copy(), off, sweeps


def _cholesky_solve(gram, rhs, rank_tol):
    """Solve gram @ mu = rhs; None when a pivot falls under the rank tolerance."""
    k = gram.shape[0]
    L = np.zeros((k, k))
    thresh = rank_tol * max(1.0, float(np.max(np.diag(gram)))) if k else 0.0
    for j in range(k):
        d = gram[j, j] - np.dot(L[j, :j], L[j, :j])
        if d <= thresh:
            return None
        L[j, j] = np.sqrt(d)
        for i in range(j + 1, k):
            L[i, j] = (gram[i, j] - np.dot(L[i, :j], L[j, :j])) / L[j, j]
    z = np.zeros(k)
    for i in range(k):
        z[i] = (rhs[i] - np.dot(L[i, :i], z[:i])) / L[i, i]
    mu = np.zeros(k)
    for i in range(k - 1, -1, -1):
        mu[i] = (z[i] - np.dot(L[i + 1:, i], mu[i + 1:])) / L[i, i]
    return mu


def activeset_solve(G, h, v, feas_tol=1e-9, mult_tol=1e-9, rank_tol=1e-10):
    """Enumerate active sets of min 0.5||x - v||^2 s.t. G x <= h.

    Subsets are visited by increasing cardinality.  Returns ``(x, active,
    multipliers, n_checked)`` for the first KKT-consistent subset, or
    ``(None, None, None, n_checked)`` when no subset qualifies.
    """
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    v = np.asarray(v, dtype=float)
    J, n = G.shape
    checked = 0
    slack = feas_tol * (1.0 + np.abs(h))
    for k in range(0, min(J, n) + 1):
        for S in combinations(range(J), k):
            checked += 1
            idx = list(S)
            GS = G[idx]
            if k:
                mu = _cholesky_solve(GS @ GS.T, GS @ v - h[idx], rank_tol)
                if mu is None or np.any(mu < -mult_tol):
                    continue
                x = v - GS.T @ mu
            else:
                mu = np.zeros(0)
                x = v.copy()
            if np.all(G @ x - h <= slack):
                return x, np.array(idx, dtype=np.intp), mu, checked
    return None, None, None, checked

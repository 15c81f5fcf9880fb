# cython: language_level=3
"""Compiled kernels; same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, fabs, INFINITY, isinf, isnan, NAN

cnp.import_array()

cdef double EPS = np.finfo(float).eps

OK = 0
OUTER_FAILED = 1
INNER_FAILED = 2


cdef int _inner_scalar(double a, double lam, double p, int maxiter, double *out) noexcept nogil:
    cdef double c, s, lo, hi, sp, h, dh, s_new
    cdef int it
    if a == 0.0 or lam == 0.0:
        out[0] = a
        return 1
    c = lam * p
    s = pow(a / c, 1.0 / (p - 1.0))
    if s == 0.0:
        # the root lies below the smallest double
        out[0] = 0.0
        return 1
    if not s < a:
        s = a
    lo = 0.0
    hi = a
    for it in range(maxiter):
        sp = pow(s, p - 1.0)
        h = s + c * sp - a
        if h == 0.0:
            out[0] = s
            return 1
        if h < 0.0:
            lo = s
        else:
            hi = s
        dh = 1.0 + c * (p - 1.0) * sp / s
        s_new = s - h / dh
        if not (s_new > lo and s_new < hi):
            s_new = 0.5 * (lo + hi)
        if fabs(s_new - s) <= 2.0 * EPS * s_new or hi - lo <= 4.0 * EPS * a:
            out[0] = s_new
            return 1
        s = s_new
    out[0] = s
    return 0


def pball_project_unit(a_in, double p, double tol=1e-12, int maxiter=200, int inner_maxiter=100):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_arr = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef double[::1] a = a_arr
    cdef Py_ssize_t n = a.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s_arr = a_arr.copy()
    cdef double[::1] s = s_arr
    cdef double lam = 0.0, lo = 0.0, hi = INFINITY, phi = INFINITY
    cdef double acc, norm, sp1, dphi, lam_new, ds
    cdef int it, ok
    for it in range(1, maxiter + 1):
        ok = 1
        for i in range(n):
            if not _inner_scalar(a[i], lam, p, inner_maxiter, &s[i]):
                ok = 0
        if not ok:
            return s_arr, lam, phi, it, INNER_FAILED
        acc = 0.0
        for i in range(n):
            if s[i] > 0.0:
                acc += s[i] * pow(s[i], p - 1.0)
        norm = pow(acc, 1.0 / p)
        phi = norm - 1.0
        if fabs(phi) <= tol:
            return s_arr, lam, phi, it, OK
        if phi > 0.0:
            lo = lam
        else:
            hi = lam
        dphi = 0.0
        for i in range(n):
            if s[i] > 0.0:
                sp1 = pow(s[i], p - 1.0)
                ds = -p * sp1 / (1.0 + lam * p * (p - 1.0) * sp1 / s[i])
                dphi += sp1 * ds
        dphi *= pow(norm, 1.0 - p)
        if dphi < 0.0:
            lam_new = lam - phi / dphi
        else:
            lam_new = NAN
        if isinf(hi):
            if not lam_new > lo:
                lam_new = 2.0 * (lam if lam > 1.0 else 1.0)
        elif not (lam_new > lo and lam_new < hi):
            lam_new = 0.5 * (lo + hi)
        if lam_new == lam:
            return s_arr, lam, phi, it, OUTER_FAILED
        lam = lam_new
    return s_arr, lam, phi, maxiter, OUTER_FAILED


def soc_project(u_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u_arr = np.ascontiguousarray(u_in, dtype=np.float64)
    cdef double[::1] u = u_arr
    cdef Py_ssize_t n = u.shape[0] - 1, i
    cdef double t = u[n], nx = 0.0, c
    for i in range(n):
        nx += u[i] * u[i]
    nx = sqrt(nx)
    if nx <= t:
        return u_arr.copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(n + 1)
    if nx <= -t:
        return out_arr
    cdef double[::1] out = out_arr
    c = 0.5 * (nx + t)
    for i in range(n):
        out[i] = (c / nx) * u[i]
    out[n] = c
    return out_arr


cdef double _offdiag(double[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j] * a[i, j]
    return sqrt(acc)


def jacobi_eigvalsh(m, double tol=1e-13, int max_sweeps=100):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a_arr = np.array(m, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] a = a_arr
    cdef Py_ssize_t n = a.shape[0], p, q, k
    cdef double scale = 0.0, off, apq, theta, t, c, s, xp, xq
    cdef int sweeps = 0
    for p in range(n):
        for q in range(n):
            scale += a[p, q] * a[p, q]
    scale = sqrt(scale)
    if scale < 1.0:
        scale = 1.0
    off = _offdiag(a)
    while off >= tol * scale and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp - s * xq
                    a[k, q] = s * xp + c * xq
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp - s * xq
                    a[q, k] = s * xp + c * xq
                a[p, q] = 0.0
                a[q, p] = 0.0
        sweeps += 1
        off = _offdiag(a)
    return np.diag(a_arr).copy(), off, sweeps


cdef bint _chol_solve(double[:, ::1] gram, double[::1] rhs, Py_ssize_t k, double rank_tol,
                      double[:, ::1] L, double[::1] z, double[::1] mu) noexcept nogil:
    cdef Py_ssize_t i, j, r
    cdef double d, acc, thresh, dmax = 1.0
    for j in range(k):
        if gram[j, j] > dmax:
            dmax = gram[j, j]
    thresh = rank_tol * dmax
    for j in range(k):
        acc = 0.0
        for r in range(j):
            acc += L[j, r] * L[j, r]
        d = gram[j, j] - acc
        if d <= thresh:
            return False
        L[j, j] = sqrt(d)
        for i in range(j + 1, k):
            acc = 0.0
            for r in range(j):
                acc += L[i, r] * L[j, r]
            L[i, j] = (gram[i, j] - acc) / L[j, j]
    for i in range(k):
        acc = 0.0
        for r in range(i):
            acc += L[i, r] * z[r]
        z[i] = (rhs[i] - acc) / L[i, i]
    for i in range(k - 1, -1, -1):
        acc = 0.0
        for r in range(i + 1, k):
            acc += L[r, i] * mu[r]
        mu[i] = (z[i] - acc) / L[i, i]
    return True


def activeset_solve(G_in, h_in, v_in, double feas_tol=1e-9, double mult_tol=1e-9, double rank_tol=1e-10):
    cdef double[:, ::1] G = np.ascontiguousarray(G_in, dtype=np.float64)
    cdef double[::1] h = np.ascontiguousarray(h_in, dtype=np.float64)
    cdef double[::1] v = np.ascontiguousarray(v_in, dtype=np.float64)
    cdef Py_ssize_t J = G.shape[0], n = G.shape[1]
    cdef Py_ssize_t kmax = J if J < n else n
    cdef Py_ssize_t k, i, j, r, a, b
    cdef long checked = 0
    cdef bint feasible, ok
    cdef double acc
    idx_arr = np.zeros(kmax + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] idx = idx_arr
    cdef double[:, ::1] gram = np.zeros((kmax + 1, kmax + 1))
    cdef double[:, ::1] L = np.zeros((kmax + 1, kmax + 1))
    cdef double[::1] rhs = np.zeros(kmax + 1)
    cdef double[::1] z = np.zeros(kmax + 1)
    mu_arr = np.zeros(kmax + 1)
    cdef double[::1] mu = mu_arr
    x_arr = np.zeros(n)
    cdef double[::1] x = x_arr
    for k in range(kmax + 1):
        for i in range(k):
            idx[i] = i
        while True:
            checked += 1
            ok = True
            if k > 0:
                for a in range(k):
                    for b in range(k):
                        acc = 0.0
                        for j in range(n):
                            acc += G[idx[a], j] * G[idx[b], j]
                        gram[a, b] = acc
                    acc = 0.0
                    for j in range(n):
                        acc += G[idx[a], j] * v[j]
                    rhs[a] = acc - h[idx[a]]
                ok = _chol_solve(gram, rhs, k, rank_tol, L, z, mu)
                if ok:
                    for a in range(k):
                        if mu[a] < -mult_tol:
                            ok = False
                            break
            if ok:
                for j in range(n):
                    acc = v[j]
                    for a in range(k):
                        acc -= G[idx[a], j] * mu[a]
                    x[j] = acc
                feasible = True
                for r in range(J):
                    acc = 0.0
                    for j in range(n):
                        acc += G[r, j] * x[j]
                    if acc - h[r] > feas_tol * (1.0 + fabs(h[r])):
                        feasible = False
                        break
                if feasible:
                    return x_arr, idx_arr[:k].copy(), mu_arr[:k].copy(), checked
            # next combination in lexicographic order
            i = k - 1
            while i >= 0 and idx[i] == J - k + i:
                i -= 1
            if i < 0:
                break
            idx[i] += 1
            for r in range(i + 1, k):
                idx[r] = idx[r - 1] + 1
    return None, None, None, checked

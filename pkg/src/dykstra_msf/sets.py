"""Closed convex sets given by projection, support function and membership.

Every set is immutable after construction.  Support functions return a Python
float, with ``math.inf`` standing for +infinity; they never return -infinity.

Domain tests inside support functions (is ``y`` in a polar cone, on the ray
spanned by a normal, orthogonal to a subspace) accept ``y`` when it is within
``DOMAIN_TOL * (1 + ||y||)`` of the domain, so dual iterates produced in
floating point do not spuriously evaluate to +infinity.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DimensionError, ProjectionError

DOMAIN_TOL = 1e-9

P_MIN = 1.1
P_MAX = 10.0


def _vec(x, name):
    arr = np.array(x, dtype=float, copy=True).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.flags.writeable = False
    return arr


def _frozen(arr):
    arr.flags.writeable = False
    return arr


def _dom_tol(y):
    return DOMAIN_TOL * (1.0 + float(np.linalg.norm(y)))


class ConvexSet:
    """Base class.  Subclasses implement ``_project`` and ``_support``."""

    kind = "abstract"
    dim: int

    def _check(self, u, what="u"):
        u = np.asarray(u, dtype=float)
        if u.ndim != 1 or u.shape[0] != self.dim:
            raise DimensionError(
                f"{self.kind}: {what} has shape {u.shape}, expected ({self.dim},)"
            )
        return u

    def project(self, u):
        """Euclidean projection of ``u`` onto the set."""
        return self._project(self._check(u))

    def support(self, y):
        """sup over z in the set of <y, z>, as a float (``math.inf`` allowed)."""
        return float(self._support(self._check(y, "y")))

    def contains(self, u, tol=1e-9):
        """True iff ||u - project(u)|| <= tol * (1 + ||u||)."""
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        u = self._check(u)
        gap = np.linalg.norm(u - self._project(u))
        return bool(gap <= tol * (1.0 + np.linalg.norm(u)))

    def distance(self, u):
        u = self._check(u)
        return float(np.linalg.norm(u - self._project(u)))

    def prox_scaled_support(self, u, r=1.0):
        """prox of ``r * support`` at ``u``, computed as u - r * project(u / r)."""
        if not r > 0:
            raise ValueError("r must be positive")
        u = self._check(u)
        return u - r * self._project(u / r)

    def to_dict(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


@dataclass(frozen=True, eq=False, repr=False)
class Box(ConvexSet):
    """{x : lower <= x <= upper}; infinite bounds are allowed."""

    lower: np.ndarray
    upper: np.ndarray
    kind = "box"

    def __post_init__(self):
        lo = np.array(self.lower, dtype=float).reshape(-1)
        hi = np.array(self.upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape or lo.size == 0:
            raise ValueError("box bounds must be nonempty and of equal length")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("box bounds must not be NaN")
        if np.any(lo > hi) or np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise ValueError("box requires lower <= upper with a nonempty interval")
        object.__setattr__(self, "lower", _frozen(lo))
        object.__setattr__(self, "upper", _frozen(hi))

    @property
    def dim(self):
        return self.lower.shape[0]

    def _project(self, u):
        return np.minimum(np.maximum(u, self.lower), self.upper)

    def _support(self, y):
        tol = _dom_tol(y)
        total = 0.0
        for yi, lo, hi in zip(y, self.lower, self.upper):
            if yi > 0.0:
                if math.isinf(hi):
                    if yi > tol:
                        return math.inf
                    continue
                total += yi * hi
            elif yi < 0.0:
                if math.isinf(lo):
                    if -yi > tol:
                        return math.inf
                    continue
                total += yi * lo
        return total

    def to_dict(self):
        return {"type": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class NonnegativeOrthant(ConvexSet):
    n: int
    kind = "orthant"

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError("orthant dimension must be positive")
        object.__setattr__(self, "n", int(self.n))

    @property
    def dim(self):
        return self.n

    def _project(self, u):
        return np.maximum(u, 0.0)

    def _support(self, y):
        # polar cone is the nonpositive orthant
        return 0.0 if np.linalg.norm(np.maximum(y, 0.0)) <= _dom_tol(y) else math.inf

    def to_dict(self):
        return {"type": "orthant"}


@dataclass(frozen=True, eq=False, repr=False)
class _NormalSet(ConvexSet):
    a: np.ndarray
    b: float

    def __post_init__(self):
        a = _vec(self.a, f"{self.kind} normal")
        if not np.any(a != 0):
            raise ValueError(f"{self.kind} normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "_aa", float(a @ a))

    @property
    def dim(self):
        return self.a.shape[0]

    def _ray_coefficient(self, y):
        t = float(self.a @ y) / self._aa
        off = np.linalg.norm(y - t * self.a)
        return t, off <= _dom_tol(y)

    def to_dict(self):
        return {"type": self.kind, "a": self.a.tolist(), "b": self.b}


@dataclass(frozen=True, eq=False, repr=False)
class Halfspace(_NormalSet):
    """{x : <a, x> <= b}."""

    kind = "halfspace"

    def _project(self, u):
        excess = self.a @ u - self.b
        if excess <= 0.0:
            return u.copy()
        return u - (excess / self._aa) * self.a

    def _support(self, y):
        t, on_line = self._ray_coefficient(y)
        if not on_line or t < -_dom_tol(y) / math.sqrt(self._aa):
            return math.inf
        return max(t, 0.0) * self.b


@dataclass(frozen=True, eq=False, repr=False)
class Hyperplane(_NormalSet):
    """{x : <a, x> = b}."""

    kind = "hyperplane"

    def _project(self, u):
        return u - ((self.a @ u - self.b) / self._aa) * self.a

    def _support(self, y):
        t, on_line = self._ray_coefficient(y)
        return t * self.b if on_line else math.inf


@dataclass(frozen=True, eq=False, repr=False)
class AffineSubspace(ConvexSet):
    """anchor + range(basis).  ``basis`` is n x k; k = 0 gives a single point."""

    basis: np.ndarray
    anchor: np.ndarray
    kind = "affine"

    def __post_init__(self):
        x0 = _vec(self.anchor, "affine anchor")
        B = np.array(self.basis, dtype=float)
        if B.size == 0:
            B = np.zeros((x0.shape[0], 0))
        if B.ndim != 2 or B.shape[0] != x0.shape[0]:
            raise ValueError("affine basis must have one row per coordinate of the anchor")
        if not np.all(np.isfinite(B)):
            raise ValueError("affine basis must be finite")
        if B.shape[1]:
            U, sv, _ = np.linalg.svd(B, full_matrices=False)
            rank = int(np.sum(sv > 1e-12 * max(1.0, sv[0])))
            Q = U[:, :rank].copy()
        else:
            Q = np.zeros((x0.shape[0], 0))
        # anchor component orthogonal to the directions, so support is exact
        x0_perp = x0 - Q @ (Q.T @ x0)
        object.__setattr__(self, "basis", _frozen(B))
        object.__setattr__(self, "anchor", x0)
        object.__setattr__(self, "_Q", _frozen(Q))
        object.__setattr__(self, "_x0_perp", _frozen(x0_perp))

    @property
    def dim(self):
        return self.anchor.shape[0]

    def _project(self, u):
        w = u - self.anchor
        return self.anchor + self._Q @ (self._Q.T @ w)

    def _support(self, y):
        along = self._Q.T @ y
        if np.linalg.norm(along) > _dom_tol(y):
            return math.inf
        return float(y @ self._x0_perp)

    def to_dict(self):
        return {"type": "affine", "basis": self.basis.tolist(), "anchor": self.anchor.tolist()}


@dataclass(frozen=True, eq=False, repr=False)
class EuclideanBall(ConvexSet):
    center: np.ndarray
    radius: float
    kind = "ball2"

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "ball center"))
        r = float(self.radius)
        if not (r > 0 and math.isfinite(r)):
            raise ValueError("ball radius must be positive and finite")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self):
        return self.center.shape[0]

    def _project(self, u):
        w = u - self.center
        nw = np.linalg.norm(w)
        if nw <= self.radius:
            return u.copy()
        return self.center + (self.radius / nw) * w

    def _support(self, y):
        return float(y @ self.center) + self.radius * float(np.linalg.norm(y))

    def to_dict(self):
        return {"type": "ball2", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False, repr=False)
class PNormBall(ConvexSet):
    """{x : ||x - center||_p <= radius} for p in [1.1, 10].

    Projection solves the multiplier equation of the KKT system with a
    safeguarded Newton iteration, see :func:`project_with_multiplier`.
    """

    center: np.ndarray
    radius: float
    p: float
    tol: float = field(default=1e-12)
    maxiter: int = field(default=200)
    inner_maxiter: int = field(default=100)
    kind = "ballp"

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "p-ball center"))
        r = float(self.radius)
        if not (r > 0 and math.isfinite(r)):
            raise ValueError("p-ball radius must be positive and finite")
        p = float(self.p)
        if not (P_MIN <= p <= P_MAX):
            raise ValueError(f"p must lie in [{P_MIN}, {P_MAX}], got {p}")
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "p", p)

    @property
    def dim(self):
        return self.center.shape[0]

    @property
    def q(self):
        """Dual exponent p / (p - 1)."""
        return self.p / (self.p - 1.0)

    def _solve(self, u):
        """Return (offset from center, multiplier) of the projection of u."""
        u = self._check(u)
        w = (u - self.center) / self.radius
        a = np.abs(w)
        norm = np.sum(a**self.p) ** (1.0 / self.p)
        if norm - 1.0 <= self.tol:
            return None, 0.0
        s, lam, phi, _, status = kernels.pball_project_unit(
            a, self.p, self.tol, self.maxiter, self.inner_maxiter
        )
        if status != kernels.OK:
            raise ProjectionError("p-ball projection did not converge", abs(phi))
        return self.radius * np.sign(w) * s, lam * self.radius ** (2.0 - self.p)

    def project_with_multiplier(self, u):
        """Return ``(x, lam)`` with x the projection and lam >= 0 its multiplier.

        lam solves x_i - u_i + lam * p * sign(x_i - c_i) |x_i - c_i|^(p-1) = 0
        together with ||x - c||_p = radius whenever u lies outside.
        """
        d, lam = self._solve(u)
        if d is None:
            return np.array(u, dtype=float, copy=True), 0.0
        return self.center + d, lam

    def _project(self, u):
        return self.project_with_multiplier(u)[0]

    def kkt_residual(self, u):
        """Max of the stationarity and boundary residuals of the projection of u.

        Evaluated on the offset from the center as computed by the solver;
        recomputing it as x - center would lose the relative accuracy that
        |x_i - c_i|^(p-1) needs when p < 2 and the offset is tiny.
        """
        u = self._check(u)
        d, lam = self._solve(u)
        if d is None:
            return 0.0
        grad = self.p * np.sign(d) * np.abs(d) ** (self.p - 1.0)
        stat = np.linalg.norm(d - (u - self.center) + lam * grad)
        primal = abs(np.sum(np.abs(d) ** self.p) ** (1.0 / self.p) - self.radius)
        return max(float(stat), float(primal))

    def _support(self, y):
        return float(y @ self.center) + self.radius * float(np.linalg.norm(y, self.q))

    def to_dict(self):
        return {"type": "ballp", "center": self.center.tolist(), "radius": self.radius, "p": self.p}


@dataclass(frozen=True, eq=False, repr=False)
class SecondOrderCone(ConvexSet):
    """{(x, t) : t >= ||x||}; ``n`` counts all coordinates including t."""

    n: int
    kind = "soc"

    def __post_init__(self):
        if int(self.n) < 2:
            raise ValueError("second-order cone needs dimension >= 2")
        object.__setattr__(self, "n", int(self.n))

    @property
    def dim(self):
        return self.n

    def _project(self, u):
        return kernels.soc_project(u)

    def _support(self, y):
        # polar cone is -SOC
        gap = np.linalg.norm(y + kernels.soc_project(-y))
        return 0.0 if gap <= _dom_tol(y) else math.inf

    def to_dict(self):
        return {"type": "soc"}


@dataclass(frozen=True, eq=False, repr=False)
class PolarReflectedCone(ConvexSet):
    """{x : Q x in SOC} for a signed coordinate permutation Q.

    ``orientation`` lists, for each coordinate k of Q x, a signed 1-based
    index: entry ``+j`` means (Qx)_k = x_j and ``-j`` means (Qx)_k = -x_j.
    ``[-1, -2, -3]`` gives {x : x_3 <= -||(x_1, x_2)||}.
    """

    orientation: tuple
    kind = "soc_reflected"

    def __post_init__(self):
        orient = tuple(int(k) for k in self.orientation)
        n = len(orient)
        if n < 2 or sorted(abs(k) for k in orient) != list(range(1, n + 1)):
            raise ValueError("orientation must be a signed permutation of 1..n with n >= 2")
        perm = np.array([abs(k) - 1 for k in orient], dtype=np.intp)
        signs = np.array([1.0 if k > 0 else -1.0 for k in orient])
        object.__setattr__(self, "orientation", orient)
        object.__setattr__(self, "_perm", _frozen(perm))
        object.__setattr__(self, "_signs", _frozen(signs))

    @property
    def dim(self):
        return len(self.orientation)

    def _forward(self, x):
        return self._signs * x[self._perm]

    def _backward(self, z):
        out = np.empty_like(z)
        out[self._perm] = self._signs * z
        return out

    def _project(self, u):
        return self._backward(kernels.soc_project(self._forward(u)))

    def _support(self, y):
        # polar is Q^T(-SOC): y belongs iff -Qy is in SOC
        z = -self._forward(y)
        gap = np.linalg.norm(z - kernels.soc_project(z))
        return 0.0 if gap <= _dom_tol(y) else math.inf

    def to_dict(self):
        return {"type": "soc_reflected", "orientation": list(self.orientation)}


def project(s, u):
    return s.project(u)


def support(s, y):
    return s.support(y)


def contains(s, u, tol=1e-9):
    return s.contains(u, tol)


def prox_scaled_support(s, u, r=1.0):
    return s.prox_scaled_support(u, r)


VARIANTS = {
    cls.kind: cls
    for cls in (
        Box,
        Halfspace,
        Hyperplane,
        AffineSubspace,
        EuclideanBall,
        PNormBall,
        SecondOrderCone,
        PolarReflectedCone,
        NonnegativeOrthant,
    )
}

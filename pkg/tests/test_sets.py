import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dykstra_msf import sets
from dykstra_msf.errors import DimensionError, ProjectionError
from helpers import ALL_KINDS, draw_set, projection_trial

INF = math.inf


# --- projection examples -----------------------------------------------------


def test_halfspace_projection_drops_along_normal():
    H = sets.Halfspace([1.0, 0.0], 1.0)
    np.testing.assert_array_equal(H.project([2.0, 0.0]), [1.0, 0.0])


def test_soc_projection_2d():
    np.testing.assert_allclose(sets.SecondOrderCone(2).project([1.0, 0.0]), [0.5, 0.5], atol=1e-15)


def test_soc_projection_matches_grid_search():
    # brute-force nearest point over a fine polar grid of the 2-d cone {t >= |x|}
    u = np.array([1.0, 0.0])
    r = np.linspace(0, 2, 2001)
    pts = np.concatenate([np.stack([r, r], 1), np.stack([-r, r], 1)])
    best = pts[np.argmin(np.sum((pts - u) ** 2, axis=1))]
    np.testing.assert_allclose(sets.SecondOrderCone(2).project(u), best, atol=1e-3)


def test_pball_axis_clamp():
    B = sets.PNormBall([0.0, 0.0], 1.0, 1.5)
    np.testing.assert_allclose(B.project([2.0, 0.0]), [1.0, 0.0], atol=1e-12)


def test_pball_frozen_offcenter():
    # reference from a 40-digit root solve of the multiplier equations
    B = sets.PNormBall([0.1, 0.0, 0.0], 1.5, 3.0)
    x, lam = B.project_with_multiplier([0.3, -2.0, 1.2])
    np.testing.assert_allclose(x, [0.28823435664700093835, -1.3735345925226271313, 0.91934413943172293816],
                               rtol=0, atol=1e-11)
    assert lam == pytest.approx(0.11068700514633649466, abs=1e-11)
    assert B.kkt_residual([0.3, -2.0, 1.2]) <= 1e-10


def test_pball_inside_is_untouched():
    B = sets.PNormBall([1.0, 1.0], 2.0, 4.0)
    u = np.array([1.5, 0.2])
    x, lam = B.project_with_multiplier(u)
    np.testing.assert_array_equal(x, u)
    assert lam == 0.0


def test_box_clamp():
    np.testing.assert_array_equal(sets.Box([0, 0], [1, 1]).project([-1.0, 0.5]), [0.0, 0.5])


def test_affine_point_and_line():
    pt = sets.AffineSubspace(np.zeros((2, 0)), [1.0, 2.0])
    np.testing.assert_allclose(pt.project([5.0, -3.0]), [1.0, 2.0])
    line = sets.AffineSubspace([[1.0], [1.0]], [0.0, 1.0])
    np.testing.assert_allclose(line.project([1.0, 0.0]), [0.0, 1.0], atol=1e-15)


def test_polar_reflected_cone_orientation():
    C = sets.PolarReflectedCone((-1, -2, -3))
    # {x3 <= -||(x1, x2)||}: points with very negative x3 are inside
    assert C.contains([0.3, 0.4, -1.0])
    assert not C.contains([0.0, 0.0, 1.0])
    np.testing.assert_allclose(C.project([0.0, 0.0, 1.0]), [0.0, 0.0, 0.0])


# --- support function ----------------------------------------------------------


@pytest.mark.parametrize("p", [1.25, 1.5, 2.0])
@pytest.mark.parametrize("eps", [1.0, 0.1, 1e-3])
def test_pball_support_closed_form(p, eps):
    B = sets.PNormBall([0.0, 0.0], 1.0, p)
    q = p / (p - 1.0)
    assert B.support([1.0, eps]) == pytest.approx((1.0 + eps**q) ** (1.0 / q), rel=1e-15)


def test_cone_support_at_dual_solution():
    assert sets.PolarReflectedCone((-1, -2, -3)).support([0.0, -1.0, 1.0]) == 0.0


def test_cone_support_outside_polar_is_inf():
    assert sets.PolarReflectedCone((-1, -2, -3)).support([0.0, 1.0, -1.0]) == INF
    assert sets.SecondOrderCone(3).support([0.0, 0.0, 1.0]) == INF
    assert sets.SecondOrderCone(3).support([0.5, 0.0, -1.0]) == 0.0


def test_halfspace_support_off_ray_is_inf():
    H = sets.Halfspace([1.0, 0.0], 1.0)
    assert H.support([0.0, 1.0]) == INF
    assert H.support([-1.0, 0.0]) == INF
    assert H.support([2.0, 0.0]) == 2.0


def test_hyperplane_support_any_sign():
    P = sets.Hyperplane([1.0, 0.0, 0.0], 0.5)
    assert P.support([-2.0, 0.0, 0.0]) == -1.0
    assert P.support([0.0, 1.0, 0.0]) == INF


def test_box_support_with_open_sides():
    B = sets.Box([-INF, 0.0], [1.0, INF])
    assert B.support([2.0, -3.0]) == 2.0
    assert B.support([-1.0, 0.0]) == INF
    assert B.support([0.0, 1.0]) == INF
    # rounding-level components along open directions are tolerated
    assert B.support([1.0, 1e-12]) == 1.0


def test_affine_support():
    A = sets.AffineSubspace([[1.0], [0.0]], [3.0, 2.0])
    assert A.support([0.0, 5.0]) == 10.0
    assert A.support([1.0, 0.0]) == INF


def test_orthant_support():
    O = sets.NonnegativeOrthant(3)
    assert O.support([-1.0, 0.0, -2.0]) == 0.0
    assert O.support([1.0, 0.0, 0.0]) == INF


def test_support_domain_tolerance_is_relative():
    H = sets.Halfspace([1.0, 0.0], 1.0)
    assert H.support([1e6, 1e-6]) == 1e6
    assert H.support([1.0, 1e-6]) == INF


# --- membership ---------------------------------------------------------------


def test_contains_examples():
    assert sets.Box([0, 0], [1, 1]).contains([0.5, 0.5], tol=0.0)
    assert not sets.SecondOrderCone(2).contains([1.0, 0.0], tol=1e-9)
    assert sets.EuclideanBall([0, 0], 1.0).contains([1 + 1e-12, 0.0], tol=1e-9)
    with pytest.raises(ValueError):
        sets.Box([0], [1]).contains([0.5], tol=-1.0)


# --- Moreau identity ------------------------------------------------------------


def test_prox_of_interior_point_is_zero():
    B = sets.EuclideanBall([0.0, 0.0], 1.0)
    np.testing.assert_array_equal(B.prox_scaled_support([0.6, 0.2], 2.0), [0.0, 0.0])


def test_prox_halfspace():
    H = sets.Halfspace([1.0, 0.0], 0.0)
    np.testing.assert_array_equal(H.prox_scaled_support([2.0, 0.0], 1.0), [2.0, 0.0])


def test_prox_box_1d():
    np.testing.assert_array_equal(sets.Box([-1.0], [1.0]).prox_scaled_support([3.0], 2.0), [1.0])


@pytest.mark.parametrize(
    "C",
    [
        sets.Box([-1.0], [1.0]),
        sets.Box([-1.0, 0.0], [0.5, 2.0]),
        sets.EuclideanBall([0.3, -0.2], 0.7),
        sets.PNormBall([0.0, 0.0], 1.0, 1.5),
        sets.Halfspace([1.0, 2.0], 0.5),
    ],
)
def test_prox_minimizes_scaled_support_on_grid(C, rng):
    # r * support(z) + 0.5 ||z - u||^2 over a grid never beats the prox value
    for _ in range(5):
        u = 2.0 * rng.standard_normal(C.dim)
        r = rng.uniform(0.3, 3.0)
        z_star = C.prox_scaled_support(u, r)

        def obj(z):
            return r * C.support(z) + 0.5 * float(np.sum((z - u) ** 2))

        f_star = obj(z_star)
        ax = np.linspace(-6, 6, 241 if C.dim == 2 else 4001)
        if C.dim == 1:
            grid = ax[:, None]
        else:
            grid = np.stack(np.meshgrid(ax, ax), -1).reshape(-1, 2)
        if isinstance(C, sets.Halfspace):
            # finite support only on the ray spanned by a
            grid = np.linspace(0, 6, 4001)[:, None] * C.a
        vals = np.array([obj(z) for z in grid])
        assert f_star <= vals.min() + 1e-9


def test_prox_rejects_nonpositive_scale():
    with pytest.raises(ValueError):
        sets.Box([0.0], [1.0]).prox_scaled_support([1.0], 0.0)


# --- construction and errors ----------------------------------------------------


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        sets.Box([0, 0], [1, 1]).project([1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        sets.SecondOrderCone(3).support([1.0])


@pytest.mark.parametrize(
    "build",
    [
        lambda: sets.PNormBall([0.0], 1.0, 1.05),
        lambda: sets.PNormBall([0.0], 1.0, 11.0),
        lambda: sets.PNormBall([0.0], -1.0, 2.0),
        lambda: sets.EuclideanBall([0.0], 0.0),
        lambda: sets.Halfspace([0.0, 0.0], 1.0),
        lambda: sets.Box([1.0], [0.0]),
        lambda: sets.Box([INF], [INF]),
        lambda: sets.PolarReflectedCone((1, 1)),
        lambda: sets.SecondOrderCone(1),
        lambda: sets.NonnegativeOrthant(0),
    ],
)
def test_invalid_parameters(build):
    with pytest.raises(ValueError):
        build()


def test_pball_failure_carries_residual():
    B = sets.PNormBall([0.0, 0.0, 0.0], 1.0, 1.7, maxiter=2)
    with pytest.raises(ProjectionError) as info:
        B.project([5.0, 4.0, 3.0])
    assert info.value.residual > 0


def test_sets_are_immutable():
    B = sets.EuclideanBall([0.0, 0.0], 1.0)
    with pytest.raises(Exception):
        B.radius = 2.0
    with pytest.raises(ValueError):
        B.center[0] = 1.0


def test_to_dict_roundtrip_fields():
    for kind, cls in sets.VARIANTS.items():
        assert cls.kind == kind


def test_module_level_functions():
    B = sets.Box([0.0], [1.0])
    np.testing.assert_array_equal(sets.project(B, [2.0]), [1.0])
    assert sets.support(B, [2.0]) == 2.0
    assert sets.contains(B, [0.5])
    np.testing.assert_array_equal(sets.prox_scaled_support(B, [3.0], 1.0), [2.0])


# --- randomized properties (the acceptance suite runs 1000 per variant) ---------


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_projection_properties_sampled(kind, rng):
    for _ in range(100):
        C = draw_set(rng, kind)
        assert projection_trial(C, rng, n_z=30) == {}


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3),
    st.floats(1.1, 10.0),
    st.floats(0.1, 10.0),
)
def test_pball_projection_lands_on_ball(u, p, radius):
    B = sets.PNormBall([0.0, 0.0, 0.0], radius, p)
    x = B.project(u)
    norm = np.sum(np.abs(x) ** p) ** (1.0 / p)
    assert norm <= radius * (1 + 1e-11)
    assert B.kkt_residual(u) <= 1e-10 * max(1.0, float(np.linalg.norm(u)))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=6))
def test_soc_projection_is_in_cone_and_idempotent(u):
    C = sets.SecondOrderCone(len(u))
    P = C.project(u)
    assert P[-1] >= np.linalg.norm(P[:-1]) * (1 - 1e-12) - 1e-12
    np.testing.assert_allclose(C.project(P), P, rtol=1e-12, atol=1e-12)

import numpy as np
import pytest

from dykstra_msf import _pykernels, kernels
from dykstra_msf.kernels import available_backends


def test_backend_flag_matches_module():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in available_backends()


def test_pball_unit_frozen(backend):
    # reference from a 40-digit root solve
    s, lam, phi, _, status = backend.pball_project_unit(np.array([2.0, 1.0]), 1.5)
    assert status == kernels.OK
    np.testing.assert_allclose(s, [0.87534845448283205877, 0.32000487666420173737], rtol=0, atol=1e-12)
    assert lam == pytest.approx(0.80137583185034145377, abs=1e-11)
    assert abs(phi) <= 1e-12


def test_pball_unit_p2_is_radial(backend):
    s, lam, _, _, status = backend.pball_project_unit(np.array([1.0, 1.0]), 2.0)
    assert status == kernels.OK
    np.testing.assert_allclose(s, [np.sqrt(0.5)] * 2, atol=1e-13)
    assert lam == pytest.approx(0.2071067811865475244, abs=1e-12)


def test_pball_unit_zero_coordinates(backend):
    s, _, _, _, status = backend.pball_project_unit(np.array([3.0, 0.0, 0.0]), 4.0)
    assert status == kernels.OK
    np.testing.assert_allclose(s, [1.0, 0.0, 0.0], atol=1e-12)


def test_pball_unit_underflowing_coordinate_is_zero(backend):
    # for p near 1 the root for a tiny coordinate is far below the smallest double
    s, lam, _, _, status = backend.pball_project_unit(np.array([0.0, 2.0, 2.4e-74]), 1.1015625)
    assert status == 0
    assert s[2] == 0.0
    assert s[1] == pytest.approx(1.0, abs=1e-12)


def test_pball_budget_exhaustion_is_reported(backend):
    _, _, _, _, status = backend.pball_project_unit(np.array([5.0, 4.0, 3.0]), 1.7, 1e-12, 2, 100)
    assert status == kernels.OUTER_FAILED


@pytest.mark.parametrize(
    "u, expected",
    [
        ([1.0, 0.0], [0.5, 0.5]),
        ([3.0, 4.0, 6.0], [3.0, 4.0, 6.0]),
        ([3.0, 4.0, -6.0], [0.0, 0.0, 0.0]),
        ([3.0, 4.0, 0.0], [1.5, 2.0, 2.5]),
    ],
)
def test_soc_project(backend, u, expected):
    np.testing.assert_allclose(backend.soc_project(np.array(u)), expected, atol=1e-15)


def test_jacobi_small(backend):
    eigs, off, _ = backend.jacobi_eigvalsh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(np.sort(eigs), [1.0, 3.0], atol=1e-14)
    assert off < 1e-13


def test_jacobi_random_against_numpy(backend, rng):
    for _ in range(5):
        M = rng.standard_normal((12, 12))
        S = M + M.T
        eigs, off, _ = backend.jacobi_eigvalsh(S)
        np.testing.assert_allclose(np.sort(eigs), np.linalg.eigvalsh(S), atol=1e-11)
        assert off < 1e-13 * max(1.0, np.linalg.norm(S))


def test_activeset_box_clamp(backend):
    G = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    h = np.array([1.0, 1.0, 0.0, 0.0])
    x, active, mu, _ = backend.activeset_solve(G, h, np.array([2.0, 2.0]))
    np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-14)
    assert sorted(active.tolist()) == [0, 1]
    np.testing.assert_allclose(mu, [1.0, 1.0], atol=1e-14)


def test_activeset_infeasible(backend):
    G = np.array([[1.0], [-1.0]])
    h = np.array([-1.0, -1.0])
    x, active, mu, checked = backend.activeset_solve(G, h, np.array([0.0]))
    assert x is None and active is None and mu is None
    # sizes 0 and 1 only, since n = 1
    assert checked == 3


def test_backends_agree(rng):
    backends = available_backends()
    if "cython" not in backends:
        pytest.skip("compiled kernels not built")
    cy, py = backends["cython"], _pykernels
    for _ in range(20):
        a = np.abs(rng.standard_normal(6)) + 0.5
        p = rng.uniform(1.1, 6.0)
        sc, lc, *_ = cy.pball_project_unit(a, p)
        sp, lp, *_ = py.pball_project_unit(a, p)
        np.testing.assert_allclose(sc, sp, atol=1e-13)
        assert lc == pytest.approx(lp, rel=1e-10, abs=1e-13)
        u = rng.standard_normal(5)
        np.testing.assert_allclose(cy.soc_project(u), py.soc_project(u), rtol=1e-15, atol=1e-15)
        M = rng.standard_normal((6, 6))
        np.testing.assert_allclose(np.sort(cy.jacobi_eigvalsh(M + M.T)[0]),
                                   np.sort(py.jacobi_eigvalsh(M + M.T)[0]), atol=1e-12)
        G = rng.standard_normal((6, 3))
        h = rng.uniform(0.1, 1.0, 6)
        v = 3 * rng.standard_normal(3)
        xc, ac, _, nc = cy.activeset_solve(G, h, v)
        xp, ap, _, np_ = py.activeset_solve(G, h, v)
        np.testing.assert_allclose(xc, xp, atol=1e-12)
        assert ac.tolist() == ap.tolist() and nc == np_

import numpy as np
import pytest

from diskcurv import kernels


@pytest.fixture(scope="module")
def csr_problem(mesh_small):
    S = mesh_small.stiffness.matrix
    rng = np.random.default_rng(11)
    x = rng.normal(size=mesh_small.n_nodes)
    return S, x


def test_matvec_backends_agree(csr_problem):
    S, x = csr_problem
    ref = S @ x
    got = kernels.csr_matvec_numpy(S.data, S.indices, S.indptr, x)
    np.testing.assert_allclose(got, ref, rtol=1e-13, atol=1e-15)
    if kernels.ACTIVE_BACKEND == "numba":
        got_nb = kernels.csr_matvec_numba(S.data, S.indices, S.indptr, x)
        np.testing.assert_allclose(got_nb, ref, rtol=1e-13, atol=1e-15)


def test_quadform_backends_agree(csr_problem):
    S, x = csr_problem
    ref = float(x @ (S @ x))
    got = kernels.csr_quadform_numpy(S.data, S.indices, S.indptr, x)
    assert got == pytest.approx(ref, rel=1e-12)
    if kernels.ACTIVE_BACKEND == "numba":
        got_nb = kernels.csr_quadform_numba(S.data, S.indices, S.indptr, x)
        assert got_nb == pytest.approx(ref, rel=1e-12)


def test_exp_weighted_backends_agree():
    rng = np.random.default_rng(3)
    w = rng.random(500)
    c = rng.normal(size=500)
    u = rng.normal(0.0, 2.0, size=500)
    terms_np, total_np, m_np = kernels.exp_weighted_numpy(w, c, u, 0.5)
    assert m_np == 0.5 * u.max()
    assert total_np == pytest.approx(float(np.sum(w * c * np.exp(0.5 * u - m_np))))
    if kernels.ACTIVE_BACKEND == "numba":
        terms_nb, total_nb, m_nb = kernels.exp_weighted_numba(w, c, u, 0.5)
        assert m_nb == m_np
        np.testing.assert_allclose(terms_nb, terms_np, rtol=1e-14)
        assert total_nb == pytest.approx(total_np, rel=1e-13)


def test_exp_weighted_no_overflow():
    # max subtraction keeps every exponent <= 0 even for huge fields
    w = np.ones(4)
    c = np.ones(4)
    u = np.array([800.0, 799.0, 500.0, -200.0])
    terms, total, m = kernels.exp_weighted(w, c, u, 1.0)
    assert m == 800.0
    assert np.all(np.isfinite(terms))
    assert total == pytest.approx(1.0 + np.exp(-1.0), rel=1e-12)


def test_backend_selection_reported():
    assert kernels.ACTIVE_BACKEND in ("numba", "numpy")

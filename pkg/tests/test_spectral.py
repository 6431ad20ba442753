import numpy as np
import pytest
from hypothesis import given, strategies as st

from hessian_lab.quadratic import diameter_witness
from hessian_lab.spectral import (SpectralWeights, character, eigenvalue_grid, laplacian_apply,
                                  laplacian_apply_fft, laplacian_eigenvalue, phi_apply,
                                  phi_sup_lower_bound_check)

weights = st.tuples(*[st.floats(0.05, 5, allow_nan=False)] * 3)


@given(weights)
def test_alpha_beta_gamma(w):
    sw = SpectralWeights(*w)
    assert sw.alpha == -w[0] + w[1] + w[2]
    assert sw.alpha + sw.beta + sw.gamma == pytest.approx(sum(w))


def test_laplacian_basic(rng):
    w = (0.7, 1.3, 2.1)
    assert np.all(laplacian_apply(w, np.full(25, 4.0)) == 0)
    assert laplacian_apply(w, rng.standard_normal(25)).sum() == pytest.approx(0, abs=1e-10)


def test_eigenvalue_examples():
    assert laplacian_eigenvalue((1, 1, 1), 4, (0, 0)) == 0
    assert laplacian_eigenvalue((1, 1, 1), 4, (2, 2)) == pytest.approx(-4)
    x = character(4, 2, 2).real
    np.testing.assert_allclose(laplacian_apply((1, 1, 1), x), -4 * x, atol=1e-12)


@given(weights, st.integers(2, 12))
def test_conjugate_symmetry(w, n):
    lam = eigenvalue_grid(w, n)
    flipped = lam[(-np.arange(n)) % n][:, (-np.arange(n)) % n]
    np.testing.assert_allclose(lam, flipped, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_characters_are_eigenvectors(n, rng):
    w = rng.uniform(0.1, 3, 3)
    for i in range(n):
        for j in range(n):
            phi = character(n, i, j)
            lam = laplacian_eigenvalue(w, n, (i, j))
            np.testing.assert_allclose(laplacian_apply(w, phi.real), lam * phi.real, atol=1e-9)
            np.testing.assert_allclose(laplacian_apply(w, phi.imag), lam * phi.imag, atol=1e-9)


@given(weights, st.integers(2, 10), st.integers(0, 10**6))
def test_fft_and_stencil_agree_and_self_adjoint(w, n, seed):
    r = np.random.default_rng(seed)
    x, y = r.standard_normal(n * n), r.standard_normal(n * n)
    np.testing.assert_allclose(laplacian_apply(w, x), laplacian_apply_fft(w, x), atol=1e-9)
    assert np.dot(laplacian_apply(w, x), y) == pytest.approx(np.dot(x, laplacian_apply(w, y)), abs=1e-9)


@given(weights, st.integers(2, 9))
def test_spectrum_sign_in_cone(w, n):
    sw = SpectralWeights(*w)
    lam = eigenvalue_grid(sw, n)
    if min(sw.alpha, sw.beta, sw.gamma) > 0:
        assert np.all(lam.ravel()[1:] < 0)


def test_zero_modes_when_one_coefficient_vanishes():
    n = 6
    sw = SpectralWeights(1.0, 1.0, 2.0)   # gamma = 0, alpha = beta = 2
    lam = eigenvalue_grid(sw, n)
    zeros = {(i, j) for i in range(n) for j in range(n) if abs(lam[i, j]) < 1e-12}
    assert zeros == {(i, j) for i in range(n) for j in range(n) if j == 0 and (i + j) % n == 0}


def test_phi_examples(rng):
    n, n1 = 7, 3
    np.testing.assert_allclose(phi_apply(n1, np.full(n * n, 2.0)), 2.0 * 9 / 8)
    x = rng.standard_normal(n * n)
    assert phi_apply(n1, x).sum() == pytest.approx(9 / 8 * x.sum())
    w = (0.5, 1.0, 1.5)
    np.testing.assert_allclose(phi_apply(n1, laplacian_apply(w, x)),
                               laplacian_apply(w, phi_apply(n1, x)), atol=1e-9)
    with pytest.raises(ValueError):
        phi_apply(4, x)
    with pytest.raises(ValueError):
        phi_apply(9, x)


def test_phi_centered(rng):
    n = 9
    x = np.zeros(n * n)
    x[4 * n + 4] = 1.0
    out = phi_apply(5, x).reshape(n, n)
    assert np.count_nonzero(out) == 25
    assert out[2:7, 2:7].min() == pytest.approx(1 / 24)


def test_phi_bound_examples():
    n = 32
    w, linf = diameter_witness(n, (2, 2, 2))
    rep = phi_sup_lower_bound_check(w, (2, 2, 2), linf / n**2, 3)
    assert rep.holds[np.inf]
    assert rep.rhs[np.inf] == pytest.approx(linf / 2)
    assert not phi_sup_lower_bound_check(np.zeros(16), (2, 2, 2), 0.1, 3).applicable

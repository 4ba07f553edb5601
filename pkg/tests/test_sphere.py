import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from casimir_restrict.sphere import (
    casimir_eigen_check, circle_laplacian_eigenvalue, equator_norm, laplacian_eigenvalue,
    legendre_normalized, sharpness_experiment, sph_harm,
)


def product_grid(n_theta=64, n_phi=64):
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    th = np.arccos(x)
    T, P = np.meshgrid(th, phi, indexing="ij")
    W = np.outer(w, np.full(n_phi, 2 * np.pi / n_phi))
    return T, P, W


def test_y00_normalization():
    T, P, W = product_grid(8, 8)
    y = sph_harm(0, 0, T, P)
    assert np.allclose(y, 1 / np.sqrt(4 * np.pi))
    assert np.sum(W * np.abs(y) ** 2) == pytest.approx(1.0, abs=1e-14)


def test_gram_matrix_is_identity():
    T, P, W = product_grid()
    basis = [sph_harm(l, m, T, P) for l in range(11) for m in range(-l, l + 1)]
    Y = np.array([b.ravel() for b in basis])
    G = (Y * W.ravel()) @ Y.conj().T
    assert np.max(np.abs(G - np.eye(len(basis)))) < 1e-9


def test_addition_theorem(rng):
    l = 20
    for _ in range(5):
        th, ph = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
        total = sum(abs(sph_harm(l, m, th, ph)) ** 2 for m in range(-l, l + 1))
        assert total == pytest.approx((2 * l + 1) / (4 * np.pi), rel=1e-12)


def test_against_closed_form_legendre():
    # independent oracle: scipy's unnormalized associated Legendre function
    for l, m in ((5, 0), (7, 3), (12, 12), (30, 17)):
        x = np.linspace(-0.95, 0.95, 9)
        norm = np.sqrt((2 * l + 1) / (4 * np.pi) * np.exp(special.gammaln(l - m + 1) - special.gammaln(l + m + 1)))
        ref = norm * special.lpmv(m, l, x)
        assert np.allclose(legendre_normalized(l, m, x), ref, rtol=1e-10, atol=1e-14)


def test_negative_order_convention():
    v = sph_harm(6, -3, 0.7, 1.1)
    assert v == pytest.approx((-1) ** 3 * np.conj(sph_harm(6, 3, 0.7, 1.1)))
    with pytest.raises(ValueError):
        sph_harm(2, 3, 0.1, 0.1)
    with pytest.raises(ValueError):
        legendre_normalized(3, -1, 0.0)


def test_parity_zeros_are_exact():
    for l in range(0, 41):
        for m in range(-l, l + 1):
            if (l + m) % 2:
                assert equator_norm(l, m) == 0.0
                assert sph_harm(l, m, np.pi / 2, 0.3) == 0


def test_equator_norm_examples():
    assert equator_norm(0, 0) == pytest.approx(0.5, rel=1e-15)
    # direct quadrature along the equator
    phi = 2 * np.pi * np.arange(256) / 256
    for l, m in ((10, 4), (9, 9)):
        direct = 2 * np.pi * np.mean(np.abs(sph_harm(l, m, np.full_like(phi, np.pi / 2), phi)) ** 2)
        assert equator_norm(l, m) == pytest.approx(direct, rel=1e-12)


def test_top_family_wallis_asymptotic():
    # |Y_l^l(pi/2)|^2 2 pi = (2l+1)/2 (2l)!/(4^l l!^2) ~ sqrt(l / pi)
    for l in (50, 100, 200, 400):
        exact = (2 * l + 1) / 2 * np.exp(special.gammaln(2 * l + 1) - 2 * special.gammaln(l + 1) - l * np.log(4))
        assert equator_norm(l, l) == pytest.approx(exact, rel=1e-10)


def test_casimir_eigen_check():
    assert casimir_eigen_check(0) == Fraction(-1, 4)
    assert casimir_eigen_check(5) == Fraction(30) - Fraction(121, 4)
    assert all(abs(casimir_eigen_check(l)) == Fraction(1, 4) for l in range(65))
    assert casimir_eigen_check(12, spectral=True) == pytest.approx(-0.25, abs=1e-8)


@pytest.mark.parametrize("l,m", [(0, 0), (3, 1), (12, 0), (12, 5), (40, 40), (64, 17), (64, 0)])
def test_laplacian_spectral(l, m):
    assert laplacian_eigenvalue(l, m) == pytest.approx(l * (l + 1), abs=1e-8 * max(1, l * (l + 1)))


@given(st.integers(-200, 200))
def test_circle_laplacian(freq):
    assert circle_laplacian_eigenvalue(freq) == pytest.approx(freq * freq, abs=1e-8 * max(1, freq * freq))


def test_sharpness_report():
    rep = sharpness_experiment(100)
    assert rep.ls == list(range(50, 101, 10))
    assert abs(rep.fits["top"]["exponent"] - 0.5) <= 0.05
    assert abs(rep.fits["zonal"]["exponent"]) <= 0.1
    assert all(b >= t for b, t in zip(rep.best, rep.top))
    assert json.loads(rep.to_json())["fits"]["derivative_loss"] == rep.fits["best"]["exponent"]
    lines = rep.to_csv("# h").splitlines()
    assert lines[:2] == ["# h", "l,m,equator_norm"]


def test_sharpness_report_is_extendable():
    small, big = sharpness_experiment(100), sharpness_experiment(200)
    k = len(small.ls)
    assert big.ls[:k] == small.ls
    assert big.top[:k] == small.top and big.zonal[:k] == small.zonal
    with pytest.raises(ValueError):
        sharpness_experiment(100, l_min=51)

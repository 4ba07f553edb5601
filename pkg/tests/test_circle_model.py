import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casimir_restrict.circle_model import (
    CircleFunction, RepParameter, apply, apply_homogeneous, fourier, from_callable, grid,
    grid_modes, inner, ktype, norm, synthesize,
)
from casimir_restrict.mobius import DELTA, IDENTITY, diagonal, rotation

from conftest import group_elements

SIZE = 256


def band_limited(seed, band=16, size=SIZE):
    rng = np.random.default_rng(seed)
    modes = np.arange(-band, band + 1, 2)
    c = rng.normal(size=modes.size) + 1j * rng.normal(size=modes.size)
    return synthesize(dict(zip(modes.tolist(), c)), size)


def test_rep_parameter_validation_and_casimir():
    p = RepParameter.principal(2.0)
    assert p.casimir == pytest.approx((1 - (2j) ** 2) / 4)
    assert RepParameter("complementary", 0.5).casimir == pytest.approx((1 - 0.25) / 4)
    assert RepParameter.discrete(4).casimir == 2 * (1 - 2)
    for bad in (lambda: RepParameter("principal", 0.5), lambda: RepParameter("complementary", 1.5),
                lambda: RepParameter.discrete(3), lambda: RepParameter("other"),
                lambda: RepParameter("principal", 1j, eps=2)):
        with pytest.raises(ValueError):
            bad()


def test_ktype_examples():
    assert np.allclose(ktype(0, 64).samples, 1.0)
    assert abs(inner(ktype(2), ktype(4))) < 1e-15
    assert inner(ktype(2), ktype(2)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ktype(3)


def test_grid_must_be_power_of_two():
    with pytest.raises(ValueError):
        grid(100)
    with pytest.raises(ValueError):
        CircleFunction(samples=np.ones(12))
    with pytest.raises(ValueError):
        CircleFunction()


def test_grid_modes_are_even_and_cover_band():
    m = grid_modes(16)
    assert set(m.tolist()) == set(range(-16, 16, 2))


def test_fourier_synthesize_examples():
    assert fourier(ktype(6, 64)) == {6: 1 + 0j}
    u = band_limited(1)
    v = synthesize(fourier(u), SIZE)
    assert np.max(np.abs(u.samples - v.samples)) < 1e-12
    with pytest.raises(ValueError):
        synthesize({3: 1.0}, 16)


def test_fourier_matches_slow_quadrature():
    u = band_limited(2, band=20)
    # independent oracle: Gauss-Legendre quadrature of (1/pi) int u e^{-in theta}
    x, w = np.polynomial.legendre.leggauss(200)
    th = (x + 1) * np.pi / 2
    vals = u(th)
    for n in (-20, -4, 0, 6, 18):
        direct = np.sum(w * vals * np.exp(-1j * n * th)) / 2
        assert abs(direct - u.coeff(n)) < 1e-11


def test_evaluation_is_pi_periodic():
    u = band_limited(3)
    th = np.linspace(0, np.pi, 9)
    assert np.allclose(u(th), u(th + np.pi), atol=1e-12)


def test_apply_examples():
    u = band_limited(4)
    p = RepParameter.principal(2.0)
    assert np.allclose(apply(IDENTITY, p, u).coeffs, u.coeffs, atol=1e-13)
    for eps in (0, 1):
        q = RepParameter.principal(1.5, eps)
        v = apply(DELTA, q, ktype(6, 64))
        expect = np.zeros(64, complex)
        expect[(-6 // 2) % 64] = (-1) ** eps
        assert np.allclose(v.coeffs, expect, atol=1e-14)
    with pytest.raises(ValueError):
        apply(IDENTITY, RepParameter.discrete(2), u)


def test_rotation_equivariance_sign():
    alpha = 0.37
    v = apply(rotation(alpha), RepParameter.principal(0.0), ktype(8, 64))
    assert v.coeff(8) == pytest.approx(np.exp(-8j * alpha), abs=1e-13)
    assert np.sum(np.abs(v.coeffs)) == pytest.approx(1.0, abs=1e-12)


def test_complementary_series_action_is_defined():
    p = RepParameter("complementary", 0.4)
    v = apply(diagonal(0.5), p, ktype(0, 64), size=256)
    assert np.all(np.isfinite(v.samples))


@given(group_elements(), st.floats(-5, 5), st.integers(0, 1), st.integers(0, 2 ** 16))
def test_unitarity(g, lam, eps, seed):
    u = band_limited(seed, band=8, size=64)
    v = apply(g, RepParameter.principal(lam, eps), u, size=1024)
    assert abs(norm(v) - norm(u)) < 1e-10 * norm(u)


@given(group_elements(), group_elements(), st.floats(-3, 3), st.integers(0, 1))
def test_composition_law(g, h, lam, eps):
    p = RepParameter.principal(lam, eps)
    u = band_limited(7, band=6, size=32)
    size = 2048
    # apply(h, u) is not band-limited: evaluate it through its own samples on a fine grid
    inner_image = apply(h, p, u, size=size)
    lhs = apply(g, p, inner_image, size=size)
    rhs = apply(g @ h, p, u, size=size)
    assert np.max(np.abs(lhs.samples - rhs.samples)) < 1e-9


@given(st.integers(0, 2 ** 16), st.integers(0, 2 ** 16))
def test_inner_conjugate_symmetry_and_parseval(s1, s2):
    u, v = band_limited(s1), band_limited(s2)
    assert abs(inner(u, v) - np.conj(inner(v, u))) < 1e-12
    assert abs(inner(u, u).real - np.sum(np.abs(u.coeffs) ** 2)) < 1e-10
    assert inner(u, u).real > 0


@given(st.integers(0, 2 ** 16), st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_arithmetic_is_linear(seed, a, b):
    u, v = band_limited(seed), band_limited(seed + 1)
    w = a * u + b * v
    assert np.allclose(w.samples, a * u.samples + b * v.samples, atol=1e-11)


def test_homogeneous_action_degree_zero_is_composition():
    g = rotation(0.2) @ diagonal(0.7)
    f = from_callable(lambda t: np.cos(2 * t) + 0.5j * np.sin(4 * t), 128)
    out = apply_homogeneous(g, 0.0, 0, f, 128)
    from casimir_restrict.mobius import circle_map
    tp, _ = circle_map(g, grid(128))
    assert np.allclose(out.samples, f(tp), atol=1e-12)


def test_resized_round_trip():
    u = band_limited(9, size=64)
    assert np.allclose(u.resized(256).resized(64).coeffs, u.coeffs)

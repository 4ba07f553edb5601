import json

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from casimir_restrict.circle_model import RepParameter
from casimir_restrict.matcoef import (
    CUTOFF, REGULAR, RESONANCE, GridTooCoarse, airy_ai, airy_model, build_table, classify_regime,
    coefficient, coefficient_column, coefficient_row, coefficient_via_action, uniform_airy_model,
)
from casimir_restrict.mobius import DELTA, IDENTITY, diagonal, map_bound, rotation

from conftest import group_elements

P2 = RepParameter.principal(2.0)
A1 = diagonal(1.0)
even = st.integers(-32, 32).map(lambda v: 2 * v)


def test_identity_gives_kronecker():
    for k, n in ((4, 4), (4, 6), (0, 0), (-8, 8)):
        assert abs(coefficient(k, n, P2, IDENTITY) - (k == n)) < 1e-14
    ks, row = coefficient_row(10, P2, IDENTITY, 40)
    assert np.allclose(row, (ks == 10).astype(float), atol=1e-14)


def test_cross_convention_example():
    a = coefficient(16, 8, P2, A1)
    b = coefficient_via_action(16, 8, P2, A1)
    assert abs(a - b) < 1e-8


def test_deep_cutoff_example():
    assert abs(coefficient(1000, 100, P2, A1)) < 1e-8


def test_deep_cutoff_against_high_precision_quadrature():
    # independent oracle: 30-digit quadrature of the defining integral
    k, n = 300, 60
    mpmath.mp.dps = 30
    g = A1.inverse()

    def integrand(t):
        x = g.d * mpmath.cos(t) - g.b * mpmath.sin(t)
        y = -g.c * mpmath.cos(t) + g.a * mpmath.sin(t)
        gam = mpmath.atan2(y, x)
        jac = 1 / (x * x + y * y)
        return jac ** ((1 - 2j) / 2) * mpmath.exp(1j * (k * gam - n * t))

    ref = mpmath.quad(integrand, mpmath.linspace(0, mpmath.pi, 41)) / mpmath.pi
    val = coefficient(k, n, P2, A1)
    assert abs(val - complex(mpmath.conj(ref))) < 1e-12


def test_row_spot_check():
    p0 = RepParameter.principal(0.0)
    g = diagonal(0.5)
    ks, row = coefficient_row(32, p0, g, 128)
    rng = np.random.default_rng(5)
    for k in rng.choice(ks, 5, replace=False):
        assert abs(row[ks == k][0] - coefficient(int(k), 32, p0, g)) < 1e-8


def test_column_matches_pointwise():
    g = rotation(0.4) @ diagonal(0.9)
    ns, col = coefficient_column(12, P2, g, 40)
    for n in (-40, -2, 0, 12, 38):
        assert abs(col[ns == n][0] - coefficient(12, n, P2, g)) < 1e-10


@pytest.mark.parametrize("n", [8, 32, 100])
def test_row_parseval(n):
    ks, row = coefficient_row(n, P2, A1, 8 * n + 64)
    assert abs(np.sum(np.abs(row) ** 2) - 1) < 1e-6


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarse):
        coefficient(200, 200, P2, A1, size=64)
    with pytest.raises(GridTooCoarse):
        coefficient_row(200, P2, A1, 400, size=64)


def test_rejects_discrete_and_odd():
    with pytest.raises(ValueError):
        coefficient(2, 2, RepParameter.discrete(2), A1)
    with pytest.raises(ValueError):
        coefficient(3, 2, P2, A1)


def test_airy_function():
    assert abs(airy_ai(0.0) - 3 ** (-2 / 3) / special.gamma(2 / 3)) < 1e-15
    assert abs(airy_ai(0.0) - 0.35502805) < 1e-8
    assert airy_ai(10.0) < 1e-9
    x = np.linspace(-5, 5, 41)
    h = 1e-3
    d2 = (airy_ai(x + h) - 2 * airy_ai(x) + airy_ai(x - h)) / h ** 2
    assert np.max(np.abs(d2 - x * airy_ai(x))) < 1e-6


def test_airy_model_examples():
    M = 2.5
    assert airy_model(250, 100, M) == pytest.approx(250 ** (-1 / 3) * airy_ai(0.0))
    assert airy_model(5000, 100, np.e) < 1e-10
    with pytest.raises(ValueError):
        airy_model(0, 10, 2.0)


def test_classify_regime_examples():
    assert classify_regime(150, 100, np.e) == REGULAR
    assert classify_regime(272, 100, np.e) == RESONANCE
    assert classify_regime(400, 100, np.e) == CUTOFF
    assert classify_regime(10, 100, np.e) == CUTOFF
    assert classify_regime(37, 100, np.e) == RESONANCE
    assert classify_regime(-150, -100, np.e) == REGULAR
    assert classify_regime(-150, 100, np.e) == CUTOFF


@given(st.integers(1, 2000), st.integers(1, 500), st.floats(1.01, 20))
def test_classify_regime_is_a_partition(k, n, M):
    label = classify_regime(k, n, M)
    assert label in (REGULAR, RESONANCE, CUTOFF)
    if 1.1 * n / M <= k <= 0.9 * M * n:
        assert label == REGULAR
    if k >= 1.1 * M * n or k <= 0.9 * n / M:
        assert label == CUTOFF


@given(even, even, st.floats(-6, 6), st.integers(0, 1), group_elements())
def test_delta_symmetry(k, n, lam, eps, g):
    # pi(DELTA) e_n = (-1)^eps e_-n gives d_{-k}(e_{-n}; D g D) = d_k(e_n; g)
    p = RepParameter.principal(lam, eps)
    a = coefficient(k, n, p, g)
    b = coefficient(-k, -n, p, DELTA @ g @ DELTA)
    assert abs(a - b) < 1e-10


@given(even, even, st.floats(-6, 6), st.integers(0, 1), group_elements())
def test_quadrature_matches_action(k, n, lam, eps, g):
    p = RepParameter.principal(lam, eps)
    assert abs(coefficient(k, n, p, g) - coefficient_via_action(k, n, p, g)) < 1e-8


@given(st.integers(1, 40).map(lambda v: 2 * v), group_elements(allow_reflection=False))
def test_unitarity_of_rows(n, g):
    M = map_bound(g)
    k_max = 2 * int(2 * M * n + 60)
    _, row = coefficient_row(n, P2, g, k_max)
    assert abs(np.sum(np.abs(row) ** 2) - 1) < 1e-6


def test_uniform_model_tracks_resonance():
    n = 128
    ks = np.arange(int(0.9 * np.e * n) // 2 * 2, int(1.1 * np.e * n), 2)
    worst = max(abs(coefficient(int(k), n, P2, A1) - uniform_airy_model(int(k), n, P2, A1)) * k ** (2 / 3)
                for k in ks)
    assert worst < 0.05


def test_uniform_model_negative_indices_and_errors():
    a = uniform_airy_model(-340, -128, P2, A1)
    assert abs(a - coefficient(-340, -128, P2, A1)) < 0.02
    with pytest.raises(ValueError):
        uniform_airy_model(10, -10, P2, A1)
    with pytest.raises(ValueError):
        uniform_airy_model(10, 10, P2, IDENTITY)


def test_cutoff_decay_follows_uniform_model():
    # exponential decay rate beyond the turning point matches the Airy prediction
    for n in (64, 128):
        k = 2 * int(1.3 * np.e * n / 2)
        d = abs(coefficient(k, n, P2, A1))
        model = abs(uniform_airy_model(k, n, P2, A1))
        assert 0.5 < d / model < 2


def test_table_consistency_and_export():
    table = build_table([16, 32], 120, P2, A1)
    for i, n in enumerate(table.ns):
        for k in (-8, 0, 40, 88):
            j = int(np.flatnonzero(table.ks == k)[0])
            assert abs(table.entries[i, j] - coefficient(k, int(n), P2, A1)) < 1e-8
            assert table.regimes[i, j] == classify_regime(k, int(n), table.M)
    text = table.to_csv("# header\n")
    lines = text.splitlines()
    assert lines[0] == "# header" and lines[1] == "k,n,re,im,abs,regime"
    assert len(lines) == 2 + table.entries.size
    meta = json.loads(table.to_json())
    assert meta["M"] == pytest.approx(np.e) and meta["n_values"] == [16, 32]
    threaded = build_table([16, 32], 120, P2, A1, workers=2)
    assert np.array_equal(threaded.entries, table.entries)
    assert np.array_equal(table.row(32), table.entries[1])

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casimir_restrict.mobius import (
    DELTA, IDENTITY, GroupElement, cartan_decompose, circle_map, diagonal,
    geodesic_circle_element, hyperbolic_distance, map_bound, rotation,
)

from conftest import angles, group_elements, random_element


def test_normalization_and_scalar_multiples():
    g = GroupElement(2.0, 1.0, 3.0, 4.0)
    assert abs(abs(np.linalg.det(g.matrix)) - 1) < 1e-12
    h = GroupElement(-6.0, -3.0, -9.0, -12.0)
    assert g.allclose(h)


def test_singular_matrix_rejected():
    with pytest.raises(ValueError):
        GroupElement(1.0, 2.0, 2.0, 4.0)


def test_circle_map_identity_and_rotation():
    th = np.linspace(0, np.pi, 7, endpoint=False)
    tp, jac = circle_map(IDENTITY, th)
    assert np.allclose(tp, th) and np.allclose(jac, 1)
    tp, jac = circle_map(rotation(0.4), th)
    assert np.allclose(tp, np.mod(th - 0.4, np.pi), atol=1e-14) and np.allclose(jac, 1)


def test_circle_map_jacobian_matches_finite_difference():
    g = diagonal(1.0)
    _, jac = circle_map(g, 0.0)
    assert abs(jac - np.e) < 1e-12
    h = 1e-6
    f = lambda t: circle_map(g, t)[0]
    fd = (f(h) - f(-h + np.pi) + np.pi) / (2 * h)
    assert abs(fd - np.e) < 1e-6


def test_map_bound_examples():
    assert map_bound(IDENTITY) == 1.0
    for r in (0.5, 1.0, 2.0):
        assert abs(map_bound(diagonal(r)) - np.exp(r)) < 1e-8
    g = rotation(0.3) @ diagonal(1.0) @ rotation(1.2)
    assert abs(map_bound(g) - np.e) < 1e-12


def test_map_bound_against_dense_grid():
    g = rotation(0.7) @ diagonal(0.8) @ rotation(2.0)
    _, jac = circle_map(g, np.linspace(0, np.pi, 200001))
    assert abs(jac.max() - map_bound(g)) < 1e-6
    assert abs(jac.min() - 1 / map_bound(g)) < 1e-6


def test_hyperbolic_distance_examples():
    assert hyperbolic_distance(1j, 1j) == 0.0
    assert abs(hyperbolic_distance(1j, np.e * 1j) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        hyperbolic_distance(1j, -1j)


def test_cartan_examples():
    f = cartan_decompose(IDENTITY)
    assert (f.k1, f.r, f.k2, f.det_sign) == (0.0, 0.0, 0.0, 1)
    f = cartan_decompose(diagonal(2.0))
    assert abs(f.r - 2) < 1e-12 and f.det_sign == 1
    assert f.reconstruct().allclose(diagonal(2.0))


def test_cartan_round_trip_thousand(rng):
    worst = 0.0
    for _ in range(1000):
        g = GroupElement.from_matrix(rng.normal(size=(2, 2)))
        h = cartan_decompose(g).reconstruct()
        err = min(np.abs(g.matrix - h.matrix).max(), np.abs(g.matrix + h.matrix).max())
        worst = max(worst, err)
    assert worst < 1e-9


def test_geodesic_circle_element():
    g = geodesic_circle_element(1.0)
    assert abs(hyperbolic_distance(1j, g.act(1j)) - 1.0) < 1e-12
    assert np.allclose(geodesic_circle_element(1e-12).matrix, np.eye(2), atol=1e-10)
    with pytest.raises(ValueError):
        geodesic_circle_element(0.0)


@given(group_elements(), group_elements(), angles)
def test_cocycle(g, h, theta):
    # the angle maps compose contravariantly, map_{gh} = map_h o map_g
    t_g, j_g = circle_map(g, theta)
    _, j_h = circle_map(h, t_g)
    _, j_gh = circle_map(g @ h, theta)
    assert abs(j_gh - j_h * j_g) <= 1e-10 * j_gh


@given(group_elements(), angles, st.floats(0.1, 10) | st.floats(-10, -0.1))
def test_projective_consistency(g, theta, s):
    h = GroupElement.from_matrix(s * g.matrix)
    a, b = circle_map(g, theta), circle_map(h, theta)
    dt = abs(a[0] - b[0])
    assert min(dt, np.pi - dt) < 1e-12 and abs(a[1] - b[1]) < 1e-12 * a[1]


@given(group_elements())
def test_cartan_round_trip_property(g):
    f = cartan_decompose(g)
    assert f.reconstruct().allclose(g, atol=1e-10)
    assert abs(f.r - hyperbolic_distance(1j, g.act(1j))) < 1e-9


@given(group_elements(), st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5))
def test_distance_invariance_and_symmetry(g, z, w):
    z = complex(z.real, abs(z.imag) + 0.1)
    w = complex(w.real, abs(w.imag) + 0.1)
    d = hyperbolic_distance(z, w)
    assert d == pytest.approx(hyperbolic_distance(w, z), abs=1e-12)
    assert abs(hyperbolic_distance(g.act(z), g.act(w)) - d) < 1e-10 * max(1.0, d)


def test_delta_acts_by_reflection():
    assert DELTA.det_sign == -1
    assert abs(DELTA.act(1 + 2j) - (-1 + 2j)) < 1e-15
    tp, jac = circle_map(DELTA, 0.3)
    assert abs(tp - (np.pi - 0.3)) < 1e-15 and jac == pytest.approx(1.0)


def test_random_element_helper_bounded(rng):
    assert map_bound(random_element(rng)) <= np.exp(1.5) + 1e-9

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from su2q import diffops
from su2q.fourier import BandLimitedFunction, synthesize
from su2q.group import (IDENTITY, LIE_BASIS, GroupElement, QuadratureGrid, from_euler, from_quaternion, haar_integrate,
                        inverse, multi_indices, multiply, omega1, omega2, omega3, q_samples, quadrature_grid,
                        random_elements, taylor_basis, weyl_elements)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
quats = st.tuples(finite, finite, finite, finite).filter(lambda q: np.linalg.norm(q) > 1e-3)
angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def close(g, h, tol=1e-12):
    return np.max(np.abs(g.to_matrix() - h.to_matrix())) <= tol


def test_unit_quaternion_k_is_omega3_pi():
    g = from_quaternion(0, 0, 0, 1)
    assert np.allclose(g.to_matrix(), np.diag([1j, -1j]))
    assert close(g, omega3(math.pi))


def test_from_quaternion_normalises_and_rejects_zero():
    g = from_quaternion(2, 0, 0, 0)
    assert g == IDENTITY
    with pytest.raises(ValueError):
        from_quaternion(0, 0, 0, 1e-9)


def test_group_element_checks_norm():
    with pytest.raises(ValueError):
        GroupElement(1.0, 1.0, 0.0, 0.0)


def test_euler_examples():
    t = 0.7
    c, s = math.cos(t / 2), math.sin(t / 2)
    assert np.allclose(from_euler(0, t, 0).to_matrix(), [[c, -s], [s, c]])
    assert np.allclose(from_euler(t, 0, 0).to_matrix(), np.diag([np.exp(0.5j * t), np.exp(-0.5j * t)]))
    assert close(from_euler(0.3, 1.1, -0.4), omega3(0.3) * omega2(1.1) * omega3(-0.4))


def test_omega3_subgroup():
    assert close(multiply(omega3(0.4), omega3(1.3)), omega3(1.7))


def test_weyl_elements_and_lie_basis():
    w1, w2, w3 = weyl_elements()
    assert close(w1, omega1(math.pi / 2)) and close(w2, omega2(math.pi / 2)) and close(w3, omega3(math.pi / 2))
    # the Lie basis satisfies [Y1, Y2] = Y3 as quaternion commutators
    from su2q.group import quat_mul
    y1, y2, y3 = (LIE_BASIS[k] for k in ("Y1", "Y2", "Y3"))
    assert np.allclose(quat_mul(y1, y2) - quat_mul(y2, y1), y3)


@given(quats, quats, quats)
def test_multiplication_associative(a, b, c):
    g, h, k = from_quaternion(*a), from_quaternion(*b), from_quaternion(*c)
    assert close((g * h) * k, g * (h * k))


@given(quats)
def test_inverse_and_matrix_homomorphism(a):
    g = from_quaternion(*a)
    assert close(g * inverse(g), IDENTITY)
    M = g.to_matrix()
    assert np.allclose(M @ M.conj().T, np.eye(2)) and abs(np.linalg.det(M) - 1) < 1e-12


@given(angles, st.floats(0, math.pi), angles, quats)
def test_matrix_of_product(phi, theta, psi, a):
    g, h = from_euler(phi, theta, psi), from_quaternion(*a)
    assert np.allclose((g * h).to_matrix(), g.to_matrix() @ h.to_matrix(), atol=1e-12)


def test_grid_examples():
    grid = quadrature_grid(2)
    assert abs(grid.weights.sum() - 1) < 1e-14
    assert np.max(np.abs(haar_integrate(grid.wigner(2)[:, 1, 1], grid))) < 1e-12
    t = grid.wigner(1)[:, 0, 0]
    assert abs(haar_integrate(np.abs(t) ** 2, grid) - 0.5) < 1e-12


@pytest.mark.parametrize("E", [0, 1, 4, 7, 12])
def test_grid_integrates_every_nontrivial_representation_to_zero(E):
    grid = quadrature_grid(E)
    for tl in range(1, E + 1):
        assert np.max(np.abs(haar_integrate(grid.wigner(tl), grid))) < 1e-12


def test_grid_json_round_trip_and_cache():
    grid = quadrature_grid(5)
    assert quadrature_grid(5) is grid
    again = QuadratureGrid.from_json(grid.to_json())
    assert np.array_equal(again.quats, grid.quats) and again.exactness_two_l == 5
    with pytest.raises(ValueError):
        haar_integrate(np.ones(3), grid)


def test_random_elements_are_unit():
    q = random_elements(50, np.random.default_rng(0))
    assert np.allclose(np.linalg.norm(q, axis=1), 1)


def test_multi_indices_graded():
    idx = multi_indices(2)
    assert idx[0] == (0, 0, 0) and len(idx) == 10
    assert [sum(a) for a in idx] == sorted(sum(a) for a in idx)
    assert multi_indices(2, 2) == [a for a in idx if sum(a) == 2]


def test_q_functions_vanish_at_identity_and_match_coordinates():
    x = random_elements(10, np.random.default_rng(1))
    q = q_samples(x)
    assert np.allclose(q["plus"], -x[:, 1] + 1j * x[:, 2])
    assert np.allclose(q["minus"], x[:, 1] + 1j * x[:, 2])
    assert np.allclose(q["zero"], 2j * x[:, 3])
    e = q_samples(np.array([[1.0, 0, 0, 0]]))
    assert all(abs(v[0]) < 1e-15 for v in e.values())


def test_first_order_duals_are_the_ladder_fields():
    tb = taylor_basis(1)
    f = BandLimitedFunction.random(3, np.random.default_rng(2))
    for alpha, name in (((1, 0, 0), "partial_plus"), ((0, 1, 0), "partial_minus"), ((0, 0, 1), "partial_zero")):
        assert tb.apply_dual(alpha, f).max_abs_diff(diffops.apply_field(name, f)) < 1e-12


def test_duals_do_not_depend_on_order():
    low, high = taylor_basis(1), taylor_basis(2)
    f = BandLimitedFunction.random(3, np.random.default_rng(3))
    for alpha in multi_indices(1):
        assert low.apply_dual(alpha, f).max_abs_diff(high.apply_dual(alpha, f)) < 1e-11


def test_taylor_remainder_for_t100():
    # t^1_00 = 1 - 2(x1^2 + x2^2) is quadratic in the q coordinates, so the
    # order-two polynomial reproduces it and the O(t^3) remainder is identically zero
    f = BandLimitedFunction.basis(2, 1, 1, 2)
    P = taylor_basis(2).taylor_polynomial(f)
    for t in (0.4, 0.2, 0.1, 0.05):
        x = omega2(t).quat[None]
        assert abs(synthesize(f, x)[0] - P(x)[0]) < 1e-14


def test_taylor_remainder_order_three_by_halving():
    f = BandLimitedFunction.basis(4, 2, 2, 4)  # t^2_00, quartic in the coordinates
    P = taylor_basis(2).taylor_polynomial(f)
    errs = []
    for t in (0.2, 0.1, 0.05, 0.025):
        x = omega2(t).quat[None]
        errs.append(abs(synthesize(f, x)[0] - P(x)[0]))
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(rates) > 2.8


def test_taylor_needs_exact_grid():
    with pytest.raises(ValueError):
        taylor_basis(2, grid=quadrature_grid(2))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_taylor_remainder_random_functions(seed):
    rng = np.random.default_rng(seed)
    f = BandLimitedFunction.random(3, rng)
    P = taylor_basis(2).taylor_polynomial(f)
    direction = random_elements(1, rng)[0]
    axis = direction[1:] / np.linalg.norm(direction[1:])

    def point(t):
        return np.r_[math.cos(t), math.sin(t) * axis][None]

    e1 = abs(synthesize(f, point(0.02))[0] - P(point(0.02))[0])
    e2 = abs(synthesize(f, point(0.01))[0] - P(point(0.01))[0])
    assert e2 <= e1 / 6 + 1e-13

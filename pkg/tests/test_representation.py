import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from su2q.group import from_quaternion, omega3, quat_mul, random_elements
from su2q.representation import character, labels, multiplication_rhs, wigner, wigner_batch

unit = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 4).filter(lambda q: np.linalg.norm(q) > 1e-2)


def test_labels_are_twice_the_quantum_numbers():
    assert np.array_equal(labels(3), [-3, -1, 1, 3])


def test_spin_half_is_the_defining_matrix():
    g = from_quaternion(0.3, -0.5, 0.2, 0.7)
    assert np.allclose(wigner(g, 1), g.to_matrix())


def test_spin_one_explicit_entries():
    # hand expansion of the explicit sum at l = 1 with a = x0 + i x3, b = x1 + i x2
    g = from_quaternion(0.3, -0.5, 0.2, 0.7)
    a, b = g.x0 + 1j * g.x3, g.x1 + 1j * g.x2
    r2 = math.sqrt(2)
    expected = np.array([
        [a * a, r2 * a * b, b * b],
        [-r2 * a * np.conj(b), abs(a) ** 2 - abs(b) ** 2, r2 * b * np.conj(a)],
        [np.conj(b) ** 2, -r2 * np.conj(a) * np.conj(b), np.conj(a) ** 2],
    ])
    assert np.allclose(wigner(g, 2), expected, atol=1e-14)


@pytest.mark.parametrize("tl", [0, 1, 2, 5, 8])
def test_omega3_is_diagonal(tl):
    t = 0.83
    n = labels(tl) / 2
    assert np.allclose(wigner(omega3(t), tl), np.diag(np.exp(-1j * n * t)), atol=1e-13)


def test_character_examples():
    t = 1.1
    assert abs(character(omega3(t), 2) - (1 + 2 * math.cos(t))) < 1e-13
    rng = np.random.default_rng(0)
    g, h = (from_quaternion(*q) for q in random_elements(2, rng))
    assert abs(character(h * g * h.inverse(), 4) - character(g, 4)) < 1e-11


@settings(max_examples=30, deadline=None)
@given(unit, unit, st.integers(0, 12))
def test_unitary_homomorphism(a, b, tl):
    g, h = from_quaternion(*a), from_quaternion(*b)
    Tg, Th = wigner(g, tl), wigner(h, tl)
    assert np.allclose(Tg.conj().T @ Tg, np.eye(tl + 1), atol=1e-11)
    assert np.allclose(wigner(g * h, tl), Tg @ Th, atol=1e-11)
    assert np.allclose(wigner(g.inverse(), tl), Tg.conj().T, atol=1e-11)


def test_batch_matches_single():
    q = random_elements(7, np.random.default_rng(1))
    batch = wigner_batch(q, 5)
    for k in range(7):
        assert np.allclose(batch[k], wigner(from_quaternion(*q[k]), 5))


@pytest.mark.parametrize("pair", ["--", "-+", "+-", "++"])
def test_multiplication_formulas(pair):
    q = random_elements(20, np.random.default_rng(2))
    T = wigner_batch(q, 1)
    i, j = {"-": 0, "+": 1}[pair[0]], {"-": 0, "+": 1}[pair[1]]
    for tl in range(9):
        assert np.allclose(T[:, i, j, None, None] * wigner_batch(q, tl), multiplication_rhs(q, tl, pair), atol=1e-12)


@pytest.mark.parametrize("tl", [32, 33, 80, 160])
def test_large_band_stays_unitary(tl):
    q = random_elements(5, np.random.default_rng(3))
    W = wigner_batch(q, tl)
    eye = np.eye(tl + 1)
    assert max(np.max(np.abs(w.conj().T @ w - eye)) for w in W) < 1e-9
    assert np.allclose(wigner_batch(quat_mul(q, q), tl), W @ W, atol=1e-9)


@pytest.mark.parametrize("tl", [0, 1, 7, 16, 32])
def test_euler_route_agrees_with_explicit_sum(tl):
    from su2q._wigner_py import wigner_batch as explicit, wigner_euler
    q = np.vstack([random_elements(20, np.random.default_rng(4)), np.eye(4), -np.eye(4)])
    assert np.max(np.abs(wigner_euler(q, tl) - explicit(q, tl))) < 1e-11

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from su2q import diffops
from su2q.fourier import BandLimitedFunction, analysis_grid, synthesize
from su2q.group import from_quaternion, random_elements, taylor_basis
from su2q.quantize import (OperatorOracle, adjoint_expansion, compose_expansion, empirical_operator_norm,
                           extract_symbol, l2_bound_estimate, op_apply, op_matrix, sobolev_reweight)
from su2q.symbols import Symbol, builtin, multiplication_symbol, pushforward
from su2q.verify import q_function

seeds = st.integers(0, 2**32 - 1)


def test_laplacian_symbol_acts_by_eigenvalue():
    f = BandLimitedFunction.basis(2, 1, 1)
    grid = analysis_grid(2)
    out = op_apply(builtin("laplacian", 4), f, grid.quats)
    assert np.allclose(out, -2 * synthesize(f, grid), atol=1e-13)


def test_pushforward_symbol_matches_rotated_multiplier():
    u = from_quaternion(*random_elements(1, np.random.default_rng(0))[0])
    f = BandLimitedFunction.random(4, np.random.default_rng(1))
    x = random_elements(8, np.random.default_rng(2))
    via_symbol = op_apply(pushforward(builtin("partial_zero", 4), u), f, x)
    via_multiplier = synthesize(diffops.apply_multiplier(lambda tl: diffops.rotated_multiplier(u, tl), f), x)
    assert np.allclose(via_symbol, via_multiplier, atol=1e-12)


def test_batched_op_apply():
    rng = np.random.default_rng(3)
    s = Symbol.random(3, 1, rng)
    fb = BandLimitedFunction.random(3, rng, batch_shape=(2,))
    x = random_elements(5, rng)
    out = op_apply(s, fb, x)
    assert out.shape == (5, 2)
    for b in range(2):
        single = BandLimitedFunction(3, {tl: fb.coeffs[tl][b] for tl in range(4)})
        assert np.allclose(out[:, b], op_apply(s, single, x))


def test_extract_builtin_fields():
    for name in ("partial_plus", "partial_minus", "partial_zero", "laplacian", "D1"):
        s = extract_symbol(OperatorOracle.field(name), 6)
        assert s.x_invariant
        assert s.max_abs_diff(builtin(name, 6)) < 1e-12


def test_extract_multiplication_operator():
    phi = q_function("zero")
    s = extract_symbol(OperatorOracle.multiplication(phi), 4)
    assert s.max_abs_diff(multiplication_symbol(phi, 4, grid=s.grid)) < 1e-12


def test_extract_rejects_nonlinear_oracle():
    bad = OperatorOracle(lambda f: BandLimitedFunction(f.two_L, {k: v ** 2 for k, v in f.coeffs.items()}))
    with pytest.raises(ValueError, match="linear"):
        extract_symbol(bad, 2)


@settings(max_examples=8, deadline=None)
@given(seeds, st.integers(0, 2))
def test_extract_inverts_quantization(seed, x_band):
    s = Symbol.random(4, x_band, np.random.default_rng(seed))
    assert extract_symbol(OperatorOracle.from_symbol(s), 4, grid=s.grid).max_abs_diff(s) < 1e-9


def test_extraction_is_thread_count_independent(monkeypatch):
    s = Symbol.random(4, 1, np.random.default_rng(4))
    A = OperatorOracle.from_symbol(s)
    monkeypatch.setenv("SU2Q_THREADS", "1")
    one = extract_symbol(A, 4, grid=s.grid)
    monkeypatch.setenv("SU2Q_THREADS", "4")
    four = extract_symbol(A, 4, grid=s.grid)
    assert one.max_abs_diff(four) == 0.0


def test_composition_with_invariant_right_factor_collapses():
    a = extract_symbol(OperatorOracle.field("partial_zero"), 4)
    c = compose_expansion(a, a, 1, taylor_basis(0))
    assert np.allclose(c.data[2][0], np.diag([1, 0, 1]))
    r = Symbol.random(4, 1, np.random.default_rng(5))
    b = builtin("partial_plus", 4)
    for N in (1, 2, 3):
        assert compose_expansion(r, b, N, taylor_basis(max(N - 1, 0))).max_abs_diff(r @ b) < 1e-12


def test_composition_d0_after_q0_terminates_at_two():
    A, B = OperatorOracle.field("partial_zero"), OperatorOracle.multiplication(q_function("zero"))
    sa, sb = extract_symbol(A, 4), extract_symbol(B, 4)
    two = compose_expansion(sa, sb, 2, taylor_basis(1))
    assert two.max_abs_diff(extract_symbol(A @ B, two.two_L)) < 1e-12
    one = compose_expansion(sa, sb, 1, taylor_basis(0))
    assert one.max_abs_diff(extract_symbol(A @ B, one.two_L)) > 0.1


def test_expansion_needs_enough_taylor_order():
    s = builtin("partial_plus", 4)
    with pytest.raises(ValueError, match="order"):
        compose_expansion(s, s, 3, taylor_basis(1))
    with pytest.raises(ValueError, match="order"):
        adjoint_expansion(s, 3, taylor_basis(1))


def test_adjoint_examples():
    tb = taylor_basis(2)
    for N in (1, 2, 3):
        t = taylor_basis(max(N - 1, 0))
        assert adjoint_expansion(builtin("partial_plus", 6), N, t).max_abs_diff(builtin("partial_minus", 6)) < 1e-12
    lap = builtin("laplacian", 6)
    assert adjoint_expansion(lap, 3, tb).max_abs_diff(lap) < 1e-12
    i_d3 = builtin("D3", 6).scale(1j)
    assert adjoint_expansion(i_d3, 3, tb).max_abs_diff(i_d3) < 1e-12


def test_adjoint_of_x_dependent_symbol_by_inner_products():
    A = OperatorOracle.field("partial_minus") @ OperatorOracle.multiplication(q_function("zero"))
    s = extract_symbol(A, 6)
    sa = adjoint_expansion(s, 3, taylor_basis(2))
    rng = np.random.default_rng(6)
    grid = analysis_grid(8)
    for _ in range(3):
        f, g = BandLimitedFunction.random(sa.two_L, rng), BandLimitedFunction.random(sa.two_L, rng)
        lhs = np.vdot(synthesize(g, grid) * grid.weights, op_apply(s, f, grid.quats))
        rhs = np.vdot(op_apply(sa, g, grid.quats) * grid.weights, synthesize(f, grid))
        assert abs(lhs - rhs) < 1e-10


def test_op_matrix_of_invariant_symbol_is_block_diagonal():
    s = builtin("partial_zero", 2)
    M = op_matrix(s)
    assert M.shape == (1 + 4 + 9, 1 + 4 + 9)
    assert np.allclose(np.sort(np.linalg.eigvalsh((M + M.conj().T) / 2)),
                       np.sort(np.r_[0, [-.5, -.5, .5, .5], [-1, -1, -1, 0, 0, 0, 1, 1, 1]]))


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_multiplier_norm_equals_sup(seed):
    s = Symbol.random(6, 0, np.random.default_rng(seed))
    sup = max(np.linalg.norm(s.data[tl][0], 2) for tl in s.data)
    assert abs(empirical_operator_norm(s) - sup) < 1e-8


def test_power_iteration_agrees_with_svd():
    s = Symbol.random(3, 1, np.random.default_rng(7))
    assert abs(empirical_operator_norm(s, method="power", max_iter=3000, rtol=1e-13)
               - empirical_operator_norm(s)) < 1e-6
    with pytest.raises(ValueError):
        empirical_operator_norm(s, method="guess")


def test_l2_estimate_examples():
    ident = l2_bound_estimate(builtin("identity", 6))
    assert ident.certificate == pytest.approx(1) and ident.empirical_norm == pytest.approx(1)
    q0 = l2_bound_estimate(multiplication_symbol(q_function("zero"), 4))
    # sup |q0| = 2; the finite band sees slightly less
    assert q0.empirical_norm <= 2 + 1e-12
    assert q0.empirical_norm <= q0.certificate <= 2 + 1e-12
    assert q0.derivative_sum >= q0.certificate
    d0 = l2_bound_estimate(builtin("partial_zero", 12), empirical=False)
    assert d0.per_level == pytest.approx(list(np.arange(13) / 2))
    assert not d0.certifiable


def test_sobolev_reweight():
    s = builtin("partial_plus", 8)
    assert sobolev_reweight(s, 0).max_abs_diff(s) == 0.0
    lap = sobolev_reweight(builtin("laplacian", 16), 2)
    l = np.arange(17) / 2
    for tl in range(17):
        assert np.allclose(np.abs(lap.data[tl][0]), l[tl] * (l[tl] + 1) / (1 + l[tl] * (l[tl] + 1)) * np.eye(tl + 1))
    dp = sobolev_reweight(builtin("partial_plus", 16), 1)
    assert max(np.linalg.norm(dp.data[tl][0], 2) for tl in range(17)) <= 1

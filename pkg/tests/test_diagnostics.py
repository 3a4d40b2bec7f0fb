import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from su2q.diagnostics import (DISCLAIMER, banded_product_decay, bracket, bracket_zeta, class_report,
                              decay_constant, decay_norm_bound, default_u_samples, opnorm_vs_linf, shoemake,
                              sigma0_inequalities)
from su2q.group import IDENTITY
from su2q.symbols import Symbol, builtin

ORDERS = {"identity": 0, "partial_plus": 1, "partial_minus": 1, "partial_zero": 1, "laplacian": 2}


def ones_symbol(L):
    return Symbol.invariant(lambda tl: np.ones((tl + 1, tl + 1)), L)


def test_bracket():
    assert np.allclose(bracket([0, 1, -3]), [1, math.sqrt(2), math.sqrt(10)])


def test_u_samples_are_deterministic_units():
    u = default_u_samples()
    assert len(u) == 23
    assert u is default_u_samples()
    q = shoemake(np.random.default_rng(0).random((50, 3)))
    assert np.allclose(np.linalg.norm(q, axis=1), 1)


def test_creation_symbol_passes_every_decay_order():
    rep = class_report(builtin("partial_plus", 8), 1, N_max=4)
    assert rep.all_pass
    # Delta_+ sigma_{d+} = sigma_I, so the normalised ratio is (1+l)^0 = 1
    assert rep.find((1, 0, 0), (0, 0, 0), 0)["C"] == pytest.approx(1.0)


def test_laplacian_ratio_bounded_by_one():
    rep = class_report(builtin("laplacian", 10), 2, u_samples=[IDENTITY])
    c = rep.find((0, 0, 0), (0, 0, 0), 0)
    assert c["pass"] and c["C"] <= 1
    assert c["C"] == pytest.approx(5 * 6 / 36)  # l(l+1)/(1+l)^2 at l = 5


@pytest.mark.parametrize("name", list(ORDERS))
def test_builtins_pass_at_true_order(name):
    assert class_report(builtin(name, 6), ORDERS[name]).all_pass


def test_linear_excess_growth_is_detected():
    # entrywise at m = 0 the neutral symbol grows like l
    assert not class_report(builtin("partial_zero", 10), 0, alpha_max=0, beta_max=0, u_samples=[IDENTITY]).all_pass


def test_order_too_low_is_detected():
    rep = class_report(builtin("laplacian", 10), 1, alpha_max=0, beta_max=0, u_samples=[IDENTITY])
    assert not rep.all_pass


def test_negative_control():
    rep = class_report(ones_symbol(8), 0, alpha_max=0, beta_max=0, N_max=2, u_samples=[IDENTITY])
    assert rep.find((0, 0, 0), (0, 0, 0), 0)["pass"]
    assert not rep.find((0, 0, 0), (0, 0, 0), 2)["pass"]
    # rotated copies of the all-ones matrix have entries of size ~2l+1, so the
    # translation sample exposes the growth even without off-diagonal weights
    full = class_report(ones_symbol(8), 0, alpha_max=0, beta_max=0, N_max=2)
    assert not full.find((0, 0, 0), (0, 0, 0), 0)["pass"]
    w = rep.find((0, 0, 0), (0, 0, 0), 2)["witness"]
    assert abs(w["i"] - w["j"]) == w["two_l"]  # anti-diagonal corner


def test_absolute_tolerance_mode():
    rep = class_report(builtin("partial_plus", 6), 1, tol=0.5, alpha_max=0, beta_max=0, N_max=0)
    assert not rep.all_pass
    assert class_report(builtin("partial_plus", 6), 1, tol=1.0, alpha_max=0, beta_max=0, N_max=0).all_pass


def test_report_json_shape():
    out = class_report(builtin("partial_zero", 4), 1, alpha_max=1, beta_max=0, N_max=1).to_json()
    assert set(out) == {"checks", "summary"}
    assert out["summary"]["note"] == DISCLAIMER
    c = out["checks"][0]
    assert {"alpha", "beta", "N", "C", "witness", "pass"} <= set(c)
    assert {"node", "two_l", "i", "j"} <= set(c["witness"])


def test_operator_norm_variant():
    for name in ("partial_plus", "laplacian"):
        assert sigma0_inequalities(builtin(name, 8), ORDERS[name]).all_pass
    assert not sigma0_inequalities(ones_symbol(10), 0, alpha_max=0, beta_max=0).all_pass


def test_zeta_bound_against_closed_form():
    # sum_k 1/(1+k^2) = pi coth(pi)
    exact = math.pi / math.tanh(math.pi)
    assert exact <= bracket_zeta(2) <= exact + 1e-3
    with pytest.raises(ValueError):
        bracket_zeta(1)


def test_decay_bound_on_toeplitz_example():
    i, j = np.indices((21, 21))
    M = bracket(i - j) ** -3
    res = decay_norm_bound(M, 1.0, 3)
    assert res["certificate_valid"] and res["holds"]
    assert res["linf"] == 1.0 and res["op"] <= res["bound"]


def test_product_certificate():
    rng = np.random.default_rng(1)
    i, j = np.indices((41, 41))
    A = rng.normal(size=(41, 41)) * bracket(i - j) ** -4
    B = rng.normal(size=(41, 41)) * bracket(i - j) ** -4
    cert = banded_product_decay(A, B, (decay_constant(A, 4), 4), (decay_constant(B, 4), 4))
    assert cert.holds and cert.r == 4 and cert.empirical_c <= cert.c
    with pytest.raises(ValueError):
        banded_product_decay(A, B, (decay_constant(A, 4) / 2, 4), (decay_constant(B, 4), 4))
    weak = banded_product_decay(A, B, (1.0, 1.0), (1.0, 4.0))
    assert weak.holds is None and weak.c is None


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)),
              elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_operator_norm_dominates_entries(M):
    op, linf = opnorm_vs_linf(M)
    assert linf <= op * (1 + 1e-12) + 1e-300


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1.2, 5.0))
def test_decay_certificate_bounds_norm(seed, r):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 30))
    i, j = np.indices((n, n))
    M = rng.normal(size=(n, n)) * bracket(i - j) ** -r
    assert decay_norm_bound(M, decay_constant(M, r), r)["holds"]

"""Identity suite behind ``su2q verify``.

Every check returns ``(error, tol)`` and passes when ``error <= tol``; boolean
checks report error 0 or 1 against tolerance 0.  Checks are deterministic
(fixed seeds, fixed sample sets).
"""
from __future__ import annotations

import math
import time
from typing import Callable, List, Tuple

import numpy as np

from . import diffops
from ._backend import BACKEND
from .diagnostics import banded_product_decay, class_report, decay_constant, decay_norm_bound, opnorm_vs_linf
from .fourier import (BandLimitedFunction, analysis_grid, convolve, forward, plancherel_norm, synthesize,
                      l2_norm_quadrature)
from .group import (IDENTITY, LIE_BASIS, from_quaternion, haar_integrate, multi_indices, omega2,
                    q_alpha_samples, quadrature_grid, quat_inv, quat_mul, quat_to_matrix, random_elements,
                    taylor_basis)
from .quantize import (OperatorOracle, adjoint_expansion, compose_expansion, empirical_operator_norm,
                       extract_symbol, l2_bound_estimate, sobolev_reweight)
from .representation import multiplication_rhs, wigner_batch
from .symbols import (Symbol, builtin, difference, difference_by_function, leibniz_check_data, pushforward)

FIRST_ORDER = {"plus": "partial_plus", "minus": "partial_minus", "zero": "partial_zero"}
BUILTIN_ORDERS = {"identity": 0, "partial_plus": 1, "partial_minus": 1, "partial_zero": 1, "laplacian": 2}


def q_function(which: str) -> BandLimitedFunction:
    """q_plus, q_minus or q_zero as a coefficient stack of band 1/2."""
    f = BandLimitedFunction.zeros(1)
    if which == "plus":
        f.coeffs[1][0, 1] = 0.5
    elif which == "minus":
        f.coeffs[1][1, 0] = 0.5
    elif which == "zero":
        f.coeffs[1][0, 0], f.coeffs[1][1, 1] = 0.5, -0.5
    else:
        raise ValueError(f"unknown q function {which!r}")
    return f


def _maxdiff(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _exp_quat(y_quat: np.ndarray, t: float) -> np.ndarray:
    """exp(t Y) for a pure quaternion Y."""
    v = t * np.asarray(y_quat[1:], dtype=float)
    ang = np.linalg.norm(v)
    if ang == 0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    return np.r_[np.cos(ang), np.sin(ang) * v / ang]


# ---------------------------------------------------------------------------
# individual checks

def check_repr(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(101)
    g, h = random_elements(100, rng), random_elements(100, rng)
    err = _maxdiff(wigner_batch(g, 1), quat_to_matrix(g))
    for tl in range(two_L + 1):
        Tg, Th, Tgh = wigner_batch(g, tl), wigner_batch(h, tl), wigner_batch(quat_mul(g, h), tl)
        eye = np.eye(tl + 1)
        err = max(err, _maxdiff(np.conj(np.swapaxes(Tg, -1, -2)) @ Tg, eye[None]),
                  _maxdiff(Tgh, Tg @ Th) / (tl + 1))
    return err, 1e-10


def check_multiplication_formulas(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(102)
    g = random_elements(25, rng)
    T = wigner_batch(g, 1)
    err = 0.0
    for tl in range(min(two_L, 10) + 1):
        W = wigner_batch(g, tl)
        for pair, (a, b) in {"--": (0, 0), "-+": (0, 1), "+-": (1, 0), "++": (1, 1)}.items():
            err = max(err, _maxdiff(W * T[:, a, b, None, None], multiplication_rhs(g, tl, pair)))
    return err, 1e-10


def check_grid_exactness(two_L: int) -> Tuple[float, float]:
    grid = quadrature_grid(2 * two_L)
    err = abs(grid.weights.sum() - 1.0)
    for tl in range(1, 2 * two_L + 1):
        err = max(err, float(np.max(np.abs(haar_integrate(grid.wigner(tl), grid)))))
    return err, 1e-10


def check_fourier_roundtrip(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(103)
    f = BandLimitedFunction.random(two_L, rng)
    grid = analysis_grid(two_L)
    samples = synthesize(f, grid)
    back = forward(samples, grid, two_L)
    err = max(f.max_abs_diff(back), _maxdiff(synthesize(back, grid), samples))
    return err, 1e-10


def check_plancherel(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(104)
    f = BandLimitedFunction.random(two_L, rng)
    grid = analysis_grid(two_L)
    return abs(plancherel_norm(f) - l2_norm_quadrature(synthesize(f, grid), grid)), 1e-9


def convolution_oracle(f: BandLimitedFunction, g: BandLimitedFunction, xs: np.ndarray) -> np.ndarray:
    """Direct quadrature of integral f(x y^-1) g(y) dy at the rows of ``xs``."""
    grid = quadrature_grid(2 * max(f.two_L, g.two_L))
    gy = synthesize(g, grid)
    inv = quat_inv(grid.quats)
    out = []
    for x in xs:
        out.append(np.dot(grid.weights, synthesize(f, quat_mul(x[None, :], inv)) * gy))
    return np.asarray(out)


def check_convolution(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(105)
    L = min(two_L, 4)
    f, g = BandLimitedFunction.random(L, rng), BandLimitedFunction.random(L, rng)
    xs = random_elements(8, rng)
    return _maxdiff(synthesize(convolve(f, g), xs), convolution_oracle(f, g, xs)), 1e-8


def check_field_algebra(two_L: int) -> Tuple[float, float]:
    err = 0.0
    for tl in range(two_L + 1):
        P, M, Z = (diffops.multiplier(n, tl) for n in ("partial_plus", "partial_minus", "partial_zero"))
        lap = diffops.multiplier("laplacian", tl)
        err = max(err, _maxdiff(Z @ P - P @ Z, P), _maxdiff(M @ Z - Z @ M, M), _maxdiff(P @ M - M @ P, 2 * Z),
                  _maxdiff(lap, -Z @ Z - (P @ M + M @ P) / 2))
        D = [diffops.multiplier(f"D{j}", tl) for j in (1, 2, 3)]
        err = max(err, _maxdiff(D[0], -0.5j * (M + P)), _maxdiff(D[1], 0.5 * (M - P)), _maxdiff(D[2], -1j * Z))
    return err, 1e-10


def check_fields_fd(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(106)
    f = BandLimitedFunction.random(min(two_L, 4), rng)
    xs = random_elements(20, rng)
    h = 1e-4
    err = 0.0
    for j in (1, 2, 3):
        Y = LIE_BASIS[f"Y{j}"]
        fd = (synthesize(f, quat_mul(xs, _exp_quat(Y, h))) - synthesize(f, quat_mul(xs, _exp_quat(Y, -h)))) / (2 * h)
        exact = synthesize(diffops.apply_field(f"D{j}", f), xs)
        err = max(err, _maxdiff(fd, exact) / max(1.0, float(np.max(np.abs(exact)))))
    return err, 1e-6


def check_rotated_multiplier(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(107)
    w2 = omega2(math.pi / 2)
    err = 0.0
    for tl in range(min(two_L, 8) + 1):
        err = max(err, _maxdiff(diffops.rotated_multiplier(w2.inverse(), tl), 1j * diffops.multiplier("D1", tl)))
        for q in random_elements(3, rng):
            u = from_quaternion(*q)
            R = diffops.rotated_multiplier(u, tl)
            oracle = 1j * diffops.lie_multiplier(diffops.conjugated_direction(u), tl)
            eig = np.sort(np.linalg.eigvalsh(R))
            err = max(err, _maxdiff(R, oracle), _maxdiff(eig, np.arange(tl + 1) - tl / 2))
    return err, 1e-10


def check_theorem64(two_L: int) -> Tuple[float, float]:
    L = two_L + 1
    sig = {n: builtin(n, L) for n in ("identity", "partial_plus", "partial_minus", "partial_zero", "laplacian")}
    ident = sig["identity"]
    err = 0.0
    for mu in ("plus", "minus", "zero"):
        for nu, name in FIRST_ORDER.items():
            target = ident if mu == nu else ident.scale(0.0)
            err = max(err, difference(mu, sig[name]).max_abs_diff(target))
        err = max(err, difference(mu, ident).max_abs_diff(ident.scale(0.0)))
    err = max(err, difference("plus", sig["laplacian"]).max_abs_diff(sig["partial_minus"].scale(-1)),
              difference("minus", sig["laplacian"]).max_abs_diff(sig["partial_plus"].scale(-1)),
              difference("zero", sig["laplacian"]).max_abs_diff(sig["partial_zero"].scale(-2)))
    return err, 1e-10


def check_leibniz(two_L: int) -> Tuple[float, float]:
    L = two_L + 3
    err = 0.0
    for name in BUILTIN_ORDERS:
        a = builtin(name, L)
        for alpha in multi_indices(3):
            lhs, rhs = leibniz_check_data(alpha, a)
            err = max(err, lhs.max_abs_diff(rhs))
    return err, 1e-10


def check_bar_zero_commutes(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(108)
    a = Symbol.random(two_L + 2, 0, rng)
    d1 = difference("zero", difference("bar_zero", a))
    d2 = difference("bar_zero", difference("zero", a))
    return d1.max_abs_diff(d2), 1e-10


def check_difference_commutators(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(109)
    a = Symbol.random(two_L + 2, 0, rng)
    err = 0.0
    for p, q in (("zero", "plus"), ("zero", "minus"), ("minus", "plus")):
        err = max(err, difference(p, difference(q, a)).max_abs_diff(difference(q, difference(p, a))))
    return err, 1e-10


def check_stencil_vs_kernel(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(110)
    a = Symbol.random(min(two_L, 8), 0, rng)
    err = 0.0
    for direction in ("plus", "minus", "zero"):
        err = max(err, difference(direction, a).max_abs_diff(difference_by_function(q_function(direction), a)))
    return err, 1e-10


def check_order_drop(two_L: int) -> Tuple[float, float]:
    L = two_L + 2
    err = 0.0
    for name in FIRST_ORDER.values():
        s = builtin(name, L)
        for p in ("plus", "minus", "zero"):
            for q in ("plus", "minus", "zero"):
                d = difference(p, difference(q, s))
                err = max(err, max(float(np.max(np.abs(b))) for b in d.data.values()))
    return err, 1e-10


def check_taylor(two_L: int) -> Tuple[float, float]:
    N = 2
    tb = taylor_basis(N)
    err = 0.0
    alphas = multi_indices(N)
    grid = analysis_grid(N)
    inv = quat_inv(grid.quats)
    from .fourier import evaluate_at_identity
    for a in alphas:
        g = forward(q_alpha_samples(a, inv), grid, sum(a))
        for b in alphas:
            val = evaluate_at_identity(tb.apply_dual(b, g))
            target = math.prod(math.factorial(k) for k in a) if a == b else 0.0
            err = max(err, abs(val - target))
    return err, 1e-9


def check_quantize_duality(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(111)
    L = min(two_L, 8)
    err = 0.0
    for k in range(4):
        s = Symbol.random(L, k % 3, rng)
        e = extract_symbol(OperatorOracle.from_symbol(s), L, grid=s.grid)
        err = max(err, s.max_abs_diff(e))
    return err, 1e-9


def standard_operators():
    """The five operators used in the terminating composition checks."""
    return {
        "partial_zero": OperatorOracle.field("partial_zero"),
        "partial_plus": OperatorOracle.field("partial_plus"),
        "partial_minus": OperatorOracle.field("partial_minus"),
        "mul_q_plus": OperatorOracle.multiplication(q_function("plus"), "mul:q_plus"),
        "mul_q_zero": OperatorOracle.multiplication(q_function("zero"), "mul:q_zero"),
    }


def check_composition(two_L: int) -> Tuple[float, float]:
    L = max(min(two_L, 6), 2)
    ops = standard_operators()
    tb = taylor_basis(2)
    syms = {k: extract_symbol(v, L) for k, v in ops.items()}
    err = 0.0
    for a in ops:
        for b in ops:
            c = compose_expansion(syms[a], syms[b], 3, tb)
            ref = extract_symbol(ops[a] @ ops[b], c.two_L)
            err = max(err, c.max_abs_diff(ref))
    return err, 1e-9


def check_adjoint(two_L: int) -> Tuple[float, float]:
    L = max(two_L, 2)
    tb = taylor_basis(2)
    err = adjoint_expansion(builtin("partial_plus", L), 3, tb).max_abs_diff(builtin("partial_minus", L))
    lap = builtin("laplacian", L)
    err = max(err, adjoint_expansion(lap, 3, tb).max_abs_diff(lap))
    i_d3 = builtin("D3", L).scale(1j)
    err = max(err, adjoint_expansion(i_d3, 3, tb).max_abs_diff(i_d3))
    # <d+ f, g> = <f, d- g> by quadrature
    rng = np.random.default_rng(112)
    Lf = min(two_L, 6)
    f, g = BandLimitedFunction.random(Lf, rng), BandLimitedFunction.random(Lf, rng)
    grid = analysis_grid(Lf)
    lhs = np.vdot(synthesize(g, grid) * grid.weights, synthesize(diffops.apply_field("partial_plus", f), grid))
    rhs = np.vdot(synthesize(diffops.apply_field("partial_minus", g), grid) * grid.weights, synthesize(f, grid))
    err = max(err, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return err, 1e-9


def check_multiplier_norm(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(113)
    s = Symbol.random(min(two_L, 8), 0, rng)
    sup = max(float(np.linalg.norm(s.data[tl][0], 2)) for tl in range(s.two_L + 1))
    return abs(empirical_operator_norm(s) - sup), 1e-8


def check_sobolev(two_L: int) -> Tuple[float, float]:
    # the growth-slope fit needs enough levels before O(1/l) approach to a bound stops looking like growth
    L = max(two_L, 8)
    lap = l2_bound_estimate(sobolev_reweight(builtin("laplacian", L), 2), empirical=False)
    dp = l2_bound_estimate(sobolev_reweight(builtin("partial_plus", L), 1), empirical=False)
    d0 = l2_bound_estimate(builtin("partial_zero", L), empirical=False)
    ok = lap.certifiable and dp.certifiable and lap.certificate <= 1 and dp.certificate <= 1 \
        and not d0.certifiable
    return 0.0 if ok else 1.0, 0.0


def check_class_reports(two_L: int) -> Tuple[float, float]:
    L = max(two_L, 8)
    ok = True
    for name, m in BUILTIN_ORDERS.items():
        ok &= class_report(builtin(name, L), m).all_pass
    rng = np.random.default_rng(114)
    names = list(BUILTIN_ORDERS)
    for k, q in enumerate(random_elements(20, rng)):
        name = names[k % len(names)]
        pushed = pushforward(builtin(name, L), from_quaternion(*q))
        ok &= class_report(pushed, BUILTIN_ORDERS[name], u_samples=[IDENTITY]).all_pass
    ones = Symbol.invariant(lambda tl: np.ones((tl + 1, tl + 1)), L)
    neg = class_report(ones, 0, alpha_max=0, beta_max=0, N_max=2)
    ok &= not neg.find((0, 0, 0), (0, 0, 0), 2)["pass"]
    return 0.0 if ok else 1.0, 0.0


def check_matrix_norms(two_L: int) -> Tuple[float, float]:
    rng = np.random.default_rng(115)
    ok = True
    for _ in range(100):
        n = int(rng.integers(2, 30))
        i, j = np.indices((n, n))
        M = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) * (1 + np.abs(i - j)) ** -3.0
        op, linf = opnorm_vs_linf(M)
        ok &= op >= linf - 1e-14
        ok &= decay_norm_bound(M, decay_constant(M, 2.0), 2.0)["holds"]
    A = np.diag(np.ones(41)) + np.diag(0.5 * np.ones(40), 1) + np.diag(0.5 * np.ones(40), -1)
    cert = banded_product_decay(A, A, (decay_constant(A, 4), 4), (decay_constant(A, 4), 4))
    ok &= bool(cert.holds)
    return 0.0 if ok else 1.0, 0.0


CHECKS: List[Tuple[str, Callable[[int], Tuple[float, float]]]] = [
    ("repr_unitary_homomorphism", check_repr),
    ("repr_multiplication_formulas", check_multiplication_formulas),
    ("grid_exactness", check_grid_exactness),
    ("fourier_roundtrip", check_fourier_roundtrip),
    ("fourier_plancherel", check_plancherel),
    ("fourier_convolution_order", check_convolution),
    ("field_commutators_laplacian", check_field_algebra),
    ("field_finite_difference", check_fields_fd),
    ("rotated_multiplier", check_rotated_multiplier),
    ("difference_first_order_identities", check_theorem64),
    ("difference_leibniz", check_leibniz),
    ("difference_bar_zero_commutes", check_bar_zero_commutes),
    ("difference_commutators", check_difference_commutators),
    ("difference_stencil_vs_kernel", check_stencil_vs_kernel),
    ("difference_order_drop", check_order_drop),
    ("taylor_biorthogonality", check_taylor),
    ("quantize_extract_duality", check_quantize_duality),
    ("composition_terminating", check_composition),
    ("adjoint_terminating", check_adjoint),
    ("multiplier_norm_equality", check_multiplier_norm),
    ("sobolev_certificates", check_sobolev),
    ("class_reports", check_class_reports),
    ("appendix_matrix_norms", check_matrix_norms),
]


def run_suite(two_L: int, only=None, timings: bool = False) -> dict:
    """Run the checks; timings are opt-in so the default manifest is reproducible byte for byte."""
    if two_L < 1:
        raise ValueError("verify needs two_L >= 1")
    checks = []
    for name, fn in CHECKS:
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        try:
            err, tol = fn(two_L)
            passed = bool(err <= tol)
            note = None
        except Exception as exc:  # a crash is a failed check, reported in the manifest
            err, tol, passed, note = float("inf"), 0.0, False, f"{type(exc).__name__}: {exc}"
        entry = {"name": name, "error": float(err), "tol": float(tol), "pass": passed}
        if timings:
            entry["seconds"] = round(time.perf_counter() - t0, 3)
        if note:
            entry["note"] = note
        checks.append(entry)
    return {"two_L": two_L, "backend": BACKEND, "checks": checks, "all_pass": all(c["pass"] for c in checks)}

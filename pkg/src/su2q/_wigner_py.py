"""Pure numpy evaluation of SU(2) matrix elements (fallback kernel).

Both this module and the compiled ``_wigner_ext`` consume the same term
table, so the two kernels differ only in how the sum is executed.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

# factorial ratios switch to log-space above this doubled index
LOG_SPACE_TWO_L = 60


def _sqrt_factorial_ratio(lm: int, lpm: int, ln: int, lpn: int, two_l: int) -> float:
    """sqrt((l-m)!(l+m)! / ((l-n)!(l+n)!)) with integer arguments."""
    if two_l > LOG_SPACE_TWO_L:
        return math.exp(0.5 * (math.lgamma(lm + 1) + math.lgamma(lpm + 1)
                               - math.lgamma(ln + 1) - math.lgamma(lpn + 1)))
    num = math.factorial(lm) * math.factorial(lpm)
    den = math.factorial(ln) * math.factorial(lpn)
    return math.sqrt(num / den)


def _binom(n: int, k: int, two_l: int) -> float:
    if two_l > LOG_SPACE_TWO_L:
        return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))
    return float(math.comb(n, k))


@lru_cache(maxsize=None)
def term_table(two_l: int):
    """Monomial terms of the explicit matrix-element sum at a fixed ``two_l``.

    Returns ``(flat, coef, expo)``: term ``k`` contributes
    ``coef[k] * a**e0 * b**e1 * c**e2 * d**e3`` to the flattened entry
    ``flat[k] = i*(2l+1) + j`` where ``expo[k] = (e0, e1, e2, e3)`` and
    ``(a, b; c, d)`` is the 2x2 matrix of the group element.  Row index
    ``i`` encodes ``m = i - l``, column ``j`` encodes ``n = j - l``.
    """
    if two_l < 0:
        raise ValueError(f"two_l must be non-negative, got {two_l}")
    dim = two_l + 1
    flat, coef, expo = [], [], []
    for i in range(dim):
        two_m = 2 * i - two_l
        lm, lpm = (two_l - two_m) // 2, (two_l + two_m) // 2
        for j in range(dim):
            two_n = 2 * j - two_l
            ln, lpn = (two_l - two_n) // 2, (two_l + two_n) // 2
            nm = (two_n + two_m) // 2
            pre = _sqrt_factorial_ratio(lm, lpm, ln, lpn, two_l)
            # every factorial argument in the sum must be non-negative
            for k in range(max(0, -nm), min(ln, lm) + 1):
                # (l-n)!(l+n)! / (k!(l-n-k)!(l-m-k)!(n+m+k)!) = C(l-n,k) C(l+n,l-m-k)
                c = pre * _binom(ln, k, two_l) * _binom(lpn, lm - k, two_l)
                flat.append(i * dim + j)
                coef.append(c)
                expo.append((k, lm - k, ln - k, nm + k))
    flat_a = np.asarray(flat, dtype=np.intp)
    coef_a = np.asarray(coef, dtype=np.float64)
    expo_a = np.asarray(expo, dtype=np.intc).reshape(-1, 4)
    for arr in (flat_a, coef_a, expo_a):
        arr.setflags(write=False)
    return flat_a, coef_a, expo_a


def matrix_entries(quats: np.ndarray):
    """Entries a, b, c, d of the 2x2 unitary view for each row of ``quats``."""
    x0, x1, x2, x3 = quats[:, 0], quats[:, 1], quats[:, 2], quats[:, 3]
    return x0 + 1j * x3, x1 + 1j * x2, -x1 + 1j * x2, x0 - 1j * x3


def wigner_batch(quats: np.ndarray, two_l: int) -> np.ndarray:
    """Matrices t^l(g) for every quaternion row; shape ``(N, 2l+1, 2l+1)``."""
    quats = np.ascontiguousarray(quats, dtype=np.float64).reshape(-1, 4)
    n_nodes = quats.shape[0]
    dim = two_l + 1
    if two_l == 0:
        return np.ones((n_nodes, 1, 1), dtype=np.complex128)
    flat, coef, expo = term_table(two_l)
    exps = np.arange(two_l + 1)
    # powers[k][:, p] = entry_k ** p, with 0**0 == 1
    powers = [np.power(z[:, None], exps[None, :]) for z in matrix_entries(quats)]
    terms = coef[None, :] * powers[0][:, expo[:, 0]]
    for k in range(1, 4):
        terms = terms * powers[k][:, expo[:, k]]
    # flat is sorted and every entry owns at least one term
    out = np.add.reduceat(terms, _segment_starts(two_l), axis=1)
    return out.reshape(n_nodes, dim, dim)


@lru_cache(maxsize=None)
def _segment_starts(two_l: int) -> np.ndarray:
    flat = term_table(two_l)[0]
    return np.flatnonzero(np.r_[True, flat[1:] != flat[:-1]])


# Above this band the alternating explicit sum loses more than ~1e-12 to
# cancellation, so matrices are assembled from Euler angles instead.
STABLE_SUM_TWO_L = 32


@lru_cache(maxsize=None)
def _omega2_eigen(two_l: int):
    """Eigen-pair of i*G where t^l(omega2(theta)) = exp(theta G); G is real tridiagonal."""
    l = two_l / 2
    n = np.arange(two_l) - l
    c = np.sqrt((l - n) * (l + n + 1)) / 2
    G = np.diag(c, -1) - np.diag(c, 1)
    lam, V = np.linalg.eigh(1j * G)
    return np.round(2 * lam) / 2, V


def wigner_euler(quats: np.ndarray, two_l: int) -> np.ndarray:
    """t^l(g) = D(phi) d(theta) D(psi) with D(t) = diag(exp(-i n t)); stable for any band."""
    quats = np.asarray(quats, dtype=np.float64).reshape(-1, 4)
    a = quats[:, 0] + 1j * quats[:, 3]
    b = quats[:, 1] + 1j * quats[:, 2]
    theta = 2 * np.arctan2(np.abs(b), np.abs(a))
    half_sum, half_diff = np.angle(a), np.angle(-b)
    phi, psi = half_sum + half_diff, half_sum - half_diff
    lam, V = _omega2_eigen(two_l)
    small = np.einsum("ij,kj,mj->kim", V, np.exp(-1j * np.outer(theta, lam)), V.conj()).real
    n = np.arange(two_l + 1) - two_l / 2
    return np.exp(-1j * np.outer(phi, n))[:, :, None] * small * np.exp(-1j * np.outer(psi, n))[:, None, :]

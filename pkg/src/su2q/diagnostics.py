"""Symbol-class diagnostics and the matrix-decay norm toolkit.

All reports here are necessity checks on finite truncations: a failed
inequality falsifies class membership, a passed one proves nothing about
the asymptotic class.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .group import GroupElement, from_quaternion, multi_indices, weyl_elements
from .symbols import Symbol, difference_power, pushforward, x_derivative

DISCLAIMER = ("finite-truncation necessity check: failures falsify the inequalities, "
              "passes do not establish class membership")
# growth allowed between the lower half of the levels and the full band; 1.5 flags
# excess growth of exponent >= 0.6 once two_L >= 6, below that the test has too few levels
DEFAULT_MARGIN = 1.5


def bracket(k):
    """<k> = sqrt(1 + k^2)."""
    return np.sqrt(1.0 + np.asarray(k, dtype=float) ** 2)


def shoemake(u: np.ndarray) -> np.ndarray:
    """Map points of the unit cube [0,1)^3 to unit quaternions (uniform for uniform input)."""
    u1, u2, u3 = u[:, 0], u[:, 1], u[:, 2]
    a, b = np.sqrt(1 - u1), np.sqrt(u1)
    return np.stack([a * np.sin(2 * np.pi * u2), a * np.cos(2 * np.pi * u2),
                     b * np.sin(2 * np.pi * u3), b * np.cos(2 * np.pi * u3)], axis=1)


@lru_cache(maxsize=None)
def default_u_samples(n_sobol: int = 20) -> tuple:
    """Deterministic translation sample: Sobol points on the sphere plus the Weyl elements."""
    m = max(1, int(np.ceil(np.log2(max(n_sobol, 1)))))
    pts = qmc.Sobol(d=3, scramble=False).random_base2(m)[:n_sobol]
    quats = [from_quaternion(*q) for q in shoemake(pts)]
    return tuple(quats) + tuple(weyl_elements())


@dataclass
class DecayReport:
    checks: List[dict] = field(default_factory=list)
    kind: str = "entrywise"

    @property
    def all_pass(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def find(self, alpha, beta, N=None) -> dict:
        for c in self.checks:
            if tuple(c["alpha"]) == tuple(alpha) and tuple(c["beta"]) == tuple(beta) and c["N"] == N:
                return c
        raise KeyError((alpha, beta, N))

    def to_json(self) -> dict:
        return {"checks": self.checks,
                "summary": {"all_pass": self.all_pass, "kind": self.kind, "n_checks": len(self.checks),
                            "note": DISCLAIMER}}


# values below this fraction of the symbol's largest entry count as rounding noise
NOISE_FLOOR = 1e-10


def _judge(C: float, C_low: float, tol: Optional[float], margin: float, floor: float) -> bool:
    if tol is not None:
        return bool(C <= tol)
    return bool(C <= margin * C_low + floor)


def _scale(sigma: Symbol) -> float:
    return max(1.0, max(float(np.max(np.abs(blk))) for blk in sigma.data.values()))


def _derived_family(sigma_u: Symbol, alpha_max: int, beta_max: int):
    """Yield (alpha, beta, D) with D = Delta^alpha d_x^beta sigma_u, reusing lower-order differences."""
    for beta in multi_indices(beta_max):
        if any(beta) and sigma_u.x_invariant:
            for alpha in multi_indices(min(alpha_max, sigma_u.two_L)):
                yield alpha, beta, None
            continue
        base = x_derivative(beta, sigma_u)
        cache = {(0, 0, 0): base}
        for alpha in multi_indices(min(alpha_max, sigma_u.two_L)):
            if alpha not in cache:
                k = next(i for i in range(3) if alpha[i])
                parent = tuple(a - (i == k) for i, a in enumerate(alpha))
                cache[alpha] = difference_power(tuple(int(i == k) for i in range(3)), cache[parent])
            yield alpha, beta, cache[alpha]


def _zero_check(alpha, beta, N):
    return {"alpha": list(alpha), "beta": list(beta), "N": N, "C": 0.0, "C_low": 0.0,
            "witness": None, "pass": True}


def class_report(sigma: Symbol, m: float, alpha_max: int = 2, beta_max: int = 1, N_max: int = 2,
                 u_samples: Optional[Sequence[GroupElement]] = None, tol: Optional[float] = None,
                 margin: float = DEFAULT_MARGIN) -> DecayReport:
    """Entrywise inequalities |D^a d^b sigma_u(x,l)_ij| <= C <i-j>^-N (1+l)^(m-|a|).

    ``C`` is the exact maximum of the normalised ratio over the sampled
    translations, nodes, levels and entries.  Without ``tol`` a check passes
    when C stays within ``margin`` times its value over the lower half of the
    levels (the ratio does not grow with l), up to a rounding floor.
    """
    u_samples = default_u_samples() if u_samples is None else tuple(u_samples)
    floor = NOISE_FLOOR * _scale(sigma)
    acc = {}
    for ui, u in enumerate(u_samples):
        for alpha, beta, D in _derived_family(pushforward(sigma, u), alpha_max, beta_max):
            for N in range(N_max + 1):
                acc.setdefault((alpha, beta, N), [-1.0, None, 0.0])
            if D is None:
                continue
            for tl in range(D.two_L + 1):
                d = tl + 1
                blk = np.abs(D.data[tl]) / (1.0 + tl / 2) ** (m - sum(alpha))
                off = bracket(np.subtract.outer(np.arange(d), np.arange(d)))
                for N in range(N_max + 1):
                    ratio = blk * off[None] ** N
                    k = int(np.argmax(ratio))
                    val = float(ratio.flat[k])
                    slot = acc[(alpha, beta, N)]
                    if val > slot[0]:
                        node, i, j = np.unravel_index(k, ratio.shape)
                        slot[0] = val
                        slot[1] = {"u": ui, "node": int(node), "two_l": tl, "i": int(i), "j": int(j)}
                    if 2 * tl <= D.two_L:
                        slot[2] = max(slot[2], val)
    report = DecayReport(kind="entrywise")
    for (alpha, beta, N), (C, witness, low) in acc.items():
        if witness is None:
            report.checks.append(_zero_check(alpha, beta, N))
            continue
        report.checks.append({"alpha": list(alpha), "beta": list(beta), "N": N, "C": C, "C_low": low,
                              "witness": witness, "pass": _judge(C, low, tol, margin, floor)})
    return report


def sigma0_inequalities(sigma: Symbol, m: float, alpha_max: int = 2, beta_max: int = 1,
                        u_samples: Optional[Sequence[GroupElement]] = None, tol: Optional[float] = None,
                        margin: float = DEFAULT_MARGIN) -> DecayReport:
    """Operator-norm inequalities ||D^a d^b sigma_u(x,l)||_op <= C <l>^(m-|a|), <l> = sqrt(1+l(l+1))."""
    u_samples = default_u_samples() if u_samples is None else tuple(u_samples)
    floor = NOISE_FLOOR * _scale(sigma)
    acc = {}
    for ui, u in enumerate(u_samples):
        for alpha, beta, D in _derived_family(pushforward(sigma, u), alpha_max, beta_max):
            slot = acc.setdefault((alpha, beta), [-1.0, None, 0.0])
            if D is None:
                continue
            for tl in range(D.two_L + 1):
                l = tl / 2
                norms = np.linalg.norm(D.data[tl], ord=2, axis=(-2, -1))
                norms = norms / (1.0 + l * (l + 1)) ** ((m - sum(alpha)) / 2)
                k = int(np.argmax(norms))
                if norms[k] > slot[0]:
                    slot[0] = float(norms[k])
                    slot[1] = {"u": ui, "node": k, "two_l": tl, "i": None, "j": None}
                if 2 * tl <= D.two_L:
                    slot[2] = max(slot[2], float(norms[k]))
    report = DecayReport(kind="operator-norm")
    for (alpha, beta), (C, witness, low) in acc.items():
        if witness is None:
            report.checks.append(_zero_check(alpha, beta, None))
            continue
        report.checks.append({"alpha": list(alpha), "beta": list(beta), "N": None, "C": C, "C_low": low,
                              "witness": witness, "pass": _judge(C, low, tol, margin, floor)})
    return report


# ---------------------------------------------------------------------------
# matrix toolkit

def opnorm_vs_linf(M) -> tuple:
    """(||M||_op, max |M_ij|); the first is never smaller than the second."""
    M = np.asarray(M)
    return float(np.linalg.norm(M, 2)), float(np.max(np.abs(M))) if M.size else 0.0


def bracket_zeta(r: float, K: int = 4096) -> float:
    """Upper bound for sum over integers k of <k>^-r (r > 1): partial sum plus integral tail."""
    if r <= 1:
        raise ValueError("the series diverges for r <= 1")
    k = np.arange(-K, K + 1)
    return float(np.sum(bracket(k) ** (-r)) + 2.0 * K ** (1.0 - r) / (r - 1.0))


def decay_constant(M, r: float) -> float:
    """Smallest c with |M_ij| <= c <i-j>^-r on the given matrix."""
    M = np.asarray(M)
    i, j = np.indices(M.shape)
    return float(np.max(np.abs(M) * bracket(i - j) ** r)) if M.size else 0.0


def decay_norm_bound(M, c: float, r: float) -> dict:
    """Check ||M||_op <= c * sum_k <k>^-r for a decay certificate (c, r)."""
    op, linf = opnorm_vs_linf(M)
    certified = decay_constant(M, r) <= c * (1 + 1e-12)
    bound = c * bracket_zeta(r)
    return {"op": op, "linf": linf, "bound": bound, "certificate_valid": certified,
            "holds": bool(certified and op <= bound * (1 + 1e-12))}


@dataclass
class ProductCertificate:
    c: Optional[float]
    r: Optional[float]
    empirical_c: float
    holds: Optional[bool]


def banded_product_decay(A, B, cert_a: tuple, cert_b: tuple) -> ProductCertificate:
    """Decay certificate for AB from (c_A, r) and (c_B, s) with r, s > 1.

    Splitting the sum over j according to which of |i-j|, |j-k| is at least
    |i-k|/2 gives c = c_A c_B (2^r Z(s) + 2^s Z(r)) at exponent min(r, s),
    where Z(r) = sum_k <k>^-r.
    """
    A, B = np.asarray(A), np.asarray(B)
    (ca, r), (cb, s) = cert_a, cert_b
    P = A @ B
    if r <= 1 or s <= 1:
        return ProductCertificate(None, None, decay_constant(P, min(r, s)), None)
    for M, c, e in ((A, ca, r), (B, cb, s)):
        if decay_constant(M, e) > c * (1 + 1e-12):
            raise ValueError(f"supplied certificate ({c}, {e}) does not hold for a factor")
    exp = min(r, s)
    c = ca * cb * (2.0 ** r * bracket_zeta(s) + 2.0 ** s * bracket_zeta(r))
    emp = decay_constant(P, exp)
    return ProductCertificate(c, exp, emp, bool(emp <= c))

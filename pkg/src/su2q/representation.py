"""Irreducible unitary representations t^l of SU(2).

Matrices use row index ``i = m + l`` and column ``j = n + l``; every routine
takes the doubled index ``two_l`` so half-integers stay exact.
"""
from __future__ import annotations

import math

import numpy as np

from ._backend import BACKEND, wigner_batch as _kernel
from .group import GroupElement

__all__ = ["BACKEND", "wigner", "wigner_batch", "character", "multiplication_rhs", "labels"]


def labels(two_l: int) -> np.ndarray:
    """Doubled labels 2m for the rows (equivalently 2n for the columns)."""
    return 2 * np.arange(two_l + 1) - two_l


def wigner_batch(quats, two_l: int) -> np.ndarray:
    """t^l at each quaternion row of ``quats``; shape (N, 2l+1, 2l+1)."""
    return _kernel(np.asarray(quats, dtype=float).reshape(-1, 4), int(two_l))


def wigner(g: GroupElement, two_l: int) -> np.ndarray:
    return wigner_batch(g.quat, two_l)[0]


def character(g: GroupElement, two_l: int) -> complex:
    return complex(np.trace(wigner(g, two_l)))


_PAIRS = {"--": (0, 0), "-+": (0, 1), "+-": (1, 0), "++": (1, 1)}


def multiplication_rhs(quats, two_l: int, pair: str) -> np.ndarray:
    """Right-hand side of the product rule for t^l_{mn} * t^{1/2}_{pair}.

    ``pair`` is one of ``'--', '-+', '+-', '++'`` naming the entry of
    t^{1/2}.  Returns an array (N, 2l+1, 2l+1) whose (m, n) entry is the
    two-term combination of t^{l+1/2} and t^{l-1/2} entries.
    """
    if pair not in _PAIRS:
        raise ValueError(f"unknown pair {pair!r}")
    sm = -1 if pair[0] == "-" else 1
    sn = -1 if pair[1] == "-" else 1
    up = wigner_batch(quats, two_l + 1)
    down = wigner_batch(quats, two_l - 1) if two_l > 0 else None
    dim = two_l + 1
    out = np.zeros((up.shape[0], dim, dim), dtype=complex)
    l = two_l / 2
    for i in range(dim):
        m = i - l
        for j in range(dim):
            n = j - l
            # shifting m by sm/2 moves index i to i + (1 + sm)/2 in rep l+1/2,
            # and to i - (1 - sm)/2 in rep l-1/2
            iu, ju = i + (1 + sm) // 2, j + (1 + sn) // 2
            cu = math.sqrt((l + sm * m + 1) * (l + sn * n + 1))
            acc = cu * up[:, iu, ju]
            idn, jdn = i - (1 - sm) // 2, j - (1 - sn) // 2
            cd2 = (l - sm * m) * (l - sn * n)
            if down is not None and 0 <= idn < two_l and 0 <= jdn < two_l and cd2 > 0:
                acc = acc + sm * sn * math.sqrt(cd2) * down[:, idn, jdn]
            out[:, i, j] = acc / (2 * l + 1)
    return out

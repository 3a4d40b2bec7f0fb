"""Left-invariant differential operators as exact Fourier multipliers.

A left-invariant operator acts on coefficients by ``fhat(l) -> sigma(l) @ fhat(l)``.
The creation/annihilation/neutral multipliers are primary; the D_j fields
are derived from them in ``_FIELD_TABLE`` and nowhere else.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .fourier import BandLimitedFunction
from .group import GroupElement, LIE_BASIS, quat_inv, quat_mul
from .representation import wigner

FIELD_NAMES = ("D1", "D2", "D3", "partial_plus", "partial_minus", "partial_zero", "laplacian")


def _partial_plus(two_l: int) -> np.ndarray:
    l = two_l / 2
    out = np.zeros((two_l + 1, two_l + 1), dtype=complex)
    for j in range(two_l):
        n = j - l
        out[j + 1, j] = -np.sqrt((l - n) * (l + n + 1))
    return out


def _partial_minus(two_l: int) -> np.ndarray:
    l = two_l / 2
    out = np.zeros((two_l + 1, two_l + 1), dtype=complex)
    for j in range(1, two_l + 1):
        n = j - l
        out[j - 1, j] = -np.sqrt((l + n) * (l - n + 1))
    return out


def _partial_zero(two_l: int) -> np.ndarray:
    return np.diag(np.arange(two_l + 1) - two_l / 2).astype(complex)


def _laplacian(two_l: int) -> np.ndarray:
    l = two_l / 2
    return -l * (l + 1) * np.eye(two_l + 1, dtype=complex)


# D1 = -i(d- + d+)/2, D2 = (d- - d+)/2, D3 = -i d0, as (c_plus, c_minus, c_zero)
_FIELD_TABLE = {
    "D1": (-0.5j, -0.5j, 0.0),
    "D2": (-0.5, 0.5, 0.0),
    "D3": (0.0, 0.0, -1j),
    "partial_plus": (1.0, 0.0, 0.0),
    "partial_minus": (0.0, 1.0, 0.0),
    "partial_zero": (0.0, 0.0, 1.0),
}


@lru_cache(maxsize=None)
def _multiplier_cached(name: str, two_l: int) -> np.ndarray:
    if name == "laplacian":
        out = _laplacian(two_l)
    elif name in _FIELD_TABLE:
        cp, cm, c0 = _FIELD_TABLE[name]
        out = cp * _partial_plus(two_l) + cm * _partial_minus(two_l) + c0 * _partial_zero(two_l)
    else:
        raise ValueError(f"unknown field {name!r}; expected one of {FIELD_NAMES}")
    out.setflags(write=False)
    return out


def multiplier(name: str, two_l: int) -> np.ndarray:
    """sigma(l) for the named invariant operator, as a fresh array."""
    return _multiplier_cached(name, int(two_l)).copy()


def apply_multiplier(mult, fh: BandLimitedFunction) -> BandLimitedFunction:
    """``mult(two_l) @ fhat(l)`` for every level; batched stacks are fine."""
    return BandLimitedFunction(fh.two_L, {tl: mult(tl) @ fh.coeffs[tl] for tl in range(fh.two_L + 1)},
                               exact=fh.exact)


def apply_field(name: str, fh: BandLimitedFunction) -> BandLimitedFunction:
    return apply_multiplier(lambda tl: _multiplier_cached(name, tl), fh)


_ORDERED = ("partial_zero", "partial_plus", "partial_minus")


def ordered_multiplier(beta, two_l: int) -> np.ndarray:
    """Multiplier of d0^b1 d+^b2 d-^b3 (d- acts first)."""
    out = np.eye(two_l + 1, dtype=complex)
    for name, power in zip(_ORDERED, beta):
        out = out @ np.linalg.matrix_power(_multiplier_cached(name, two_l), int(power))
    return out


def apply_ordered(beta, fh: BandLimitedFunction) -> BandLimitedFunction:
    if not any(beta):
        return fh
    return apply_multiplier(lambda tl: ordered_multiplier(beta, tl), fh)


def lie_coordinates(y_quat) -> np.ndarray:
    """Coordinates (y1, y2, y3) of a pure quaternion in the basis Y1, Y2, Y3."""
    basis = np.stack([LIE_BASIS["Y1"], LIE_BASIS["Y2"], LIE_BASIS["Y3"]], axis=1)
    coords, *_ = np.linalg.lstsq(basis, np.asarray(y_quat, dtype=float), rcond=None)
    return coords


def lie_multiplier(y_quat, two_l: int) -> np.ndarray:
    """sigma of D_Y for a Lie algebra element given as a pure quaternion."""
    y1, y2, y3 = lie_coordinates(y_quat)
    return (y1 * _multiplier_cached("D1", two_l) + y2 * _multiplier_cached("D2", two_l)
            + y3 * _multiplier_cached("D3", two_l))


def rotated_multiplier(u: GroupElement, two_l: int) -> np.ndarray:
    """t^l(u)^* sigma_{d0}(l) t^l(u): the multiplier of i D_Z with Z = u^-1 Y3 u."""
    t = wigner(u, two_l)
    return t.conj().T @ _multiplier_cached("partial_zero", two_l) @ t


def conjugated_direction(u: GroupElement) -> np.ndarray:
    """u^-1 Y3 u as a pure quaternion."""
    return quat_mul(quat_mul(quat_inv(u.quat), LIE_BASIS["Y3"]), u.quat)

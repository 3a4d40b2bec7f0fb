"""Noncommutative Fourier transform on SU(2).

Coefficients follow ``fhat(l)_{mn} = integral of f(x) * conj(t^l_{nm}(x))`` and
the inversion ``f(x) = sum_l (2l+1) Tr(t^l(x) fhat(l))``.  A coefficient stack
may carry leading batch axes ``(*batch, 2l+1, 2l+1)`` so that many functions
are transformed in one pass.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .group import GroupElement, QuadratureGrid, quadrature_grid
from .representation import wigner_batch


@dataclass
class BandLimitedFunction:
    two_L: int
    coeffs: Dict[int, np.ndarray]
    # False when produced from a grid too coarse for exact analysis
    exact: bool = True
    batch_shape: tuple = field(default=())

    def __post_init__(self):
        for tl in range(self.two_L + 1):
            if tl not in self.coeffs:
                raise ValueError(f"missing coefficient block for two_l={tl}")
            blk = np.asarray(self.coeffs[tl], dtype=complex)
            if blk.shape[-2:] != (tl + 1, tl + 1):
                raise ValueError(f"block two_l={tl} has shape {blk.shape}")
            self.coeffs[tl] = blk
        self.batch_shape = tuple(self.coeffs[0].shape[:-2])

    # -- construction -------------------------------------------------------
    @classmethod
    def zeros(cls, two_L: int, batch_shape=()) -> "BandLimitedFunction":
        return cls(two_L, {tl: np.zeros(tuple(batch_shape) + (tl + 1, tl + 1), complex)
                           for tl in range(two_L + 1)})

    @classmethod
    def basis(cls, two_l: int, i: int, j: int, two_L: Optional[int] = None) -> "BandLimitedFunction":
        """Coefficients of the matrix element t^l at row ``i``, column ``j``."""
        f = cls.zeros(two_l if two_L is None else two_L)
        f.coeffs[two_l][j, i] = 1.0 / (two_l + 1)
        return f

    @classmethod
    def random(cls, two_L: int, rng, batch_shape=()) -> "BandLimitedFunction":
        blocks = {}
        for tl in range(two_L + 1):
            shape = tuple(batch_shape) + (tl + 1, tl + 1)
            blocks[tl] = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / (tl + 1)
        return cls(two_L, blocks)

    # -- algebra ------------------------------------------------------------
    def _binary(self, other, op):
        L = max(self.two_L, other.two_L)
        a, b = self.padded(L), other.padded(L)
        return BandLimitedFunction(L, {tl: op(a.coeffs[tl], b.coeffs[tl]) for tl in range(L + 1)},
                                   exact=self.exact and other.exact)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def scale(self, c) -> "BandLimitedFunction":
        return BandLimitedFunction(self.two_L, {tl: c * blk for tl, blk in self.coeffs.items()},
                                   exact=self.exact)

    def padded(self, two_L: int) -> "BandLimitedFunction":
        """Same function with band limit raised to ``two_L`` (zero blocks added)."""
        if two_L < self.two_L:
            raise ValueError("padding cannot lower the band limit; use truncated()")
        blocks = dict(self.coeffs)
        for tl in range(self.two_L + 1, two_L + 1):
            blocks[tl] = np.zeros(self.batch_shape + (tl + 1, tl + 1), complex)
        return BandLimitedFunction(two_L, blocks, exact=self.exact)

    def truncated(self, two_L: int) -> "BandLimitedFunction":
        return BandLimitedFunction(two_L, {tl: self.coeffs[tl] for tl in range(two_L + 1)},
                                   exact=self.exact)

    def max_abs_diff(self, other) -> float:
        L = max(self.two_L, other.two_L)
        a, b = self.padded(L), other.padded(L)
        return max(float(np.max(np.abs(a.coeffs[tl] - b.coeffs[tl]), initial=0.0))
                   for tl in range(L + 1))

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x) -> np.ndarray:
        if isinstance(x, GroupElement):
            return synthesize(self, x.quat[None, :])[0]
        return synthesize(self, x)

    # -- serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        from .jsonio import encode_complex
        if self.batch_shape:
            raise ValueError("only unbatched functions serialise")
        return {"two_L": self.two_L,
                "coeffs": {str(tl): encode_complex(self.coeffs[tl]) for tl in range(self.two_L + 1)}}

    @classmethod
    def from_json(cls, obj: dict) -> "BandLimitedFunction":
        from .jsonio import decode_complex
        two_L = int(obj["two_L"])
        return cls(two_L, {tl: decode_complex(obj["coeffs"][str(tl)]) for tl in range(two_L + 1)})


def _tables(where, two_l: int) -> np.ndarray:
    if isinstance(where, QuadratureGrid):
        return where.wigner(two_l)
    return wigner_batch(where, two_l)


def forward(samples, grid: QuadratureGrid, two_L: int) -> BandLimitedFunction:
    """Coefficients up to ``two_L`` from node samples of shape (N, *batch).

    The result is exact when ``grid.exactness_two_l >= 2 * two_L`` and the
    samples come from a function of band ``two_L``; otherwise it is a
    projection estimate and ``exact`` is False.
    """
    samples = np.asarray(samples)
    if samples.shape[:1] != (len(grid),):
        raise ValueError(f"expected {len(grid)} node samples, got leading shape {samples.shape[:1]}")
    batch = samples.shape[1:]
    flat = samples.reshape(len(grid), -1) * grid.weights[:, None]
    blocks = {}
    for tl in range(two_L + 1):
        T = _tables(grid, tl)
        blk = np.einsum("kb,knm->bmn", flat, T.conj(), optimize=True)
        blocks[tl] = blk.reshape(batch + (tl + 1, tl + 1))
    return BandLimitedFunction(two_L, blocks, exact=grid.exactness_two_l >= 2 * two_L)


def synthesize(fh: BandLimitedFunction, where) -> np.ndarray:
    """Values at grid nodes or at quaternion rows; shape (N, *batch)."""
    if not isinstance(where, QuadratureGrid):
        where = np.asarray(where, dtype=float).reshape(-1, 4)
    n_nodes = len(where) if isinstance(where, QuadratureGrid) else where.shape[0]
    batch = fh.batch_shape
    out = np.zeros((n_nodes, int(np.prod(batch, dtype=int))), dtype=complex)
    for tl in range(fh.two_L + 1):
        blk = fh.coeffs[tl].reshape(-1, tl + 1, tl + 1)
        if not np.any(blk):
            continue
        T = _tables(where, tl)
        out += (tl + 1) * np.einsum("kij,bji->kb", T, blk, optimize=True)
    return out.reshape((n_nodes,) + batch)


def inverse(fh: BandLimitedFunction, x: GroupElement):
    """Peter-Weyl series evaluated at a single group element."""
    val = synthesize(fh, x.quat[None, :])[0]
    return complex(val) if val.ndim == 0 else val


def evaluate_at_identity(fh: BandLimitedFunction):
    val = sum((tl + 1) * np.trace(fh.coeffs[tl], axis1=-2, axis2=-1) for tl in range(fh.two_L + 1))
    return complex(val) if np.ndim(val) == 0 else val


def convolve(f: BandLimitedFunction, g: BandLimitedFunction) -> BandLimitedFunction:
    """Coefficients of ``x -> integral f(x y^-1) g(y) dy``: ghat(l) @ fhat(l)."""
    if f.two_L != g.two_L:
        raise ValueError("convolution needs a common band limit")
    return BandLimitedFunction(f.two_L, {tl: g.coeffs[tl] @ f.coeffs[tl] for tl in range(f.two_L + 1)},
                               exact=f.exact and g.exact)


def plancherel_norm(fh: BandLimitedFunction):
    total = sum((tl + 1) * np.sum(np.abs(fh.coeffs[tl]) ** 2, axis=(-2, -1)) for tl in range(fh.two_L + 1))
    return np.sqrt(total) if np.ndim(total) else float(np.sqrt(total))


def l2_norm_quadrature(samples, grid: QuadratureGrid) -> float:
    return float(np.sqrt(np.real(np.dot(grid.weights, np.abs(np.asarray(samples)) ** 2))))


def analysis_grid(two_L: int) -> QuadratureGrid:
    """Smallest stock grid on which band-``two_L`` analysis is exact."""
    return quadrature_grid(2 * two_L)


def multiply(f: BandLimitedFunction, g: BandLimitedFunction) -> BandLimitedFunction:
    """Pointwise product; the band limits add."""
    L = f.two_L + g.two_L
    grid = analysis_grid(L)
    fs, gs = synthesize(f, grid), synthesize(g, grid)
    if f.batch_shape and g.batch_shape:
        prod = fs * gs
    else:
        extra = (None,) * max(len(f.batch_shape), len(g.batch_shape))
        prod = (fs if f.batch_shape else fs[(slice(None),) + extra]) * \
               (gs if g.batch_shape else gs[(slice(None),) + extra])
    return forward(prod, grid, L)


def from_samples_function(fn, two_L: int) -> BandLimitedFunction:
    """Analyse a callable ``fn(quats) -> values`` known to have band ``two_L``."""
    grid = analysis_grid(two_L)
    return forward(fn(grid.quats), grid, two_L)

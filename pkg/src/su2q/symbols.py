"""Full symbols sigma(x, l) sampled on a quadrature grid, and the difference calculus.

``Symbol.data[two_l]`` has shape ``(N, 2l+1, 2l+1)`` with one matrix per grid
node, or ``(1, 2l+1, 2l+1)`` when the symbol does not depend on x.  Matrix
rows carry the label n and columns the label m (``n = i - l``, ``m = j - l``),
the layout in which the difference stencils are written.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from . import diffops
from .fourier import BandLimitedFunction, forward, synthesize
from .group import GroupElement, QuadratureGrid, quadrature_grid, quat_inv, quat_mul
from .representation import wigner

DIRECTIONS = ("plus", "minus", "zero", "bar_zero")
BUILTINS = ("identity", "partial_plus", "partial_minus", "partial_zero", "laplacian", "D1", "D2", "D3")


@dataclass(eq=False)
class Symbol:
    two_L: int
    x_two_L: int
    grid: QuadratureGrid
    data: Dict[int, np.ndarray]
    x_invariant: bool = False

    def __post_init__(self):
        n_nodes = 1 if self.x_invariant else len(self.grid)
        for tl in range(self.two_L + 1):
            blk = np.asarray(self.data[tl], dtype=complex)
            if blk.shape != (n_nodes, tl + 1, tl + 1):
                raise ValueError(f"symbol block two_l={tl} has shape {blk.shape}, "
                                 f"expected {(n_nodes, tl + 1, tl + 1)}")
            self.data[tl] = blk
        if self.x_invariant:
            self.x_two_L = 0

    # -- constructors -------------------------------------------------------
    @classmethod
    def invariant(cls, blocks: Callable[[int], np.ndarray], two_L: int) -> "Symbol":
        return cls(two_L, 0, quadrature_grid(0),
                   {tl: np.asarray(blocks(tl), dtype=complex)[None] for tl in range(two_L + 1)},
                   x_invariant=True)

    @classmethod
    def zeros_like(cls, other: "Symbol", two_L: Optional[int] = None) -> "Symbol":
        L = other.two_L if two_L is None else two_L
        return cls.invariant(lambda tl: np.zeros((tl + 1, tl + 1)), L)

    @classmethod
    def random(cls, two_L: int, x_two_L: int, rng, grid: Optional[QuadratureGrid] = None) -> "Symbol":
        """Random symbol whose entries are trigonometric polynomials of band ``x_two_L``."""
        if x_two_L == 0:
            return cls.invariant(lambda tl: rng.normal(size=(tl + 1, tl + 1))
                                 + 1j * rng.normal(size=(tl + 1, tl + 1)), two_L)
        grid = quadrature_grid(2 * x_two_L) if grid is None else grid
        data = {}
        for tl in range(two_L + 1):
            f = BandLimitedFunction.random(x_two_L, rng, batch_shape=(tl + 1, tl + 1))
            data[tl] = synthesize(f, grid)
        return cls(two_L, x_two_L, grid, data)

    # -- access -------------------------------------------------------------
    @property
    def n_nodes(self) -> int:
        return len(self.grid)

    def full(self, two_l: int) -> np.ndarray:
        blk = self.data[two_l]
        if self.x_invariant:
            return np.broadcast_to(blk, (self.n_nodes,) + blk.shape[1:])
        return blk

    def _check_analysable(self):
        if self.grid.exactness_two_l < 2 * self.x_two_L:
            raise ValueError(f"x-band {self.x_two_L} needs grid exactness >= {2 * self.x_two_L}, "
                             f"grid has {self.grid.exactness_two_l}")

    def x_coefficients(self, two_l: int) -> BandLimitedFunction:
        """Fourier coefficients of every matrix entry in x (batch shape (d, d))."""
        if self.x_invariant:
            blk = self.data[two_l][0]
            return BandLimitedFunction(0, {0: blk[..., None, None]})
        self._check_analysable()
        return forward(self.data[two_l], self.grid, self.x_two_L)

    def sample_at(self, quats) -> Dict[int, np.ndarray]:
        """Matrices at arbitrary quaternions, by re-synthesis of the x-dependence."""
        quats = np.asarray(quats, dtype=float).reshape(-1, 4)
        out = {}
        for tl in range(self.two_L + 1):
            if self.x_invariant:
                out[tl] = np.broadcast_to(self.data[tl], (quats.shape[0], tl + 1, tl + 1)).copy()
            else:
                out[tl] = synthesize(self.x_coefficients(tl), quats)
        return out

    def resample(self, grid: QuadratureGrid) -> "Symbol":
        if self.x_invariant or grid is self.grid:
            return self if grid is self.grid else Symbol(self.two_L, 0, grid, dict(self.data), True)
        return Symbol(self.two_L, self.x_two_L, grid, self.sample_at(grid.quats))

    def truncated(self, two_L: int) -> "Symbol":
        if two_L > self.two_L:
            raise ValueError(f"cannot raise band from {self.two_L} to {two_L}")
        return Symbol(two_L, self.x_two_L, self.grid, {tl: self.data[tl] for tl in range(two_L + 1)},
                      self.x_invariant)

    def node_spread(self) -> float:
        if self.x_invariant:
            return 0.0
        return max(float(np.max(np.abs(self.data[tl] - self.data[tl][:1]))) for tl in range(self.two_L + 1))

    def compressed(self, tol: float = 1e-10) -> "Symbol":
        """The x-invariant form when every node carries the same matrices."""
        if self.x_invariant or self.node_spread() > tol:
            return self
        mean = {tl: self.data[tl].mean(axis=0, keepdims=True) for tl in range(self.two_L + 1)}
        return Symbol(self.two_L, 0, self.grid, mean, True)

    # -- algebra ------------------------------------------------------------
    def _aligned(self, other: "Symbol", x_band: int):
        dependent = [s for s in (self, other) if not s.x_invariant]
        if not dependent:
            return self, other, self.grid, True
        grids = {id(s.grid): s.grid for s in dependent}
        if len(grids) == 1 and next(iter(grids.values())).exactness_two_l >= 2 * x_band:
            grid = next(iter(grids.values()))
        else:
            best = max(grids.values(), key=lambda g: g.exactness_two_l)
            grid = best if best.exactness_two_l >= 2 * x_band else quadrature_grid(2 * x_band)
        return self.resample(grid), other.resample(grid), grid, False

    def _combine(self, other: "Symbol", op, x_band: int) -> "Symbol":
        L = min(self.two_L, other.two_L)
        a, b, grid, inv = self._aligned(other, x_band)
        data = {tl: op(a.data[tl], b.data[tl]) for tl in range(L + 1)}
        if not inv:
            data = {tl: np.broadcast_to(blk, (len(grid),) + blk.shape[1:]).copy() for tl, blk in data.items()}
        return Symbol(L, x_band, grid, data, inv)

    def __add__(self, other: "Symbol") -> "Symbol":
        return self._combine(other, np.add, max(self.x_two_L, other.x_two_L))

    def __sub__(self, other: "Symbol") -> "Symbol":
        return self._combine(other, np.subtract, max(self.x_two_L, other.x_two_L))

    def __matmul__(self, other: "Symbol") -> "Symbol":
        """Pointwise matrix product sigma_A(x,l) sigma_B(x,l)."""
        return self._combine(other, np.matmul, self.x_two_L + other.x_two_L)

    def scale(self, c) -> "Symbol":
        return Symbol(self.two_L, self.x_two_L, self.grid,
                      {tl: c * blk for tl, blk in self.data.items()}, self.x_invariant)

    def map_blocks(self, fn: Callable[[int, np.ndarray], np.ndarray]) -> "Symbol":
        return Symbol(self.two_L, self.x_two_L, self.grid,
                      {tl: fn(tl, blk) for tl, blk in self.data.items()}, self.x_invariant)

    def conj_transpose(self) -> "Symbol":
        return self.map_blocks(lambda tl, blk: np.conj(np.swapaxes(blk, -1, -2)))

    def max_abs_diff(self, other: "Symbol", two_L: Optional[int] = None) -> float:
        L = min(self.two_L, other.two_L) if two_L is None else two_L
        diff = self.truncated(L) - other.truncated(L)
        return max(float(np.max(np.abs(diff.data[tl]))) for tl in range(L + 1))

    # -- serialisation ------------------------------------------------------
    def to_json(self, grid_ref=None) -> dict:
        from .jsonio import encode_complex
        if grid_ref is None:
            grid_ref = {"two_l_max": int(self.grid.exactness_two_l)}
        return {
            "two_L": self.two_L,
            "x_two_L": self.x_two_L,
            "grid_ref": grid_ref,
            "x_invariant": bool(self.x_invariant),
            "data": {str(tl): encode_complex(self.data[tl]) for tl in range(self.two_L + 1)},
        }

    @classmethod
    def from_json(cls, obj: dict, grid: QuadratureGrid) -> "Symbol":
        from .jsonio import decode_complex
        two_L = int(obj["two_L"])
        data = {tl: decode_complex(obj["data"][str(tl)]) for tl in range(two_L + 1)}
        return cls(two_L, int(obj["x_two_L"]), grid, data, bool(obj["x_invariant"]))


# ---------------------------------------------------------------------------
# builtins

def builtin(name: str, two_L: int) -> Symbol:
    """x-invariant symbol of a named left-invariant operator up to band ``two_L``."""
    if name == "identity":
        return Symbol.invariant(lambda tl: np.eye(tl + 1), two_L)
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin {name!r}; expected one of {BUILTINS}")
    return Symbol.invariant(lambda tl: diffops.multiplier(name, tl), two_L)


def multiplication_symbol(phi: BandLimitedFunction, two_L: int,
                          grid: Optional[QuadratureGrid] = None) -> Symbol:
    """sigma(x, l) = phi(x) I, the symbol of f -> phi f."""
    grid = quadrature_grid(2 * phi.two_L) if grid is None else grid
    vals = synthesize(phi, grid)
    data = {tl: vals[:, None, None] * np.eye(tl + 1)[None] for tl in range(two_L + 1)}
    return Symbol(two_L, phi.two_L, grid, data)


# ---------------------------------------------------------------------------
# difference stencils

def _shifted(blk: Optional[np.ndarray], d: int, s: int, t: int, lower: bool) -> np.ndarray:
    """Block entries at (i+s, j+t) for i, j in range(d), zero outside the block.

    ``lower`` selects the l-1/2 neighbour of size d-1 (shifts in {-1, 0});
    otherwise the l+1/2 neighbour of size d+1 (shifts in {0, 1}).
    """
    if blk is None:
        return 0.0
    if lower:
        pad = np.zeros(blk.shape[:-2] + (d + 1, d + 1), dtype=complex)
        pad[..., 1:d, 1:d] = blk
        return pad[..., 1 + s:1 + s + d, 1 + t:1 + t + d]
    return blk[..., s:s + d, t:t + d]


def _stencil(direction: str, lower, upper, two_l: int) -> np.ndarray:
    d = two_l + 1
    l = two_l / 2
    n = (np.arange(d) - l)[:, None]
    m = (np.arange(d) - l)[None, :]

    def sq(x):
        return np.sqrt(np.maximum(x, 0.0))

    if direction == "minus":
        out = (sq((l - m) * (l + n)) * _shifted(lower, d, -1, 0, True)
               - sq((l + m + 1) * (l - n + 1)) * _shifted(upper, d, 0, 1, False))
    elif direction == "plus":
        out = (sq((l + m) * (l - n)) * _shifted(lower, d, 0, -1, True)
               - sq((l - m + 1) * (l + n + 1)) * _shifted(upper, d, 1, 0, False))
    elif direction in ("zero", "bar_zero"):
        sign = -1.0 if direction == "zero" else 1.0
        out = (sq((l - m) * (l - n)) * _shifted(lower, d, 0, 0, True)
               + sq((l + m + 1) * (l + n + 1)) * _shifted(upper, d, 1, 1, False)
               + sign * sq((l + m) * (l + n)) * _shifted(lower, d, -1, -1, True)
               + sign * sq((l - m + 1) * (l - n + 1)) * _shifted(upper, d, 0, 0, False))
        if direction == "bar_zero":
            out = 0.5 * out
    else:
        raise ValueError(f"unknown direction {direction!r}; expected one of {DIRECTIONS}")
    # upper always exists inside the band, so ``out`` already has full shape
    return out / (2 * l + 1)


def difference(direction: str, sigma: Symbol) -> Symbol:
    """Apply one of the first-order difference operators in l, per fixed x.

    The top level of the result would need sigma at ``two_L + 1``, so the
    output band is ``sigma.two_L - 1``.
    """
    if direction == "bar0":
        direction = "bar_zero"
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}; expected one of {DIRECTIONS}")
    if sigma.two_L < 1:
        raise ValueError("difference needs a symbol with two_L >= 1")
    data = {}
    for tl in range(sigma.two_L):
        lower = sigma.data[tl - 1] if tl >= 1 else None
        upper = sigma.data[tl + 1]
        data[tl] = _stencil(direction, lower, upper, tl)
    return Symbol(sigma.two_L - 1, sigma.x_two_L, sigma.grid, data, sigma.x_invariant)


_DIRECTION_OF = {0: "plus", 1: "minus", 2: "zero"}


def difference_power(alpha, sigma: Symbol) -> Symbol:
    """Delta_+^a1 Delta_-^a2 Delta_0^a3 sigma (the factors commute)."""
    out = sigma
    for axis in (2, 1, 0):
        for _ in range(int(alpha[axis])):
            out = difference(_DIRECTION_OF[axis], out)
    return out


def kernel_coefficients(sigma: Symbol) -> BandLimitedFunction:
    """Right-convolution kernels s_x, one per node, as a batched coefficient stack.

    ``s(y) = sum_l (2l+1) Tr(a(l) t^l(y))``, so the coefficient blocks of the
    kernel are the symbol matrices themselves.
    """
    return BandLimitedFunction(sigma.two_L, {tl: sigma.data[tl] for tl in range(sigma.two_L + 1)})


def difference_by_function(q: BandLimitedFunction, sigma: Symbol,
                           grid: Optional[QuadratureGrid] = None) -> Symbol:
    """Delta_q sigma: multiply the convolution kernel by q and transform back."""
    if q.batch_shape:
        raise ValueError("q must be a single function")
    if abs(synthesize(q, np.array([[1.0, 0.0, 0.0, 0.0]]))[0]) > 1e-12:
        warnings.warn("q(e) != 0: the result is not a difference operator in the usual sense",
                      stacklevel=2)
    band = sigma.two_L + q.two_L
    need = 2 * band
    if grid is None:
        grid = quadrature_grid(need)
    if grid.exactness_two_l < need:
        raise ValueError(f"grid exactness {grid.exactness_two_l} is too small; "
                         f"need >= {need} for kernel band {band}")
    out_band = sigma.two_L - q.two_L
    if out_band < 0:
        raise ValueError(f"band exhausted: q band {q.two_L} exceeds symbol band {sigma.two_L}")
    s = synthesize(kernel_coefficients(sigma), grid)
    qs = synthesize(q, grid)
    prod = forward(qs[:, None] * s, grid, out_band)
    return Symbol(out_band, sigma.x_two_L, sigma.grid,
                  {tl: prod.coeffs[tl] for tl in range(out_band + 1)}, sigma.x_invariant)


# ---------------------------------------------------------------------------
# x-side operations

def map_x(sigma: Symbol, fn: Callable[[BandLimitedFunction], BandLimitedFunction]) -> Symbol:
    """Apply a coefficient-level operator to the x-dependence of every entry."""
    if sigma.x_invariant:
        outs = {tl: fn(sigma.x_coefficients(tl)) for tl in range(sigma.two_L + 1)}
        if any(o.two_L > 0 for o in outs.values()):
            raise ValueError("operator raised the x-band of an x-invariant symbol")
        data = {tl: o.coeffs[0][..., 0, 0][None] for tl, o in outs.items()}
        return Symbol(sigma.two_L, 0, sigma.grid, data, True)
    data = {}
    for tl in range(sigma.two_L + 1):
        data[tl] = synthesize(fn(sigma.x_coefficients(tl)), sigma.grid)
    return Symbol(sigma.two_L, sigma.x_two_L, sigma.grid, data)


def x_derivative(beta, sigma: Symbol) -> Symbol:
    """d0^b1 d+^b2 d-^b3 applied in x to every entry."""
    if not any(beta):
        return sigma
    if sigma.x_invariant:
        return Symbol.invariant(lambda tl: np.zeros((tl + 1, tl + 1)), sigma.two_L)
    return map_x(sigma, lambda f: diffops.apply_ordered(beta, f))


def pushforward(sigma: Symbol, u: GroupElement) -> Symbol:
    """t^l(u)^* sigma(x u^-1, l) t^l(u)."""
    if sigma.x_invariant:
        blocks = sigma.data
    else:
        blocks = sigma.sample_at(quat_mul(sigma.grid.quats, quat_inv(u.quat)))
    data = {}
    for tl in range(sigma.two_L + 1):
        t = wigner(u, tl)
        data[tl] = t.conj().T @ blocks[tl] @ t
    return Symbol(sigma.two_L, sigma.x_two_L, sigma.grid, data, sigma.x_invariant)


def leibniz_check_data(alpha, a: Symbol):
    """Both sides of the discrete Leibniz rule for Delta^alpha (a sigma_{d0}).

    Returns ``(lhs, rhs)`` over the band ``a.two_L - |alpha|``.
    """
    if not a.x_invariant:
        raise ValueError("the Leibniz identity is checked per fixed x on x-invariant symbols")
    a1, a2, a3 = (int(v) for v in alpha)
    # (a sigma_{d0})_{nm} = a_{nm} * m with m the column label
    a_d0 = a.map_blocks(lambda tl, blk: blk * (np.arange(tl + 1) - tl / 2)[None, None, :])
    lhs = difference_power(alpha, a_d0)
    base = difference_power(alpha, a)
    shift = -a1 / 2 + a2 / 2
    rhs = base.map_blocks(lambda tl, blk: blk * (np.arange(tl + 1) - tl / 2 + shift)[None, None, :])
    if a3 > 0:
        tail = difference("bar_zero", difference_power((a1, a2, a3 - 1), a))
        rhs = rhs + tail.scale(a3)
    return lhs, rhs


def alpha_factorial(alpha) -> int:
    return math.prod(math.factorial(int(v)) for v in alpha)

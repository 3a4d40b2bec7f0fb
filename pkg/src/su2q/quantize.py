"""Quantization Op(sigma), symbol extraction, composition/adjoint expansions, L2 estimates."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import diffops
from ._backend import thread_count
from .fourier import BandLimitedFunction, analysis_grid, forward, multiply, synthesize
from .group import QuadratureGrid, TaylorBasis, multi_indices, quadrature_grid
from .symbols import Symbol, alpha_factorial, difference_power, map_x, x_derivative

LINEARITY_TOL = 1e-10
# growth exponent above which per-level bounds count as unbounded
CERTIFIABLE_SLOPE = 0.25


@dataclass
class OperatorOracle:
    """A linear map on coefficient stacks.

    ``band_shift`` is how far the output band may exceed the input band and
    ``x_two_L`` is the x-band of the operator's symbol.  ``serial`` oracles are
    never called from several threads at once.
    """

    fn: Callable[[BandLimitedFunction], BandLimitedFunction]
    band_shift: int = 0
    x_two_L: int = 0
    serial: bool = False
    name: str = "operator"

    def __call__(self, f: BandLimitedFunction) -> BandLimitedFunction:
        return self.fn(f)

    @classmethod
    def identity(cls) -> "OperatorOracle":
        return cls(lambda f: f, name="identity")

    @classmethod
    def field(cls, name: str) -> "OperatorOracle":
        if name == "identity":
            return cls.identity()
        return cls(lambda f: diffops.apply_field(name, f), name=name)

    @classmethod
    def multiplication(cls, phi: BandLimitedFunction, name: str = "mul") -> "OperatorOracle":
        return cls(lambda f: multiply(phi, f), band_shift=phi.two_L, x_two_L=phi.two_L, name=name)

    @classmethod
    def from_symbol(cls, sigma: Symbol) -> "OperatorOracle":
        def fn(f):
            out_band = min(f.two_L, sigma.two_L) + sigma.x_two_L
            grid = analysis_grid(out_band)
            return forward(op_apply(sigma, f, grid.quats), grid, out_band)
        return cls(fn, band_shift=sigma.x_two_L, x_two_L=sigma.x_two_L, name="Op(sigma)")

    def then(self, outer: "OperatorOracle") -> "OperatorOracle":
        """``outer`` applied after ``self``."""
        return OperatorOracle(lambda f: outer(self(f)), self.band_shift + outer.band_shift,
                              self.x_two_L + outer.x_two_L, self.serial or outer.serial,
                              f"{outer.name}*{self.name}")

    def __matmul__(self, inner: "OperatorOracle") -> "OperatorOracle":
        return inner.then(self)


def op_apply(sigma: Symbol, fh: BandLimitedFunction, where=None) -> np.ndarray:
    """sum_l (2l+1) Tr(t^l(x) sigma(x,l) fhat(l)) at grid nodes or quaternion rows.

    Batched coefficient stacks give an output of shape (N, *batch).
    """
    if where is None:
        quats, blocks = sigma.grid.quats, {tl: sigma.full(tl) for tl in range(sigma.two_L + 1)}
        tables = sigma.grid.wigner
    else:
        quats = np.asarray(where, dtype=float).reshape(-1, 4)
        blocks = sigma.sample_at(quats)
        from .representation import wigner_batch
        tables = lambda tl: wigner_batch(quats, tl)  # noqa: E731
    out = np.zeros((quats.shape[0],) + fh.batch_shape, dtype=complex)
    for tl in range(min(sigma.two_L, fh.two_L) + 1):
        F = fh.coeffs[tl]
        if not np.any(F):
            continue
        TS = np.matmul(tables(tl), blocks[tl])
        out += (tl + 1) * np.einsum("xik,...ki->x...", TS, F, optimize=True)
    return out


def _basis_stack(two_l: int, two_L: Optional[int] = None) -> BandLimitedFunction:
    """All t^l_{kn} at once: batch index (k, n)."""
    d = two_l + 1
    L = two_l if two_L is None else two_L
    f = BandLimitedFunction.zeros(L, batch_shape=(d, d))
    blk = f.coeffs[two_l]
    for k in range(d):
        for n in range(d):
            blk[k, n, n, k] = 1.0 / d
    return f


def _linearity_error(A: OperatorOracle, rng) -> float:
    f = BandLimitedFunction.random(2, rng)
    g = BandLimitedFunction.random(2, rng)
    c = 0.7 - 0.3j
    lhs = A(f + g.scale(c))
    rhs = A(f) + A(g).scale(c)
    scale = max(1.0, max(float(np.max(np.abs(b))) for b in rhs.coeffs.values()))
    return lhs.max_abs_diff(rhs) / scale


def extract_symbol(A: OperatorOracle, two_L: int, grid: Optional[QuadratureGrid] = None,
                   check_linear: bool = True, compress: bool = False) -> Symbol:
    """sigma_A(x,l)_{mn} = sum_k conj(t^l_{km}(x)) (A t^l_{kn})(x) on the grid nodes."""
    if grid is None:
        grid = quadrature_grid(2 * A.x_two_L)
    if check_linear:
        err = _linearity_error(A, np.random.default_rng(12345))
        if err > LINEARITY_TOL:
            raise ValueError(f"operator failed the linearity spot check (relative error {err:.3g})")

    def level(tl):
        images = A(_basis_stack(tl))
        vals = synthesize(images, grid)  # (N, k, n)
        return np.einsum("xkm,xkn->xmn", grid.wigner(tl).conj(), vals, optimize=True)

    levels = range(two_L + 1)
    workers = thread_count()
    if A.serial or workers == 1:
        data = {tl: level(tl) for tl in levels}
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            data = dict(zip(levels, pool.map(level, levels)))
    sigma = Symbol(two_L, A.x_two_L, grid, data)
    # compressed() leaves genuinely x-dependent results untouched
    return sigma.compressed(1e-10) if (compress or A.x_two_L == 0) else sigma


# ---------------------------------------------------------------------------
# asymptotic expansions

def _dual_in_x(taylor: TaylorBasis, alpha, sigma: Symbol) -> Symbol:
    if not any(alpha):
        return sigma
    if sigma.x_invariant:
        return Symbol.invariant(lambda tl: np.zeros((tl + 1, tl + 1)), sigma.two_L)
    return map_x(sigma, lambda f: taylor.apply_dual(alpha, f))


def _check_order(N: int, sigma: Symbol, taylor: TaylorBasis):
    if N < 1:
        raise ValueError("expansion length N must be >= 1")
    if taylor.order < N - 1:
        raise ValueError(f"Taylor basis of order {taylor.order} cannot supply duals up to |alpha| = {N - 1}")
    if sigma.two_L < N - 1:
        raise ValueError(f"band exhausted: two_L={sigma.two_L} cannot absorb {N - 1} differences")


def compose_expansion(sigma_a: Symbol, sigma_b: Symbol, N: int, taylor: TaylorBasis) -> Symbol:
    """sum_{|alpha|<N} (Delta^alpha sigma_A) (d^(alpha) sigma_B) / alpha!."""
    _check_order(N, sigma_a, taylor)
    out_band = min(sigma_a.two_L - (N - 1), sigma_b.two_L)
    total = None
    for alpha in multi_indices(N - 1):
        db = _dual_in_x(taylor, alpha, sigma_b)
        if not any(np.any(db.data[tl]) for tl in range(out_band + 1)):
            continue
        da = difference_power(alpha, sigma_a)
        term = (da.truncated(out_band) @ db.truncated(out_band)).scale(1.0 / alpha_factorial(alpha))
        total = term if total is None else total + term
    if total is None:
        return Symbol.invariant(lambda tl: np.zeros((tl + 1, tl + 1)), out_band)
    return total


def adjoint_expansion(sigma_a: Symbol, N: int, taylor: TaylorBasis) -> Symbol:
    """sum_{|alpha|<N} Delta^alpha d^(alpha) (sigma_A^*) / alpha!."""
    _check_order(N, sigma_a, taylor)
    out_band = sigma_a.two_L - (N - 1)
    star = sigma_a.conj_transpose()
    total = None
    for alpha in multi_indices(N - 1):
        d = _dual_in_x(taylor, alpha, star)
        if not any(np.any(blk) for blk in d.data.values()):
            continue
        term = difference_power(alpha, d).truncated(out_band).scale(1.0 / alpha_factorial(alpha))
        total = term if total is None else total + term
    return total


# ---------------------------------------------------------------------------
# boundedness

def sobolev_reweight(sigma: Symbol, mu: float) -> Symbol:
    """sigma(x, l) (1 + l(l+1))^(-mu/2)."""
    def w(tl):
        l = tl / 2
        return (1.0 + l * (l + 1)) ** (-mu / 2)
    return sigma.map_blocks(lambda tl, blk: blk * w(tl))


def op_matrix(sigma: Symbol) -> np.ndarray:
    """Matrix of Op(sigma) restricted to band sigma.two_L, in the orthonormal basis sqrt(2l+1) t^l_{mn}."""
    if sigma.x_invariant:
        blocks = []
        for tl in range(sigma.two_L + 1):
            # fhat(l) -> sigma(l) fhat(l) acts on columns of fhat
            blocks.append(np.kron(sigma.data[tl][0], np.eye(tl + 1)))
        from scipy.linalg import block_diag
        return block_diag(*blocks)
    out_band = sigma.two_L + sigma.x_two_L
    grid = analysis_grid(out_band)
    cols = []
    for tl in range(sigma.two_L + 1):
        d = tl + 1
        for i in range(d):
            for j in range(d):
                f = BandLimitedFunction.zeros(sigma.two_L)
                f.coeffs[tl][i, j] = 1.0 / np.sqrt(d)
                g = forward(op_apply(sigma, f, grid.quats), grid, out_band)
                cols.append(np.concatenate([np.sqrt(t + 1) * g.coeffs[t].ravel() for t in range(out_band + 1)]))
    return np.stack(cols, axis=1)


def empirical_operator_norm(sigma: Symbol, method: str = "svd", max_iter: int = 200,
                            rtol: float = 1e-10, seed: int = 0) -> float:
    """Operator norm of the truncated matrix of Op(sigma).

    ``method='power'`` runs power iteration on M^* M (capped at ``max_iter``
    steps or relative change ``rtol``); the default SVD is exact to rounding.
    """
    M = op_matrix(sigma)
    if method == "svd":
        return float(np.linalg.norm(M, 2))
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    v = rng.normal(size=M.shape[1]) + 1j * rng.normal(size=M.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = M.conj().T @ (M @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
        new = float(np.sqrt(nw))
        if est and abs(new - est) <= rtol * est:
            est = new
            break
        est = new
    return est


@dataclass
class L2Estimate:
    certificate: float
    per_level: List[float]
    empirical_norm: Optional[float]
    growth_slope: float
    certifiable: bool
    witness: Dict[str, object] = field(default_factory=dict)
    derivative_sum: float = 0.0

    def to_json(self) -> dict:
        return {"certificate": self.certificate, "per_level": self.per_level,
                "empirical_norm": self.empirical_norm, "growth_slope": self.growth_slope,
                "certifiable": self.certifiable, "witness": self.witness,
                "derivative_sum": self.derivative_sum}


def _growth_slope(values: List[float]) -> float:
    """Least-squares slope of log(value) against log(1+l) over the upper half of the levels."""
    tls = np.arange(len(values))
    keep = tls >= len(values) // 2
    v = np.asarray(values)[keep]
    x = np.log1p(tls[keep] / 2)
    if len(v) < 2 or np.all(v <= 0):
        return 0.0
    y = np.log(np.maximum(v, 1e-300))
    return float(np.polyfit(x, y, 1)[0])


def l2_bound_estimate(sigma: Symbol, empirical: bool = True, depth: int = 2,
                      sample_exactness: Optional[int] = None) -> L2Estimate:
    """max over |beta| <= depth, nodes and levels of ||d_x^beta sigma(x,l)||_op.

    ``depth = 2`` is the smallest integer above dim/2 for the 3-dimensional group.
    x-dependent symbols are first resampled on a grid of exactness
    ``sample_exactness`` (default ``max(grid exactness, 8 * x_two_L)``) so the
    sup over x is not read off a handful of analysis nodes.  ``derivative_sum``
    adds the per-beta sups instead of taking their maximum.
    """
    if not sigma.x_invariant:
        E = max(sigma.grid.exactness_two_l, 8 * sigma.x_two_L) if sample_exactness is None else sample_exactness
        if E > sigma.grid.exactness_two_l:
            sigma = sigma.resample(quadrature_grid(E))
    per_level = [0.0] * (sigma.two_L + 1)
    witness = {}
    best = -1.0
    total = 0.0
    for beta in multi_indices(depth):
        if any(beta) and sigma.x_invariant:
            continue
        d = x_derivative(beta, sigma)
        sup_beta = 0.0
        for tl in range(sigma.two_L + 1):
            norms = np.linalg.norm(d.data[tl], ord=2, axis=(-2, -1))
            k = int(np.argmax(norms))
            per_level[tl] = max(per_level[tl], float(norms[k]))
            sup_beta = max(sup_beta, float(norms[k]))
            if norms[k] > best:
                best = float(norms[k])
                witness = {"beta": list(beta), "node": k, "two_l": tl}
        total += sup_beta
    slope = _growth_slope(per_level)
    emp = empirical_operator_norm(sigma) if empirical else None
    return L2Estimate(max(per_level), per_level, emp, slope, slope <= CERTIFIABLE_SLOPE, witness, total)

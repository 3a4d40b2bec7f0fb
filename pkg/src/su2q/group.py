"""SU(2) as unit quaternions: arithmetic, Euler angles, Haar quadrature, Taylor monomials.

Quaternions are stored as ``(x0, x1, x2, x3)`` and viewed as the matrix
``[[x0 + i x3, x1 + i x2], [-x1 + i x2, x0 - i x3]]``.  With this view the
Hamilton product of quaternions is the matrix product.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

NORM_FLOOR = 1e-8


# ---------------------------------------------------------------------------
# vectorised quaternion helpers on arrays of shape (..., 4)

def quat_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p0, p1, p2, p3 = np.moveaxis(p, -1, 0)
    q0, q1, q2, q3 = np.moveaxis(q, -1, 0)
    return np.stack([
        p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
        p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
        p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
        p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
    ], axis=-1)


def quat_inv(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    x0, x1, x2, x3 = np.moveaxis(q, -1, 0)
    out = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = x0 + 1j * x3
    out[..., 0, 1] = x1 + 1j * x2
    out[..., 1, 0] = -x1 + 1j * x2
    out[..., 1, 1] = x0 - 1j * x3
    return out


def euler_to_quat(phi, theta, psi) -> np.ndarray:
    """Quaternions of omega3(phi) omega2(theta) omega3(psi), broadcasting over inputs."""
    phi, theta, psi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (phi, theta, psi)))
    z = np.zeros_like(phi)
    w3a = np.stack([np.cos(phi / 2), z, z, np.sin(phi / 2)], axis=-1)
    w2 = np.stack([np.cos(theta / 2), -np.sin(theta / 2), z, z], axis=-1)
    w3b = np.stack([np.cos(psi / 2), z, z, np.sin(psi / 2)], axis=-1)
    return quat_mul(quat_mul(w3a, w2), w3b)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    """A point of SU(2), equivalently of the unit sphere in R^4."""

    x0: float
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        norm2 = self.x0 ** 2 + self.x1 ** 2 + self.x2 ** 2 + self.x3 ** 2
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"not a unit quaternion (squared norm {norm2!r}); use from_quaternion")

    @property
    def quat(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    def to_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.quat)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def inverse(self) -> "GroupElement":
        return inverse(self)

    @classmethod
    def from_array(cls, q) -> "GroupElement":
        return from_quaternion(*np.asarray(q, dtype=float).reshape(4))


def from_quaternion(x0: float, x1: float, x2: float, x3: float) -> GroupElement:
    """Normalise ``(x0, x1, x2, x3)`` onto the unit sphere."""
    v = np.array([x0, x1, x2, x3], dtype=float)
    norm = float(np.linalg.norm(v))
    if not np.isfinite(norm) or norm <= NORM_FLOOR:
        raise ValueError(f"quaternion norm {norm:.3g} is too small to normalise (floor {NORM_FLOOR})")
    v = v / norm
    return GroupElement(*(float(c) for c in v))


def _wrap(q: np.ndarray) -> GroupElement:
    # renormalise to absorb rounding from products
    return from_quaternion(*q)


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    return _wrap(quat_mul(g.quat, h.quat))


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.x0, -g.x1, -g.x2, -g.x3)


def from_euler(phi: float, theta: float, psi: float) -> GroupElement:
    return _wrap(euler_to_quat(phi, theta, psi))


IDENTITY = GroupElement(1.0, 0.0, 0.0, 0.0)


def omega1(t: float) -> GroupElement:
    return GroupElement(math.cos(t / 2), 0.0, math.sin(t / 2), 0.0)


def omega2(t: float) -> GroupElement:
    return GroupElement(math.cos(t / 2), -math.sin(t / 2), 0.0, 0.0)


def omega3(t: float) -> GroupElement:
    return GroupElement(math.cos(t / 2), 0.0, 0.0, math.sin(t / 2))


def weyl_elements() -> Tuple[GroupElement, GroupElement, GroupElement]:
    """The elements omega_j(pi/2), j = 1, 2, 3."""
    h = math.pi / 2
    return omega1(h), omega2(h), omega3(h)


# Lie algebra basis as quaternions: exp(t Y_j) = omega_j(t)
LIE_BASIS = {
    "Y1": np.array([0.0, 0.0, 0.5, 0.0]),
    "Y2": np.array([0.0, -0.5, 0.0, 0.0]),
    "Y3": np.array([0.0, 0.0, 0.0, 0.5]),
}


def random_elements(n: int, rng) -> np.ndarray:
    """``n`` Haar-distributed quaternions as an (n, 4) array."""
    q = rng.normal(size=(n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# quadrature

@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Product rule in Euler angles integrating all t^l with 2l <= exactness_two_l."""

    quats: np.ndarray
    weights: np.ndarray
    exactness_two_l: int
    _cache: Dict[int, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.quats.ndim != 2 or self.quats.shape[1] != 4:
            raise ValueError("quats must have shape (N, 4)")
        if self.weights.shape != (self.quats.shape[0],):
            raise ValueError("one weight per node is required")
        self.quats.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self) -> int:
        return self.quats.shape[0]

    @property
    def nodes(self):
        return [GroupElement.from_array(q) for q in self.quats]

    def wigner(self, two_l: int) -> np.ndarray:
        """Cached t^l at every node, shape (N, 2l+1, 2l+1)."""
        table = self._cache.get(two_l)
        if table is None:
            from .representation import wigner_batch
            table = wigner_batch(self.quats, two_l)
            table.setflags(write=False)
            self._cache[two_l] = table
        return table

    def to_json(self) -> dict:
        return {
            "two_l_max": int(self.exactness_two_l),
            "nodes": self.quats.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QuadratureGrid":
        quats = np.asarray(obj["nodes"], dtype=float).reshape(-1, 4)
        norms = np.linalg.norm(quats, axis=1, keepdims=True)
        if np.max(np.abs(norms - 1.0), initial=0.0) > 1e-12:
            quats = quats / norms
        return cls(quats, np.asarray(obj["weights"], dtype=float), int(obj["two_l_max"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


_GRID_CACHE: Dict[int, QuadratureGrid] = {}


def quadrature_grid(two_l_max: int) -> QuadratureGrid:
    """Grid on which every t^l entry with ``2l <= two_l_max`` integrates exactly.

    Uniform in phi on [0, 2pi) and in psi on [0, 4pi), Gauss-Legendre in
    cos(theta).  Grids are memoised so Wigner tables are shared.
    """
    if two_l_max < 0:
        raise ValueError("two_l_max must be non-negative")
    two_l_max = int(two_l_max)
    grid = _GRID_CACHE.get(two_l_max)
    if grid is not None:
        return grid
    k_phi = two_l_max // 2 + 1
    k_psi = two_l_max + 1
    k_theta = two_l_max // 4 + 1
    cos_t, w_t = np.polynomial.legendre.leggauss(k_theta)
    phi = 2 * np.pi * np.arange(k_phi) / k_phi
    psi = 4 * np.pi * np.arange(k_psi) / k_psi
    theta = np.arccos(cos_t)
    P, T, S = np.meshgrid(phi, theta, psi, indexing="ij")
    _, W, _ = np.meshgrid(phi, w_t, psi, indexing="ij")
    quats = euler_to_quat(P.ravel(), T.ravel(), S.ravel())
    weights = W.ravel() / (2.0 * k_phi * k_psi)
    grid = QuadratureGrid(np.ascontiguousarray(quats), np.ascontiguousarray(weights), two_l_max)
    _GRID_CACHE[two_l_max] = grid
    return grid


def haar_integrate(values, grid: QuadratureGrid):
    """Weighted node sum; trailing axes of ``values`` are carried through."""
    values = np.asarray(values)
    if values.shape[:1] != (len(grid),):
        raise ValueError(f"expected {len(grid)} node values, got leading shape {values.shape[:1]}")
    return np.tensordot(grid.weights, values, axes=(0, 0))


# ---------------------------------------------------------------------------
# Taylor monomials

def multi_indices(max_degree: int, min_degree: int = 0):
    """Exponent triples with ``min_degree <= |alpha| <= max_degree``, graded then lexicographic."""
    out = []
    for deg in range(min_degree, max_degree + 1):
        out.extend(a for a in itertools.product(range(deg + 1), repeat=3) if sum(a) == deg)
    return out


def alpha_factorial(alpha) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def q_samples(quats: np.ndarray) -> Dict[str, np.ndarray]:
    """First-order monomials at the given quaternions.

    q_plus = t_{+-} = -x1 + i x2, q_minus = t_{-+} = x1 + i x2,
    q_zero = t_{--} - t_{++} = 2i x3.
    """
    quats = np.asarray(quats, dtype=float).reshape(-1, 4)
    return {
        "plus": -quats[:, 1] + 1j * quats[:, 2],
        "minus": quats[:, 1] + 1j * quats[:, 2],
        "zero": 2j * quats[:, 3],
    }


def q_alpha_samples(alpha, quats: np.ndarray) -> np.ndarray:
    q = q_samples(quats)
    return q["plus"] ** alpha[0] * q["minus"] ** alpha[1] * q["zero"] ** alpha[2]


@dataclass(frozen=True, eq=False)
class TaylorBasis:
    """Monomials q_alpha and the dual operators d^(alpha) for |alpha| <= order.

    ``dual_coeffs[alpha]`` maps an exponent triple ``beta`` to the coefficient of
    the ordered product d0^b1 d+^b2 d-^b3 in d^(alpha).
    """

    order: int
    monomials: Dict[tuple, object]
    dual_coeffs: Dict[tuple, Dict[tuple, complex]]
    grid: QuadratureGrid

    def apply_dual(self, alpha, f):
        """d^(alpha) applied to a BandLimitedFunction (or batched coefficient stack)."""
        from .diffops import apply_ordered
        out = None
        for beta, c in self.dual_coeffs[tuple(alpha)].items():
            term = apply_ordered(beta, f).scale(c)
            out = term if out is None else out + term
        return out

    def taylor_polynomial(self, f, N: int | None = None):
        """Callable x -> sum_{|alpha|<=N} q_alpha(x^-1) d^(alpha) f(e) / alpha!."""
        from .fourier import evaluate_at_identity
        N = self.order if N is None else N
        terms = []
        for alpha in multi_indices(N):
            val = evaluate_at_identity(self.apply_dual(alpha, f))
            terms.append((alpha, val / alpha_factorial(alpha)))

        def poly(quats):
            quats = np.asarray(quats, dtype=float).reshape(-1, 4)
            inv = quat_inv(quats)
            return sum(c * q_alpha_samples(a, inv) for a, c in terms)
        return poly


def taylor_basis(N: int, grid: QuadratureGrid | None = None) -> TaylorBasis:
    """Build q_alpha and solve the biorthogonality system for the duals.

    The system is ``M[beta, alpha] = (P_beta g_alpha)(e)`` with
    ``g_alpha(x) = q_alpha(x^-1)`` and ``P_beta = d0^b1 d+^b2 d-^b3``; then the
    coefficient matrix is ``diag(alpha!) M^-1``.
    """
    from .diffops import apply_ordered
    from .fourier import evaluate_at_identity, forward

    if N < 0:
        raise ValueError("Taylor order must be non-negative")
    need = 2 * N
    if grid is None:
        grid = quadrature_grid(need)
    if grid.exactness_two_l < need:
        raise ValueError(f"grid exactness {grid.exactness_two_l} < {need} required for order {N}")
    alphas = multi_indices(N)
    monomials = {}
    reflected = {}
    inv_quats = quat_inv(grid.quats)
    for a in alphas:
        band = sum(a)
        monomials[a] = forward(q_alpha_samples(a, grid.quats), grid, band)
        reflected[a] = forward(q_alpha_samples(a, inv_quats), grid, band)
    M = np.empty((len(alphas), len(alphas)), dtype=complex)
    for r, beta in enumerate(alphas):
        for c, a in enumerate(alphas):
            M[r, c] = evaluate_at_identity(apply_ordered(beta, reflected[a]))
    if np.linalg.cond(M) > 1e12:
        raise np.linalg.LinAlgError(f"biorthogonality system is singular (cond {np.linalg.cond(M):.3g})")
    C = np.diag([float(alpha_factorial(a)) for a in alphas]) @ np.linalg.inv(M)
    # drop rounding residue so exact duals print cleanly
    C = np.where(np.abs(C.real) < 1e-12, 0.0, C.real) + 1j * np.where(np.abs(C.imag) < 1e-12, 0.0, C.imag)
    duals = {}
    for r, a in enumerate(alphas):
        duals[a] = {beta: complex(C[r, c]) for c, beta in enumerate(alphas) if C[r, c] != 0}
    return TaylorBasis(N, monomials, duals, grid)

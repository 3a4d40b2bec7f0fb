"""Global quantization of operators on SU(2) with matrix-valued full symbols.

The submodules are importable on their own; the names below are the common entry points.
"""
from ._backend import BACKEND
from .group import (IDENTITY, LIE_BASIS, GroupElement, QuadratureGrid, from_euler, from_quaternion, haar_integrate,
                    inverse, multiply, omega1, omega2, omega3, quadrature_grid, random_elements, taylor_basis,
                    weyl_elements)
from .representation import character, multiplication_rhs, wigner
from .fourier import BandLimitedFunction, analysis_grid, convolve, forward, inverse as inverse_transform, synthesize
from .diffops import FIELD_NAMES, apply_field, multiplier
from .symbols import BUILTINS, Symbol, builtin, difference, difference_power, multiplication_symbol, pushforward
from .quantize import (OperatorOracle, adjoint_expansion, compose_expansion, extract_symbol, l2_bound_estimate,
                       op_apply, sobolev_reweight)
from .diagnostics import class_report, sigma0_inequalities

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "IDENTITY", "LIE_BASIS", "GroupElement", "QuadratureGrid", "from_euler", "from_quaternion",
    "haar_integrate", "inverse", "multiply", "omega1", "omega2", "omega3", "quadrature_grid", "random_elements",
    "taylor_basis", "weyl_elements", "character", "multiplication_rhs", "wigner", "BandLimitedFunction",
    "analysis_grid", "convolve", "forward", "inverse_transform", "synthesize", "FIELD_NAMES", "apply_field",
    "multiplier", "BUILTINS", "Symbol", "builtin", "difference", "difference_power", "multiplication_symbol",
    "pushforward", "OperatorOracle", "adjoint_expansion", "compose_expansion", "extract_symbol",
    "l2_bound_estimate", "op_apply", "sobolev_reweight", "class_report", "sigma0_inequalities",
]

"""Command-line front end: ``su2q <subcommand> ...``.

Every subcommand reads JSON files and writes JSON (to ``--out`` or stdout).
Exit status is 0 on success, 1 when a check fails and 2 for malformed input.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import diffops, jsonio
from .diagnostics import class_report
from .fourier import BandLimitedFunction, analysis_grid, forward, synthesize
from .group import QuadratureGrid, quadrature_grid, taylor_basis
from .quantize import (OperatorOracle, adjoint_expansion, compose_expansion, extract_symbol, l2_bound_estimate,
                       op_apply, sobolev_reweight)
from .symbols import Symbol, difference
from .verify import q_function, run_suite


class InputError(Exception):
    """Malformed or inconsistent input; maps to exit status 2."""


_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

FUNCTION_SCHEMA = {
    "type": "object",
    "required": ["two_L", "coeffs"],
    "properties": {
        "two_L": {"type": "integer", "minimum": 0},
        "coeffs": {"type": "object", "patternProperties": {"^[0-9]+$": {"type": "array"}}},
    },
}

GRID_SCHEMA = {
    "type": "object",
    "required": ["two_l_max", "nodes", "weights"],
    "properties": {
        "two_l_max": {"type": "integer", "minimum": 0},
        "nodes": {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                             "minItems": 4, "maxItems": 4}},
        "weights": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
    },
}

GRID_REF_SCHEMA = {
    "oneOf": [
        {"type": "object", "required": ["two_l_max"], "properties": {"two_l_max": {"type": "integer", "minimum": 0}},
         "not": {"required": ["nodes"]}},
        {"type": "object", "required": ["path"], "properties": {"path": {"type": "string"}}},
        GRID_SCHEMA,
    ]
}

SAMPLES_SCHEMA = {
    "type": "object",
    "required": ["samples"],
    "properties": {"samples": {"type": "array", "items": _PAIR}, "grid_ref": GRID_REF_SCHEMA},
}

SYMBOL_SCHEMA = {
    "type": "object",
    "required": ["two_L", "x_two_L", "grid_ref", "data", "x_invariant"],
    "properties": {
        "two_L": {"type": "integer", "minimum": 0},
        "x_two_L": {"type": "integer", "minimum": 0},
        "grid_ref": GRID_REF_SCHEMA,
        "x_invariant": {"type": "boolean"},
        "data": {"type": "object", "patternProperties": {"^[0-9]+$": {"type": "array"}}},
    },
}


# ---------------------------------------------------------------------------
# loading and saving

def _load(path, schema, what):
    try:
        obj = jsonio.load(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read {what} file {path}: {exc}") from exc
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"{what} file {path} fails schema at {loc}: {exc.message}") from exc
    return obj


def load_function(path) -> BandLimitedFunction:
    obj = _load(path, FUNCTION_SCHEMA, "function")
    try:
        return BandLimitedFunction.from_json(obj)
    except (KeyError, ValueError) as exc:
        raise InputError(f"function file {path}: {exc}") from exc


def load_grid(path) -> QuadratureGrid:
    obj = _load(path, GRID_SCHEMA, "grid")
    if len(obj["nodes"]) != len(obj["weights"]):
        raise InputError(f"grid file {path}: {len(obj['nodes'])} nodes but {len(obj['weights'])} weights")
    return _grid_from_obj(obj)


def _grid_from_obj(obj) -> QuadratureGrid:
    try:
        grid = QuadratureGrid.from_json(obj)
    except ValueError as exc:
        raise InputError(f"invalid grid: {exc}") from exc
    # a file holding a stock grid maps back to the cached object, so symbols share it
    stock = quadrature_grid(grid.exactness_two_l)
    if np.array_equal(stock.quats, grid.quats) and np.array_equal(stock.weights, grid.weights):
        return stock
    return grid


def resolve_grid_ref(ref, base: Path) -> QuadratureGrid:
    if "nodes" in ref:
        return _grid_from_obj(ref)
    if "path" in ref:
        p = Path(ref["path"])
        return load_grid(p if p.is_absolute() else base / p)
    return quadrature_grid(int(ref["two_l_max"]))


def grid_ref_for(grid: QuadratureGrid) -> dict:
    """Stock grids are referenced by exactness; anything else is inlined."""
    if quadrature_grid(grid.exactness_two_l) is grid:
        return {"two_l_max": int(grid.exactness_two_l)}
    return grid.to_json()


def load_symbol(path) -> Symbol:
    obj = _load(path, SYMBOL_SCHEMA, "symbol")
    grid = resolve_grid_ref(obj["grid_ref"], Path(path).parent)
    try:
        return Symbol.from_json(obj, grid)
    except (KeyError, ValueError) as exc:
        raise InputError(f"symbol file {path}: {exc}") from exc


def symbol_json(sigma: Symbol) -> dict:
    return sigma.to_json(grid_ref_for(sigma.grid))


def load_samples(path, grid: QuadratureGrid) -> np.ndarray:
    obj = _load(path, SAMPLES_SCHEMA, "samples")
    vals = jsonio.decode_complex(obj["samples"])
    if vals.shape != (len(grid),):
        raise InputError(f"samples file {path} has {vals.shape[0]} values for a grid of {len(grid)} nodes")
    return vals


# ---------------------------------------------------------------------------
# operator specification: factors joined by '*', applied right to left

def parse_operator(spec: str, base: Path = Path(".")) -> OperatorOracle:
    """Parse e.g. ``partial_zero*mul:q_zero`` into the composed oracle.

    Factors: ``identity``, any field name (``D1``, ``partial_plus``, ``laplacian``
    ...), or ``mul:<q_plus|q_minus|q_zero|path/to/function.json>``.
    """
    factors = [f.strip() for f in spec.split("*") if f.strip()]
    if not factors:
        raise InputError("empty operator specification")
    ops = []
    for tok in factors:
        if tok == "identity":
            ops.append(OperatorOracle.identity())
        elif tok in diffops.FIELD_NAMES:
            ops.append(OperatorOracle.field(tok))
        elif tok.startswith("mul:"):
            arg = tok[4:]
            if arg in ("q_plus", "q_minus", "q_zero"):
                phi = q_function(arg[2:])
            else:
                p = Path(arg)
                phi = load_function(p if p.is_absolute() else base / p)
            ops.append(OperatorOracle.multiplication(phi, tok))
        else:
            raise InputError(f"unknown operator factor {tok!r}")
    out = ops[-1]
    for op in reversed(ops[:-1]):
        out = op @ out
    return out


# ---------------------------------------------------------------------------
# subcommands

def cmd_grid(args):
    jsonio.dump(quadrature_grid(args.two_l_max).to_json(), args.out)
    return 0


def cmd_synth(args):
    f = load_function(args.function)
    grid = load_grid(args.grid) if args.grid else analysis_grid(f.two_L)
    ref = {"path": str(args.grid)} if args.grid else grid_ref_for(grid)
    jsonio.dump({"grid_ref": ref, "samples": jsonio.encode_complex(synthesize(f, grid))}, args.out)
    return 0


def cmd_analyze(args):
    grid = load_grid(args.grid)
    vals = load_samples(args.samples, grid)
    fh = forward(vals, grid, args.two_L)
    if not fh.exact:
        print(f"warning: grid exactness {grid.exactness_two_l} < {2 * args.two_L}; "
              "coefficients are a projection estimate", file=sys.stderr)
    jsonio.dump(fh.to_json(), args.out)
    return 0


def cmd_apply(args):
    fh = load_function(args.function)
    jsonio.dump(diffops.apply_field(args.field, fh).to_json(), args.out)
    return 0


def cmd_extract(args):
    A = parse_operator(args.operator)
    grid = load_grid(args.grid) if args.grid else None
    try:
        sigma = extract_symbol(A, args.two_L, grid=grid)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    jsonio.dump(symbol_json(sigma), args.out)
    return 0


def _taylor_for(N: int):
    return taylor_basis(max(N - 1, 0))


def cmd_compose(args):
    if len(args.symbol) != 2:
        raise InputError("compose needs exactly two --symbol arguments (A then B)")
    a, b = (load_symbol(p) for p in args.symbol)
    try:
        out = compose_expansion(a, b, args.n, _taylor_for(args.n))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    jsonio.dump(symbol_json(out), args.out)
    return 0


def cmd_adjoint(args):
    a = load_symbol(args.symbol[0])
    try:
        out = adjoint_expansion(a, args.n, _taylor_for(args.n))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    jsonio.dump(symbol_json(out), args.out)
    return 0


def cmd_diff(args):
    sigma = load_symbol(args.symbol[0])
    try:
        out = difference(args.dir, sigma)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    jsonio.dump(symbol_json(out), args.out)
    return 0


def cmd_op_apply(args):
    sigma = load_symbol(args.symbol[0])
    fh = load_function(args.function)
    if args.grid:
        grid = load_grid(args.grid)
        vals, ref = op_apply(sigma, fh, grid.quats), {"path": str(args.grid)}
    elif sigma.x_invariant:
        grid = analysis_grid(min(fh.two_L, sigma.two_L))
        vals, ref = op_apply(sigma, fh, grid.quats), grid_ref_for(grid)
    else:
        vals, ref = op_apply(sigma, fh), grid_ref_for(sigma.grid)
    jsonio.dump({"grid_ref": ref, "samples": jsonio.encode_complex(vals)}, args.out)
    return 0


def cmd_class_report(args):
    sigma = load_symbol(args.symbol[0])
    report = class_report(sigma, args.order, alpha_max=args.alpha_max, beta_max=args.beta_max,
                          N_max=args.N_max, tol=args.tol)
    jsonio.dump(report.to_json(), args.out)
    return 0 if report.all_pass else 1


def cmd_l2_cert(args):
    sigma = load_symbol(args.symbol[0])
    if args.mu:
        sigma = sobolev_reweight(sigma, args.mu)
    est = l2_bound_estimate(sigma, empirical=not args.no_empirical)
    out = est.to_json()
    out["mu"] = args.mu
    jsonio.dump(out, args.out)
    return 0


def cmd_verify(args):
    manifest = run_suite(args.two_L, timings=args.timings)
    jsonio.dump(manifest, args.out)
    for c in manifest["checks"]:
        if not c["pass"]:
            print(f"FAIL {c['name']}: error {c['error']:.3g} > tol {c['tol']:.3g} {c.get('note', '')}",
                  file=sys.stderr)
    return 0 if manifest["all_pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="su2q", description="Global quantization toolkit on SU(2)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--out", default="-", help="output path (default: stdout)")
        sp.set_defaults(func=fn)
        return sp

    sp = add("grid", cmd_grid, "write a stock quadrature grid")
    sp.add_argument("--two-l-max", dest="two_l_max", type=int, required=True)

    sp = add("synth", cmd_synth, "coefficients -> samples at grid nodes")
    sp.add_argument("--function", required=True)
    sp.add_argument("--grid")

    sp = add("analyze", cmd_analyze, "samples at grid nodes -> coefficients")
    sp.add_argument("--grid", required=True)
    sp.add_argument("--samples", required=True)
    sp.add_argument("--two-L", dest="two_L", type=int, required=True)

    sp = add("apply", cmd_apply, "apply an invariant differential operator to coefficients")
    sp.add_argument("--field", required=True, choices=diffops.FIELD_NAMES)
    sp.add_argument("--function", required=True)

    sp = add("extract", cmd_extract, "symbol of an operator given by a factor specification")
    sp.add_argument("--operator", required=True)
    sp.add_argument("--two-L", dest="two_L", type=int, required=True)
    sp.add_argument("--grid")

    for name, fn in (("compose", cmd_compose), ("adjoint", cmd_adjoint)):
        sp = add(name, fn, f"{name} expansion of symbols")
        sp.add_argument("--symbol", action="append", required=True)
        sp.add_argument("--n", type=int, required=True)

    sp = add("diff", cmd_diff, "difference operator applied to a symbol")
    sp.add_argument("--dir", required=True, choices=("plus", "minus", "zero", "bar0", "bar_zero"))
    sp.add_argument("--symbol", action="append", required=True)

    sp = add("op-apply", cmd_op_apply, "apply Op(symbol) to a function, returning samples")
    sp.add_argument("--symbol", action="append", required=True)
    sp.add_argument("--function", required=True)
    sp.add_argument("--grid")

    sp = add("class-report", cmd_class_report, "symbol-class inequality report")
    sp.add_argument("--symbol", action="append", required=True)
    sp.add_argument("--order", type=float, required=True)
    sp.add_argument("--alpha-max", dest="alpha_max", type=int, default=2)
    sp.add_argument("--beta-max", dest="beta_max", type=int, default=1)
    sp.add_argument("--N-max", dest="N_max", type=int, default=2)
    sp.add_argument("--tol", type=float)

    sp = add("l2-cert", cmd_l2_cert, "L2 boundedness certificate")
    sp.add_argument("--symbol", action="append", required=True)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--no-empirical", dest="no_empirical", action="store_true")

    sp = add("verify", cmd_verify, "run the identity suite and write a manifest")
    sp.add_argument("--two-L", dest="two_L", type=int, default=8)
    sp.add_argument("--timings", action="store_true", help="include per-check seconds (not reproducible)")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"su2q: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

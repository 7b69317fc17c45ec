"""Command-line front end: coefficients, quantization, resonances, examples, verification.

JSON goes to stdout, short human-readable summaries to stderr.

Exit codes: 0 ok, 1 verification failures, 2 bad input, 3 inadmissible
resonant pair, 4 unresolved resonance, 5 presentation missing for n <= 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import curved, geometry
from .coefficients import (InadmissiblePairError, ResonanceError, UnresolvedResonanceError, Weights,
                           coefficients, curvature_constant, resonance_report)
from .flat import QuantizationParams, Symbol2, quantize_components
from .poly import Poly
from .scalar import format_rational, parse_rational
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INADMISSIBLE, EXIT_UNRESOLVED, EXIT_PRESENTATION = 0, 1, 2, 3, 4, 5


class InputError(ValueError):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _note(text: str) -> None:
    print(text, file=sys.stderr)


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _weights(args) -> Weights:
    if args.n is None or args.lam is None or args.mu is None:
        raise InputError("--n, --lambda and --mu are required")
    p = args.p if args.p is not None else args.n - (args.q or 0)
    q = args.q if args.q is not None else args.n - p
    return Weights(args.n, p, q, args.lam, args.mu)


def _add_weight_flags(sp, required=False):
    sp.add_argument("--n", type=int, required=required)
    sp.add_argument("--p", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--lambda", dest="lam", type=_rational)
    sp.add_argument("--mu", type=_rational)


# commands ----------------------------------------------------------------------------


def cmd_coeffs(args) -> int:
    w = _weights(args)
    cs = coefficients(w, args.free_value, args.symmetric)
    out = cs.to_json()
    _emit(out)
    if cs.resonant:
        _note(f"resonant delta = {format_rational(w.delta)}; free: {out['free_parameter']}")
    return EXIT_OK


def _flat_symbol(obj: dict, args) -> Symbol2:
    if "weights" in obj:
        w = Weights.from_json(obj["weights"])
    else:
        w = _weights(args)
    if "terms" in obj:
        P = Poly.from_json(obj)
    elif "P" in obj:
        P = Poly.parse(obj["P"], w.n)
    else:
        raise InputError("symbol file needs 'terms' or 'P'")
    return Symbol2(P, w)


def _curved_inputs(args, n):
    m = pres = None
    if args.presentation:
        obj = _load_json(args.presentation)
        pres = geometry.ConformalFactorJet.from_json(obj["factor"])
        m = geometry.flat_presentation(obj["g0"], pres)
    if args.metric_jets:
        m = geometry.MetricJet2.from_json(_load_json(args.metric_jets))
    if m is None:
        if n <= 2:
            raise curved.PresentationRequired(f"n = {n} needs --presentation")
        raise InputError("curved mode needs --metric-jets or --presentation")
    return m, pres


def _example(args) -> int:
    case, n = args.example, args.n
    if n is None:
        raise InputError("--example needs --n")
    hbar = args.hbar if args.hbar is not None else Fraction(1)
    out = example_operator(case, n, hbar)
    _emit(out)
    _note(f"{case} n={n}: scalar coefficient {out['scalar_coefficient']}")
    return EXIT_OK


def example_operator(case: str, n: int, hbar=Fraction(1)) -> dict:
    """The named resonant Laplacian on the unit sphere (n >= 2) or with phi = e^x (n = 1)."""
    w = curved.resonant_case_weights(case, n)
    if n == 1:
        f = geometry.exponential_factor()
        m = geometry.flat_presentation([[1]], f)
        op = curved.resonant_laplacians(case, n, m, hbar, f)
        S = geometry.schwarzian_nd(f, m).S
        diff = op - curved.laplacian_point_operator(w.lam, m, hbar, 0)
        coeff = (diff.A0 / (-Fraction(hbar) ** 2 * S / m.g[0][0])).re
        label = "S/g"
    else:
        f = geometry.sphere_factor(n)
        m = geometry.flat_presentation([[int(i == j) for j in range(n)] for i in range(n)], f)
        op = curved.resonant_laplacians(case, n, m, hbar, f if n <= 2 else None)
        coeff = curved.scalar_curvature_coefficient(op, w.lam, m, hbar)
        label = "R"
    return {"case": case, "n": n, "weights": w.to_json(), "geometry": "exp" if n == 1 else "unit sphere",
            "operator": op.to_json(), "scalar_coefficient": format_rational(coeff), "scalar_term": label,
            "C": None if n == 1 else format_rational(curvature_constant(n, w.lam, w.mu))}


def cmd_quantize(args) -> int:
    if args.example:
        return _example(args)
    if args.mode == "flat":
        if not args.symbol:
            raise InputError("flat mode needs --symbol")
        s = _flat_symbol(_load_json(args.symbol), args)
        params = QuantizationParams(s.weights, args.hbar, args.free_value, not args.no_pin, args.alpha)
        A = quantize_components(params, s)
        _emit({"weights": s.weights.to_json(), "operator": A.to_json()})
        return EXIT_OK
    w = _weights(args)
    m, pres = _curved_inputs(args, w.n)
    if args.geodesic or args.connection:
        hbar = args.hbar if args.hbar is not None else Fraction(1)
        if args.connection:
            a = curved.ConnectionJet.from_json(_load_json(args.connection))
            op = curved.quantize_minimal_coupling(w, m, a, hbar, pres)
        else:
            op = curved.quantize_geodesic(w, m, hbar, pres)
        out = {"weights": w.to_json(), "operator": op.to_json()}
        C = curvature_constant(w.n, w.lam, w.mu)
        if C is not None:
            out["C"] = format_rational(C)
        _emit(out)
        return EXIT_OK
    if not args.symbol:
        raise InputError("curved mode needs --symbol, --geodesic or --connection")
    sj = curved.SymbolJet2.from_json(_load_json(args.symbol))
    cs = coefficients(w, args.free_value, not args.no_pin)
    if not cs.resolved and sj.has_second_order():
        cs.require_resolved()
    op = curved.quantize_point(w, m, sj, pres, cs if cs.resolved else None, args.hbar, args.free_value, args.alpha)
    _emit({"weights": w.to_json(), "operator": op.to_json()})
    return EXIT_OK


def cmd_resonances(args) -> int:
    rep = resonance_report(args.n)
    _emit(rep.to_json())
    _note(f"n={args.n}: resonant deltas " + ", ".join(format_rational(d) for d in rep.resonant_deltas))
    return EXIT_OK


def cmd_examples(args) -> int:
    ns = [args.n] if args.n is not None else [1, 2, 3, 4]
    rows = []
    for n in ns:
        cases = ["sturm_liouville"] if n == 1 else ["yamabe", "laplace", "new"]
        for case in cases:
            out = example_operator(case, n)
            rows.append({k: out[k] for k in ("case", "n", "weights", "scalar_coefficient", "scalar_term", "C")})
    _emit(rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    rep = run_suite(args.suite, args.n, args.seed, args.max_degree)
    _emit(rep.to_json())
    status = "ok" if rep.ok else f"{len(rep.failures)} failures"
    _note(f"{rep.suite}: {rep.cases_run} cases, {status}, seed {rep.seed}, {rep.elapsed:.2f}s")
    for line in rep.notes:
        _note(line)
    return EXIT_OK if rep.ok else EXIT_FAIL


# parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="confquant", description="Conformally equivariant quantization, exactly.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("coeffs", help="coefficients of the quantization map")
    _add_weight_flags(sp, required=True)
    sp.add_argument("--free-value", type=_rational, help="value of the free parameter of a resonant family")
    sp.add_argument("--symmetric", action="store_true", help="pin resonant families by self-adjointness")
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("quantize", help="quantize a symbol (flat) or jets (curved)")
    _add_weight_flags(sp)
    sp.add_argument("--mode", choices=("flat", "curved"), default="flat")
    sp.add_argument("--symbol", help="symbol JSON file ('-' for stdin)")
    sp.add_argument("--metric-jets", help="MetricJet2 JSON file")
    sp.add_argument("--presentation", help='JSON {"g0": ..., "factor": ConformalFactorJet}')
    sp.add_argument("--connection", help="ConnectionJet JSON file (minimal coupling)")
    sp.add_argument("--geodesic", action="store_true", help="quantize g^{ij} xi_i xi_j")
    sp.add_argument("--hbar", type=_rational)
    sp.add_argument("--free-value", type=_rational)
    sp.add_argument("--alpha", type=_rational, help="first-order coefficient at delta = 1")
    sp.add_argument("--no-pin", action="store_true", help="do not pin resonant families by self-adjointness")
    sp.add_argument("--example", choices=curved.RESONANT_CASES)
    sp.set_defaults(func=cmd_quantize)

    sp = sub.add_parser("resonances", help="resonant shifts and admissible pairs")
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_resonances)

    sp = sub.add_parser("examples", help="scalar coefficients of the named Laplacians")
    sp.add_argument("--n", type=int)
    sp.set_defaults(func=cmd_examples)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", choices=SUITES, required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-degree", type=int)
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InadmissiblePairError as exc:
        _note(f"error: {exc}")
        admissible = [[format_rational(a), format_rational(b)] for a, b in exc.admissible]
        _emit({"error": "inadmissible", "message": str(exc), "admissible_pairs": admissible})
        return EXIT_INADMISSIBLE
    except UnresolvedResonanceError as exc:
        _note(f"error: {exc}")
        return EXIT_UNRESOLVED
    except curved.PresentationRequired as exc:
        _note(f"error: {exc}")
        return EXIT_PRESENTATION
    except ResonanceError as exc:
        _note(f"error: {exc}")
        return EXIT_UNRESOLVED
    except (InputError, ValueError, KeyError, geometry.GeometryError) as exc:
        _note(f"error: {exc}")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Each subcommand reads a polynomial expression (argument or '-' for stdin)
and writes JSON to stdout.  Exit codes: 0 success, 1 usage or parse
failure, 2 the polynomial is not a sum of squares, 3 a rank-bound check
failed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

import numpy as np

from .bounds import (
    BoundReport,
    NotApplicable,
    SizeCapError,
    random_ncpoly,
    verify_power_bound,
    verify_qqs_bound,
    verify_qsq_bound,
)
from .gram import NotSymmetricError, build_gram_space, gram_space_to_json
from .ncpoly import MatrixTuple, NcPoly, commutes
from .parsing import PolyParseError, format_poly, parse
from .sdp import problem_to_json, solution_to_json
from .sosdec import SosDecomposition, SosInfeasibleError, SosSolverError, sos_decompose

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_BOUND_FAILED = 3


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which collides with the infeasible code
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_expression(text: str) -> str:
    return sys.stdin.read() if text == "-" else text


def _term_json(word, coeff) -> dict:
    value = str(coeff) if isinstance(coeff, Fraction) else float(coeff)
    return {"coeff": value, "word": list(word)}


def _poly_terms_json(p: NcPoly) -> list[dict]:
    return [_term_json(w, c) for w, c in p.sorted_terms()]


def _emit(payload: dict) -> None:
    print(json.dumps(payload))


def cmd_parse(args) -> int:
    p = parse(_read_expression(args.expr), args.n)
    _emit({"n": p.n, "degree": p.degree, "terms": _poly_terms_json(p), "text": format_poly(p)})
    return EXIT_OK


def cmd_gram(args) -> int:
    p = parse(_read_expression(args.expr), args.n)
    space = build_gram_space(p, args.degree)
    _emit(gram_space_to_json(space))
    return EXIT_OK


def _decomposition_json(dec: SosDecomposition) -> dict:
    return {
        "status": "optimal",
        "squares": [_poly_terms_json(f) for f in dec.squares],
        "rank_lower": dec.certificate.lower,
        "rank_upper": dec.certificate.upper,
        "certified": dec.certificate.certified,
        "reconstruction_error": dec.reconstruction_error,
    }


def _maybe_dump_sdp(dec: SosDecomposition, path: str | None) -> None:
    if not path:
        return
    payload = {
        "problem": problem_to_json(dec.sdp_problem) if dec.sdp_problem else None,
        "solution": solution_to_json(dec.sdp_solution) if dec.sdp_solution else None,
    }
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2)


def cmd_sos(args) -> int:
    p = parse(_read_expression(args.expr), args.n)
    try:
        dec = sos_decompose(p, degree=args.degree, feas_tol=args.tol)
    except SosInfeasibleError as exc:
        _emit(
            {
                "status": "infeasible",
                "rank_lower": exc.rank_lower,
                "rank_upper": None,
                "certified": False,
                "message": str(exc),
            }
        )
        return EXIT_INFEASIBLE
    _maybe_dump_sdp(dec, args.dump_sdp)
    if args.pretty:
        for i, f in enumerate(dec.squares, start=1):
            print(f"f{i} = {format_poly(f)}")
        cert = dec.certificate
        print(f"squares: {len(dec.squares)}   rank bounds: [{cert.lower}, {cert.upper}]   certified: {cert.certified}")
        print(f"reconstruction error: {dec.reconstruction_error:.3e}")
    else:
        _emit(_decomposition_json(dec))
    return EXIT_OK


def cmd_rank(args) -> int:
    p = parse(_read_expression(args.expr), args.n)
    try:
        dec = sos_decompose(p, degree=args.degree)
    except SosInfeasibleError as exc:
        _emit({"rank_lower": exc.rank_lower, "rank_upper": None, "certified": False})
        return EXIT_INFEASIBLE
    cert = dec.certificate
    _emit({"rank_lower": cert.lower, "rank_upper": cert.upper, "certified": cert.certified})
    return EXIT_OK


def cmd_eval(args) -> int:
    p = parse(_read_expression(args.expr), args.n)
    with open(args.matrices) as handle:
        data = json.load(handle)
    tup = MatrixTuple.of([np.asarray(m, dtype=float) for m in data])
    result = p.evaluate(tup)
    _emit({"size": tup.size, "result": result.tolist()})
    return EXIT_OK


def cmd_commutes(args) -> int:
    n = args.n
    if n is None:
        n = max(parse(args.expr1).n, parse(args.expr2).n)
    p = parse(args.expr1, n)
    q = parse(args.expr2, n)
    _emit({"commutes": commutes(p, q)})
    return EXIT_OK


def _bound_json(result: BoundReport | NotApplicable) -> dict:
    if isinstance(result, NotApplicable):
        return {
            "family": result.family,
            "n": result.n,
            "d": result.d,
            "q": format_poly(result.q),
            "applicable": False,
            "witness": _term_json(result.witness_word, result.witness_coeff),
        }
    return {
        "family": result.family,
        "n": result.n,
        "d": result.d,
        "q": format_poly(result.q),
        "applicable": True,
        "basis_degree": result.basis_degree,
        "lower": result.lower,
        "bound": result.bound,
        "satisfied": result.satisfied,
    }


def cmd_verify_bound(args) -> int:
    if args.family == "power":
        if args.k is None:
            return _usage_error("--family power requires --k")
        instances = [("power", args.k)]
    elif args.q is not None:
        instances = [("expr", parse(args.q, args.n))]
    elif args.random is not None:
        rng = random.Random(args.seed)
        instances = [("expr", random_ncpoly(rng, args.n, args.max_deg)) for _ in range(args.random)]
    else:
        return _usage_error("provide --q, --k, or --random")

    applicable = 0
    satisfied = 0
    for kind, payload in instances:
        if kind == "power":
            result = verify_power_bound(payload, args.n, args.d, args.max_basis)
        elif args.family == "qsq":
            result = verify_qsq_bound(payload, args.d, args.max_basis)
        else:
            result = verify_qqs_bound(payload, args.d, args.max_basis)
        _emit(_bound_json(result))
        if isinstance(result, BoundReport):
            applicable += 1
            satisfied += int(result.satisfied)
    verdict = "PASS" if satisfied == applicable else "FAIL"
    print(f"{verdict} {satisfied}/{applicable}")
    return EXIT_OK if verdict == "PASS" else EXIT_BOUND_FAILED


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _add_expr_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("expr", help="polynomial expression, or '-' to read stdin")
    sub.add_argument("--n", type=int, default=None, help="alphabet size (default: inferred)")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="ncsos", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("parse", help="normalize an expression to a term list")
    _add_expr_options(sub)
    sub.set_defaults(func=cmd_parse)

    sub = commands.add_parser("gram", help="dump the Gram space of a symmetric polynomial")
    _add_expr_options(sub)
    sub.add_argument("--degree", type=int, default=None, help="raise the basis degree")
    sub.set_defaults(func=cmd_gram)

    sub = commands.add_parser("sos", help="sum-of-squares decomposition")
    _add_expr_options(sub)
    sub.add_argument("--degree", type=int, default=None, help="raise the basis degree")
    sub.add_argument("--tol", type=float, default=1e-9, help="feasibility tolerance")
    sub.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    sub.add_argument("--json", action="store_true", help="JSON output (the default)")
    sub.add_argument("--dump-sdp", metavar="FILE", default=None, help="write the solver problem/solution")
    sub.set_defaults(func=cmd_sos)

    sub = commands.add_parser("rank", help="rank certificate only")
    _add_expr_options(sub)
    sub.add_argument("--degree", type=int, default=None, help="raise the basis degree")
    sub.set_defaults(func=cmd_rank)

    sub = commands.add_parser("eval", help="evaluate on a matrix tuple")
    _add_expr_options(sub)
    sub.add_argument("--matrices", required=True, help="JSON file: n arrays of k rows of k floats")
    sub.set_defaults(func=cmd_eval)

    sub = commands.add_parser("commutes", help="exact commutation test")
    sub.add_argument("expr1")
    sub.add_argument("expr2")
    sub.add_argument("--n", type=int, default=None)
    sub.set_defaults(func=cmd_commutes)

    sub = commands.add_parser("verify-bound", help="certified rank bounds for the structured families")
    sub.add_argument("--family", choices=("qsq", "qqs", "power"), required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--d", type=int, required=True)
    sub.add_argument("--q", default=None, help="explicit multiplier expression")
    sub.add_argument("--k", type=int, default=None, help="odd power (family 'power')")
    sub.add_argument("--random", type=int, default=None, metavar="COUNT", help="random multipliers")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--max-deg", type=int, default=2, help="degree cap for random multipliers")
    sub.add_argument("--max-basis", type=int, default=1000, help="basis-size cap")
    sub.set_defaults(func=cmd_verify_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PolyParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotSymmetricError, SizeCapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SosSolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""``ordcalc`` command line.

Exit codes: 0 success, 1 identity/oracle failure, 2 usage or parse error,
3 truncation violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import fock, verify
from .combinatorics import FunctionTable, StirlingTable
from .opalgebra import Ordering, ParseError, parse, print_expr, rewrite
from .ordering import (
    OrderedExpansion,
    antinormal_function,
    antinormal_power,
    lemma1_coefficients,
    lemma2_coefficients,
    normal_function,
    normal_power,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_TRUNCATION = 3

LEMMA_TOL = 1e-12


def fmt_float(x: float) -> str:
    return format(x, ".17g")


def scalar_text(c) -> str:
    if isinstance(c, (int, Fraction)):
        return str(c)
    return fmt_float(c)


def scalar_json(c):
    # Exact values travel as strings so big integers and rationals survive.
    if isinstance(c, (int, Fraction)):
        return str(c)
    return float(c)


def _emit(fmt: str, record: dict, text: str, rows: list[list], out) -> None:
    if fmt == "json":
        out.write(json.dumps(record, indent=2, allow_nan=True) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(rows)
        out.write(buf.getvalue())
    else:
        out.write(text + "\n")


def cmd_stirling(args, out) -> int:
    table = StirlingTable(args.max_k)
    rows = table.rows()
    record = {
        "command": "stirling",
        "parameters": {"max_k": args.max_k},
        "exact": True,
        "result": [[str(v) for v in row] for row in rows],
    }
    text = "\n".join(" ".join(str(v) for v in row) for row in rows)
    csv_rows = [["k", "m", "value"]] + [
        [k, m, str(v)] for k, row in enumerate(rows) for m, v in enumerate(row)
    ]
    _emit(args.format, record, text, csv_rows, out)
    return EXIT_OK


def _exp_generic(gamma: float, ordering: Ordering, max_m: int) -> OrderedExpansion:
    if ordering is Ordering.NORMAL:
        f = FunctionTable.from_function(lambda x: math.exp(-gamma * x), max_m, "float")
        return normal_function(f, max_m)
    g = FunctionTable.from_function(lambda u: math.exp(gamma * u), max_m + 1, "float")
    return antinormal_function(g, max_m)


def cmd_expand(args, out) -> int:
    ordering = Ordering(args.order)
    params = {"order": ordering.value}
    if args.power is not None:
        k = args.power
        params["power"] = k
        expansion = (normal_power if ordering is Ordering.NORMAL else antinormal_power)(k)
        oracle = rewrite(parse(f"n^{k}"), ordering)
        agrees = oracle == expansion.to_operator()
        record = {
            "command": "expand",
            "parameters": params,
            "exact": True,
            "coefficients": [scalar_json(c) for c in expansion.coefficients],
            "oracle": print_expr(oracle),
            "agrees": agrees,
        }
        text = f"n^{k} = {print_expr(expansion.to_operator())}\nagrees: {str(agrees).lower()}"
    else:
        gamma = args.exp
        params.update(exp=gamma, max_m=args.max_m)
        lemma = lemma1_coefficients if ordering is Ordering.NORMAL else lemma2_coefficients
        expansion = lemma(gamma, args.max_m)
        generic = _exp_generic(gamma, ordering, args.max_m)
        diff = max(abs(a - b) for a, b in zip(expansion.coefficients, generic.coefficients))
        agrees = diff <= LEMMA_TOL
        record = {
            "command": "expand",
            "parameters": params,
            "exact": False,
            "coefficients": [scalar_json(c) for c in expansion.coefficients],
            "difference_path": [scalar_json(c) for c in generic.coefficients],
            "max_abs_diff": diff,
            "agrees": agrees,
        }
        lines = [f"exp(-{fmt_float(gamma)} n), {ordering.value} order"]
        lines += [f"{m} {fmt_float(c)}" for m, c in enumerate(expansion.coefficients)]
        lines.append(f"agrees: {str(agrees).lower()} (max diff {fmt_float(diff)})")
        text = "\n".join(lines)
    csv_rows = [["m", "coefficient"]] + [
        [m, scalar_text(c)] for m, c in enumerate(expansion.coefficients)
    ]
    _emit(args.format, record, text, csv_rows, out)
    return EXIT_OK if agrees else EXIT_FAILED


def cmd_rewrite(args, out) -> int:
    try:
        words = parse(args.expr)
    except ParseError as err:
        print(f"ordcalc rewrite: {err}", file=sys.stderr)
        return EXIT_USAGE
    e = rewrite(words, args.order)
    result = print_expr(e)
    terms = sorted(e.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0], -kv[0][1]))
    record = {
        "command": "rewrite",
        "parameters": {"expr": args.expr, "order": args.order},
        "exact": True,
        "result": result,
        "terms": [{"p": p, "q": q, "coefficient": str(c)} for (p, q), c in terms],
    }
    csv_rows = [["p", "q", "coefficient"]] + [[p, q, str(c)] for (p, q), c in terms]
    _emit(args.format, record, result, csv_rows, out)
    return EXIT_OK


def _check_expect_flags(parser, args) -> None:
    has_alpha = args.alpha_re is not None or args.alpha_im is not None
    if args.state == "coherent":
        if args.n is not None:
            parser.error("--n only applies to --state fock")
    elif has_alpha:
        parser.error("--alpha-re/--alpha-im only apply to --state coherent")
    elif args.n is None:
        parser.error("--state fock requires --n")
    if args.dim < 1 or args.max_m < 0:
        parser.error("--dim must be positive and --max-m nonnegative")
    if args.order is not None and args.method != "matrix":
        parser.error("--order only applies to --method matrix")


def cmd_expect(args, out) -> int:
    gamma = args.gamma
    params: dict = {"state": args.state, "gamma": gamma, "method": args.method}
    if args.state == "coherent":
        alpha = complex(args.alpha_re or 0.0, args.alpha_im or 0.0)
        params.update(alpha_re=alpha.real, alpha_im=alpha.imag)
    else:
        alpha = None
        params["n"] = args.n
    report = None
    imag = 0.0

    if args.method == "closed":
        if alpha is not None:
            value = fock.expect_exp_coherent_closed(gamma, alpha)
        else:
            value = fock.expect_exp_fock_closed(gamma, args.n)
    elif args.method == "series":
        params["max_m"] = args.max_m
        if alpha is not None:
            value, report = fock.expect_exp_coherent_series(gamma, alpha, args.max_m)
        else:
            value, report = fock.expect_exp_fock_series(gamma, args.n, args.max_m)
    else:
        ordering = Ordering(args.order or "normal")
        params.update(dim=args.dim, max_m=args.max_m, order=ordering.value)
        space = fock.FockSpace(args.dim)
        try:
            psi = (
                fock.coherent_state(space, alpha)
                if alpha is not None
                else fock.fock_state(space, args.n)
            )
            lemma = lemma1_coefficients if ordering is Ordering.NORMAL else lemma2_coefficients
            z, report = fock.matrix_expectation_report(lemma(gamma, args.max_m), psi, space)
        except fock.TruncationError as err:
            print(f"ordcalc expect: {err}", file=sys.stderr)
            return EXIT_TRUNCATION
        value, imag = z.real, z.imag

    record = {"command": "expect", "parameters": params, "exact": False, "value": value}
    if imag:
        record["imag"] = imag
    text = fmt_float(value)
    if report is not None:
        record.update(report.as_dict())
        state = "diverged" if report.diverged else ("converged" if report.converged else "not converged")
        text += f" {state}"
    converged = "" if report is None else str(report.converged).lower()
    keys = [k for k in params if k not in ("state", "method")]
    csv_rows = [
        ["state", "method", *keys, "value", "converged"],
        [args.state, args.method, *(_csv_value(params[k]) for k in keys), fmt_float(value), converged],
    ]
    _emit(args.format, record, text, csv_rows, out)
    return EXIT_OK


def _csv_value(v):
    return fmt_float(v) if isinstance(v, float) else v


def cmd_verify(args, out) -> int:
    checks = verify.run(args.suite)
    passed = all(c.passed for c in checks)
    record = {
        "command": "verify",
        "parameters": {"suite": args.suite},
        "passed": passed,
        "checks": [c.as_dict() for c in checks],
    }
    text = "\n".join(
        f"{'PASS' if c.passed else 'FAIL'} {c.identity}: max error {fmt_float(c.max_error)}"
        f" (tol {fmt_float(c.tolerance)}, {c.cases} cases)"
        for c in checks
    )
    csv_rows = [["identity", "passed", "max_error", "tolerance"]] + [
        [c.identity, str(c.passed).lower(), fmt_float(c.max_error), fmt_float(c.tolerance)]
        for c in checks
    ]
    _emit(args.format, record, text, csv_rows, out)
    return EXIT_OK if passed else EXIT_FAILED


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    formats = ("text", "json", "csv")
    parser = argparse.ArgumentParser(
        prog="ordcalc",
        description="Normal and anti-normal ordering of functions of the number operator.",
    )
    parser.add_argument("--format", choices=formats, default="text")
    # Subcommands accept --format too; SUPPRESS keeps the global value when omitted.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=formats, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stirling", parents=[common], help="table of Stirling numbers S(k, m)")
    p.add_argument("--max-k", type=_nonneg_int, required=True)
    p.set_defaults(func=cmd_stirling)

    p = sub.add_parser("expand", parents=[common], help="ordered expansion of n^k or exp(-gamma n)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--power", type=_nonneg_int, metavar="K")
    src.add_argument("--exp", type=float, metavar="GAMMA")
    p.add_argument("--order", choices=[o.value for o in Ordering], default="normal")
    p.add_argument("--max-m", type=_nonneg_int, default=10)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("rewrite", parents=[common], help="canonical form of an operator expression")
    p.add_argument("--expr", required=True)
    p.add_argument("--order", choices=[o.value for o in Ordering], default="normal")
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("expect", parents=[common], help="<psi| exp(-gamma n) |psi>")
    p.add_argument("--state", choices=("coherent", "fock"), required=True)
    p.add_argument("--alpha-re", type=float)
    p.add_argument("--alpha-im", type=float)
    p.add_argument("--n", type=_nonneg_int)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--method", choices=("closed", "series", "matrix"), default="closed")
    p.add_argument("--dim", type=int, default=fock.DEFAULT_DIM)
    p.add_argument("--max-m", type=_nonneg_int, default=200)
    p.add_argument(
        "--order",
        choices=[o.value for o in Ordering],
        help="expansion applied by --method matrix (default normal)",
    )
    p.set_defaults(func=cmd_expect, check=_check_expect_flags, subparser=p)

    p = sub.add_parser("verify", parents=[common], help="run identity suites")
    p.add_argument("--suite", choices=("stirling", "lemmas", "fock", "all"), default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    check = getattr(args, "check", None)
    if check is not None:
        try:
            check(args.subparser, args)
        except SystemExit as exc:
            return int(exc.code or 0)
    return args.func(args, out)


if __name__ == "__main__":
    sys.exit(main())

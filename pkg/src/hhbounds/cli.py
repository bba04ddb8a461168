"""Command-line interface.

Exit codes: 0 success, 1 invocation/parse/domain error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import bounds as bnd
from .convexity import (
    FIRST, SECOND, ClassSpec, NegativeFunction, SamplingSpec,
    check_convex, check_membership, check_quasi_convex,
)
from .expr import EvalError, ParseError, compile_expr, parse
from .harness import (
    ConfigError, emit_report, load_config, power_of_abs, report_to_csv, report_to_json,
    run_sweep, standard_config, tightest_theorem, with_seed,
)
from .quadrature import (
    DEFAULT_TOL, ToleranceNotReached, WeightedProblem, integrate, verify_lemma1, weighted_integral,
)
from .specfun import DomainError, beta

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2

_THEOREMS = {
    "t1": "T1", "t2": "T2", "t3": "T3", "t4": "T4",
    "t5": "T5", "t5sharp": "T5_sharp", "t6": "T6", "hh": "HH",
}

_ERRORS = (
    ParseError, EvalError, DomainError, ToleranceNotReached, bnd.NegativeBracket,
    NegativeFunction, ConfigError, ValueError, OSError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for failed checks.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _human(value) -> str:
    if isinstance(value, bool):
        return "pass" if value else "FAIL"
    if isinstance(value, float):
        return format(value, ".12g")
    if value is None:
        return "-"
    return str(value)


def _machine(value):
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, bool):
        return "true" if value else "false"
    return "" if value is None else str(value)


def _emit(fmt: str, record: dict, out) -> None:
    if fmt == "json":
        out.write(json.dumps(record) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(record))
        w.writerow([_machine(v) for v in record.values()])
        out.write(buf.getvalue())
    else:
        width = max(len(k) for k in record)
        for k, v in record.items():
            out.write(f"{k:<{width}}  {_human(v)}\n")


def _sampling(args) -> SamplingSpec:
    return SamplingSpec(args.grid, args.trials, args.seed, args.violation_tol)


def _spec(args) -> ClassSpec:
    return ClassSpec(args.sense, args.s, args.alpha, args.m)


def _problem(args) -> WeightedProblem:
    return WeightedProblem(parse(args.f), args.a, args.b, args.p, args.q)


def _witness_fields(verdict) -> dict:
    w = verdict.witness
    if w is None:
        return {}
    return {"witness_x": w.x, "witness_y": w.y, "witness_mu": w.mu,
            "witness_lhs": w.lhs, "witness_rhs": w.rhs}


# ----------------------------------------------------------------------------
# Subcommands


def cmd_beta(args, out) -> int:
    value = beta(args.x, args.y)
    if args.format == "human":
        out.write(repr(value) + "\n")
    else:
        _emit(args.format, {"x": args.x, "y": args.y, "beta": value}, out)
    return EXIT_OK


def cmd_integrate(args, out) -> int:
    if args.p is not None or args.q is not None:
        prob = WeightedProblem(parse(args.f), args.a, args.b, args.p or 0.0, args.q or 0.0)
        res = weighted_integral(prob, args.tol)
    else:
        res = integrate(compile_expr(parse(args.f)), args.a, args.b, args.tol)
    _emit(args.format, {"value": res.value, "err_estimate": res.err_estimate, "evals": res.evals}, out)
    return EXIT_OK


def cmd_check_class(args, out) -> int:
    f = parse(args.f)
    sampling = _sampling(args)
    if args.kind == "class":
        verdict = check_membership(f, _spec(args), (args.lo, args.hi), sampling)
    elif args.kind == "quasi":
        verdict = check_quasi_convex(f, (args.lo, args.hi), sampling)
    else:
        verdict = check_convex(f, (args.lo, args.hi), sampling)
    record = {"status": verdict.status, "samples_checked": verdict.samples_checked}
    record.update(_witness_fields(verdict))
    _emit(args.format, record, out)
    return EXIT_OK


def cmd_verify_lemma(args, out) -> int:
    rep = verify_lemma1(_problem(args), args.tol)
    _emit(args.format, {
        "lhs": rep.lhs.value, "lhs_err": rep.lhs.err_estimate,
        "rhs": rep.rhs.value, "rhs_err": rep.rhs.err_estimate,
        "abs_diff": rep.abs_diff, "allowed": rep.allowed, "pass": rep.passed,
    }, out)
    return EXIT_OK if rep.passed else EXIT_FAILED


def _hh(args, out) -> int:
    res = bnd.hh_check(parse(args.f), args.a, args.b, args.tol)
    _emit(args.format, {
        "midpoint": res.midpoint, "mean_integral": res.mean_integral,
        "endpoint_avg": res.endpoint_avg, "mean_err": res.mean_err,
        "left_pass": res.left_pass, "right_pass": res.right_pass,
    }, out)
    return EXIT_OK if res.left_pass and res.right_pass else EXIT_FAILED


def cmd_hh(args, out) -> int:
    return _hh(args, out)


def cmd_bound(args, out) -> int:
    tag = _THEOREMS[args.theorem]
    if tag == "HH":
        return _hh(args, out)
    prob = _problem(args)
    exponent = None
    if tag in ("T2", "T5", "T5_sharp"):
        exponent = args.k
        power = args.k / (args.k - 1.0) if args.k > 1.0 else None
    elif tag in ("T3", "T6"):
        exponent = args.l
        power = args.l
    else:
        power = None if tag == "T1" else 1.0
    spec = _spec(args) if tag in ("T4", "T5", "T5_sharp", "T6") else None
    value = bnd.compute_bound(tag, prob, spec, exponent).value

    sampling = _sampling(args)
    g = power_of_abs(prob.f, power)
    if spec is None:
        verdict = check_quasi_convex(g, (prob.a, prob.b), sampling)
    else:
        verdict = check_membership(g, spec, (prob.a, prob.b), sampling)

    res = weighted_integral(prob, args.tol)
    passed = res.value <= value + res.err_estimate + 1e-9 * max(abs(res.value), abs(value), 1.0)
    record = {
        "theorem": tag, "bound": value, "lhs": res.value, "lhs_err": res.err_estimate,
        "slack_ratio": res.value / value if value > 0 else None,
        "membership": verdict.status, "pass": passed,
    }
    record.update(_witness_fields(verdict))
    _emit(args.format, record, out)
    # A failed inequality only counts when the hypothesis held on the samples.
    return EXIT_FAILED if not passed and verdict.satisfied else EXIT_OK


def cmd_sweep(args, out) -> int:
    if args.config:
        config = load_config(args.config)
    else:
        config = standard_config()
    if args.seed is not None:
        config = with_seed(config, args.seed)
    report = run_sweep(config)
    if args.output:
        emit_report(report, "json" if args.format == "json" else "csv", args.output)
    elif args.format == "json":
        out.write(report_to_json(report))
    elif args.format == "csv":
        out.write(report_to_csv(report))
    if args.format == "human" or args.output:
        out.write(report.summary() + "\n")
        for row in report.failures:
            out.write(f"FAIL {row.function} [{row.a}, {row.b}] p={row.p} q={row.q} "
                      f"{row.theorem} exponent={row.exponent} spec={row.spec} "
                      f"lhs={row.lhs!r} bound={row.bound!r}\n")
        if args.tightest:
            entries, omitted = tightest_theorem(report)
            for e in entries:
                spec = f"{e.spec.sense}:{e.spec.s}:{e.spec.alpha}:{e.spec.m}" if e.spec else "-"
                exp = "" if e.exponent is None else f" ({e.exponent:g})"
                out.write(f"tightest {e.function} [{e.a:g}, {e.b:g}] p={e.p:g} q={e.q:g} "
                          f"spec={spec}: {e.theorem}{exp} slack={_human(e.slack_ratio)}\n")
            out.write(f"groups without a passing row: {omitted}\n")
    return EXIT_FAILED if report.failures else EXIT_OK


# ----------------------------------------------------------------------------
# Argument parsing


def _add_format(p) -> None:
    p.add_argument("--format", choices=("human", "csv", "json"), default="human")


def _add_problem(p, weighted=True) -> None:
    p.add_argument("--f", required=True, help="expression in x, e.g. 'x^2 + exp(x)'")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    if weighted:
        p.add_argument("--p", type=float, required=True)
        p.add_argument("--q", type=float, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)


def _add_spec(p) -> None:
    p.add_argument("--sense", choices=(FIRST, SECOND), default=FIRST)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0)


def _add_sampling(p) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=21, help="grid points per axis")
    p.add_argument("--trials", type=int, default=1000, help="random triples after the grid")
    p.add_argument("--violation-tol", type=float, default=1e-9)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hhbounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("beta", help="Euler Beta function B(X, Y)")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    _add_format(p)
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("integrate", help="adaptive integral of f over [a, b] (weighted if --p/--q given)")
    p.add_argument("--f", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_format(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("check-class", help="sampling-based convexity class membership")
    p.add_argument("--f", required=True)
    p.add_argument("--kind", choices=("class", "convex", "quasi"), default="class")
    _add_spec(p)
    p.add_argument("--range", dest="range_", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--xmax", type=float, help="shorthand for --range 0 XMAX")
    _add_sampling(p)
    _add_format(p)
    p.set_defaults(func=cmd_check_class)

    p = sub.add_parser("verify-lemma", help="check the [a, b] <-> [0, 1] weighted integral identity")
    _add_problem(p)
    _add_format(p)
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("bound", help="evaluate one bound against the weighted integral")
    p.add_argument("--theorem", choices=tuple(_THEOREMS), required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--l", type=float, default=1.0)
    _add_spec(p)
    _add_sampling(p)
    _add_format(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("hh", help="two-sided Hermite-Hadamard check")
    _add_problem(p, weighted=False)
    _add_format(p)
    p.set_defaults(func=cmd_hh)

    p = sub.add_parser("sweep", help="run a verification sweep")
    p.add_argument("--config", help="sweep config file; default is the standard sweep")
    p.add_argument("--seed", type=int, help="override the sampling seed")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--tightest", action="store_true", help="print the tightest theorem per group")
    _add_format(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "check-class":
            if args.range_ is not None:
                args.lo, args.hi = args.range_
            elif args.xmax is not None:
                args.lo, args.hi = 0.0, args.xmax
            else:
                parser.error("check-class needs --range LO HI or --xmax X")
        return args.func(args, out)
    except _UsageError as e:
        err.write(f"error: {e}\n")
        return EXIT_ERROR
    except _ERRORS as e:
        err.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""
Verification sweeps: membership check, weighted integral and closed-form
bound for every configuration, collected into a flat report.

Config file format (``configparser``, single ``[sweep]`` section)::

    [sweep]
    # name = expression, one per line
    functions =
        lin = x
        sq = x^2
    intervals = 0:1, 0:2, 1:3            # a:b pairs
    p = 0.5, 1, 2, 3
    q = 0.5, 1, 2, 3
    specs = first:1:1:1, first:0.5:1:0.5 # sense:s:alpha:m
    k = 1.5, 2, 5
    l = 1, 2, 4
    grid = 21                            # optional from here on
    random_trials = 1000
    seed = 0
    violation_tolerance = 1e-9
    quad_tol = 1e-10
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .bounds import NegativeBracket, compute_bound
from .convexity import (
    FIRST, SATISFIED, ClassSpec, MembershipVerdict, NegativeFunction, SamplingSpec, Witness,
    check_membership, check_quasi_convex,
)
from .expr import BinOp, Call, EvalError, ExprAst, Num, ParseError, parse, to_source
from .quadrature import DEFAULT_TOL, QuadResult, ToleranceNotReached, WeightedProblem, weighted_integral
from .specfun import DomainError

__all__ = [
    "COLUMNS", "TAG_ORDER", "SweepConfig", "BoundRow", "BoundReport", "ConfigError",
    "run_sweep", "emit_report", "report_to_csv", "report_to_json", "tightest_theorem",
    "load_config", "parse_config", "standard_config", "power_of_abs",
]

COLUMNS = (
    "function", "a", "b", "p", "q", "sense", "s", "alpha", "m", "theorem", "exponent",
    "membership", "lhs", "lhs_err", "bound", "slack_ratio", "pass", "skip_reason",
)

# Tie-break order for tightest_theorem: earlier wins.
TAG_ORDER = ("T4", "T5_sharp", "T5", "T6", "T1", "T2", "T3")

QUASI_TAGS = ("T1", "T2", "T3")
CLASS_TAGS = ("T4", "T5", "T5_sharp", "T6")

_ROW_ERRORS = (EvalError, ToleranceNotReached, NegativeBracket, NegativeFunction, DomainError)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    functions: tuple  # of (name, ExprAst)
    intervals: tuple  # of (a, b)
    p_values: tuple
    q_values: tuple
    class_specs: tuple
    k_values: tuple
    l_values: tuple
    sampling: SamplingSpec = SamplingSpec()
    quad_tol: float = DEFAULT_TOL

    def __post_init__(self):
        for name in ("functions", "intervals", "p_values", "q_values", "class_specs", "k_values", "l_values"):
            value = tuple(getattr(self, name))
            object.__setattr__(self, name, value)
            if not value:
                raise ConfigError(f"{name} must be nonempty")
        for a, b in self.intervals:
            if not 0.0 <= a < b < math.inf:
                raise ConfigError(f"interval [{a}, {b}] violates 0 <= a < b")
        if any(not v > 0 for v in self.p_values + self.q_values):
            raise ConfigError("p and q values must be positive")
        if any(not k > 1 for k in self.k_values):
            raise ConfigError("k values must exceed 1")
        if any(not l >= 1 for l in self.l_values):
            raise ConfigError("l values must be at least 1")
        if not self.quad_tol > 0:
            raise ConfigError("quad_tol must be positive")
        names = [n for n, _ in self.functions]
        if len(set(names)) != len(names):
            raise ConfigError("function names must be unique")


@dataclass
class BoundRow:
    function: str
    a: float
    b: float
    p: float
    q: float
    spec: ClassSpec | None
    theorem: str
    exponent: float | None
    membership: str
    lhs: float | None = None
    lhs_err: float | None = None
    bound: float | None = None
    passed: bool | None = None
    skip_reason: str = ""
    witness: Witness | None = None
    conjectural: bool = False

    @property
    def slack_ratio(self) -> float | None:
        if self.lhs is None or self.bound is None or not self.bound > 0:
            return None
        return self.lhs / self.bound

    @property
    def skipped(self) -> bool:
        return self.passed is None

    def record(self) -> dict:
        spec = self.spec
        return {
            "function": self.function,
            "a": self.a,
            "b": self.b,
            "p": self.p,
            "q": self.q,
            "sense": spec.sense if spec else None,
            "s": spec.s if spec else None,
            "alpha": spec.alpha if spec else None,
            "m": spec.m if spec else None,
            "theorem": self.theorem,
            "exponent": self.exponent,
            "membership": self.membership,
            "lhs": self.lhs,
            "lhs_err": self.lhs_err,
            "bound": self.bound,
            "slack_ratio": self.slack_ratio,
            "pass": self.passed,
            "skip_reason": self.skip_reason or None,
        }


@dataclass
class BoundReport:
    rows: list = field(default_factory=list)

    def counted(self) -> list:
        """Rows that enter the pass/fail totals (evaluated, not conjectural)."""
        return [r for r in self.rows if not r.skipped and not r.conjectural]

    @property
    def failures(self) -> list:
        return [r for r in self.counted() if r.passed is False]

    @property
    def n_pass(self) -> int:
        return sum(1 for r in self.counted() if r.passed)

    @property
    def n_skipped(self) -> int:
        return sum(1 for r in self.rows if r.skipped)

    def summary(self) -> str:
        conj = sum(1 for r in self.rows if r.conjectural and not r.skipped)
        return (f"{len(self.rows)} rows: {self.n_pass} pass, {len(self.failures)} fail, "
                f"{self.n_skipped} skipped, {conj} conjectural")


def power_of_abs(f: ExprAst, r: float | None) -> ExprAst:
    """|f|^r as an expression tree; r=None means f itself."""
    if r is None:
        return f
    g = Call("abs", (f,))
    return g if r == 1.0 else BinOp("^", g, Num(float(r)))


def _bound_passes(lhs: float, lhs_err: float, bound: float) -> bool:
    return lhs <= bound + lhs_err + 1e-9 * max(abs(lhs), abs(bound), 1.0)


def _witness_text(w: Witness) -> str:
    return f"membership violated: x={w.x!r}, y={w.y!r}, mu={w.mu!r}, lhs={w.lhs!r}, rhs={w.rhs!r}"


class _Sweep:
    def __init__(self, config: SweepConfig):
        self.config = config
        self._lhs: dict = {}
        self._quasi: dict = {}
        self._member: dict = {}

    def lhs(self, fi: int, prob: WeightedProblem, tol: float) -> QuadResult:
        key = (fi, prob.a, prob.b, prob.p, prob.q, tol)
        if key not in self._lhs:
            try:
                self._lhs[key] = weighted_integral(prob, tol)
            except _ROW_ERRORS as err:
                self._lhs[key] = err
        res = self._lhs[key]
        if isinstance(res, Exception):
            raise res
        return res

    def _verdict(self, cache: dict, key, compute) -> MembershipVerdict:
        if key not in cache:
            try:
                cache[key] = compute()
            except _ROW_ERRORS as err:
                cache[key] = err
        res = cache[key]
        if isinstance(res, Exception):
            raise res
        return res

    def quasi(self, fi: int, interval, power) -> MembershipVerdict:
        f = self.config.functions[fi][1]
        return self._verdict(
            self._quasi, (fi, interval, power),
            lambda: check_quasi_convex(power_of_abs(f, power), interval, self.config.sampling),
        )

    def member(self, fi: int, interval, power, spec: ClassSpec) -> MembershipVerdict:
        f = self.config.functions[fi][1]
        return self._verdict(
            self._member, (fi, interval, power, spec),
            lambda: check_membership(power_of_abs(f, power), spec, interval, self.config.sampling),
        )

    def evaluate_row(self, row: BoundRow, fi: int, prob: WeightedProblem, power, spec) -> BoundRow:
        interval = (prob.a, prob.b)
        try:
            if spec is None:
                verdict = self.quasi(fi, interval, power)
            else:
                verdict = self.member(fi, interval, power, spec)
        except _ROW_ERRORS as err:
            row.membership = "error"
            row.skip_reason = f"{type(err).__name__}: {err}"
            return row
        row.membership = verdict.status
        if not verdict.satisfied:
            row.witness = verdict.witness
            row.skip_reason = _witness_text(verdict.witness)
            return row
        tol = self.config.quad_tol
        try:
            # Conjectural rows reuse the first-sense closed form unchanged.
            formula_spec = replace(spec, sense=FIRST) if row.conjectural else spec
            bound = compute_bound(row.theorem, prob, formula_spec, row.exponent).value
            res = self.lhs(fi, prob, tol)
            ok = _bound_passes(res.value, res.err_estimate, bound)
            if not ok:
                # Confirm at a tighter tolerance before recording a failure.
                res = self.lhs(fi, prob, tol / 10.0)
                ok = _bound_passes(res.value, res.err_estimate, bound)
        except _ROW_ERRORS as err:
            row.skip_reason = f"{type(err).__name__}: {err}"
            return row
        row.lhs, row.lhs_err, row.bound, row.passed = res.value, res.err_estimate, bound, ok
        if row.conjectural:
            row.skip_reason = "conjectural=true"
        return row


def _row_plan(config: SweepConfig):
    """Yield (fi, prob, spec, tag, exponent, power) in report order."""
    for fi, (name, f) in enumerate(config.functions):
        for a, b in config.intervals:
            for p in config.p_values:
                for q in config.q_values:
                    prob = WeightedProblem(f, a, b, p, q)
                    yield fi, prob, None, "T1", None, None
                    for k in config.k_values:
                        yield fi, prob, None, "T2", k, k / (k - 1.0)
                    for l in config.l_values:
                        yield fi, prob, None, "T3", l, float(l)
                    for spec in config.class_specs:
                        yield fi, prob, spec, "T4", None, 1.0
                        for k in config.k_values:
                            yield fi, prob, spec, "T5", k, k / (k - 1.0)
                        for k in config.k_values:
                            yield fi, prob, spec, "T5_sharp", k, k / (k - 1.0)
                        for l in config.l_values:
                            yield fi, prob, spec, "T6", l, float(l)


def run_sweep(config: SweepConfig) -> BoundReport:
    """Evaluate every configuration of ``config``.

    T1 hypothesizes quasi-convexity of f, T2/T3 of |f|^(k/(k-1)) and |f|^l;
    T4, T5 (both forms) and T6 hypothesize class membership of |f|,
    |f|^(k/(k-1)) and |f|^l.  Membership is checked on [a, b] for each row
    before the bound is compared.  Row-level errors become skip reasons.
    """
    sweep = _Sweep(config)
    report = BoundReport()
    for fi, prob, spec, tag, exponent, power in _row_plan(config):
        row = BoundRow(
            function=config.functions[fi][0], a=prob.a, b=prob.b, p=prob.p, q=prob.q,
            spec=spec, theorem=tag, exponent=exponent, membership="",
            conjectural=spec is not None and spec.sense != FIRST,
        )
        report.rows.append(sweep.evaluate_row(row, fi, prob, power, spec))
    return report


# ----------------------------------------------------------------------------
# Output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def report_to_csv(report: BoundReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in report.rows:
        rec = row.record()
        writer.writerow([_fmt(rec[c]) for c in COLUMNS])
    return buf.getvalue()


def report_to_json(report: BoundReport) -> str:
    return json.dumps([row.record() for row in report.rows], indent=1) + "\n"


def emit_report(report: BoundReport, format: str, path) -> None:
    if format == "csv":
        text = report_to_csv(report)
    elif format == "json":
        text = report_to_json(report)
    else:
        raise ValueError(f"unknown report format {format!r}")
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as err:
        raise OSError(f"cannot write report to {path}: {err}") from err


@dataclass(frozen=True)
class TightestEntry:
    function: str
    a: float
    b: float
    p: float
    q: float
    spec: ClassSpec | None
    theorem: str
    exponent: float | None
    slack_ratio: float


def tightest_theorem(report: BoundReport) -> tuple[list, int]:
    """Per (function, interval, p, q, spec) group, the passing row with the
    largest slack ratio.  Quasi-convex rows (T1-T3) do not depend on the
    class spec and join every spec group of their problem.

    Returns (entries, omitted) where omitted counts groups without any
    passing row.  Ties (relative 1e-12) go to the earlier tag in TAG_ORDER,
    then to the earlier row.
    """
    groups: dict = {}
    quasi: dict = {}
    order: list = []
    for row in report.rows:
        pkey = (row.function, row.a, row.b, row.p, row.q)
        if row.spec is None:
            quasi.setdefault(pkey, []).append(row)
            if (pkey, None) not in groups:
                groups[(pkey, None)] = []
                order.append((pkey, None))
        else:
            key = (pkey, row.spec)
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(row)
    # A problem that has spec groups does not also get a spec-less group.
    with_spec = {pkey for pkey, spec in order if spec is not None}
    entries = []
    omitted = 0
    for pkey, spec in order:
        if spec is None and pkey in with_spec:
            continue
        candidates = [
            r for r in quasi.get(pkey, []) + groups[(pkey, spec)]
            if r.passed and r.slack_ratio is not None
        ]
        if not candidates:
            omitted += 1
            continue
        best = max(r.slack_ratio for r in candidates)
        tied = [r for r in candidates if math.isclose(r.slack_ratio, best, rel_tol=1e-12, abs_tol=0.0)]
        winner = min(tied, key=lambda r: TAG_ORDER.index(r.theorem))
        entries.append(TightestEntry(*pkey, spec, winner.theorem, winner.exponent, winner.slack_ratio))
    return entries, omitted


# ----------------------------------------------------------------------------
# Configuration


def _floats(text: str, key: str) -> tuple:
    try:
        return tuple(float(v) for v in text.replace("\n", ",").split(",") if v.strip())
    except ValueError as err:
        raise ConfigError(f"{key}: {err}") from None


def _parse_functions(text: str) -> tuple:
    out = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        name, sep, source = line.partition("=")
        if not sep:
            name, source = line, line
        try:
            out.append((name.strip(), parse(source.strip())))
        except ParseError as err:
            raise ConfigError(f"function {name.strip()!r}: {err}") from None
    return tuple(out)


def _parse_specs(text: str) -> tuple:
    specs = []
    for item in text.replace("\n", ",").split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 4:
            raise ConfigError(f"spec {item!r} is not sense:s:alpha:m")
        try:
            specs.append(ClassSpec(parts[0], float(parts[1]), float(parts[2]), float(parts[3])))
        except ValueError as err:
            raise ConfigError(f"spec {item!r}: {err}") from None
    return tuple(specs)


def _parse_intervals(text: str) -> tuple:
    out = []
    for item in text.replace("\n", ",").split(","):
        item = item.strip()
        if not item:
            continue
        a, sep, b = item.partition(":")
        try:
            out.append((float(a), float(b)))
        except ValueError:
            raise ConfigError(f"interval {item!r} is not a:b") from None
    return tuple(out)


_KNOWN_KEYS = {
    "functions", "intervals", "p", "q", "specs", "k", "l",
    "grid", "random_trials", "seed", "violation_tolerance", "quad_tol",
}


def parse_config(text: str) -> SweepConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(str(err)) from None
    if "sweep" not in parser:
        raise ConfigError("missing [sweep] section")
    sec = parser["sweep"]
    unknown = set(sec) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    missing = {"functions", "intervals", "p", "q", "specs", "k", "l"} - set(sec)
    if missing:
        raise ConfigError(f"missing keys: {', '.join(sorted(missing))}")
    try:
        sampling = SamplingSpec(
            grid_points_per_axis=sec.getint("grid", 21),
            random_trials=sec.getint("random_trials", 1000),
            rng_seed=sec.getint("seed", 0),
            violation_tolerance=sec.getfloat("violation_tolerance", 1e-9),
        )
        quad_tol = sec.getfloat("quad_tol", DEFAULT_TOL)
    except ValueError as err:
        raise ConfigError(str(err)) from None
    return SweepConfig(
        functions=_parse_functions(sec["functions"]),
        intervals=_parse_intervals(sec["intervals"]),
        p_values=_floats(sec["p"], "p"),
        q_values=_floats(sec["q"], "q"),
        class_specs=_parse_specs(sec["specs"]),
        k_values=_floats(sec["k"], "k"),
        l_values=_floats(sec["l"], "l"),
        sampling=sampling,
        quad_tol=quad_tol,
    )


def load_config(path) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    return parse_config(text)


STANDARD_FUNCTIONS = ("x", "x^2", "x^3", "exp(x)", "abs(x - 0.5)", "x^0.5")


def standard_config(seed: int = 0) -> SweepConfig:
    """The reference domination sweep."""
    specs = tuple(
        ClassSpec(FIRST, s, alpha, m)
        for s in (0.25, 0.5, 1.0)
        for alpha in (0.5, 1.0)
        for m in (0.5, 1.0)
    )
    return SweepConfig(
        functions=tuple((src, parse(src)) for src in STANDARD_FUNCTIONS),
        intervals=((0.0, 1.0), (0.0, 2.0), (1.0, 3.0)),
        p_values=(0.5, 1.0, 2.0, 3.0),
        q_values=(0.5, 1.0, 2.0, 3.0),
        class_specs=specs,
        k_values=(1.5, 2.0, 5.0),
        l_values=(1.0, 2.0, 4.0),
        sampling=SamplingSpec(rng_seed=seed),
    )


def with_seed(config: SweepConfig, seed: int) -> SweepConfig:
    return replace(config, sampling=replace(config.sampling, rng_seed=seed))

"""
Closed-form upper bounds for the weighted integral

    L = int_a^b (x - a)^p (b - x)^q f(x) dx

under quasi-convexity (T1-T3) and first-sense s-(alpha, m)-convexity
(T4-T6), plus the two-sided Hermite-Hadamard check.

All bounds are written as ``scale * (...)`` with scale = (b - a)^(p+q+1).
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .convexity import FIRST, ClassSpec
from .expr import ExprAst, compile_expr, evaluate
from .quadrature import DEFAULT_TOL, WeightedProblem, integrate
from .specfun import DomainError, beta

__all__ = [
    "TAGS", "BoundValue", "HHResult", "NegativeBracket",
    "hh_check", "quasi_bound_basic", "quasi_bound_holder", "quasi_bound_power_mean",
    "kms1_bound", "kms1_bound_holder", "kms1_bound_holder_sharp", "kms1_bound_power_mean",
    "compute_bound",
]

TAGS = ("HH_left", "HH_right", "T1", "T2", "T3", "T4", "T5", "T5_sharp", "T6")


class NegativeBracket(ArithmeticError):
    """The bracket raised to 1/l in T6 is negative."""

    def __init__(self, bracket: float):
        self.bracket = bracket
        super().__init__(f"T6 bracket is negative ({bracket!r}); cannot take the 1/l power")


@dataclass(frozen=True)
class BoundValue:
    value: float
    theorem_tag: str
    inputs_echo: tuple

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ArithmeticError(f"{self.theorem_tag} bound is not finite: {self.value!r}")


def _check_k(k: float) -> float:
    if not k > 1.0:
        raise DomainError(f"Holder exponent k must exceed 1, got {k!r}")
    return float(k)


def _check_l(l: float) -> float:
    if not l >= 1.0:
        raise DomainError(f"power-mean exponent l must be at least 1, got {l!r}")
    return float(l)


def _check_first(spec: ClassSpec) -> None:
    if spec.sense != FIRST:
        raise ValueError("the K_{m,1} bounds require a first-sense class spec")


def _endpoints(prob: WeightedProblem) -> tuple[float, float]:
    return evaluate(prob.f, prob.a), evaluate(prob.f, prob.b)


def _endpoints_m(prob: WeightedProblem, spec: ClassSpec) -> tuple[float, float]:
    """|f(a)| and |f(b/m)|."""
    return abs(evaluate(prob.f, prob.a)), abs(evaluate(prob.f, prob.b / spec.m))


# ----------------------------------------------------------------------------
# Quasi-convex bounds


def quasi_bound_basic(prob: WeightedProblem) -> BoundValue:
    """T1: scale * B(p+1, q+1) * max{f(a), f(b)}."""
    fa, fb = _endpoints(prob)
    value = prob.scale * beta(prob.p + 1.0, prob.q + 1.0) * max(fa, fb)
    return BoundValue(value, "T1", (prob,))


def quasi_bound_holder(prob: WeightedProblem, k: float) -> BoundValue:
    """T2: scale * B(kp+1, kq+1)^(1/k) * max{|f(a)|^k', |f(b)|^k'}^(1/k'), k' = k/(k-1)."""
    k = _check_k(k)
    kc = k / (k - 1.0)
    fa, fb = _endpoints(prob)
    top = max(abs(fa) ** kc, abs(fb) ** kc)
    value = prob.scale * beta(k * prob.p + 1.0, k * prob.q + 1.0) ** (1.0 / k) * top ** ((k - 1.0) / k)
    return BoundValue(value, "T2", (prob, k))


def quasi_bound_power_mean(prob: WeightedProblem, l: float) -> BoundValue:
    """T3: scale * B(p+1, q+1) * max{|f(a)|^l, |f(b)|^l}^(1/l)."""
    l = _check_l(l)
    fa, fb = _endpoints(prob)
    top = max(abs(fa) ** l, abs(fb) ** l)
    value = prob.scale * beta(prob.p + 1.0, prob.q + 1.0) * top ** (1.0 / l)
    return BoundValue(value, "T3", (prob, l))


# ----------------------------------------------------------------------------
# K_{m,1}^{alpha,s} bounds


def kms1_bound(prob: WeightedProblem, spec: ClassSpec) -> BoundValue:
    """T4: scale * [B(q+as+1, p+1)(|f(a)| - m|f(b/m)|) + m B(q+1, p+1) |f(b/m)|]."""
    _check_first(spec)
    fa, fbm = _endpoints_m(prob, spec)
    p, q, m = prob.p, prob.q, spec.m
    as_ = spec.alpha * spec.s
    bracket = beta(q + as_ + 1.0, p + 1.0) * (fa - m * fbm) + m * beta(q + 1.0, p + 1.0) * fbm
    return BoundValue(prob.scale * bracket, "T4", (prob, spec))


def kms1_bound_holder(prob: WeightedProblem, spec: ClassSpec, k: float) -> BoundValue:
    """T5 as stated: the t-integral of the class combination is relaxed to
    B(as+1, 1) * (|f(a)|^k' + m |f(b/m)|^k')."""
    _check_first(spec)
    k = _check_k(k)
    kc = k / (k - 1.0)
    fa, fbm = _endpoints_m(prob, spec)
    p, q, m = prob.p, prob.q, spec.m
    as_ = spec.alpha * spec.s
    value = (
        prob.scale
        * beta(as_ + 1.0, 1.0) ** ((k - 1.0) / k)
        * beta(q * k + 1.0, p * k + 1.0) ** (1.0 / k)
        * (fa ** kc + m * fbm ** kc) ** ((k - 1.0) / k)
    )
    return BoundValue(value, "T5", (prob, spec, k))


def kms1_bound_holder_sharp(prob: WeightedProblem, spec: ClassSpec, k: float) -> BoundValue:
    """T5 with the t-integral evaluated exactly:
    int_0^1 t^as dt = 1/(as+1) and int_0^1 (1 - t^as) dt = as/(as+1)."""
    _check_first(spec)
    k = _check_k(k)
    kc = k / (k - 1.0)
    fa, fbm = _endpoints_m(prob, spec)
    p, q, m = prob.p, prob.q, spec.m
    as_ = spec.alpha * spec.s
    bracket = fa ** kc / (as_ + 1.0) + m * fbm ** kc * (as_ / (as_ + 1.0))
    value = prob.scale * beta(q * k + 1.0, p * k + 1.0) ** (1.0 / k) * bracket ** ((k - 1.0) / k)
    return BoundValue(value, "T5_sharp", (prob, spec, k))


def kms1_bound_power_mean(prob: WeightedProblem, spec: ClassSpec, l: float) -> BoundValue:
    """T6: scale * B(q+1, p+1)^((l-1)/l) * [B(q+as+1, p+1)(|f(a)|^l - m|f(b/m)|^l)
    + m B(q+1, p+1) |f(b/m)|^l]^(1/l).  Raises NegativeBracket if [...] < 0."""
    _check_first(spec)
    l = _check_l(l)
    fa, fbm = _endpoints_m(prob, spec)
    p, q, m = prob.p, prob.q, spec.m
    as_ = spec.alpha * spec.s
    fal, fbl = fa ** l, fbm ** l
    b_full = beta(q + 1.0, p + 1.0)
    b_part = beta(q + as_ + 1.0, p + 1.0)
    bracket = b_part * (fal - m * fbl) + m * b_full * fbl
    if bracket < 0.0:
        # At alpha*s = 0 the two Beta values coincide and the bracket is an
        # exact zero up to cancellation; only a negative beyond that is real.
        noise = 8.0 * sys.float_info.epsilon * (b_part * (fal + m * fbl) + m * b_full * fbl)
        if bracket < -noise:
            raise NegativeBracket(bracket)
        bracket = 0.0
    value = prob.scale * b_full ** ((l - 1.0) / l) * bracket ** (1.0 / l)
    return BoundValue(value, "T6", (prob, spec, l))


def compute_bound(tag: str, prob: WeightedProblem, spec: ClassSpec | None = None,
                  exponent: float | None = None) -> BoundValue:
    """Dispatch on a theorem tag (T1..T6, T5_sharp)."""
    if tag == "T1":
        return quasi_bound_basic(prob)
    if tag == "T2":
        return quasi_bound_holder(prob, exponent)
    if tag == "T3":
        return quasi_bound_power_mean(prob, exponent)
    if tag == "T4":
        return kms1_bound(prob, spec)
    if tag == "T5":
        return kms1_bound_holder(prob, spec, exponent)
    if tag == "T5_sharp":
        return kms1_bound_holder_sharp(prob, spec, exponent)
    if tag == "T6":
        return kms1_bound_power_mean(prob, spec, exponent)
    raise ValueError(f"unknown theorem tag {tag!r}")


# ----------------------------------------------------------------------------
# Hermite-Hadamard


@dataclass(frozen=True)
class HHResult:
    midpoint: float
    mean_integral: float
    endpoint_avg: float
    mean_err: float
    slack: float
    left_pass: bool
    right_pass: bool

    @property
    def reversed_left_pass(self) -> bool:
        """midpoint >= mean, the concave direction."""
        return self.mean_integral <= self.midpoint + self.slack

    @property
    def reversed_right_pass(self) -> bool:
        """mean >= endpoint average, the concave direction."""
        return self.endpoint_avg <= self.mean_integral + self.slack


def hh_check(f: ExprAst, a: float, b: float, tol: float = DEFAULT_TOL) -> HHResult:
    """f((a+b)/2) <= mean of f over [a, b] <= (f(a) + f(b))/2, with quadrature slack."""
    if not a < b:
        raise ValueError(f"need a < b, got [{a!r}, {b!r}]")
    g = compile_expr(f)
    width = b - a
    res = integrate(g, a, b, tol)
    mean = res.value / width
    mean_err = res.err_estimate / width
    mid = evaluate(f, 0.5 * (a + b))
    avg = 0.5 * (evaluate(f, a) + evaluate(f, b))
    slack = mean_err + 1e-12 * max(abs(mid), abs(mean), abs(avg), 1.0)
    return HHResult(mid, mean, avg, mean_err, slack, mid <= mean + slack, mean <= avg + slack)

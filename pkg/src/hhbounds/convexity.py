"""
Sampling-based membership checks for convex, quasi-convex and
s-(alpha, m)-convex functions.

A ``violated`` verdict carries a witness triple that can be re-checked
independently.  ``satisfied_on_samples`` is evidence, not proof.
"""

from __future__ import annotations

import math
from functools import partial
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .expr import ExprAst, compile_expr
from .expr import evaluate as _tree_eval

__all__ = [
    "FIRST", "SECOND", "SATISFIED", "VIOLATED",
    "ClassSpec", "SamplingSpec", "Witness", "MembershipVerdict", "NegativeFunction",
    "class_rhs", "check_membership", "check_quasi_convex", "check_convex",
    "membership_inequality", "quasi_convex_inequality", "convex_inequality",
]

FIRST = "first"
SECOND = "second"
SATISFIED = "satisfied_on_samples"
VIOLATED = "violated"


@dataclass(frozen=True)
class ClassSpec:
    """Parameters of the class K_{m,1}^{alpha,s} (first sense) or K_{m,2}^{alpha,s} (second).

    m = 0 is rejected because the defining inequality evaluates f(y/m).
    """

    sense: str = FIRST
    s: float = 1.0
    alpha: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if self.sense not in (FIRST, SECOND):
            raise ValueError(f"sense must be 'first' or 'second', got {self.sense!r}")
        if not 0.0 < self.s <= 1.0:
            raise ValueError(f"s must lie in (0, 1], got {self.s!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        if not 0.0 < self.m <= 1.0:
            raise ValueError(f"m must lie in (0, 1], got {self.m!r}")


@dataclass(frozen=True)
class SamplingSpec:
    grid_points_per_axis: int = 21
    random_trials: int = 1000
    rng_seed: int = 0
    violation_tolerance: float = 1e-9

    def __post_init__(self):
        if self.grid_points_per_axis < 3:
            raise ValueError("grid_points_per_axis must be at least 3")
        if self.random_trials < 0:
            raise ValueError("random_trials must be nonnegative")
        if not self.violation_tolerance >= 0.0:
            raise ValueError("violation_tolerance must be nonnegative")


@dataclass(frozen=True)
class Witness:
    x: float
    y: float
    mu: float
    lhs: float
    rhs: float


@dataclass(frozen=True)
class MembershipVerdict:
    status: str
    witness: Witness | None
    samples_checked: int

    @property
    def satisfied(self) -> bool:
        return self.status == SATISFIED


class NegativeFunction(ValueError):
    """The function takes a value below -tolerance where the class requires f >= 0."""

    def __init__(self, point: float, value: float):
        self.point = point
        self.value = value
        super().__init__(f"function is negative at x={point!r}: f(x)={value!r}")


def class_rhs(spec: ClassSpec, fx: float, fy_over_m: float, mu: float) -> float:
    """Right-hand side of the defining inequality of the class.

    first:  mu^(alpha s) f(x) + m (1 - mu^(alpha s)) f(y/m)
    second: (mu^alpha)^s f(x) + m (1 - mu^alpha)^s f(y/m)

    Python's 0.0 ** 0.0 == 1.0 gives the 0^0 = 1 convention.
    """
    if spec.sense == FIRST:
        w = mu ** (spec.alpha * spec.s)
        v = 1.0 - w
    else:
        ma = mu ** spec.alpha
        w = ma ** spec.s
        v = (1.0 - ma) ** spec.s
    return w * fx + spec.m * v * fy_over_m


# Standalone re-checks of a single triple.  These use the recursive tree
# evaluator rather than compiled closures, so a witness can be confirmed
# without any of the scanning machinery.

def membership_inequality(f: ExprAst, spec: ClassSpec, x: float, y: float, mu: float) -> tuple[float, float]:
    g = partial(_tree_eval, f)
    return g(mu * x + (1.0 - mu) * y), class_rhs(spec, g(x), g(y / spec.m), mu)


def quasi_convex_inequality(f: ExprAst, x: float, y: float, t: float) -> tuple[float, float]:
    g = partial(_tree_eval, f)
    return g(t * x + (1.0 - t) * y), max(g(x), g(y))


def convex_inequality(f: ExprAst, x: float, y: float, t: float) -> tuple[float, float]:
    g = partial(_tree_eval, f)
    return g(t * x + (1.0 - t) * y), t * g(x) + (1.0 - t) * g(y)


def _triples(lo: float, hi: float, sampling: SamplingSpec) -> Iterator[tuple[float, float, float]]:
    """Grid triples (x outer, then y, then mu) followed by seeded random triples."""
    n = sampling.grid_points_per_axis
    pts = np.linspace(lo, hi, n).tolist()
    mus = np.linspace(0.0, 1.0, n).tolist()
    for x in pts:
        for y in pts:
            for mu in mus:
                yield x, y, mu
    if sampling.random_trials:
        rng = np.random.default_rng(sampling.rng_seed)
        u = rng.random((sampling.random_trials, 3))
        span = hi - lo
        for ux, uy, umu in u.tolist():
            yield lo + span * ux, lo + span * uy, umu


def _scan(
    lo: float,
    hi: float,
    sampling: SamplingSpec,
    lhs_of: Callable[[float, float, float], float],
    rhs_of: Callable[[float, float, float], float],
) -> MembershipVerdict:
    tol = sampling.violation_tolerance
    count = 0
    for x, y, mu in _triples(lo, hi, sampling):
        count += 1
        lhs = lhs_of(x, y, mu)
        rhs = rhs_of(x, y, mu)
        if lhs > rhs + tol:
            return MembershipVerdict(VIOLATED, Witness(x, y, mu, lhs, rhs), count)
    return MembershipVerdict(SATISFIED, None, count)


def _cached(g: Callable[[float], float]) -> Callable[[float], float]:
    cache: dict[float, float] = {}

    def h(v: float) -> float:
        try:
            return cache[v]
        except KeyError:
            r = cache[v] = g(v)
            return r

    return h


def _as_range(x_range) -> tuple[float, float]:
    if isinstance(x_range, (int, float)):
        lo, hi = 0.0, float(x_range)
    else:
        lo, hi = (float(v) for v in x_range)
    if not (0.0 <= lo < hi < math.inf):
        raise ValueError(f"need 0 <= lo < hi < inf for the sampling range, got [{lo!r}, {hi!r}]")
    return lo, hi


def check_membership(
    f: ExprAst,
    spec: ClassSpec,
    x_range,
    sampling: SamplingSpec = SamplingSpec(),
) -> MembershipVerdict:
    """Test f(mu x + (1-mu) y) <= class_rhs(spec, f(x), f(y/m), mu) on samples.

    ``x_range`` is either X_max (meaning [0, X_max]) or a pair (lo, hi) with
    lo >= 0; x and y are both drawn from it.  Raises NegativeFunction if any
    sampled value of f is below -violation_tolerance.
    """
    lo, hi = _as_range(x_range)
    tol = sampling.violation_tolerance
    g = compile_expr(f)
    m = spec.m

    def nonneg(v: float) -> float:
        fv = g(v)
        if fv < -tol:
            raise NegativeFunction(v, fv)
        return fv

    fv = _cached(nonneg)
    return _scan(
        lo, hi, sampling,
        lambda x, y, mu: nonneg(mu * x + (1.0 - mu) * y),
        lambda x, y, mu: class_rhs(spec, fv(x), fv(y / m), mu),
    )


def check_quasi_convex(f: ExprAst, interval, sampling: SamplingSpec = SamplingSpec()) -> MembershipVerdict:
    """Test f(t x + (1-t) y) <= max(f(x), f(y)) on samples from ``interval``."""
    a, b = (float(v) for v in interval)
    if not a < b:
        raise ValueError(f"need a < b, got [{a!r}, {b!r}]")
    g = compile_expr(f)
    fv = _cached(g)
    return _scan(
        a, b, sampling,
        lambda x, y, t: g(t * x + (1.0 - t) * y),
        lambda x, y, t: max(fv(x), fv(y)),
    )


def check_convex(f: ExprAst, interval, sampling: SamplingSpec = SamplingSpec()) -> MembershipVerdict:
    """Test f(t x + (1-t) y) <= t f(x) + (1-t) f(y) on samples from ``interval``."""
    a, b = (float(v) for v in interval)
    if not a < b:
        raise ValueError(f"need a < b, got [{a!r}, {b!r}]")
    g = compile_expr(f)
    fv = _cached(g)
    return _scan(
        a, b, sampling,
        lambda x, y, t: g(t * x + (1.0 - t) * y),
        lambda x, y, t: t * fv(x) + (1.0 - t) * fv(y),
    )

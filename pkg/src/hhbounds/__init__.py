"""Numerical verification of Hermite-Hadamard type bounds for generalized convex functions."""

from .bounds import (
    BoundValue, HHResult, NegativeBracket, compute_bound, hh_check,
    kms1_bound, kms1_bound_holder, kms1_bound_holder_sharp, kms1_bound_power_mean,
    quasi_bound_basic, quasi_bound_holder, quasi_bound_power_mean,
)
from .convexity import (
    ClassSpec, MembershipVerdict, NegativeFunction, SamplingSpec, Witness,
    check_convex, check_membership, check_quasi_convex, class_rhs,
)
from .expr import EvalError, ExprAst, ParseError, evaluate, parse, to_source
from .harness import BoundReport, SweepConfig, emit_report, run_sweep, tightest_theorem
from .quadrature import (
    QuadResult, ToleranceNotReached, WeightedProblem, integrate, lemma1_rhs,
    verify_lemma1, weighted_integral,
)
from .specfun import DomainError, beta, log_gamma

__version__ = "0.1.0"

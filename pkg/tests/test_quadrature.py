import math
from fractions import Fraction

import numpy as np
import pytest

from hhbounds.expr import EvalError, parse
from hhbounds.quadrature import (
    QuadResult, ToleranceNotReached, WeightedProblem, gk15, integrate,
    lemma1_rhs, verify_lemma1, weighted_integral,
)
from hhbounds.specfun import beta


# -- exact polynomial oracle -------------------------------------------------

def poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def poly_integral(coeffs, lo, hi):
    """Exact int_lo^hi sum c_i x^i dx via the antiderivative."""
    lo, hi = Fraction(lo), Fraction(hi)
    return sum(c * (hi ** (i + 1) - lo ** (i + 1)) / (i + 1) for i, c in enumerate(coeffs))


def weighted_poly_exact(f_coeffs, a, b, p, q):
    """int_a^b (x-a)^p (b-x)^q f(x) dx for integer p, q and polynomial f."""
    w = [Fraction(1)]
    for _ in range(p):
        w = poly_mul(w, [Fraction(-a), Fraction(1)])
    for _ in range(q):
        w = poly_mul(w, [Fraction(b), Fraction(-1)])
    return poly_integral(poly_mul(w, [Fraction(c) for c in f_coeffs]), a, b)


def test_oracle_sanity():
    # int_0^1 x(1-x) dx = 1/2 - 1/3
    assert weighted_poly_exact([1], 0, 1, 1, 1) == Fraction(1, 6)
    # int_1^2 (x-1)(2-x) x^3 dx, expanded by hand: -x^5 + 3x^4 - 2x^3
    assert weighted_poly_exact([0, 0, 0, 1], 1, 2, 1, 1) == Fraction(-63, 6) + Fraction(3 * 31, 5) - Fraction(2 * 15, 4)


# -- the single-panel rule ------------------------------------------------------

def test_gauss_nodes_match_numpy():
    from hhbounds import quadrature as qm
    nodes, weights = np.polynomial.legendre.leggauss(7)
    ours = sorted([qm._XGK[1], qm._XGK[3], qm._XGK[5], -qm._XGK[1], -qm._XGK[3], -qm._XGK[5], 0.0])
    np.testing.assert_allclose(ours, sorted(nodes), atol=1e-15)
    w = [qm._WG[0], qm._WG[1], qm._WG[2], qm._WG[3], qm._WG[2], qm._WG[1], qm._WG[0]]
    np.testing.assert_allclose(w, weights, atol=1e-15)


@pytest.mark.parametrize("degree", range(0, 23))
def test_kronrod_exact_to_degree_22(degree):
    k, g, _ = gk15(lambda x: x ** degree, 0.0, 1.0)
    exact = 1.0 / (degree + 1)
    assert abs(k - exact) <= 1e-13 * exact
    if degree <= 13:
        assert abs(g - exact) <= 1e-13 * exact
    else:
        assert abs(g - exact) > 1e-13 * exact


def test_kronrod_not_exact_beyond_design_degree():
    # Odd powers vanish by symmetry on [-1, 1]; the first miss is degree 24.
    k, _, _ = gk15(lambda x: x ** 24, -1.0, 1.0)
    assert abs(k - 2.0 / 25) > 1e-10


# -- integrate ----------------------------------------------------------------

def test_integrate_examples():
    assert integrate(lambda x: x * x, 0.0, 1.0).value == pytest.approx(1 / 3, abs=1e-12)
    assert integrate(lambda x: x * (1 - x), 0.0, 1.0).value == pytest.approx(1 / 6, abs=1e-12)
    res = integrate(lambda t: math.sqrt(t) * math.sqrt(1 - t), 0.0, 1.0, 1e-10)
    assert res.value == pytest.approx(beta(1.5, 1.5), abs=1e-9)
    assert beta(1.5, 1.5) == pytest.approx(math.pi / 8, rel=1e-13)


def test_integrate_result_invariants():
    res = integrate(lambda x: abs(x - 0.3), 0.0, 1.0)
    assert isinstance(res, QuadResult)
    assert res.err_estimate >= 0.0
    assert res.evals >= 15
    assert res.err_estimate <= 1e-10
    assert res.value == pytest.approx(0.5 * (0.3**2 + 0.7**2), abs=1e-10)


def test_monotone_tolerance():
    fns = [lambda x: math.sqrt(x) * math.exp(-x), lambda x: abs(math.sin(7 * x)), lambda x: x ** 0.1]
    for f in fns:
        errs = [integrate(f, 0.0, 2.0, tol).err_estimate for tol in (1e-4, 1e-6, 1e-8, 1e-10, 1e-12)]
        assert all(e2 <= e1 for e1, e2 in zip(errs, errs[1:]))


def test_tolerance_not_reached_carries_best_value():
    with pytest.raises(ToleranceNotReached) as info:
        integrate(lambda x: x ** 0.01, 0.0, 1.0, 1e-14, max_evals=200)
    err = info.value
    assert err.evals <= 200
    assert err.value == pytest.approx(1 / 1.01, abs=1e-3)
    assert err.err_estimate > 1e-14


def test_eval_error_propagates():
    f = parse("ln(x - 0.5)")
    from hhbounds.expr import compile_expr
    with pytest.raises(EvalError):
        integrate(compile_expr(f), 0.0, 1.0)


def test_integrate_validates_arguments():
    with pytest.raises(ValueError):
        integrate(lambda x: x, 1.0, 1.0)
    with pytest.raises(ValueError):
        integrate(lambda x: x, 0.0, 1.0, 0.0)


def test_roundoff_limited_problem_terminates():
    # |value| ~ 1e8: an absolute 1e-10 target is below double resolution.
    res = integrate(lambda x: 1e8 * math.exp(x), 0.0, 3.0, 1e-10)
    assert res.value == pytest.approx(1e8 * (math.exp(3.0) - 1.0), rel=1e-14)


# -- weighted integral and its substitution form -----------------------------------

@pytest.mark.parametrize(
    "src, a, b, p, q, expected",
    [
        ("1", 0, 1, 1, 1, Fraction(1, 6)),
        ("x", 0, 1, 1, 1, Fraction(1, 12)),
        # 2^4 * B(2, 3) = 16/12
        ("1", 0, 2, 1, 2, Fraction(4, 3)),
        ("x^3", 1, 2, 1, 1, Fraction(3, 5)),
    ],
)
def test_weighted_examples(src, a, b, p, q, expected):
    prob = WeightedProblem(parse(src), a, b, p, q)
    assert weighted_integral(prob).value == pytest.approx(float(expected), abs=1e-12)
    assert lemma1_rhs(prob).value == pytest.approx(float(expected), abs=1e-12)


def test_weighted_against_polynomial_oracle():
    rng = np.random.default_rng(7)
    for _ in range(20):
        coeffs = [int(c) for c in rng.integers(-5, 6, size=4)]
        a = int(rng.integers(0, 3))
        b = a + int(rng.integers(1, 3))
        p, q = (int(v) for v in rng.integers(1, 4, size=2))
        src = " + ".join(f"{c}*x^{i}" for i, c in enumerate(coeffs))
        exact = float(weighted_poly_exact(coeffs, a, b, p, q))
        prob = WeightedProblem(parse(src), a, b, p, q)
        lhs, rhs = weighted_integral(prob), lemma1_rhs(prob)
        scale = max(abs(exact), 1.0)
        assert abs(lhs.value - exact) <= lhs.err_estimate + 1e-12 * scale
        assert abs(rhs.value - exact) <= rhs.err_estimate + 1e-12 * scale


def test_lemma_identity_on_quadratic():
    prob = WeightedProblem(parse("x^2"), 1.0, 3.0, 2.0, 1.0)
    exact = float(weighted_poly_exact([0, 0, 1], 1, 3, 2, 1))
    rep = verify_lemma1(prob)
    assert rep.passed
    assert rep.lhs.value == pytest.approx(exact, abs=1e-12)


@pytest.mark.parametrize(
    "src, a, b, p, q",
    [("exp(x)", 0, 1, 1.5, 0.5), ("abs(x-0.5)", 0, 1, 2, 3), ("x^3", 1, 2, 1, 1)],
)
def test_verify_lemma_examples(src, a, b, p, q):
    rep = verify_lemma1(WeightedProblem(parse(src), a, b, p, q))
    assert rep.passed
    assert rep.abs_diff <= rep.allowed


def test_verify_lemma_x_cubed_hits_oracle():
    rep = verify_lemma1(WeightedProblem(parse("x^3"), 1, 2, 1, 1))
    assert rep.lhs.value == pytest.approx(0.6, abs=1e-12)
    assert rep.rhs.value == pytest.approx(0.6, abs=1e-12)


@pytest.mark.parametrize(
    "a, b, p, q",
    [(1.0, 1.0, 1, 1), (-0.5, 1.0, 1, 1), (0.0, 1.0, 0.0, 1.0), (0.0, 1.0, 1.0, -1.0), (0.0, math.inf, 1, 1)],
)
def test_problem_invariants(a, b, p, q):
    with pytest.raises(ValueError):
        WeightedProblem(parse("x"), a, b, p, q)

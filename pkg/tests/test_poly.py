from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from twlp.poly import (Constraint, POProblem, Polynomial, StructuralError, evaluate, monomial,
                       one_norm, rescale_box, scaled_violation, to_rational)


def x(j, coef=1, exp=1):
    return Polynomial.var(j, coef, exp)


def test_evaluate_examples():
    assert evaluate(x(0) * x(1) - F(1, 2), [1, 1]) == F(1, 2)
    assert evaluate(Polynomial(), [F(3)]) == 0
    assert evaluate(3 * x(0) ** 2 - 2 * x(1), [F(1, 2), F(1, 4)]) == F(1, 4)


def test_evaluate_missing_variable():
    with pytest.raises(StructuralError):
        evaluate(x(3), [0, 1])
    with pytest.raises(StructuralError):
        evaluate(x(3), {0: 1})


def test_one_norm_examples():
    assert one_norm(x(0) * x(1) - F(1, 2)) == F(3, 2)
    assert one_norm(Polynomial()) == 0
    # S y1 - a1 x1 with S = 9, a1 = 3
    assert one_norm(9 * x(4) - 3 * x(0)) == 12


def test_zero_coefficients_dropped():
    p = x(0) + x(1) - x(0)
    assert p.terms == {monomial({1: 1}): F(1)}
    assert monomial({2: 0, 1: 3}) == ((1, 3),)


def test_to_rational_inputs():
    assert to_rational("3/4") == F(3, 4)
    assert to_rational("0.1") == F(1, 10)
    assert to_rational(0.5) == F(1, 2)
    with pytest.raises(ValueError):
        to_rational("abc")


def test_scaled_violation_examples():
    pb = POProblem(1, 0, (0,), [Constraint(x(0) - 1, ">=")])
    assert scaled_violation(pb, [F(1, 2)]) == F(1, 4)
    assert scaled_violation(pb, [F(1)]) == 0
    eq = POProblem(2, 0, (0, 0), [Constraint(x(0) - x(1), "=")])
    assert scaled_violation(eq, [F(1), F(1, 2)]) == F(1, 4)


def test_scaled_violation_subset_sum_certificate():
    # a = (3, 5, 2), S = 5: subset {5} (or {3, 2}); unscaled system, exact point
    from twlp.generators import subset_sum
    pb = subset_sum([3, 5, 2], scaled=False)
    xs = [F(1), F(0), F(1)]
    ys = [F(3, 5), F(3, 5), F(1)]
    assert scaled_violation(pb, xs + ys) == 0


def test_problem_validation():
    with pytest.raises(StructuralError):
        POProblem(2, 3, (0, 0))
    with pytest.raises(StructuralError):
        POProblem(2, 0, (0, 0), [Constraint(x(5), ">=")])
    with pytest.raises(StructuralError):
        Constraint(x(0), "<")
    with pytest.raises(StructuralError):
        POProblem(1, 1, (0,)).check_point([F(1, 2)])


def test_pi_counts_continuous_degree_only():
    pb = POProblem(3, 1, (0, 0, 0), [Constraint(x(0, 1, 3) * x(1) * x(2) - 1, ">=")])
    assert pb.pi == 2


def test_rescale_box():
    # x in [2, 6] written as 2 + 4 t
    p = rescale_box(x(0) ** 2 - 9, {0: (2, 6)})
    for t in (F(0), F(1, 4), F(1)):
        assert evaluate(p, [t]) == (2 + 4 * t) ** 2 - 9


coef = st.fractions(min_value=-5, max_value=5, max_denominator=6)
monos = st.dictionaries(st.integers(0, 3), st.integers(1, 3), max_size=3)
polys = st.dictionaries(monos.map(lambda d: monomial(d)), coef, max_size=5).map(Polynomial)
points = st.lists(st.fractions(min_value=0, max_value=1, max_denominator=8), min_size=4, max_size=4)


@given(polys, polys, points)
def test_evaluate_is_linear(f, g, pt):
    assert evaluate(f + g, pt) == evaluate(f, pt) + evaluate(g, pt)
    assert evaluate(f * g, pt) == evaluate(f, pt) * evaluate(g, pt)


@given(polys, coef)
def test_one_norm_homogeneous(f, k):
    assert one_norm(k * f) == abs(k) * one_norm(f)


@given(st.lists(polys, min_size=1, max_size=3), points)
def test_zero_violation_iff_feasible(fs, pt):
    pb = POProblem(4, 0, (0,) * 4, [Constraint(f, ">=") for f in fs])
    feasible = all(evaluate(f, pt) >= 0 for f in fs)
    assert (scaled_violation(pb, pt) == 0) == feasible

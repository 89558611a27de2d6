import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from twlp.bruteforce import solve_po_bruteforce
from twlp.discretize import (bit_value, bits_needed, encode_point, expand, lift_decomposition, plan, recover, to_gb,
                             width_bound)
from twlp.gb import bits_of, build_feasible_tables, build_lp
from twlp.generators import random_po, subset_sum
from twlp.graphs import TreeDecomposition, heuristic_decomposition, intersection_graph, validate
from twlp.lpsolve import solve
from twlp.mixture import decompose, extract
from twlp.poly import Constraint, POProblem, Polynomial, StructuralError, evaluate, scaled_violation

x = Polynomial.var


def cont(n, cons, p=0):
    return POProblem(n, p, (0,) * n, cons)


def test_plan_examples():
    pl = plan(cont(1, [Constraint(x(0) - F(1, 2), ">=")]), F(1, 2))
    assert (pl.gamma, pl.L, pl.delta) == (F(1, 2), 1, F(1, 2))
    pl = plan(cont(2, [Constraint(x(0) * x(1) - F(1, 4), ">=")]), F(1, 4))
    assert (pl.pi, pl.gamma, pl.L, pl.delta) == (2, F(1, 8), 3, F(15, 64))
    pl = plan(POProblem(2, 2, (1, 1), [Constraint(x(0) + x(1) - 1, ">=")]), F(1, 4))
    assert pl.L == 0 and pl.var_map == {} and pl.delta == 0


def test_plan_rejects_bad_epsilon():
    with pytest.raises(StructuralError):
        plan(cont(1, []), 1)
    with pytest.raises(StructuralError):
        plan(cont(1, []), 0)


def test_bits_needed():
    assert [bits_needed(F(1, k)) for k in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]


def test_expand_examples():
    assert expand(0, 4) == [0, 0, 0, 0]
    assert expand(1, 3) == [1, 1, 1] and bit_value([1, 1, 1]) == F(7, 8)
    z = expand(F(3, 10), 3)
    assert z == [0, 1, 0] and F(3, 10) - bit_value(z) == F(1, 20)
    with pytest.raises(StructuralError):
        expand(F(3, 2), 2)


@given(st.fractions(min_value=0, max_value=1, max_denominator=200), st.integers(1, 8))
def test_expand_brackets(r, L):
    v = bit_value(expand(r, L))
    assert v <= r < v + F(1, 2 ** L) or (r == 1 and r - v == F(1, 2 ** L))


def test_to_gb_half_example():
    pb = cont(1, [Constraint(x(0) - F(1, 2), ">=")])
    pl = plan(pb, F(1, 2))
    gb = to_gb(pb, pl)
    assert gb.n == 1
    assert list(gb.constraints[0].oracle.truth_table()) == [True, True]


def test_to_gb_pure_binary_identity():
    pb = POProblem(2, 2, (1, -1), [Constraint(x(0) - x(1), ">=")])
    gb = to_gb(pb, plan(pb, F(1, 4)))
    assert gb.n == 2
    assert [gb.feasible(bits_of(i, 2)) for i in range(4)] == [True, False, True, True]


def test_to_gb_equality_gives_two_oracles():
    pb = cont(2, [Constraint(x(0) - x(1), "=")])
    gb = to_gb(pb, plan(pb, F(1, 2)))
    assert [c.label for c in gb.constraints] == ["c0", "c0-"]


def test_lift_decomposition_sizes():
    pb = POProblem(2, 1, (0, 0), [Constraint(x(0) * x(1, 1, 2) - F(1, 4), ">=")])
    pl = plan(pb, F(1, 4))
    assert pl.L == 3
    td = TreeDecomposition({0: {0, 1}})
    assert len(lift_decomposition(td, pl).bags[0]) == 4
    pl1 = plan(cont(2, [Constraint(x(0) + x(1) - 1, ">=")]), F(1, 2))
    assert pl1.L == 1
    assert lift_decomposition(td, pl1).bags == td.bags


def test_recover_examples():
    pb = cont(2, [Constraint(x(0) * x(1), ">=")])
    pl = plan(pb, F(1, 4))
    assert recover([0] * 6, pl) == [0, 0]
    assert recover([1, 0, 1, 0, 0, 1], pl) == [F(5, 8), F(1, 8)]


@given(st.integers(0, 10_000), st.sampled_from([F(1, 2), F(1, 4), F(1, 8)]))
def test_lifted_td_valid_and_within_bound(seed, eps):
    pb, _ = random_po(seed)
    pl = plan(pb, eps)
    td = heuristic_decomposition(intersection_graph(pb))
    lifted = lift_decomposition(td, pl)
    assert validate(lifted, intersection_graph(to_gb(pb, pl))).ok
    assert lifted.width <= width_bound(td.width, pl)


@given(st.integers(0, 10_000), st.sampled_from([F(1, 2), F(1, 4), F(1, 8)]),
       st.lists(st.fractions(min_value=0, max_value=1, max_denominator=50), min_size=6, max_size=6))
def test_rounding_perturbation_bound(seed, eps, pt):
    # the grid point below x moves every constraint by at most delta * ||f||_1
    pb, _ = random_po(seed)
    pl = plan(pb, eps)
    xs = [F(round(v)) if j < pb.p else v for j, v in enumerate(pt[:pb.n])]
    xh = recover(encode_point(pb, pl, xs), pl)
    for con in pb.constraints:
        assert abs(evaluate(con.poly, xs) - evaluate(con.poly, xh)) <= pl.delta * con.poly.one_norm()


@given(st.integers(1, 6), st.sampled_from([F(1, 2), F(1, 3), F(1, 4), F(1, 8), F(1, 10)]))
def test_delta_bernoulli_bound(pi, eps):
    pb = cont(pi, [Constraint(Polynomial({tuple((j, 1) for j in range(pi)): 1}), ">=")])
    pl = plan(pb, eps)
    assert pl.pi == pi
    assert pl.delta <= pi * pl.gamma == eps
    assert F(1, 2 ** pl.L) <= pl.gamma


def test_planted_point_encodes_feasible():
    for seed in range(40):
        pb, planted = random_po(seed)
        pl = plan(pb, F(1, 4))
        gb = to_gb(pb, pl)
        assert gb.feasible(encode_point(pb, pl, planted))


def test_round_trip_through_lp():
    for seed in range(20):
        pb, _ = random_po(seed, n_max=4)
        pl = plan(pb, F(1, 2))
        gb = to_gb(pb, pl)
        td = lift_decomposition(heuristic_decomposition(intersection_graph(pb)), pl)
        tables = build_feasible_tables(gb, td)
        model = build_lp(gb, td, tables, "lpz")
        sol = solve(model)
        bf = solve_po_bruteforce(pb, pl)
        assert sol.status == bf.status
        if sol.status == "optimal":
            xs = recover(extract(decompose(gb, td, tables, model, sol.x), gb.c), pl)
            assert scaled_violation(pb, xs) <= pl.delta
            assert pb.objective(xs) == sol.objective == bf.objective


def test_subset_sum_lifted_width():
    pb = subset_sum([3, 5, 2], scaled=False)
    pl = plan(pb, F(1, 4))
    td = heuristic_decomposition(intersection_graph(pb))
    lifted = lift_decomposition(td, pl)
    assert validate(lifted, intersection_graph(to_gb(pb, pl))).ok
    assert lifted.width <= width_bound(td.width, pl)

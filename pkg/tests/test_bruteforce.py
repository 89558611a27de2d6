import itertools
from fractions import Fraction as F

import pytest

from twlp.bruteforce import (CapExceeded, solve_gb_bruteforce, solve_po_bruteforce, solve_po_exact_binary,
                             verify_pipeline)
from twlp.discretize import plan, to_gb
from twlp.gb import CallableOracle, GBProblem, PolyOracle
from twlp.generators import has_equal_partition, random_po
from twlp.pipeline import RunConfig, solve_po
from twlp.poly import Constraint, POProblem, Polynomial

x = Polynomial.var


def test_unconstrained_nonnegative_cost():
    r = solve_gb_bruteforce(GBProblem(3, (1, 0, 2), []))
    assert r.status == "optimal" and r.point == (0, 0, 0) and r.objective == 0


def test_knapsack_packing_reading():
    # capacity a.x <= 9: no subset of (3, 5, 8, 2) sums to 9, so the best value is 8
    a, b = [3, 5, 8, 2], 9
    gb = GBProblem(4, [-v for v in a], [PolyOracle(-Polynomial.linear(dict(enumerate(a))), -b)])
    r = solve_gb_bruteforce(gb)
    best = min(-sum(s) for k in range(5) for s in itertools.combinations(a, k) if sum(s) <= b)
    assert r.objective == best == -8
    assert r.point == (0, 0, 1, 0)  # ties with {3, 5}; lexicographic walk meets (0,0,1,0) first


def test_knapsack_covering_reading():
    # a.x >= 9 with c = -a: taking everything is feasible and best
    a, b = [3, 5, 8, 2], 9
    gb = GBProblem(4, [-v for v in a], [PolyOracle(Polynomial.linear(dict(enumerate(a))), b)])
    r = solve_gb_bruteforce(gb)
    assert r.objective == -18 and r.point == (1, 1, 1, 1)


def test_always_false_oracle():
    gb = GBProblem(2, (0, 0), [CallableOracle((0, 1), lambda bits: False)])
    assert solve_gb_bruteforce(gb).status == "infeasible"


def test_cap():
    with pytest.raises(CapExceeded):
        solve_gb_bruteforce(GBProblem(21, (0,) * 21, []))
    with pytest.raises(CapExceeded):
        solve_gb_bruteforce(GBProblem(5, (0,) * 5, []), cap=4)


def test_pure_binary_po_matches_gb():
    for seed in range(30):
        pb, _ = random_po(seed, p_max=6, n_max=6)
        if pb.p != pb.n:
            continue
        pl = plan(pb, F(1, 4))
        a = solve_po_bruteforce(pb, pl)
        b = solve_gb_bruteforce(to_gb(pb, pl))
        c = solve_po_exact_binary(pb)
        assert a.status == b.status == c.status
        assert a.objective == b.objective == c.objective


def test_one_continuous_two_bits():
    pb = POProblem(1, 0, (1,), [Constraint(x(0) - F(1, 2), ">=")])
    pl = plan(pb, F(1, 4))  # pi = 1, gamma = 1/4, L = 2, delta = 1/4
    assert (pl.L, pl.delta) == (2, F(1, 4))
    r = solve_po_bruteforce(pb, pl)
    # grid 0, 1/4, 1/2, 3/4 relaxed by 1/4 * 3/2 = 3/8: only values >= 1/8 pass
    assert r.examined == 4 and r.feasible_count == 3
    assert r.point == (F(1, 4),) and r.objective == F(1, 4)


def test_subset_sum_partition_oracle():
    assert not has_equal_partition([3, 5, 8, 2])
    assert has_equal_partition([3, 5, 2])
    assert has_equal_partition([1, 1])


def test_verify_pipeline_exact_and_perturbed():
    pb = POProblem(2, 1, (1, 1), [Constraint(x(0) + x(1) - F(1, 2), ">=")])
    run = solve_po(pb, RunConfig(epsilon=F(1, 2)))
    bf = solve_po_bruteforce(pb, run.plan)
    rep = verify_pipeline(pb, F(1, 2), run, known_feasible=[[0, F(1, 2)]], bf=bf)
    assert rep.ok, rep.checks
    run.x = [F(0), F(0)]
    rep = verify_pipeline(pb, F(1, 10), run, bf=bf)
    assert "tolerance" in rep.failures()

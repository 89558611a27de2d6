import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from twlp.generators import knapsack, random_npo, twtrap
from twlp.graphs import Graph, heuristic_decomposition, intersection_graph, validate
from twlp.npo import (NPOConstraint, NPOProblem, SplitTree, good_split, npo_to_po, npo_tolerance,
                      original_violations, split_vertex, width_bound)
from twlp.poly import Polynomial, StructuralError, evaluate

from .oracles import npo_binary_optimum, split_binary_optimum

x = Polynomial.var


def star(deg, norms=None, sense=">="):
    """Hub 0 with leaves 1..deg, leaf v owning x_{v-1}; one constraint at the hub."""
    norms = norms or [1] * deg
    g = Graph(range(deg + 1), [(0, v) for v in range(1, deg + 1)])
    terms = {v: x(v - 1, norms[v - 1]) for v in range(1, deg + 1)}
    terms[1] = terms[1] - 1
    con = NPOConstraint(0, terms, sense)
    return NPOProblem(g, deg, deg, [1] * deg, {v: {v - 1} for v in range(1, deg + 1)}, [con])


FIVE = SplitTree("r", {"r": [1, "a", "b"], "a": [2, 3], "b": [4, 5]})


def names_of(prob, vertex):
    return sorted(prob.names[j] for j in prob.vertex_vars[vertex])


def test_degree_five_system():
    src = star(5, [2, 3, 1, 4, 5])
    res = split_vertex(src, 0, FIVE)
    fam = res.family(0)
    assert len(fam) == 8
    roles = sorted(k.role for k in fam)
    assert roles == ["internal", "internal"] + ["leaf"] * 5 + ["root"]
    p = res.problem
    assert names_of(p, "r") == ["y+_1_0", "y+_r_0", "y-_1_0"]
    assert names_of(p, "a") == ["y+_2_0", "y+_3_0", "y+_a_0", "y-_2_0", "y-_3_0", "y-_a_0"]
    assert names_of(p, "b") == ["y+_4_0", "y+_5_0", "y+_b_0", "y-_4_0", "y-_5_0", "y-_b_0"]
    # neighbors keep their own variables
    assert all(p.vertex_vars[v] == src.vertex_vars[v] for v in range(1, 6))
    assert p.max_degree == 3
    assert sorted(p.graph.neighbors("r"), key=str) == [1, "a", "b"]


def test_nu_recursion_and_root_value():
    src = star(5, [2, 3, 1, 4, 5])
    res = split_vertex(src, 0, FIVE)
    nu = {node: v for (k, node), v in res.nu.items() if k == 0}
    assert nu["a"] == nu[2] + nu[3] == 4
    assert nu["b"] == nu[4] + nu[5] == 9
    assert nu["r"] == nu[1] + nu["a"] + nu["b"] == src.constraints[0].total().one_norm() == 16
    # leaf 1 carries x0 * 2 - 1, so its norm is 3
    assert nu[1] == 3


def test_family_sum_telescopes():
    src = star(5, [2, 3, 1, 4, 5])
    res = split_vertex(src, 0, FIVE)
    assert res.family_sum(0) == src.constraints[0].total()


def test_degree_four_unit_norms_leaf_counts():
    g = Graph(range(5), [(0, v) for v in range(1, 5)])
    con = NPOConstraint(0, {v: x(v - 1) for v in range(1, 5)}, ">=")
    src = NPOProblem(g, 4, 4, [0] * 4, {v: {v - 1} for v in range(1, 5)}, [con])
    tree = SplitTree("r", {"r": [1, 2, "a"], "a": [3, 4]})
    res = split_vertex(src, 0, tree)
    nu = {node: v for (k, node), v in res.nu.items()}
    assert nu == {1: 1, 2: 1, 3: 1, 4: 1, "a": 2, "r": 4}
    assert res.family_sum(0) == con.total()


def test_equality_root_has_no_slack():
    src = star(4, sense="=")
    res = split_vertex(src, 0, SplitTree("r", {"r": [1, 2, "a"], "a": [3, 4]}))
    assert 0 not in res.root_vars
    assert res.family_sum(0) == src.constraints[0].total()


def test_no_constraints_is_pure_surgery():
    g = Graph(range(5), [(0, v) for v in range(1, 5)])
    src = NPOProblem(g, 1, 1, [1], {0: {0}}, [])
    res = split_vertex(src, 0, SplitTree("r", {"r": [1, 2, "a"], "a": [3, 4]}))
    assert res.problem.n == 1 and res.problem.constraints == []
    assert res.problem.max_degree == 3
    assert res.problem.vertex_vars["r"] == {0} == res.problem.vertex_vars["a"]


def test_split_vertex_errors():
    src = star(5)
    with pytest.raises(StructuralError):
        split_vertex(src, 1, FIVE)  # degree one
    with pytest.raises(StructuralError):
        split_vertex(src, 0, SplitTree("r", {"r": [1, "a", "b"], "a": [2, 3], "b": [4]}))
    with pytest.raises(StructuralError):
        split_vertex(src, 0, SplitTree(1, {1: [2, 3, 4], 2: [5]}))
    with pytest.raises(StructuralError):
        split_vertex(star(3), 0, SplitTree("r", {"r": [1, 2, 3]}))


def test_tolerance_examples():
    assert npo_tolerance(F(1, 2), 5) == F(1, 80)
    assert npo_tolerance(F(1, 4), 1) == F(1, 32)
    with pytest.raises(StructuralError):
        npo_tolerance(F(1, 2), 0)


def example4():
    # x4 (binary) -> 0; x1, x2, x3, x5, x6 -> 1, 2, 3, 4, 5
    g = Graph("abcde", [("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("b", "e")])
    owned = {"a": {1, 2}, "b": {3}, "c": {0}, "d": {4}, "e": {5}}
    c1 = NPOConstraint("a", {"b": 1 - x(1, 1, 2) - x(2, 1, 2) - x(3, 2, 2)})
    c2 = NPOConstraint("a", {"b": x(1, 1, 2) - x(3, 1, 2), "c": x(0)})
    c3 = NPOConstraint("b", {"c": x(3) * x(0) - F(1, 2), "d": x(4, 1, 3), "e": -x(5)})
    return NPOProblem(g, 6, 1, [0] * 6, owned, [c1, c2, c3])


def test_example4_flattening_and_intersection_graph():
    pb = example4()
    assert pb.max_degree == 4 and pb.Delta == 4  # vertex a: two variables, two constraints
    assert pb.check_connectivity() == []
    split = good_split(pb)
    flat = npo_to_po(split)
    # the source constraints survive as the family sums
    for i, k in enumerate(pb.constraints):
        assert split.family_sum(i) == k.total()
    # an unsplit flattening (ignoring the degree) gives the three-clique graph
    direct = intersection_graph(npo_to_po_unsplit(pb))
    assert direct.edges() == [(0, 1), (0, 3), (0, 4), (0, 5), (1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)]
    assert validate(flat.decomposition, intersection_graph(flat.po)).ok


def npo_to_po_unsplit(pb):
    from twlp.poly import Constraint, POProblem
    return POProblem(pb.n, pb.p, pb.c, tuple(Constraint(k.total(), k.sense) for k in pb.constraints))


def test_identity_when_degree_small():
    pb = random_npo(0, max_degree=3)
    res = good_split(pb)
    assert res.trees == {} and res.problem is pb


def test_knapsack_star_split_and_equivalence():
    pb = knapsack(a=[3, 5, 8, 2, 4], b=9, c=[2, 3, 5, 1, 2])
    res = good_split(pb)
    assert res.problem.max_degree <= 3
    assert res.family_sum(0) == pb.constraints[0].total()
    assert split_binary_optimum(res.problem, pb.n) == npo_binary_optimum(pb)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_trap_family(k):
    pb = twtrap(k)
    td = heuristic_decomposition(pb.graph)
    res = good_split(pb, td)
    assert res.problem.max_degree <= 3
    assert validate(res.decomposition, res.problem.graph).ok
    assert res.decomposition.width <= 2 * td.width + 1
    for i, con in enumerate(pb.constraints):
        assert res.family_sum(i) == con.total()


def check_split(pb, td=None):
    td = td or heuristic_decomposition(pb.graph)
    res = good_split(pb, td)
    assert res.problem.max_degree <= 3
    assert validate(res.decomposition, res.problem.graph).ok
    assert res.decomposition.width <= 2 * td.width + 1
    for i, con in enumerate(pb.constraints):
        assert res.family_sum(i) == con.total()
    for u, tree in res.trees.items():
        assert len(tree.leaves()) == pb.graph.degree(u)
        assert tree.num_vertices() < 2 * pb.graph.degree(u)
        for (k, node), val in res.nu.items():
            if node in tree.children and (k, node) in res.nu:
                kids = [res.nu.get((k, ch)) for ch in tree.children[node]]
                if all(v is not None for v in kids):
                    assert val == sum(kids)
    flat = npo_to_po(res)
    assert validate(flat.decomposition, intersection_graph(flat.po)).ok
    return res, flat


@given(st.integers(0, 100_000))
def test_split_properties_random(seed):
    check_split(random_npo(seed))


@settings(max_examples=25)
@given(st.integers(0, 100_000))
def test_split_preserves_optimum(seed):
    pb = random_npo(seed, v_max=8)
    if pb.n > 9:
        return
    res = good_split(pb)
    assert split_binary_optimum(res.problem, pb.n) == npo_binary_optimum(pb)


def test_flat_width_audit():
    worst = 0
    for seed in range(40):
        pb = random_npo(seed)
        res = good_split(pb)
        flat = npo_to_po(res)
        W = res.decomposition.width
        assert flat.decomposition.width <= width_bound(res.problem, W)
        worst = max(worst, flat.decomposition.width + 1 - 7 * pb.Delta * (W + 1))
    assert worst <= 0


def test_original_violations():
    pb = star(3)
    v = original_violations(pb, [0, 0, 0])
    assert v == {0: F(1, 4)}  # x0 - 1 + x1 + x2 at zero: -1 over norm 4
    assert original_violations(pb, [1, 0, 0]) == {0: 0}


def test_npo_validation():
    g = Graph(range(3), [(0, 1), (1, 2)])
    with pytest.raises(StructuralError):
        NPOProblem(g, 1, 1, [0], {0: {0}}, [NPOConstraint(0, {2: x(0)})])
    with pytest.raises(StructuralError):
        NPOProblem(g, 2, 2, [0, 0], {0: {0}, 1: {1}}, [NPOConstraint(0, {1: x(0) * x(5)})])
    split_ok = NPOProblem(g, 1, 1, [0], {0: {0}, 2: {0}}, [])
    assert split_ok.check_connectivity() == [0]


def test_shared_monomials_merged():
    g = Graph(range(3), [(0, 1), (0, 2)])
    pb = NPOProblem(g, 1, 1, [0], {0: {0}}, [NPOConstraint(0, {1: x(0), 2: x(0) * 2 - 1})])
    k = pb.constraints[0]
    assert k.terms[1] == x(0, 3) and k.terms[2] == Polynomial.constant(-1)
    assert sum(p.one_norm() for p in k.terms.values()) == k.total().one_norm()

# Splitting high-degree vertices of a network problem.
#
# A constraint at a vertex of degree five is replaced by a tree of degree-three
# vertices carrying balance equations over new variables in [0, 1].  Summing the
# new equations gives back the original constraint.

from fractions import Fraction

from twlp.generators import twtrap
from twlp.graphs import Graph, heuristic_decomposition
from twlp.npo import NPOConstraint, NPOProblem, SplitTree, good_split, split_vertex
from twlp.poly import Polynomial

x = Polynomial.var

# hub 0 with neighbours 1..5; neighbour v owns x_{v-1}
g = Graph(range(6), [(0, v) for v in range(1, 6)])
terms = {v: x(v - 1, v) for v in range(1, 6)}
terms[1] = terms[1] - 4
problem = NPOProblem(g, 5, 5, [1] * 5, {v: {v - 1} for v in range(1, 6)}, [NPOConstraint(0, terms)])
print("original:", problem.constraints[0].total())

tree = SplitTree("r", {"r": [1, "a", "b"], "a": [2, 3], "b": [4, 5]})
res = split_vertex(problem, 0, tree)
names = res.problem.names
print("new variables:", ", ".join(f"x{j}={names[j]}" for j in range(problem.n, res.problem.n)))
for k in res.family(0):
    print(f"  {k.role:8} at {k.at}: {k.total()} {k.sense} 0")
print("family sum equals original:", res.family_sum(0) == problem.constraints[0].total())
print("max degree after split:", res.problem.max_degree)

# on the trap family a decomposition-guided split keeps the width small
for k in (2, 3, 4):
    pb = twtrap(k)
    td = heuristic_decomposition(pb.graph)
    split = good_split(pb, td)
    print(f"trap k={k}: degree {pb.max_degree} -> {split.problem.max_degree}, "
          f"width {td.width} -> {split.decomposition.width} (bound {2 * td.width + 1})")

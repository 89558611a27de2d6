# Binary problems given by membership oracles, solved as one exact LP.
#
# Each constraint only says which 0/1 patterns of its own variables are allowed.
# A tree decomposition of the variable-interaction graph turns the whole problem
# into a linear program whose optimum equals the integer optimum.

from fractions import Fraction

from twlp.bruteforce import solve_gb_bruteforce
from twlp.gb import GBProblem, ListOracle, PolyOracle, build_feasible_tables, build_lp
from twlp.graphs import heuristic_decomposition, intersection_graph
from twlp.lpsolve import solve
from twlp.mixture import decompose, extract
from twlp.poly import Polynomial

x = Polynomial.var

# five variables on a chain; neighbours interact through small constraints
constraints = [
    PolyOracle(x(0) + x(1), 1),                    # x0 + x1 >= 1
    ListOracle((1, 2), [(0, 1), (1, 0)]),          # x1 xor x2
    PolyOracle(x(2) + x(3) - x(2) * x(3), 1),      # x2 or x3
    ListOracle((3, 4), [(0, 0), (1, 1)]),          # x3 == x4
]
c = [Fraction(3), Fraction(-1), Fraction(2), Fraction(1), Fraction(-4)]
gb = GBProblem(5, c, constraints)

g = intersection_graph(gb)
td = heuristic_decomposition(g)
print("edges of the interaction graph:", g.edges())
print("bags:", {t: td.bag(t) for t in td.nodes}, "width", td.width)

tables = build_feasible_tables(gb, td)
print("feasible patterns per bag:", tables.sizes())
print("oracle queries:", tables.stats.total, "(one per pattern of each support)")

for form in ("lpz", "lpgb"):
    model = build_lp(gb, td, tables, form)
    sol = solve(model)
    print(f"{form}: {model.num_vars} variables, {model.num_rows} rows, optimum {sol.objective}")

# the LP optimum is a mixture of feasible 0/1 points; the cheapest one is optimal
model = build_lp(gb, td, tables, "lpz")
sol = solve(model)
mix = decompose(gb, td, tables, model, sol.x)
for mu, point in mix.atoms:
    print("  weight", mu, "point", point, "cost", gb.objective(point))
best = extract(mix, gb.c)
print("extracted point:", best, "cost", gb.objective(best))

# exhaustive check over all 32 assignments
bf = solve_gb_bruteforce(gb)
print("brute force:", bf.point, bf.objective)

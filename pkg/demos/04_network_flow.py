# Fixed-charge network flow on a path, end to end.
#
# Each arc has an open/closed binary and a scaled flow in [0, 1].  The network
# problem is split, flattened and discretized with tolerance eps / (8 D); the
# recovered point is compared with the exact mixed-integer optimum.

from fractions import Fraction

from twlp.generators import fcnf_bruteforce, fcnf_data
from twlp.pipeline import RunConfig, solve_npo

eps = Fraction(1, 2)
for arcs in (2, 3, 4):
    data = fcnf_data(arcs, "path", max_value=8, seed=0)
    problem = data.to_npo()
    run = solve_npo(problem, RunConfig(epsilon=eps, formulation="lpgb"))
    best, y, flow = fcnf_bruteforce(data)
    norm_c = sum(abs(v) for v in problem.c)
    print(f"{arcs} arcs  b={data.b}  theta={run.theta}")
    print(f"  LP value {run.lp_value}  exact optimum {best}  allowed gap {eps * norm_c}")
    print(f"  worst scaled violation {max(run.violations.values())}")
    opened = [int(v) for v in run.x[:arcs]]
    flows = [run.x[arcs + e] * data.w[e] for e in range(arcs)]
    print(f"  arcs opened {opened} flows {[str(f) for f in flows]}  (exact: {y}, {[str(f) for f in flow]})")

"""Naive exhaustive solvers used as ground truth.

They share nothing with the table builder or the LP code: GB feasibility goes
through each oracle's per-assignment ``accepts`` and PO feasibility through
exact polynomial evaluation on the discretized grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .poly import POProblem, evaluate, scaled_violation, to_rational

ZERO = Fraction(0)
DEFAULT_CAP = 20


class CapExceeded(RuntimeError):
    pass


@dataclass
class BruteForceResult:
    status: str  # "optimal" or "infeasible"
    point: tuple | None
    objective: Fraction | None
    examined: int = 0
    feasible_count: int = 0


def _enumerate(domains: list[list], checks: list[tuple[tuple, Callable]], cost: Callable):
    """Depth-first walk over the product of ``domains`` in lexicographic order.

    A check ``(support, fn)`` runs once every variable of its support is fixed, so
    subtrees that already fail are skipped; every completed assignment is costed.
    """
    n = len(domains)
    at_depth: list[list] = [[] for _ in range(n + 1)]
    for support, fn in checks:
        at_depth[max(support) + 1 if support else 0].append((support, fn))
    best = None
    examined = feasible = 0
    x = [None] * n
    if not all(fn(()) for _, fn in at_depth[0]):
        return None, 0, 0

    def walk(d):
        nonlocal best, examined, feasible
        if d == n:
            examined += 1
            feasible += 1
            value = cost(x)
            if best is None or value < best[0]:
                best = (value, tuple(x))
            return
        for v in domains[d]:
            x[d] = v
            if all(fn(tuple(x[j] for j in sup)) for sup, fn in at_depth[d + 1]):
                walk(d + 1)
            else:
                examined += 1
        x[d] = None

    walk(0)
    return best, examined, feasible


def solve_gb_bruteforce(gb, cap: int = DEFAULT_CAP) -> BruteForceResult:
    if gb.n > cap:
        raise CapExceeded(f"{gb.n} binary variables exceed the brute-force cap of {cap}")
    checks = []
    for con in gb.constraints:
        cache: dict = {}

        def fn(vals, oracle=con.oracle, cache=cache):
            if vals not in cache:
                cache[vals] = oracle.accepts(vals)
            return cache[vals]

        checks.append((tuple(con.support), fn))
    c = gb.c
    best, examined, feasible = _enumerate([[0, 1]] * gb.n, checks,
                                          lambda x: sum((cj for cj, xj in zip(c, x) if xj), ZERO))
    if best is None:
        return BruteForceResult("infeasible", None, None, examined, feasible)
    return BruteForceResult("optimal", best[1], best[0], examined, feasible)


def grid_values(L: int) -> list[Fraction]:
    return [Fraction(k, 2 ** L) for k in range(2 ** L)]


def solve_po_bruteforce(problem: POProblem, pl, cap: int = DEFAULT_CAP) -> BruteForceResult:
    """Optimum of the discretized problem: binaries in {0,1}, continuous values on the
    grid ``k / 2**L``, each constraint relaxed by ``delta * ||f||_1``.  The returned
    point is in the original PO variables."""
    n_bits = problem.p + (problem.n - problem.p) * pl.L
    if n_bits > cap:
        raise CapExceeded(f"{n_bits} bits exceed the brute-force cap of {cap}")
    delta = pl.delta
    domains = [[ZERO, Fraction(1)] if j < problem.p else grid_values(pl.L) for j in range(problem.n)]
    checks = []
    for con in problem.constraints:
        sup = tuple(sorted(con.poly.support()))
        budget = delta * con.poly.one_norm()

        def fn(vals, poly=con.poly, sup=sup, budget=budget, eq=con.sense == "="):
            value = evaluate(poly, dict(zip(sup, vals)))
            return abs(value) <= budget if eq else value >= -budget

        checks.append((sup, fn))
    c = problem.c
    best, examined, feasible = _enumerate(domains, checks,
                                          lambda x: sum((cj * xj for cj, xj in zip(c, x)), ZERO))
    if best is None:
        return BruteForceResult("infeasible", None, None, examined, feasible)
    return BruteForceResult("optimal", best[1], best[0], examined, feasible)


def solve_po_exact_binary(problem: POProblem, cap: int = DEFAULT_CAP) -> BruteForceResult:
    """Exact optimum of a pure-binary PO by exhaustion."""
    if problem.p != problem.n:
        raise ValueError("problem has continuous variables")
    if problem.n > cap:
        raise CapExceeded(f"{problem.n} variables exceed the brute-force cap of {cap}")
    checks = []
    for con in problem.constraints:
        sup = tuple(sorted(con.poly.support()))

        def fn(vals, poly=con.poly, sup=sup, eq=con.sense == "="):
            value = evaluate(poly, dict(zip(sup, vals)))
            return value == 0 if eq else value >= 0

        checks.append((sup, fn))
    c = problem.c
    best, examined, feasible = _enumerate([[ZERO, Fraction(1)]] * problem.n, checks,
                                          lambda x: sum((cj * xj for cj, xj in zip(c, x)), ZERO))
    if best is None:
        return BruteForceResult("infeasible", None, None, examined, feasible)
    return BruteForceResult("optimal", best[1], best[0], examined, feasible)


@dataclass
class PipelineReport:
    checks: dict = field(default_factory=dict)  # name -> (ok, detail)

    @property
    def ok(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def failures(self) -> list[str]:
        return [name for name, (ok, _) in self.checks.items() if not ok]


def verify_pipeline(problem: POProblem, epsilon, run, known_feasible: Sequence = (),
                    bf: BruteForceResult | None = None) -> PipelineReport:
    """Check a completed PO run: tolerance of the recovered point, LP value against the
    brute-force discretized optimum and known feasible points, and extraction exactness."""
    eps = to_rational(epsilon)
    rep = PipelineReport()
    if run.status != "optimal":
        rep.checks["status"] = (bf is not None and bf.status == "infeasible", f"pipeline status {run.status}")
        return rep
    viol = scaled_violation(problem, run.x)
    rep.checks["tolerance"] = (viol <= eps, f"scaled violation {viol} vs epsilon {eps}")
    lp = run.lp_value
    delta = run.plan.delta
    norm_c = sum((abs(v) for v in problem.c), ZERO)
    if bf is not None:
        ok = bf.status == "optimal" and lp <= bf.objective
        rep.checks["lp_vs_bruteforce"] = (ok, f"LP {lp} vs brute force {bf.objective}")
    for k, xt in enumerate(known_feasible):
        bound = problem.objective(xt) + delta * norm_c
        ref = bf.objective if bf is not None and bf.status == "optimal" else lp
        rep.checks[f"known_{k}"] = (lp <= ref <= bound, f"LP {lp}, reference {ref}, bound {bound}")
    cost = problem.objective(run.x)
    rep.checks["extraction"] = (cost == lp, f"c.x* = {cost} vs LP {lp}")
    return rep

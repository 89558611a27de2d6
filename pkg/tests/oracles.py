"""Test-side reference computations that share no code with the solvers under test."""

import itertools
from fractions import Fraction as F

from twlp.lp import LPModel
from twlp.lpsolve import solve
from twlp.poly import evaluate


def npo_binary_optimum(problem):
    """Exhaustive optimum of a pure-binary NPO (None when infeasible)."""
    best = None
    for xs in itertools.product([0, 1], repeat=problem.n):
        ok = True
        for k in problem.constraints:
            v = evaluate(k.total(), xs)
            ok = v == 0 if k.sense == "=" else v >= 0
            if not ok:
                break
        if ok:
            val = problem.objective(xs)
            best = val if best is None else min(best, val)
    return best


def _partial(poly, fixed, n_fixed):
    """Substitute the first ``n_fixed`` variables; the rest must enter linearly."""
    const, lin = F(0), {}
    for mono, coef in poly.terms.items():
        free = [(j, e) for j, e in mono if j >= n_fixed]
        val = coef
        for j, e in mono:
            if j < n_fixed:
                val *= F(fixed[j]) ** e
        if not free:
            const += val
        else:
            assert len(free) == 1 and free[0][1] == 1, "split variables must enter linearly"
            lin[free[0][0]] = lin.get(free[0][0], F(0)) + val
    return const, lin


def split_binary_optimum(split_problem, n_source):
    """Optimum of the split problem: enumerate the source binaries and decide each
    by an exact LP over the split variables in [0, 1]."""
    best = None
    extra = list(range(n_source, split_problem.n))
    for xs in itertools.product([0, 1], repeat=n_source):
        model = LPModel()
        col = {j: model.add_var(f"y{j}", upper=1) for j in extra}
        bad = False
        for k in split_problem.constraints:
            const, lin = _partial(k.total(), xs, n_source)
            if not lin:
                if (const != 0) if k.sense == "=" else (const < 0):
                    bad = True
                    break
                continue
            model.add_row({col[j]: a for j, a in lin.items()}, k.sense, -const)
        if bad:
            continue
        if model.num_rows and solve(model).status != "optimal":
            continue
        val = sum((c * x for c, x in zip(split_problem.c, xs)), F(0))
        best = val if best is None else min(best, val)
    return best

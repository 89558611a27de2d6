"""LP solving front end.

``exact`` (default): HiGHS proposes a basis in floating point, then the exact
revised simplex verifies it (and pivots further with Bland's rule if needed).
Every returned optimum carries a rational dual vector that :func:`check_optimality`
verifies independently of the solver.  ``bland`` skips HiGHS entirely; ``float``
returns HiGHS values unverified.
"""

from __future__ import annotations

from fractions import Fraction

import highspy
import numpy as np

from .lp import LPModel, LPSolution
from .simplex import (ZERO, SingularBasis, StandardForm, revised_simplex, solve_exact_simplex,
                      standard_form, to_model_solution, two_phase, with_artificials)

SOLVERS = ("exact", "bland", "float")


def _highs_run(m: int, cols: list, cost: list, row_lo: list, row_hi: list, col_hi=None):
    """Solve ``min cost.x, row_lo <= A x <= row_hi, 0 <= x <= col_hi`` with HiGHS."""
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("random_seed", 0)
    h.setOptionValue("threads", 1)
    lp = highspy.HighsLp()
    n = len(cols)
    lp.num_col_ = n
    lp.num_row_ = m
    lp.col_cost_ = np.array([float(c) for c in cost], dtype=float)
    lp.col_lower_ = np.zeros(n)
    lp.col_upper_ = np.array([highspy.kHighsInf if col_hi is None or col_hi[j] is None else float(col_hi[j])
                              for j in range(n)], dtype=float)
    inf = highspy.kHighsInf
    lp.row_lower_ = np.array([-inf if v is None else float(v) for v in row_lo], dtype=float)
    lp.row_upper_ = np.array([inf if v is None else float(v) for v in row_hi], dtype=float)
    start, index, value = [0], [], []
    for col in cols:
        for i in sorted(col):
            index.append(i)
            value.append(float(col[i]))
        start.append(len(index))
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = np.array(start, dtype=np.int32)
    lp.a_matrix_.index_ = np.array(index, dtype=np.int32)
    lp.a_matrix_.value_ = np.array(value, dtype=float)
    lp.a_matrix_.num_col_ = n
    lp.a_matrix_.num_row_ = m
    h.passModel(lp)
    h.run()
    return h


def _status_name(h) -> str:
    st = h.getModelStatus()
    if st == highspy.HighsModelStatus.kOptimal:
        return "optimal"
    if st == highspy.HighsModelStatus.kInfeasible:
        return "infeasible"
    if st in (highspy.HighsModelStatus.kUnbounded, highspy.HighsModelStatus.kUnboundedOrInfeasible):
        return "unbounded"
    return "other"


def _highs_basis(h, m: int, n: int) -> list | None:
    """Basic columns (row-basic entries become the row's artificial column ``n + i``)."""
    basis = h.getBasis()
    if not basis.valid:
        return None
    out = [j for j, s in enumerate(basis.col_status) if s == highspy.HighsBasisStatus.kBasic]
    out += [n + i for i, s in enumerate(basis.row_status) if s == highspy.HighsBasisStatus.kBasic]
    return out if len(out) == m else None


def _warm_optimal(std: StandardForm, basis: list):
    """Phase 2 from a crash basis, artificial columns frozen at zero."""
    cols, art = with_artificials(std)
    cost = list(std.cost) + [ZERO] * std.m
    try:
        res = revised_simplex(std, basis, cols, cost, frozen=art)
    except SingularBasis:
        return None
    if res.status == "optimal":
        if any(res.x[a] for a in art):
            return None
        res.x = res.x[:std.n]
        return res
    if res.status == "unbounded":
        return res
    return None


def solve(model: LPModel, solver: str = "exact") -> LPSolution:
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}")
    if solver == "bland":
        return solve_exact_simplex(model)
    if solver == "float":
        return solve_float(model)
    std = standard_form(model)
    if std.m == 0:
        return solve_exact_simplex(model)
    h = _highs_run(std.m, std.cols, std.cost, std.b, std.b)
    status = _status_name(h)
    if status == "optimal":
        basis = _highs_basis(h, std.m, std.n)
        if basis is not None:
            res = _warm_optimal(std, basis)
            if res is not None:
                return to_model_solution(model, std, res, "highs+exact")
    start = None
    if status in ("infeasible", "optimal"):
        cols, _ = with_artificials(std)
        cost1 = [ZERO] * std.n + [Fraction(1)] * std.m
        h1 = _highs_run(std.m, cols, cost1, std.b, std.b)
        if _status_name(h1) == "optimal":
            start = _highs_basis(h1, std.m, len(cols))
            if start is not None:
                # row-basic entries of the phase-1 LP cannot be mapped; drop the start
                start = None if any(j >= len(cols) for j in start) else start
    return to_model_solution(model, std, two_phase(std, start=start), "highs+bland" if start else "bland")


def solve_float(model: LPModel) -> LPSolution:
    """HiGHS only; values are floats converted to Fractions, nothing is certified."""
    n = model.num_vars
    cols = [dict() for _ in range(n)]
    lo, hi = [], []
    for i, row in enumerate(model.rows):
        for j, a in row.coefs.items():
            cols[j][i] = a
        lo.append(row.rhs if row.sense in ("=", ">=") else None)
        hi.append(row.rhs if row.sense in ("=", "<=") else None)
    shift = model.lower
    if any(shift):
        raise ValueError("float path expects zero lower bounds")
    h = _highs_run(model.num_rows, cols, [model.objective.get(j, 0) for j in range(n)], lo, hi, model.upper)
    status = _status_name(h)
    if status != "optimal":
        return LPSolution(status if status != "other" else "unknown", method="highs", exact=False)
    sol = h.getSolution()
    x = [Fraction(float(v)) for v in sol.col_value]
    obj = Fraction(h.getInfo().objective_function_value) + model.obj_const
    return LPSolution("optimal", x, obj, [Fraction(float(v)) for v in sol.row_dual], False, "highs", exact=False)


def check_optimality(model: LPModel, sol: LPSolution) -> list[str]:
    """Independent optimality check: primal feasibility, dual sign conditions and
    complementary slackness, all in exact arithmetic.  Returns the problems found."""
    if sol.status != "optimal":
        return [f"status is {sol.status}"]
    x, y = sol.x, sol.duals
    problems = [f"infeasible: {name}" for name in model.violations(x)]
    if y is None or len(y) != model.num_rows:
        return problems + ["no dual vector"]
    for i, row in enumerate(model.rows):
        if row.sense == ">=" and y[i] < 0 or row.sense == "<=" and y[i] > 0:
            problems.append(f"dual sign on {row.name}")
        if y[i] and row.activity(x) != row.rhs:
            problems.append(f"slack row {row.name} has nonzero dual")
    reduced = [model.objective.get(j, ZERO) for j in range(model.num_vars)]
    for i, row in enumerate(model.rows):
        if y[i]:
            for j, a in row.coefs.items():
                reduced[j] -= y[i] * a
    for j, d in enumerate(reduced):
        if d > 0 and x[j] != model.lower[j]:
            problems.append(f"reduced cost of {model.names[j]} positive off its lower bound")
        if d < 0 and (model.upper[j] is None or x[j] != model.upper[j]):
            problems.append(f"reduced cost of {model.names[j]} negative off its upper bound")
    if model.objective_value(x) != sol.objective:
        problems.append("objective value mismatch")
    return problems


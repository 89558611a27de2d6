"""Exact rational simplex.

The model is brought to standard form ``min c.x, A x = b, x >= 0`` (bounds shifted,
slacks added, finite upper bounds turned into rows).  The revised simplex below
uses Bland's rule, so it terminates, and it can start from any basis: a crash
basis from a floating-point solver usually needs zero or a handful of pivots.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

from .lp import LPModel, LPSolution

ZERO = Fraction(0)


class SingularBasis(ArithmeticError):
    pass


def sparse_solve(rows: list[dict], rhs: list, unknowns) -> dict:
    """Solve a square sparse system exactly; ``rows[i]`` maps unknown -> coefficient.

    Gaussian elimination with a shortest-row / sparsest-column pivot choice.
    Raises :class:`SingularBasis` when the system is singular.
    """
    m = len(rows)
    if len(set(unknowns)) != m:
        raise SingularBasis("system is not square")
    rows = [dict(r) for r in rows]
    rhs = [Fraction(v) for v in rhs]
    col_rows: dict = {}
    for i, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    active = [True] * m
    heap = [(len(r), i) for i, r in enumerate(rows)]
    heapq.heapify(heap)
    order = []
    while heap:
        size, i = heapq.heappop(heap)
        if not active[i] or size != len(rows[i]):
            continue
        row = rows[i]
        if not row:
            raise SingularBasis("singular system")
        c = min(row, key=lambda cc: (len(col_rows[cc]), str(cc)))
        piv = row[c]
        active[i] = False
        for cc in row:
            col_rows[cc].discard(i)
        for k in list(col_rows[c]):
            target = rows[k]
            f = target[c] / piv
            for cc, v in row.items():
                nv = target.get(cc, ZERO) - f * v
                if nv:
                    if cc not in target:
                        col_rows[cc].add(k)
                    target[cc] = nv
                else:
                    target.pop(cc, None)
                    col_rows[cc].discard(k)
            rhs[k] -= f * rhs[i]
            heapq.heappush(heap, (len(target), k))
        order.append((i, c))
    if len(order) != m:
        raise SingularBasis("singular system")
    x = {}
    for i, c in reversed(order):
        row = rows[i]
        s = rhs[i]
        for cc, v in row.items():
            if cc != c:
                s -= v * x[cc]
        x[c] = s / row[c]
    return x


@dataclass
class StandardForm:
    """``min c.x + const, A x = b, x >= 0``, stored by columns."""

    m: int
    cols: list = field(default_factory=list)  # column -> {row: coef}
    cost: list = field(default_factory=list)
    b: list = field(default_factory=list)
    col_kind: list = field(default_factory=list)  # ("var", j) | ("slack", i) | ("ub", j) | ("art", i)
    row_kind: list = field(default_factory=list)  # ("row", i) | ("ub", j)
    const: Fraction = ZERO
    shift: list = field(default_factory=list)
    var_col: dict = field(default_factory=dict)
    slack_col: dict = field(default_factory=dict)
    ub_col: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.cols)

    def add_col(self, entries: dict, cost, kind) -> int:
        self.cols.append({i: Fraction(v) for i, v in entries.items() if v})
        self.cost.append(Fraction(cost))
        self.col_kind.append(kind)
        return len(self.cols) - 1


def standard_form(model: LPModel) -> StandardForm:
    std = StandardForm(0)
    shift = list(model.lower)
    std.shift = shift
    std.const = model.obj_const + sum((a * shift[j] for j, a in model.objective.items()), ZERO)
    by_var: list[dict] = [{} for _ in range(model.num_vars)]
    for i, row in enumerate(model.rows):
        rhs = row.rhs - sum((a * shift[j] for j, a in row.coefs.items()), ZERO)
        for j, a in row.coefs.items():
            by_var[j][i] = a
        std.b.append(rhs)
        std.row_kind.append(("row", i))
    ub_rows = {}
    for j in range(model.num_vars):
        if model.upper[j] is not None:
            r = len(std.b)
            std.b.append(model.upper[j] - shift[j])
            std.row_kind.append(("ub", j))
            by_var[j][r] = Fraction(1)
            ub_rows[j] = r
    std.m = len(std.b)
    for j in range(model.num_vars):
        std.var_col[j] = std.add_col(by_var[j], model.objective.get(j, ZERO), ("var", j))
    for i, row in enumerate(model.rows):
        if row.sense != "=":
            std.slack_col[i] = std.add_col({i: -1 if row.sense == ">=" else 1}, 0, ("slack", i))
    for j, r in ub_rows.items():
        std.ub_col[j] = std.add_col({r: 1}, 0, ("ub", j))
    return std


@dataclass
class SimplexResult:
    status: str
    basis: list
    x: list  # standard-form values
    y: list  # row duals
    objective: Fraction | None
    pivots: int = 0


def _basic_solution(std: StandardForm, basis: list, cols=None, cost=None):
    cols = cols or std.cols
    rows = [dict() for _ in range(std.m)]
    for k, col in enumerate(basis):
        for i, v in cols[col].items():
            rows[i][k] = v
    xb = sparse_solve(rows, std.b, range(std.m))
    return [xb[k] for k in range(std.m)]


def _duals(std: StandardForm, basis: list, cols, cost) -> list:
    rows = [dict(cols[col]) for col in basis]
    y = sparse_solve(rows, [cost[col] for col in basis], range(std.m))
    return [y[i] for i in range(std.m)]


def _direction(std: StandardForm, basis: list, cols, entering: int) -> list:
    rows = [dict() for _ in range(std.m)]
    for k, col in enumerate(basis):
        for i, v in cols[col].items():
            rows[i][k] = v
    w = sparse_solve(rows, [cols[entering].get(i, ZERO) for i in range(std.m)], range(std.m))
    return [w[k] for k in range(std.m)]


def revised_simplex(std: StandardForm, basis: list, cols=None, cost=None, frozen=(), max_pivots=None):
    """Primal simplex with Bland's rule from a primal feasible ``basis``.

    Columns in ``frozen`` never enter.  Returns a :class:`SimplexResult`.
    """
    cols = cols if cols is not None else std.cols
    cost = cost if cost is not None else std.cost
    frozen = set(frozen)
    basis = list(basis)
    pivots = 0
    while True:
        xb = _basic_solution(std, basis, cols)
        if any(v < 0 for v in xb):
            return SimplexResult("primal-infeasible-basis", basis, [], [], None, pivots)
        y = _duals(std, basis, cols, cost)
        in_basis = set(basis)
        entering = None
        for j in range(len(cols)):
            if j in in_basis or j in frozen:
                continue
            d = cost[j] - sum((y[i] * v for i, v in cols[j].items()), ZERO)
            if d < 0:
                entering = j
                break
        if entering is None:
            x = [ZERO] * len(cols)
            for k, col in enumerate(basis):
                x[col] = xb[k]
            obj = sum((cost[j] * x[j] for j in range(len(cols))), ZERO)
            return SimplexResult("optimal", basis, x, y, obj, pivots)
        w = _direction(std, basis, cols, entering)
        best = None
        for k in range(std.m):
            if w[k] > 0:
                key = (xb[k] / w[k], basis[k])
                if best is None or key < best[0]:
                    best = (key, k)
        if best is None:
            return SimplexResult("unbounded", basis, [], y, None, pivots)
        basis[best[1]] = entering
        pivots += 1
        if max_pivots is not None and pivots > max_pivots:
            return SimplexResult("pivot-limit", basis, [], [], None, pivots)


def with_artificials(std: StandardForm):
    """Columns of ``std`` followed by one artificial column per row, signed so that
    the all-artificial basis is primal feasible."""
    cols = list(std.cols)
    art = []
    for i in range(std.m):
        art.append(len(cols))
        cols.append({i: Fraction(1 if std.b[i] >= 0 else -1)})
    return cols, art


def two_phase(std: StandardForm, start=None, max_pivots=None) -> SimplexResult:
    """Phase 1 over artificial columns, then phase 2, both with Bland's rule.

    ``start`` is an optional phase-1 basis over the extended columns; it is used
    when it is nonsingular and primal feasible, otherwise the artificial basis is.
    """
    n0 = std.n
    cols, art = with_artificials(std)
    cost1 = [ZERO] * n0 + [Fraction(1)] * std.m
    res = None
    if start is not None:
        try:
            res = revised_simplex(std, start, cols, cost1, max_pivots=max_pivots)
        except SingularBasis:
            res = None
        if res is not None and res.status != "optimal":
            res = None
    if res is None:
        res = revised_simplex(std, art, cols, cost1, max_pivots=max_pivots)
    if res.status != "optimal":
        raise ArithmeticError(f"phase 1 ended with status {res.status}")
    if res.objective > 0:
        return SimplexResult("infeasible", res.basis, [], res.y, res.objective, res.pivots)
    basis = list(res.basis)
    art_set = set(art)
    # pivot zero-valued artificials out where some real column can replace them
    for k in range(std.m):
        if basis[k] not in art_set:
            continue
        u = _duals(std, basis, cols, [Fraction(int(c == basis[k])) for c in range(len(cols))])
        in_basis = set(basis)
        for j in range(n0):
            if j not in in_basis and sum((u[i] * v for i, v in cols[j].items()), ZERO):
                basis[k] = j
                break
    cost2 = list(std.cost) + [ZERO] * std.m
    res2 = revised_simplex(std, basis, cols, cost2, frozen=art_set, max_pivots=max_pivots)
    res2.pivots += res.pivots
    res2.x = res2.x[:n0] if res2.x else res2.x
    return res2


def to_model_solution(model: LPModel, std: StandardForm, res: SimplexResult, method: str) -> LPSolution:
    if res.status == "infeasible":
        return LPSolution("infeasible", method=method, certified=True)
    if res.status == "unbounded":
        return LPSolution("unbounded", method=method, certified=True)
    if res.status != "optimal":
        raise ArithmeticError(f"simplex ended with status {res.status}")
    x = [std.shift[j] + res.x[std.var_col[j]] for j in range(model.num_vars)]
    duals = [ZERO] * model.num_rows
    for r, kind in enumerate(std.row_kind):
        if kind[0] == "row":
            duals[kind[1]] = res.y[r]
    return LPSolution("optimal", x, model.objective_value(x), duals, True, method)


def solve_exact_simplex(model: LPModel, max_pivots=None) -> LPSolution:
    """Reference engine: two-phase Bland simplex from scratch."""
    std = standard_form(model)
    if std.m == 0:
        if any(a < 0 and model.upper[j] is None for j, a in model.objective.items()):
            return LPSolution("unbounded", method="bland", certified=True)
        x = [model.upper[j] if model.objective.get(j, ZERO) < 0 else model.lower[j]
             for j in range(model.num_vars)]
        return LPSolution("optimal", x, model.objective_value(x), [], True, "bland")
    return to_model_solution(model, std, two_phase(std, max_pivots), "bland")

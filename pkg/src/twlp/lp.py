"""Sparse rational LP container and its LP-text export."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .poly import format_rational, to_rational

ROW_SENSES = ("=", ">=", "<=")


@dataclass
class Row:
    coefs: dict  # var index -> Fraction
    sense: str
    rhs: Fraction
    name: str

    def activity(self, x) -> Fraction:
        return sum((a * x[j] for j, a in self.coefs.items()), Fraction(0))

    def satisfied(self, x) -> bool:
        lhs = self.activity(x)
        if self.sense == "=":
            return lhs == self.rhs
        return lhs >= self.rhs if self.sense == ">=" else lhs <= self.rhs


class LPModel:
    """``min obj.x + const`` over named variables with ``lower <= x <= upper`` and sparse rows.

    Each variable may carry a role tuple, e.g. ``("lambda", t, bits)``, ``("Z", S)``
    or ``("X", Y, N)``, used by the extraction code.
    """

    def __init__(self, name: str = "lp"):
        self.name = name
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self.roles: list = []
        self.lower: list[Fraction] = []
        self.upper: list[Fraction | None] = []
        self.rows: list[Row] = []
        self.objective: dict[int, Fraction] = {}
        self.obj_const = Fraction(0)
        self.warnings: list[str] = []
        self.meta: dict = {}

    @property
    def num_vars(self) -> int:
        return len(self.names)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def add_var(self, name: str, role=None, lower=0, upper=None) -> int:
        if name in self.index:
            raise ValueError(f"duplicate variable {name!r}")
        j = len(self.names)
        self.names.append(name)
        self.index[name] = j
        self.roles.append(role)
        self.lower.append(to_rational(lower))
        self.upper.append(None if upper is None else to_rational(upper))
        return j

    def var(self, name: str) -> int:
        return self.index[name]

    def add_row(self, coefs: Mapping[int, object], sense: str, rhs=0, name: str | None = None) -> int:
        if sense not in ROW_SENSES:
            raise ValueError(f"bad row sense {sense!r}")
        clean = {}
        for j, a in coefs.items():
            a = to_rational(a)
            if a:
                clean[int(j)] = clean.get(int(j), Fraction(0)) + a
        clean = {j: a for j, a in sorted(clean.items()) if a}
        self.rows.append(Row(clean, sense, to_rational(rhs), name or f"r{len(self.rows)}"))
        return len(self.rows) - 1

    def set_objective(self, coefs: Mapping[int, object], const=0):
        self.objective = {int(j): to_rational(a) for j, a in sorted(coefs.items()) if to_rational(a)}
        self.obj_const = to_rational(const)

    def objective_value(self, x) -> Fraction:
        return self.obj_const + sum((a * x[j] for j, a in self.objective.items()), Fraction(0))

    def violations(self, x) -> list[str]:
        """Names of violated rows and bounds at ``x`` (exact)."""
        bad = []
        for j in range(self.num_vars):
            if x[j] < self.lower[j] or (self.upper[j] is not None and x[j] > self.upper[j]):
                bad.append(f"bound:{self.names[j]}")
        for row in self.rows:
            if not row.satisfied(x):
                bad.append(row.name)
        return bad

    def is_feasible(self, x) -> bool:
        return not self.violations(x)

    def nonzeros(self) -> int:
        return sum(len(r.coefs) for r in self.rows)

    def role_index(self, kind: str) -> dict:
        """Map ``role[1:]`` -> var index for every variable whose role starts with ``kind``."""
        return {r[1:]: j for j, r in enumerate(self.roles) if r is not None and r[0] == kind}

    def to_lp_text(self) -> str:
        return write_lp(self)

    def __repr__(self):
        return f"LPModel({self.name!r}, vars={self.num_vars}, rows={self.num_rows})"


def _decimal(q: Fraction) -> str | None:
    """Exact terminating decimal for ``q`` or None."""
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    digits = max(twos, fives)
    if digits == 0:
        return str(q.numerator)
    scaled = q.numerator * 10 ** digits // q.denominator
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _coef_text(q: Fraction, inexact: list) -> str:
    text = _decimal(q)
    if text is None:
        inexact.append(q)
        text = repr(float(q))
    return text


def _linear_text(coefs: Mapping[int, Fraction], names, inexact) -> str:
    if not coefs:
        return "0"
    parts = []
    for j, a in coefs.items():
        mag = _coef_text(abs(a), inexact)
        sign = "-" if a < 0 else "+"
        term = names[j] if mag == "1" else f"{mag} {names[j]}"
        parts.append(f"{sign} {term}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def write_lp(model: LPModel) -> str:
    """CPLEX-style LP text.  Coefficients without a terminating decimal expansion are
    written as floats and listed exactly in a trailing comment."""
    inexact: list[Fraction] = []
    lines = [f"\\ {model.name}", "Minimize"]
    obj = _linear_text(model.objective, model.names, inexact)
    if model.obj_const:
        c = model.obj_const
        obj += f" {'-' if c < 0 else '+'} {_coef_text(abs(c), inexact)}"
    lines.append(f" obj: {obj}")
    lines.append("Subject To")
    for row in model.rows:
        lhs = _linear_text(row.coefs, model.names, inexact)
        lines.append(f" {row.name}: {lhs} {row.sense} {_coef_text(row.rhs, inexact)}")
    bounds = []
    for j, name in enumerate(model.names):
        lo, up = model.lower[j], model.upper[j]
        if up is not None:
            bounds.append(f" {_coef_text(lo, inexact)} <= {name} <= {_coef_text(up, inexact)}")
        elif lo != 0:
            bounds.append(f" {name} >= {_coef_text(lo, inexact)}")
    if bounds:
        lines.append("Bounds")
        lines.extend(bounds)
    lines.append("End")
    if inexact:
        exact = sorted(set(inexact))
        lines.append("\\ exact values of rounded coefficients: " +
                     ", ".join(format_rational(q) for q in exact))
    return "\n".join(lines) + "\n"


@dataclass
class LPSolution:
    status: str  # "optimal", "infeasible", "unbounded"
    x: list = field(default_factory=list)
    objective: Fraction | None = None
    duals: list | None = None
    certified: bool = False
    method: str = ""
    exact: bool = True

    def value(self, model: LPModel, name: str) -> Fraction:
        return self.x[model.index[name]]

    def to_json(self, model: LPModel) -> dict:
        out = {"status": self.status, "method": self.method, "certified": self.certified}
        if self.objective is not None:
            out["objective"] = format_rational(self.objective)
        if self.x:
            out["values"] = {model.names[j]: format_rational(v) for j, v in enumerate(self.x) if v}
        return out

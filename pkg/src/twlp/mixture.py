"""Write a feasible lifted-LP point as a convex combination of feasible 0/1 points.

The tree is rooted at its smallest leaf and processed bottom-up.  A node starts
from the atoms given by its own lambda values; each child subtree is then glued
on, separator pattern by separator pattern, with weight ``mu_i * mu_h / X[a, b]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .gb import FeasibleTable, GBProblem, bits_of, omega
from .graphs import TreeDecomposition
from .lp import LPModel
from .poly import StructuralError, format_rational

ZERO = Fraction(0)


class DecompositionError(StructuralError):
    pass


@dataclass
class Mixture:
    atoms: list = field(default_factory=list)  # [(weight, 0/1 tuple over all GB variables)]

    def total(self) -> Fraction:
        return sum((mu for mu, _ in self.atoms), ZERO)

    def average(self, c: Sequence) -> Fraction:
        return sum((mu * sum((cj * xj for cj, xj in zip(c, x)), ZERO) for mu, x in self.atoms), ZERO)

    def probability(self, y: Sequence[int], n: Sequence[int]) -> Fraction:
        """Weight of the atoms with ones on ``y`` and zeros on ``n``."""
        return sum((mu for mu, x in self.atoms if all(x[j] for j in y) and not any(x[j] for j in n)), ZERO)

    def to_json(self) -> list:
        return [{"weight": format_rational(mu), "x": list(x)} for mu, x in self.atoms]


def lambda_values(model: LPModel, point: Sequence) -> dict:
    """``t -> {assignment index: value}`` for the nonzero lambdas of ``point``."""
    lam: dict = {}
    for j, role in enumerate(model.roles):
        if role is not None and role[0] == "lambda":
            _, t, i = role
            lam.setdefault(t, {})
            if point[j]:
                lam[t][i] = Fraction(point[j])
    return lam


def _pattern(bits: dict, y, n) -> bool:
    return all(bits[j] for j in y) and not any(bits[j] for j in n)


def xhat(td: TreeDecomposition, tables: FeasibleTable, lam: dict) -> dict:
    """``(t, (Y, N)) -> sum of lambda^t_v over v with ones on Y and zeros on N``."""
    out = {}
    for t in td.nodes:
        q = tables.bags[t]
        assign = {i: dict(zip(q, bits_of(i, len(q)))) for i in lam.get(t, {})}
        for y, n in omega(td, t):
            out[(t, (y, n))] = sum((v for i, v in lam.get(t, {}).items() if _pattern(assign[i], y, n)), ZERO)
    return out


def smallest_leaf(td: TreeDecomposition) -> int:
    return min(t for t in td.nodes if td.degree(t) <= 1)


def _merge_equal(atoms: list) -> list:
    acc: dict = {}
    for mu, a in atoms:
        key = tuple(sorted(a.items()))
        acc[key] = acc.get(key, ZERO) + mu
    return [(mu, dict(key)) for key, mu in sorted(acc.items())]


def decompose(gb: GBProblem, td: TreeDecomposition, tables: FeasibleTable,
              model: LPModel, point: Sequence) -> Mixture:
    bad = model.violations(point)
    if bad:
        raise DecompositionError(f"point violates {bad[0]}" + (f" and {len(bad) - 1} more" if len(bad) > 1 else ""))
    lam = lambda_values(model, point)
    root = smallest_leaf(td)
    order, parent = td.rooted(root)
    kids = td.children(parent)
    mixtures: dict = {}
    for u in reversed(order):
        q = tables.bags[u]
        atoms = [(v, dict(zip(q, bits_of(i, len(q))))) for i, v in sorted(lam.get(u, {}).items())]
        if sum((mu for mu, _ in atoms), ZERO) != 1:
            raise DecompositionError(f"lambda values of bag {u} do not sum to 1")
        for c in kids[u]:
            sep = sorted(td.separator(u, c))
            child = mixtures.pop(c)
            by_pattern_h: dict = {}
            for mu, a in atoms:
                by_pattern_h.setdefault(tuple(a[j] for j in sep), []).append((mu, a))
            by_pattern_l: dict = {}
            for mu, a in child:
                by_pattern_l.setdefault(tuple(a[j] for j in sep), []).append((mu, a))
            merged = []
            for pat, hs in by_pattern_h.items():
                x_up = sum((mu for mu, _ in hs), ZERO)
                ls = by_pattern_l.get(pat, [])
                x_down = sum((mu for mu, _ in ls), ZERO)
                if x_up != x_down:
                    raise DecompositionError(f"bags {u} and {c} disagree on separator pattern {pat}")
                for mu_h, ah in hs:
                    for mu_l, al in ls:
                        merged.append((mu_h * mu_l / x_up, {**al, **ah}))
            stray = set(by_pattern_l) - set(by_pattern_h)
            if stray:
                raise DecompositionError(f"bags {u} and {c} disagree on separator pattern {min(stray)}")
            atoms = _merge_equal(merged)
        mixtures[u] = atoms
    final = mixtures[root]
    out = []
    for mu, a in final:
        out.append((mu, tuple(a.get(j, 0) for j in range(gb.n))))
    out.sort(key=lambda e: e[1])
    return Mixture(out)


def verify_mixture(mix: Mixture, gb: GBProblem, td: TreeDecomposition, tables: FeasibleTable,
                   model: LPModel, point: Sequence) -> list[str]:
    """Problems with ``mix`` as a decomposition of ``point`` (empty list means fine)."""
    problems = []
    if mix.total() != 1:
        problems.append(f"weights sum to {mix.total()}")
    if any(mu <= 0 for mu, _ in mix.atoms):
        problems.append("nonpositive weight")
    for mu, x in mix.atoms:
        if not gb.feasible(x):
            problems.append(f"atom {x} violates a constraint")
    for (t, (y, n)), value in xhat(td, tables, lambda_values(model, point)).items():
        if mix.probability(y, n) != value:
            problems.append(f"X[{y},{n}] at bag {t}: mixture {mix.probability(y, n)} vs LP {value}")
    return problems


def extract(mix: Mixture, c: Sequence) -> tuple:
    """Cheapest atom, ties broken by the lexicographically smallest vector."""
    if not mix.atoms:
        raise DecompositionError("empty mixture")
    return min((sum((cj * xj for cj, xj in zip(c, x)), ZERO), x) for _, x in mix.atoms)[1]

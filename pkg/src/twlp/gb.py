"""Binary problems given by supports and membership oracles, bag-feasible tables and
the two lifted LP formulations built from a tree decomposition.

Bit vectors over an ordered index set ``(j_0, ..., j_{k-1})`` are encoded as
integers with ``j_0`` as the most significant bit, so numeric order is
lexicographic order of the vectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .graphs import TreeDecomposition
from .lp import LPModel
from .poly import Polynomial, StructuralError, evaluate, to_rational


def bits_of(index: int, k: int) -> tuple:
    return tuple((index >> (k - 1 - p)) & 1 for p in range(k))


def index_of(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def _position_bits(k: int) -> np.ndarray:
    """``(2**k, k)`` array of the bit vectors 0..2**k-1, first column most significant."""
    idx = np.arange(1 << k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int64)


class Oracle:
    """Membership test over assignments to an ordered support."""

    support: tuple

    def accepts(self, bits: Sequence[int]) -> bool:
        raise NotImplementedError

    def truth_table(self) -> np.ndarray:
        """Boolean array of length ``2**len(support)`` indexed lexicographically."""
        k = len(self.support)
        return np.fromiter((self.accepts(bits_of(i, k)) for i in range(1 << k)), dtype=bool, count=1 << k)


class ListOracle(Oracle):
    """Explicit list of accepted assignments."""

    def __init__(self, support: Iterable[int], accepted: Iterable[Sequence[int]]):
        self.support = tuple(support)
        k = len(self.support)
        self.accepted = set()
        for a in accepted:
            a = tuple(int(b) for b in a)
            if len(a) != k or any(b not in (0, 1) for b in a):
                raise StructuralError(f"accepted assignment {a} does not fit support {self.support}")
            self.accepted.add(a)

    def accepts(self, bits):
        return tuple(int(b) for b in bits) in self.accepted

    def truth_table(self):
        table = np.zeros(1 << len(self.support), dtype=bool)
        for a in self.accepted:
            table[index_of(a)] = True
        return table


class CallableOracle(Oracle):
    def __init__(self, support: Iterable[int], fn: Callable[[tuple], bool]):
        self.support = tuple(support)
        self.fn = fn

    def accepts(self, bits):
        return bool(self.fn(tuple(int(b) for b in bits)))


class PolyOracle(Oracle):
    """Accepts iff ``f(x) >= rhs`` where every source variable of ``f`` is a weighted
    sum of support bits, ``x_s = sum(w * z_b for b, w in encoding[s])``.

    With the identity encoding this is a plain polynomial predicate over bits; the
    discretizer uses it with binary place-value weights.
    """

    def __init__(self, poly: Polynomial, rhs=0, encoding: Mapping[int, Sequence] | None = None):
        self.poly = poly
        self.rhs = to_rational(rhs)
        if encoding is None:
            encoding = {j: ((j, 1),) for j in poly.support()}
        self.encoding = {s: tuple((int(b), to_rational(w)) for b, w in enc) for s, enc in encoding.items()}
        missing = poly.support() - set(self.encoding)
        if missing:
            raise StructuralError(f"no encoding for x{min(missing)}")
        self.support = tuple(sorted({b for s in poly.support() for b, _ in self.encoding[s]}))

    def source_values(self, bits) -> dict:
        z = dict(zip(self.support, bits))
        return {s: sum((w * z[b] for b, w in self.encoding[s]), Fraction(0)) for s in self.poly.support()}

    def accepts(self, bits):
        return evaluate(self.poly, self.source_values(bits)) >= self.rhs

    def truth_table(self):
        k = len(self.support)
        pos = {b: p for p, b in enumerate(self.support)}
        allbits = _position_bits(k)
        scale_w, ints = {}, {}
        for s in self.poly.support():
            enc = self.encoding[s]
            w = math.lcm(*(q.denominator for _, q in enc))
            scale_w[s] = w
            col = np.zeros(1 << k, dtype=object)
            for b, q in enc:
                col = col + allbits[:, pos[b]].astype(object) * int(q * w)
            ints[s] = col
        maxexp = {s: 0 for s in scale_w}
        for mono in self.poly.terms:
            for s, e in mono:
                maxexp[s] = max(maxexp[s], e)
        total_scale = math.lcm(self.rhs.denominator, *(c.denominator for c in self.poly.terms.values()))
        for s, e in maxexp.items():
            total_scale *= scale_w[s] ** e
        scaled_terms = []
        bound = 0
        for mono, coef in self.poly.terms.items():
            den = 1
            for s, e in mono:
                den *= scale_w[s] ** e
            k_coef = coef * total_scale / den
            assert k_coef.denominator == 1
            k_coef = int(k_coef)
            size = abs(k_coef)
            for s, e in mono:
                size *= max(1, max(abs(int(v)) for v in ints[s])) ** e if len(ints[s]) else 1
            bound += size
            scaled_terms.append((mono, k_coef))
        rhs_scaled = int(self.rhs * total_scale)
        bound += abs(rhs_scaled)
        dtype = np.int64 if bound < 2 ** 62 else object
        acc = np.zeros(1 << k, dtype=dtype)
        cols = {s: ints[s].astype(dtype) for s in ints}
        for mono, k_coef in scaled_terms:
            term = np.full(1 << k, k_coef, dtype=dtype)
            for s, e in mono:
                for _ in range(e):
                    term = term * cols[s]
            acc = acc + term
        return np.asarray(acc >= rhs_scaled, dtype=bool)


@dataclass
class GBConstraint:
    oracle: Oracle
    label: str = ""

    @property
    def support(self) -> tuple:
        return self.oracle.support


@dataclass
class GBProblem:
    """``min c.x`` over ``x in {0,1}^n`` with each constraint given by an oracle."""

    n: int
    c: tuple
    constraints: list = field(default_factory=list)
    names: list | None = None

    def __post_init__(self):
        self.c = tuple(to_rational(v) for v in self.c)
        if len(self.c) != self.n:
            raise StructuralError(f"objective has {len(self.c)} entries, expected {self.n}")
        self.constraints = [k if isinstance(k, GBConstraint) else GBConstraint(k) for k in self.constraints]
        for i, con in enumerate(self.constraints):
            sup = con.support
            if not sup:
                raise StructuralError(f"constraint {i} has empty support")
            if list(sup) != sorted(set(sup)):
                raise StructuralError(f"constraint {i} support must be sorted and distinct")
            if sup[0] < 0 or sup[-1] >= self.n:
                raise StructuralError(f"constraint {i} support leaves 0..{self.n - 1}")

    @property
    def supports(self) -> list[tuple]:
        return [con.support for con in self.constraints]

    def objective(self, x) -> Fraction:
        return sum((ci * int(xi) for ci, xi in zip(self.c, x)), Fraction(0))

    def feasible(self, x) -> bool:
        """Exact per-assignment check through every oracle's ``accepts``."""
        return all(con.oracle.accepts([x[j] for j in con.support]) for con in self.constraints)

    def expected_queries(self) -> int:
        return sum(1 << len(s) for s in self.supports)


class CoverError(StructuralError):
    def __init__(self, i, support):
        super().__init__(f"constraint {i} with support {list(support)} lies in no bag")
        self.constraint = i


def cover_check(gb: GBProblem, td: TreeDecomposition) -> dict[int, int]:
    """Assign each constraint to the smallest node whose bag contains its support."""
    out = {}
    for i, sup in enumerate(gb.supports):
        t = td.covering_node(sup)
        if t is None:
            raise CoverError(i, sup)
        out[i] = t
    return out


@dataclass
class OracleStats:
    queries: dict = field(default_factory=dict)  # constraint -> number of assignments queried

    @property
    def total(self) -> int:
        return sum(self.queries.values())


@dataclass
class FeasibleTable:
    bags: dict  # t -> tuple of sorted GB variables
    feasible: dict  # t -> sorted int64 array of feasible assignment indices
    covered: dict  # t -> list of constraint ids with support inside the bag
    stats: OracleStats

    def assignments(self, t) -> list[tuple]:
        k = len(self.bags[t])
        return [bits_of(int(i), k) for i in self.feasible[t]]

    def sizes(self) -> dict:
        return {t: len(f) for t, f in self.feasible.items()}


def oracle_tables(gb: GBProblem, stats: OracleStats | None = None) -> list[np.ndarray]:
    """One truth table per constraint, each oracle queried once per assignment."""
    tables = []
    for i, con in enumerate(gb.constraints):
        table = con.oracle.truth_table()
        if table.shape != (1 << len(con.support),):
            raise StructuralError(f"oracle {i} returned a table of shape {table.shape}")
        if stats is not None:
            stats.queries[i] = stats.queries.get(i, 0) + len(table)
        tables.append(table)
    return tables


def build_feasible_tables(gb: GBProblem, td: TreeDecomposition) -> FeasibleTable:
    cover_check(gb, td)
    stats = OracleStats()
    tables = oracle_tables(gb, stats)
    bags, feasible, covered = {}, {}, {}
    for t in td.nodes:
        q = tuple(sorted(td.bags[t]))
        k = len(q)
        bags[t] = q
        pos = {j: p for p, j in enumerate(q)}
        qset = set(q)
        cov = [i for i, sup in enumerate(gb.supports) if set(sup) <= qset]
        covered[t] = cov
        idx = np.arange(1 << k, dtype=np.int64)
        mask = np.ones(1 << k, dtype=bool)
        for i in cov:
            sup = gb.supports[i]
            sub = np.zeros(1 << k, dtype=np.int64)
            for j in sup:
                sub = (sub << 1) | ((idx >> (k - 1 - pos[j])) & 1)
            mask &= tables[i][sub]
        feasible[t] = idx[mask]
    return FeasibleTable(bags, feasible, covered, stats)


def _set_name(s: Iterable[int]) -> str:
    return ".".join(str(j) for j in s)


def lambda_name(t: int, bits: Sequence[int]) -> str:
    return f"l_{t}_{''.join(str(b) for b in bits)}"


def z_name(s: Sequence[int]) -> str:
    return f"Z_{_set_name(s)}"


def x_name(y: Sequence[int], n: Sequence[int]) -> str:
    return f"X_{_set_name(y)}_{_set_name(n)}"


def _add_lambdas(model: LPModel, tables: FeasibleTable, t: int) -> list[int]:
    k = len(tables.bags[t])
    cols = []
    for i in tables.feasible[t]:
        i = int(i)
        cols.append(model.add_var(lambda_name(t, bits_of(i, k)), ("lambda", t, i)))
    model.add_row({j: 1 for j in cols}, "=", 1, f"conv_{t}")
    if not cols:
        model.warnings.append(f"bag {t} has no feasible assignment; the LP is infeasible")
    return cols


def _subset_rows(model, tables, t, cols, sets, var_for):
    """Row ``V - sum{lambda_v : v_Y = 1, v_N = 0} = 0`` for every ``(Y, N)`` in ``sets``."""
    q = tables.bags[t]
    k = len(q)
    pos = {j: p for p, j in enumerate(q)}
    feas = tables.feasible[t]
    for y, n in sets:
        ymask = sum(1 << (k - 1 - pos[j]) for j in y)
        nmask = sum(1 << (k - 1 - pos[j]) for j in n)
        hit = ((feas & ymask) == ymask) & ((feas & nmask) == 0)
        coefs = {var_for(y, n): 1}
        for c in np.nonzero(hit)[0]:
            coefs[cols[int(c)]] = -1
        model.add_row(coefs, "=", 0, f"c_{t}_{_set_name(y)}_{_set_name(n)}")


def build_lpz(gb: GBProblem, td: TreeDecomposition, tables: FeasibleTable) -> LPModel:
    """Lifted LP indexed by subsets of bags, with ``Z_S`` shared across bags."""
    model = LPModel("lpz")
    zvar: dict[tuple, int] = {}

    def var_for(s, _n):
        if s not in zvar:
            zvar[s] = model.add_var(z_name(s), ("Z", s))
        return zvar[s]

    for t in td.nodes:
        cols = _add_lambdas(model, tables, t)
        q = tables.bags[t]
        subsets = [(s, ()) for r in range(len(q) + 1) for s in itertools.combinations(q, r)]
        _subset_rows(model, tables, t, cols, subsets, var_for)
    model.set_objective({zvar[(j,)]: gb.c[j] for j in range(gb.n) if (j,) in zvar})
    model.meta = {"formulation": "lpz"}
    return model


def omega(td: TreeDecomposition, t: int) -> list[tuple]:
    """Index pairs ``(Y, N)`` of a bag: empty pair, singletons, separator partitions."""
    q = sorted(td.bags[t])
    pairs = {((), ())}
    pairs.update(((j,), ()) for j in q)
    for s in td.neighbors(t):
        sep = sorted(td.separator(t, s))
        for mask in range(1 << len(sep)):
            y = tuple(j for p, j in enumerate(sep) if mask >> p & 1)
            n = tuple(j for p, j in enumerate(sep) if not mask >> p & 1)
            pairs.add((y, n))
    return sorted(pairs, key=lambda yn: (len(yn[0]) + len(yn[1]), yn))


def build_lpgb(gb: GBProblem, td: TreeDecomposition, tables: FeasibleTable) -> LPModel:
    """Lifted LP indexed by singletons and separator partitions ``X[Y, N]``."""
    model = LPModel("lpgb")
    xvar: dict[tuple, int] = {}

    def var_for(y, n):
        if (y, n) not in xvar:
            xvar[(y, n)] = model.add_var(x_name(y, n), ("X", y, n))
        return xvar[(y, n)]

    for t in td.nodes:
        cols = _add_lambdas(model, tables, t)
        _subset_rows(model, tables, t, cols, omega(td, t), var_for)
    model.set_objective({xvar[((j,), ())]: gb.c[j] for j in range(gb.n) if ((j,), ()) in xvar})
    model.meta = {"formulation": "lpgb"}
    return model


def build_lp(gb: GBProblem, td: TreeDecomposition, tables: FeasibleTable, formulation: str) -> LPModel:
    if formulation == "lpz":
        return build_lpz(gb, td, tables)
    if formulation == "lpgb":
        return build_lpgb(gb, td, tables)
    raise ValueError(f"unknown formulation {formulation!r}")


def canonical_lift(model: LPModel, tables: FeasibleTable, x: Sequence[int]) -> list[Fraction]:
    """LP point induced by a single 0/1 vector ``x`` (indicator lambdas, product Z/X)."""
    point = []
    for role in model.roles:
        kind = role[0]
        if kind == "lambda":
            _, t, i = role
            point.append(Fraction(int(index_of([x[j] for j in tables.bags[t]]) == i)))
        elif kind == "Z":
            point.append(Fraction(int(all(x[j] for j in role[1]))))
        elif kind == "X":
            _, y, n = role
            point.append(Fraction(int(all(x[j] for j in y) and not any(x[j] for j in n))))
        else:
            raise ValueError(f"unknown role {role!r}")
    return point

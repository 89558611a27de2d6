"""Instance families: fixtures for the CLI and random suites for the tests.

Every generator is a pure function of its parameters and ``seed``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .gb import GBProblem, ListOracle, PolyOracle
from .graphs import Graph
from .npo import NPOConstraint, NPOProblem
from .poly import Constraint, POProblem, Polynomial, StructuralError, evaluate, monomial, to_rational

FAMILIES = ("knapsack", "subsetsum-scaled", "subsetsum-unscaled", "fcnf", "acopf-toy", "twtrap")


def _rng(seed) -> random.Random:
    return random.Random(seed)


# ---------------------------------------------------------------- knapsack

def knapsack(n: int = 5, a=None, b=None, c=None, seed: int = 0, po: int = 0):
    """``min c.x`` s.t. ``a.x >= b``, x binary, on a star: hub 0 carries the
    constraint and leaf ``j + 1`` owns ``x_j``.  With ``po`` set the same instance
    comes back as a plain PO (one constraint whose support is every variable)."""
    rng = _rng(seed)
    if a is None:
        a = [rng.randint(1, 8) for _ in range(n)]
    n = len(a)
    if n < 1:
        raise StructuralError("knapsack needs at least one item")
    a = [to_rational(v) for v in a]
    if b is None:
        b = math.ceil(sum(a) / 2)
    if c is None:
        c = [rng.randint(1, 8) for _ in range(n)]
    g = Graph(range(n + 1), [(0, j + 1) for j in range(n)])
    terms = {j + 1: Polynomial.var(j, a[j]) for j in range(n)}
    terms[1] = terms[1] - to_rational(b)
    con = NPOConstraint(0, terms, ">=")
    if po:
        return POProblem(n, n, tuple(c), (Constraint(con.total(), ">="),), tuple(f"x{j}" for j in range(n)))
    return NPOProblem(g, n, n, tuple(c), {j + 1: {j} for j in range(n)}, [con],
                      names=[f"x{j}" for j in range(n)])


# ---------------------------------------------------------------- subset sum

def random_subset_sum(n: int = 4, max_sum: int = 60, seed: int = 0) -> list[int]:
    """Positive integers with even total at most ``max_sum`` (so S <= max_sum / 2)."""
    rng = _rng(seed)
    while True:
        a = [rng.randint(1, 9) for _ in range(n)]
        if sum(a) % 2 == 0 and sum(a) <= max_sum:
            return a


def subset_sum(a=None, n: int = 4, scaled: bool = True, seed: int = 0) -> POProblem:
    """Equal-partition feasibility system over x_0..x_{n-1}, y_0..y_{n-1} in [0, 1].

    With ``scaled`` every row is multiplied by M = 4 n S, S = sum(a) / 2.
    """
    if a is None:
        a = random_subset_sum(n, seed=seed)
    a = [to_rational(v) for v in a]
    n = len(a)
    if n < 2 or any(v <= 0 for v in a):
        raise StructuralError("subset sum needs at least two positive integers")
    S = sum(a) / 2
    M = 4 * n * S if scaled else Fraction(1)
    x = lambda j: Polynomial.var(j)
    y = lambda j: Polynomial.var(n + j)
    rows = [M * S * y(0) - M * a[0] * x(0)]
    for i in range(1, n):
        rows.append(M * S * y(i) - M * a[i] * x(i) - M * S * y(i - 1))
    rows.append(M * y(n - 1) - M)
    for j in range(n):
        rows.append(M * x(j) - M * x(j) * x(j))
    names = [f"x{j}" for j in range(n)] + [f"y{j}" for j in range(n)]
    return POProblem(2 * n, 0, (0,) * (2 * n), tuple(Constraint(r, "=") for r in rows), tuple(names))


def subset_sum_epsilon(a) -> Fraction:
    """The tolerance ``1 / (3 S M)`` with M = 4 n S used for the unscaled system."""
    a = [to_rational(v) for v in a]
    S = sum(a) / 2
    M = 4 * len(a) * S
    return 1 / (3 * S * M)


def round_subset(x, n: int) -> list[int]:
    """Nearest-integer rounding of the x part of a subset-sum point (ties go up)."""
    return [1 if 2 * to_rational(v) >= 1 else 0 for v in x[:n]]


def has_equal_partition(a) -> bool:
    total = sum(a)
    if total % 2:
        return False
    reach = {0}
    for v in a:
        reach |= {s + v for s in reach}
    return total // 2 in reach


# ---------------------------------------------------------------- fixed-charge network flow

@dataclass
class FCNFData:
    """Arcs ``(u, v)`` with capacity w, fixed charge f and unit cost c; supplies b
    (outflow minus inflow)."""

    nodes: int
    arcs: list
    b: list
    w: list
    f: list
    cost: list

    def to_npo(self) -> NPOProblem:
        """Binary y_e (ids 0..m-1) and scaled flow x_e = w_e * xh_e (ids m..2m-1), both
        owned by the tail of arc e."""
        m = len(self.arcs)
        g = Graph(range(self.nodes), self.arcs)
        owned: dict = {u: set() for u in range(self.nodes)}
        for e, (u, v) in enumerate(self.arcs):
            owned[u] |= {e, m + e}
        cons = []
        for u in range(self.nodes):
            terms: dict = {}
            for e, (s, t) in enumerate(self.arcs):
                if s == u:
                    terms[t] = terms.get(t, Polynomial()) + Polynomial.var(m + e, self.w[e])
                elif t == u:
                    terms[s] = terms.get(s, Polynomial()) + Polynomial.var(m + e, -self.w[e])
            first = min(terms)
            terms[first] = terms[first] - self.b[u]
            cons.append(NPOConstraint(u, terms, "="))
        for e, (u, v) in enumerate(self.arcs):
            cap = Polynomial.var(e, self.w[e]) - Polynomial.var(m + e, self.w[e])
            cons.append(NPOConstraint(u, {v: cap}, ">="))
        c = list(self.f) + [ce * we for ce, we in zip(self.cost, self.w)]
        names = [f"y_{u}_{v}" for u, v in self.arcs] + [f"x_{u}_{v}" for u, v in self.arcs]
        return NPOProblem(g, 2 * m, m, tuple(c), owned, cons, names=names)


def fcnf_data(arcs: int = 3, shape: str = "path", max_value: int = 8, seed: int = 0) -> FCNFData:
    """A feasible instance on a path or caterpillar with ``arcs`` arcs.

    Flows are drawn first (integers in [0, w]) and the supplies b are read off them.
    """
    rng = _rng(seed)
    if arcs < 1:
        raise StructuralError("need at least one arc")
    if shape == "path":
        edges = [(i, i + 1) for i in range(arcs)]
    elif shape == "caterpillar":
        spine = max(1, (arcs + 1) // 2)
        edges = [(i, i + 1) for i in range(spine)]
        nxt = spine + 1
        k = 0
        while len(edges) < arcs:
            edges.append((k % (spine + 1), nxt))
            nxt += 1
            k += 1
    else:
        raise StructuralError(f"unknown FCNF shape {shape!r}; use path or caterpillar")
    nodes = 1 + max(max(e) for e in edges)
    oriented = [(u, v) if rng.random() < 0.5 else (v, u) for u, v in edges]
    w = [rng.randint(1, max_value) for _ in oriented]
    flow = [rng.randint(0, we) for we in w]
    b = [0] * nodes
    for (u, v), x in zip(oriented, flow):
        b[u] += x
        b[v] -= x
    f = [rng.randint(1, max_value) for _ in oriented]
    cost = [rng.randint(1, max_value) for _ in oriented]
    return FCNFData(nodes, oriented, b, w, f, cost)


def fcnf(arcs: int = 3, shape: str = "path", max_value: int = 8, seed: int = 0) -> NPOProblem:
    return fcnf_data(arcs, shape, max_value, seed).to_npo()


def fcnf_bruteforce(data: FCNFData):
    """Exact MILP optimum ``(value, y, x)`` by enumerating y; on a tree the flows are
    forced by the supplies, found by peeling leaves.  ``None`` when infeasible."""
    m = len(data.arcs)
    incident: dict = {u: [] for u in range(data.nodes)}
    for e, (u, v) in enumerate(data.arcs):
        incident[u].append(e)
        incident[v].append(e)
    if m != data.nodes - 1:
        raise StructuralError("the FCNF brute force handles trees only")
    if sum(data.b) != 0:
        return None
    residual = list(data.b)  # net outflow still to route
    flow = [None] * m
    alive = {u: set(es) for u, es in incident.items()}
    leaves = sorted(u for u in alive if len(alive[u]) == 1)
    while leaves:
        u = leaves.pop()
        if len(alive[u]) != 1:
            continue
        (e,) = alive[u]
        s, t = data.arcs[e]
        if s == u:
            x = residual[u]
            residual[t] += x
            other = t
        else:
            x = -residual[u]
            residual[s] -= x
            other = s
        flow[e] = Fraction(x)
        residual[u] = 0
        alive[u].discard(e)
        alive[other].discard(e)
        if len(alive[other]) == 1:
            leaves.append(other)
    best = None
    for mask in range(1 << m):
        y = [(mask >> (m - 1 - e)) & 1 for e in range(m)]
        if all(0 <= flow[e] <= data.w[e] * y[e] for e in range(m)):
            value = sum(data.f[e] * y[e] + data.cost[e] * flow[e] for e in range(m))
            if best is None or value < best[0]:
                best = (Fraction(value), y, flow)
    return best


# ---------------------------------------------------------------- toy AC-OPF

def _sym(rng, k: int, lo: int = -2, hi: int = 2) -> list[list[int]]:
    m = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            m[i][j] = m[j][i] = rng.randint(lo, hi)
    return m


def _quad(mat, vars_) -> Polynomial:
    out = Polynomial()
    for i, a in enumerate(vars_):
        for j, b in enumerate(vars_):
            if mat[i][j]:
                out = out + Polynomial({_prod(a, b): mat[i][j]})
    return out


def _prod(a: int, b: int):
    return monomial({a: 2}) if a == b else monomial({a: 1, b: 1})


def acopf_toy(n_vertices: int = 3, seed: int = 0) -> NPOProblem:
    """Path network; vertex u owns e_u = x_{2u} and f_u = x_{2u+1} in [0, 1].

    At each vertex: a two-sided bound on ``sum_h w_h' M_uv w_h`` and a lower bound on
    ``sum_h w_h' N_uv w_h`` with w_h = (e_u, f_u, e_v, f_v).  The bounds bracket zero,
    so the origin is feasible.  Two variables plus three constraints per vertex.
    """
    rng = _rng(seed)
    if n_vertices < 2:
        raise StructuralError("acopf-toy needs at least two vertices")
    g = Graph(range(n_vertices), [(i, i + 1) for i in range(n_vertices - 1)])
    cons = []
    for u in range(n_vertices):
        active, reactive = {}, {}
        for v in g.neighbors(u):
            w = [2 * u, 2 * u + 1, 2 * v, 2 * v + 1]
            active[v] = _quad(_sym(rng, 4), w)
            reactive[v] = _quad(_sym(rng, 4), w)
        size = sum((p.one_norm() for p in active.values()), Fraction(0))
        lo = -Fraction(rng.randint(0, int(size) + 1), 2)
        hi = Fraction(rng.randint(0, int(size) + 1), 2)
        lo_r = -Fraction(rng.randint(0, int(size) + 1), 2)
        first = min(active)
        low_terms = dict(active)
        low_terms[first] = low_terms[first] - lo
        up_terms = {v: -p for v, p in active.items()}
        up_terms[first] = up_terms[first] + hi
        re_terms = dict(reactive)
        re_terms[first] = re_terms[first] - lo_r
        cons += [NPOConstraint(u, low_terms), NPOConstraint(u, up_terms), NPOConstraint(u, re_terms)]
    c = []
    for u in range(n_vertices):
        c += [rng.randint(-3, 3), rng.randint(-3, 3)]
    names = []
    for u in range(n_vertices):
        names += [f"e{u}", f"f{u}"]
    return NPOProblem(g, 2 * n_vertices, 0, tuple(c), {u: {2 * u, 2 * u + 1} for u in range(n_vertices)},
                      cons, names=names)


# ---------------------------------------------------------------- trap graph

def twtrap_graph(k: int) -> Graph:
    """``k`` columns: even-indexed columns are paths on k vertices, odd-indexed
    columns a single hub joined to every vertex of both neighboring columns."""
    if k < 2:
        raise StructuralError("the trap family needs k >= 2")
    g = Graph()
    cols = []
    nxt = 0
    for col in range(k):
        size = k if col % 2 == 0 else 1
        cols.append(list(range(nxt, nxt + size)))
        nxt += size
    for col, vs in enumerate(cols):
        for v in vs:
            g.add_vertex(v)
        if col % 2 == 0:
            for a, b in zip(vs, vs[1:]):
                g.add_edge(a, b)
        else:
            hub = vs[0]
            for other in (col - 1, col + 1):
                if 0 <= other < k:
                    for v in cols[other]:
                        g.add_edge(hub, v)
    return g


def twtrap(k: int = 3, seed: int = 0) -> NPOProblem:
    """Covering problem on the trap graph: one binary per vertex and
    ``x_u + sum_{v ~ u} x_v >= 1`` at every vertex."""
    rng = _rng(seed)
    g = twtrap_graph(k)
    vs = g.vertices
    cons = []
    for u in vs:
        nb = g.neighbors(u)
        terms = {v: Polynomial.var(v) for v in nb}
        terms[nb[0]] = terms[nb[0]] + Polynomial.var(u) - 1
        cons.append(NPOConstraint(u, terms))
    c = [rng.randint(1, 5) for _ in vs]
    return NPOProblem(g, len(vs), len(vs), tuple(c), {u: {u} for u in vs}, cons)


# ---------------------------------------------------------------- random suites

def random_partial_ktree(n: int, k: int, rng: random.Random) -> list[frozenset]:
    """Bags of a random partial k-tree on 0..n-1 (each later vertex attaches to a
    subset of an earlier bag)."""
    first = min(n, k + 1)
    bags = [frozenset(range(first))]
    for j in range(first, n):
        base = rng.choice(bags)
        keep = rng.sample(sorted(base), rng.randint(1, min(k, len(base))))
        bags.append(frozenset(keep) | {j})
    return bags


def _random_poly_on(sup, rng, max_coef=3, bilinear=True) -> Polynomial:
    terms = {monomial({j: 1}): rng.choice([-max_coef, -2, -1, 1, 2, max_coef]) for j in sup}
    if bilinear and len(sup) > 1:
        a, b = rng.sample(list(sup), 2)
        terms[monomial({a: 1, b: 1})] = rng.choice([-2, -1, 1, 2])
    return Polynomial(terms)


def random_gb(seed: int, n_max: int = 14, m_max: int = 12, k: int = 3) -> GBProblem:
    """Mixed explicit-list and polynomial-predicate oracles on supports drawn from a
    partial k-tree, so the intersection graph has tree-width at most k."""
    rng = _rng(seed)
    n = rng.randint(2, n_max)
    bags = random_partial_ktree(n, k, rng)
    m = rng.randint(1, m_max)
    cons = []
    for _ in range(m):
        bag = sorted(rng.choice(bags))
        sup = sorted(rng.sample(bag, rng.randint(1, min(4, len(bag)))))
        if rng.random() < 0.5:
            density = rng.choice([0.3, 0.6, 0.9])
            acc = [tuple((i >> (len(sup) - 1 - b)) & 1 for b in range(len(sup)))
                   for i in range(1 << len(sup)) if rng.random() < density]
            cons.append(ListOracle(sup, acc))
        else:
            poly = _random_poly_on(sup, rng)
            rhs = rng.randint(-2, 1)
            cons.append(PolyOracle(poly, rhs))
    c = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(n)]
    return GBProblem(n, c, cons)


def random_po(seed: int, n_max: int = 6, p_max: int = 3, pi_max: int = 2):
    """PO with supports inside windows {j, j+1, j+2} (tree-width at most 2) and a
    planted feasible point; returns ``(problem, planted)``."""
    rng = _rng(seed)
    n = rng.randint(2, n_max)
    p = rng.randint(0, min(p_max, n))
    planted = [Fraction(rng.randint(0, 1)) if j < p else Fraction(rng.randint(0, 12), 12) for j in range(n)]
    cons = []
    for _ in range(rng.randint(1, 4)):
        start = rng.randint(0, max(0, n - 3))
        window = list(range(start, min(n, start + 3)))
        sup = sorted(rng.sample(window, rng.randint(1, len(window))))
        terms = {}
        for j in sup:
            e = rng.randint(1, pi_max) if j >= p else 1
            terms[monomial({j: e})] = rng.choice([-3, -2, -1, 1, 2, 3])
        if len(sup) > 1 and rng.random() < 0.5:
            a, b = rng.sample(sup, 2)
            mono = monomial({a: 1, b: 1})
            cont = sum(1 for j in (a, b) if j >= p)
            if cont <= pi_max:
                terms[mono] = terms.get(mono, 0) + rng.choice([-1, 1])
        poly = Polynomial(terms)
        if not poly.support():
            continue
        value = evaluate(poly, planted)
        if rng.random() < 0.3:
            cons.append(Constraint(poly - value, "="))
        else:
            slack = Fraction(rng.randint(0, 2), 2)
            cons.append(Constraint(poly - value + slack, ">="))
    if not cons:
        cons.append(Constraint(Polynomial.var(n - 1) - planted[n - 1], ">="))
    c = [rng.randint(-4, 4) for _ in range(n)]
    return POProblem(n, p, tuple(c), tuple(cons)), planted


def random_tree_edges(n: int, max_degree: int, rng: random.Random) -> list[tuple]:
    edges = []
    deg = [0] * n
    for v in range(1, n):
        choices = [u for u in range(v) if deg[u] < max_degree]
        u = rng.choice(choices)
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
    return edges


def random_npo(seed: int, v_max: int = 10, max_degree: int = 6, extra_edges: int = 1) -> NPOProblem:
    """Binary-variable NPO on a random sparse graph with a planted feasible point.

    Vertex 0 tends to be a hub, so splitting is exercised on most instances.
    """
    rng = _rng(seed)
    nv = rng.randint(3, v_max)
    hub = min(nv - 1, rng.randint(3, max_degree))
    edges = [(0, v) for v in range(1, hub + 1)]
    deg = [0] * nv
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    for v in range(hub + 1, nv):
        choices = [u for u in range(v) if deg[u] < max_degree]
        u = rng.choice(choices)
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
    g = Graph(range(nv), edges)
    for _ in range(extra_edges):
        u, v = rng.sample(range(nv), 2)
        if v not in g.adj[u] and deg[u] < max_degree and deg[v] < max_degree:
            g.add_edge(u, v)
            deg[u] += 1
            deg[v] += 1
    owned = {}
    n = 0
    for u in range(nv):
        count = rng.choice([0, 1, 1, 1, 2]) if u else 1
        owned[u] = set(range(n, n + count))
        n += count
    planted = [rng.randint(0, 1) for _ in range(n)]
    cons = []
    for u in range(nv):
        for _ in range(rng.choice([0, 1, 1, 2])):
            terms = {}
            for v in g.neighbors(u):
                pool = sorted(owned[u] | owned[v])
                if not pool or rng.random() < 0.3:
                    continue
                sup = rng.sample(pool, min(len(pool), rng.randint(1, 2)))
                terms[v] = _random_poly_on(sorted(sup), rng, bilinear=len(sup) > 1 and rng.random() < 0.5)
            if not terms:
                continue
            total = sum(terms.values(), Polynomial())
            value = evaluate(total, planted)
            first = min(terms)
            if rng.random() < 0.3:
                terms[first] = terms[first] - value
                cons.append(NPOConstraint(u, terms, "="))
            else:
                terms[first] = terms[first] - value + rng.randint(0, 1)
                cons.append(NPOConstraint(u, terms, ">="))
    c = [rng.randint(-4, 4) for _ in range(n)]
    return NPOProblem(g, n, n, tuple(c), owned, cons)


def generate(family: str, seed: int = 0, **params):
    """Dispatch used by the command line."""
    if family == "knapsack":
        return knapsack(seed=seed, **params)
    if family == "subsetsum-scaled":
        return subset_sum(scaled=True, seed=seed, **params)
    if family == "subsetsum-unscaled":
        return subset_sum(scaled=False, seed=seed, **params)
    if family == "fcnf":
        return fcnf(seed=seed, **params)
    if family == "acopf-toy":
        return acopf_toy(seed=seed, **params)
    if family == "twtrap":
        return twtrap(seed=seed, **params)
    raise StructuralError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")

"""Network polynomial problems and complete vertex splitting.

A constraint attached to vertex ``u`` is ``sum_v p_{u,v} >= 0`` (or ``= 0``) over
the neighbors ``v`` of ``u``, each ``p_{u,v}`` using only variables of ``X_u`` and
``X_v``.  Splitting a vertex of degree above three replaces it by a tree whose
internal vertices have degree three and rewrites each of its constraints as a
family of balance equations over new variables ``y+``/``y-`` in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Hashable, Mapping

from .graphs import Graph, TreeDecomposition, heuristic_decomposition, prepare_for_splitting, validate, vkey
from .poly import Constraint, POProblem, Polynomial, StructuralError, evaluate, to_rational

ZERO = Fraction(0)


@dataclass(frozen=True)
class NPOConstraint:
    at: Hashable
    terms: Mapping  # neighbor -> Polynomial
    sense: str = ">="
    origin: int | None = None  # index of the constraint of the source problem it derives from
    role: str = "original"  # "original", "leaf", "internal", "root"

    def total(self) -> Polynomial:
        out = Polynomial()
        for p in self.terms.values():
            out = out + p
        return out


@dataclass
class NPOProblem:
    graph: Graph
    n: int
    p: int
    c: tuple
    vertex_vars: dict  # vertex -> frozenset of variable ids
    constraints: list = field(default_factory=list)
    names: list | None = None

    def __post_init__(self):
        self.c = tuple(to_rational(v) for v in self.c)
        if len(self.c) != self.n or not 0 <= self.p <= self.n:
            raise StructuralError("objective length or binary count does not match n")
        self.vertex_vars = {v: frozenset(self.vertex_vars.get(v, ())) for v in self.graph.vertices}
        self.constraints = [self._normalize(k, i) for i, k in enumerate(self.constraints)]

    def _normalize(self, con: NPOConstraint, i: int) -> NPOConstraint:
        u = con.at
        if u not in self.graph:
            raise StructuralError(f"constraint {i} sits at unknown vertex {u!r}")
        if con.sense not in (">=", "="):
            raise StructuralError(f"constraint {i}: unsupported sense {con.sense!r}")
        # a monomial shared by two edge polynomials moves to the first of them
        seen: dict = {}
        terms: dict = {}
        for v in sorted(con.terms, key=vkey):
            if v not in self.graph.adj[u]:
                raise StructuralError(f"constraint {i} at {u!r} has a term on non-edge {{{u!r}, {v!r}}}")
            poly = con.terms[v]
            allowed = self.vertex_vars[u] | self.vertex_vars[v]
            stray = poly.support() - allowed
            if stray:
                raise StructuralError(f"constraint {i}: p_({u!r},{v!r}) uses x{min(stray)} outside X_u and X_v")
            keep = {}
            for mono, coef in poly.terms.items():
                if mono in seen:
                    owner = seen[mono]
                    terms[owner] = terms[owner] + Polynomial({mono: coef})
                else:
                    seen[mono] = v
                    keep[mono] = coef
            terms[v] = Polynomial(keep)
        origin = i if con.origin is None else con.origin
        return replace(con, terms=terms, origin=origin)

    @property
    def max_degree(self) -> int:
        return self.graph.max_degree()

    @property
    def Delta(self) -> int:
        counts = {v: len(x) for v, x in self.vertex_vars.items()}
        for con in self.constraints:
            counts[con.at] += 1
        return max(counts.values(), default=0)

    def constraints_at(self, u) -> list[int]:
        return [i for i, k in enumerate(self.constraints) if k.at == u]

    def check_connectivity(self) -> list[int]:
        """Variables whose owning vertices do not induce a connected subgraph."""
        owners: dict = {}
        for v, xs in self.vertex_vars.items():
            for j in xs:
                owners.setdefault(j, set()).add(v)
        bad = []
        for j, vs in sorted(owners.items()):
            start = min(vs, key=vkey)
            seen, stack = {start}, [start]
            while stack:
                a = stack.pop()
                for b in self.graph.adj[a]:
                    if b in vs and b not in seen:
                        seen.add(b)
                        stack.append(b)
            if seen != vs:
                bad.append(j)
        return bad

    def objective(self, x) -> Fraction:
        return sum((ci * to_rational(xi) for ci, xi in zip(self.c, x)), ZERO)


@dataclass
class SplitTree:
    """Tree replacing vertex ``u``: internal vertices (new graph vertices) with
    children lists; leaves are the neighbors of ``u``."""

    root: Hashable
    children: dict  # internal vertex -> list of children (internal vertices or neighbors)

    @property
    def internal(self) -> list:
        return list(self.children)

    def parent_of(self) -> dict:
        return {c: i for i, kids in self.children.items() for c in kids}

    def leaves(self) -> list:
        return [c for kids in self.children.values() for c in kids if c not in self.children]

    def postorder(self) -> list:
        out, stack = [], [(self.root, False)]
        while stack:
            node, done = stack.pop()
            if done or node not in self.children:
                out.append(node)
                continue
            stack.append((node, True))
            for c in reversed(self.children[node]):
                stack.append((c, False))
        return out

    def num_vertices(self) -> int:
        return len(self.children) + len(self.leaves())


@dataclass
class SplitResult:
    problem: NPOProblem
    source: NPOProblem
    trees: dict = field(default_factory=dict)  # split vertex -> SplitTree
    root_vars: dict = field(default_factory=dict)  # origin -> (y+_r variable, nu_r) for ">=" constraints
    nu: dict = field(default_factory=dict)  # (origin, tree node) -> nu value
    decomposition: TreeDecomposition | None = None

    @property
    def graph(self) -> Graph:
        return self.problem.graph

    def family(self, origin: int) -> list[NPOConstraint]:
        return [k for k in self.problem.constraints if k.origin == origin]

    def family_sum(self, origin: int) -> Polynomial:
        """Sum of the replacement family plus the bound term ``nu_r * y+_r``; equals the
        original constraint polynomial identically."""
        total = Polynomial()
        for k in self.family(origin):
            total = total + k.total()
        if origin in self.root_vars:
            var, nu_r = self.root_vars[origin]
            total = total + Polynomial.var(var, nu_r)
        return total


def _check_tree(graph: Graph, u, tree: SplitTree):
    nbrs = set(graph.adj[u])
    leaves = tree.leaves()
    if sorted(leaves, key=vkey) != sorted(nbrs, key=vkey) or len(leaves) != len(nbrs):
        raise StructuralError(f"split tree for {u!r} must have exactly the neighbors of {u!r} as leaves")
    for i in tree.internal:
        if i in graph:
            raise StructuralError(f"internal split vertex {i!r} already exists in the graph")
        want = 3 if i == tree.root else 2
        if len(tree.children[i]) != want:
            raise StructuralError(f"split vertex {i!r} must have degree three")
    seen = set()
    for node in tree.postorder():
        if node in seen:
            raise StructuralError("split tree has a repeated vertex")
        seen.add(node)
    if len(seen) != len(tree.children) + len(leaves):
        raise StructuralError("split tree is not connected")


def split_vertex(problem: NPOProblem, u, tree: SplitTree, result: SplitResult | None = None) -> SplitResult:
    """Completely split ``u`` along ``tree``; returns the (updated) :class:`SplitResult`."""
    g = problem.graph
    if u not in g or g.degree(u) <= 3:
        raise StructuralError(f"vertex {u!r} must exist and have degree above three")
    _check_tree(g, u, tree)
    if result is None:
        result = SplitResult(problem, problem)
    parent = tree.parent_of()
    names = list(problem.names or [f"x{j}" for j in range(problem.n)])
    c = list(problem.c)
    n = problem.n
    own: dict = {i: set(problem.vertex_vars[u]) for i in tree.internal}
    new_constraints = [k for k in problem.constraints if k.at != u]
    order = tree.postorder()

    def new_var(name, owner):
        nonlocal n
        names.append(name)
        c.append(ZERO)
        own[owner].add(n)
        n += 1
        return n - 1

    for idx in problem.constraints_at(u):
        con = problem.constraints[idx]
        k = con.origin
        nu = {}
        for node in order:
            if node in tree.children:
                nu[node] = sum((nu[ch] for ch in tree.children[node]), ZERO)
            else:
                nu[node] = con.terms.get(node, Polynomial()).one_norm()
        for node, val in nu.items():
            result.nu[(k, node)] = val
        ypair = {}
        for node in order:
            if node == tree.root or not nu[node]:
                continue
            owner = parent[node] if node not in tree.children else node
            ypair[node] = (new_var(f"y+_{node}_{k}", owner), new_var(f"y-_{node}_{k}", owner))

        def flow(node, scale=1):
            if node not in ypair:
                return Polynomial()
            yp, ym = ypair[node]
            return Polynomial.var(yp, nu[node] * scale) - Polynomial.var(ym, nu[node] * scale)

        for i in tree.internal:
            terms: dict = {}
            kids = tree.children[i]
            for ch in kids:
                if ch in tree.children:
                    continue
                poly = con.terms.get(ch, Polynomial()) - flow(ch)
                if poly:
                    new_constraints.append(NPOConstraint(i, {ch: poly}, "=", k, "leaf"))
            if i == tree.root:
                for ch in kids:
                    terms[ch] = flow(ch)
                if con.sense == ">=" and nu[i]:
                    yr = new_var(f"y+_{i}_{k}", i)
                    result.root_vars[k] = (yr, nu[i])
                    first = kids[0]
                    terms[first] = terms[first] - Polynomial.var(yr, nu[i])
                role = "root"
            else:
                for ch in kids:
                    terms[ch] = flow(ch)
                up = parent[i]
                terms[up] = -flow(i)
                role = "internal"
            terms = {v: p for v, p in terms.items() if p}
            if terms:
                new_constraints.append(NPOConstraint(i, terms, "=", k, role))

    # graph surgery
    g2 = g.copy()
    g2.remove_vertex(u)
    for i, kids in tree.children.items():
        g2.add_vertex(i)
        for ch in kids:
            g2.add_edge(i, ch)
    vertex_vars = {v: xs for v, xs in problem.vertex_vars.items() if v != u}
    for i in tree.internal:
        vertex_vars[i] = frozenset(own[i])
    # neighbors of u now see the internal vertex above their leaf
    rekeyed = []
    for con in new_constraints:
        if u in con.terms:
            new_at = parent[con.at]
            terms = {(new_at if v == u else v): p for v, p in con.terms.items()}
            con = replace(con, terms=terms)
        rekeyed.append(con)
    out = NPOProblem(g2, n, problem.p, c, vertex_vars, [], names)
    out.constraints = rekeyed
    result.problem = out
    result.trees[u] = tree
    return result


def npo_tolerance(epsilon, D: int) -> Fraction:
    eps = to_rational(epsilon)
    if not 0 < eps < 1:
        raise StructuralError(f"epsilon must lie in (0, 1), got {eps}")
    if D < 1:
        raise StructuralError("maximum degree must be at least 1")
    return eps / (8 * D)


def split_label(u, t) -> tuple:
    return ("split", u, t)


def good_split(problem: NPOProblem, td: TreeDecomposition | None = None) -> SplitResult:
    """Split every vertex of degree above three along the blue vertices of its subtree
    in a prepared decomposition; returns the split problem and a decomposition of the
    new graph of width at most ``2 Z + 1``."""
    g = problem.graph
    if td is None:
        td = heuristic_decomposition(g)
    report = validate(td, g)
    if not report:
        raise StructuralError(f"invalid decomposition of the network: {report.message}")
    result = SplitResult(problem, problem)
    if g.max_degree() <= 3:
        result.decomposition = td
        return result
    prep = prepare_for_splitting(td, g)
    tree = prep.td
    bags = {t: set(b) for t, b in tree.bags.items()}
    leaf_edge = {leaf: e for e, leaf in prep.edge_leaf.items()}
    endpoint = {leaf: {e[0]: e[0], e[1]: e[1]} for e, leaf in prep.edge_leaf.items()}
    current = problem
    for u in g.vertices:
        if g.degree(u) <= 3:
            continue
        sub = tree.subtree(u)
        deg = {t: sum(1 for s in tree.adj[t] if s in sub) for t in sub}
        blue = {t for t in sub if deg[t] != 2}
        root = min(t for t in blue if deg[t] == 3)
        order, par = [root], {root: None}
        for t in order:
            for s in tree.neighbors(t):
                if s in sub and s not in par:
                    par[s] = t
                    order.append(s)
        R = {root: root}
        for t in order[1:]:
            p = par[t]
            R[t] = p if p in blue else R[p]
        children: dict = {}
        for t in order:
            if t in blue and deg[t] == 3:
                children[split_label(u, t)] = []
        for t in order[1:]:
            if t not in blue:
                continue
            if deg[t] == 3:
                child = split_label(u, t)
            else:
                a, b = leaf_edge[t]
                child = endpoint[t][b if a == u else a]
            children[split_label(u, R[t])].append(child)
        st = SplitTree(split_label(u, root), children)
        result = split_vertex(current, u, st, result)
        current = result.problem
        for t in sub:
            bags[t].discard(u)
            bags[t].add(split_label(u, R[t]))
            if deg[t] == 3:
                bags[t].add(split_label(u, t))
        for t in sub:
            if t in leaf_edge:
                endpoint[t][u] = split_label(u, R[t])
    result.source = problem
    result.decomposition = TreeDecomposition(bags, tree.edges())
    return result


@dataclass
class FlatProblem:
    po: POProblem
    decomposition: TreeDecomposition | None
    origin: list  # PO constraint index -> origin constraint index of the source NPO


def vertex_scope(problem: NPOProblem, v) -> frozenset:
    """Variables owned by ``v`` plus those read by the constraints sitting at ``v``."""
    out = set(problem.vertex_vars[v])
    for k in problem.constraints:
        if k.at == v:
            for poly in k.terms.values():
                out |= poly.support()
    return frozenset(out)


def npo_to_po(source, td: TreeDecomposition | None = None) -> FlatProblem:
    """Flatten an NPO (or a split result) whose graph has maximum degree three."""
    if isinstance(source, SplitResult):
        problem = source.problem
        td = td if td is not None else source.decomposition
    else:
        problem = source
    if problem.max_degree > 3:
        raise StructuralError(f"graph has maximum degree {problem.max_degree}; split it first")
    constraints, origin = [], []
    for k in problem.constraints:
        constraints.append(Constraint(k.total(), k.sense))
        origin.append(k.origin)
    po = POProblem(problem.n, problem.p, problem.c, tuple(constraints),
                   tuple(problem.names) if problem.names else None)
    lifted = None
    if td is not None:
        report = validate(td, problem.graph)
        if not report:
            raise StructuralError(f"invalid decomposition of the split network: {report.message}")
        scope = {v: vertex_scope(problem, v) for v in problem.graph.vertices}
        bags = {t: set().union(*(scope[v] for v in td.bags[t])) if td.bags[t] else set() for t in td.nodes}
        # variables owned by no vertex sit in a bag of their own attached to node 0
        covered = set().union(*bags.values()) if bags else set()
        loose = [j for j in range(problem.n) if j not in covered]
        edges = td.edges()
        if loose:
            t_new = max(bags) + 1
            bags[t_new] = set(loose)
            edges = edges + [(min(bags), t_new)]
        lifted = TreeDecomposition(bags, edges)
    return FlatProblem(po, lifted, origin)


def width_bound(problem: NPOProblem, W: int) -> int:
    return 7 * problem.Delta * (W + 1) - 1


def original_violations(source: NPOProblem, x) -> dict:
    """Scaled violation of every constraint of ``source`` at ``x`` (first ``source.n`` entries)."""
    out = {}
    for i, k in enumerate(source.constraints):
        f = k.total()
        value = evaluate(f, x)
        norm = f.one_norm()
        miss = abs(value) if k.sense == "=" else max(ZERO, -value)
        out[i] = miss / norm if norm else ZERO
    return out


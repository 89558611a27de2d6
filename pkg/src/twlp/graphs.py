"""Intersection graphs and tree decompositions.

A :class:`TreeDecomposition` is a tree over integer node ids together with a bag
(frozenset of graph vertices) per node.  Decompositions supplied from outside
are checked with :func:`validate`, never trusted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable


def vkey(v):
    """Total order on mixed vertex labels: ints first, then everything else by repr."""
    return (0, v, "") if isinstance(v, int) and not isinstance(v, bool) else (1, 0, repr(v))


class Graph:
    """Undirected simple graph on hashable vertex labels."""

    def __init__(self, vertices: Iterable[Hashable] = (), edges: Iterable = ()):
        self.adj: dict = {}
        for v in vertices:
            self.add_vertex(v)
        for u, v in edges:
            self.add_edge(u, v)

    @classmethod
    def on_range(cls, n: int, edges: Iterable = ()) -> "Graph":
        return cls(range(n), edges)

    def add_vertex(self, v):
        self.adj.setdefault(v, set())

    def add_edge(self, u, v):
        if u == v:
            raise ValueError(f"self-loop at {u!r}")
        self.add_vertex(u)
        self.add_vertex(v)
        self.adj[u].add(v)
        self.adj[v].add(u)

    def add_clique(self, vertices: Iterable):
        vs = sorted(set(vertices), key=vkey)
        for v in vs:
            self.add_vertex(v)
        for u, v in itertools.combinations(vs, 2):
            self.add_edge(u, v)

    def remove_vertex(self, v):
        for w in self.adj.pop(v):
            self.adj[w].discard(v)

    @property
    def vertices(self) -> list:
        return sorted(self.adj, key=vkey)

    def edges(self) -> list[tuple]:
        out = []
        for u in self.vertices:
            for v in self.adj[u]:
                if vkey(u) < vkey(v):
                    out.append((u, v))
        return sorted(out, key=lambda e: (vkey(e[0]), vkey(e[1])))

    def degree(self, v) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj.values()), default=0)

    def neighbors(self, v) -> list:
        return sorted(self.adj[v], key=vkey)

    def copy(self) -> "Graph":
        g = Graph()
        g.adj = {v: set(a) for v, a in self.adj.items()}
        return g

    def __len__(self):
        return len(self.adj)

    def __contains__(self, v):
        return v in self.adj

    def __repr__(self):
        return f"Graph(|V|={len(self.adj)}, |E|={len(self.edges())})"


def intersection_graph(problem) -> Graph:
    """One vertex per variable, a clique per constraint support.

    Works for :class:`~twlp.poly.POProblem` (supports of the polynomials) and
    :class:`~twlp.gb.GBProblem` (the sets ``K[i]``).
    """
    g = Graph.on_range(problem.n)
    for support in constraint_supports(problem):
        g.add_clique(support)
    return g


def constraint_supports(problem) -> list[frozenset]:
    if hasattr(problem, "supports"):
        return [frozenset(k) for k in problem.supports]
    return [con.poly.support() for con in problem.constraints]


class TreeDecomposition:
    """Tree on int node ids with a bag per node."""

    def __init__(self, bags: dict, edges: Iterable = ()):
        self.bags: dict[int, frozenset] = {int(t): frozenset(b) for t, b in bags.items()}
        self.adj: dict[int, set] = {t: set() for t in self.bags}
        for s, t in edges:
            self.adj[int(s)].add(int(t))
            self.adj[int(t)].add(int(s))

    @property
    def nodes(self) -> list[int]:
        return sorted(self.bags)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((s, t) for s in self.adj for t in self.adj[s] if s < t)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def bag(self, t) -> list:
        return sorted(self.bags[t], key=vkey)

    def degree(self, t) -> int:
        return len(self.adj[t])

    def neighbors(self, t) -> list[int]:
        return sorted(self.adj[t])

    def subtree(self, v) -> set[int]:
        return {t for t, b in self.bags.items() if v in b}

    def covering_node(self, vertices: Iterable):
        """Smallest node id whose bag contains ``vertices``, or None."""
        vs = set(vertices)
        for t in self.nodes:
            if vs <= self.bags[t]:
                return t
        return None

    def separator(self, s, t) -> frozenset:
        return self.bags[s] & self.bags[t]

    def new_node(self, bag) -> int:
        t = max(self.bags, default=-1) + 1
        self.bags[t] = frozenset(bag)
        self.adj[t] = set()
        return t

    def add_edge(self, s, t):
        self.adj[s].add(t)
        self.adj[t].add(s)

    def remove_edge(self, s, t):
        self.adj[s].discard(t)
        self.adj[t].discard(s)

    def copy(self) -> "TreeDecomposition":
        return TreeDecomposition(dict(self.bags), self.edges())

    def rooted(self, root: int):
        """``(order, parent)`` with ``order`` a BFS order from ``root``; children sorted."""
        parent = {root: None}
        order = [root]
        for t in order:
            for s in self.neighbors(t):
                if s not in parent:
                    parent[s] = t
                    order.append(s)
        return order, parent

    def children(self, parent: dict) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {t: [] for t in self.bags}
        for t, p in parent.items():
            if p is not None:
                kids[p].append(t)
        for t in kids:
            kids[t].sort()
        return kids

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": t, "bag": self.bag(t)} for t in self.nodes],
            "edges": [list(e) for e in self.edges()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TreeDecomposition":
        bags = {int(node["id"]): [_json_vertex(v) for v in node["bag"]] for node in data["nodes"]}
        return cls(bags, [(int(a), int(b)) for a, b in data.get("edges", [])])

    def __repr__(self):
        return f"TreeDecomposition(nodes={len(self.bags)}, width={self.width})"


def _json_vertex(v):
    return tuple(v) if isinstance(v, list) else v


@dataclass
class ValidationReport:
    ok: bool
    width: int
    kind: str | None = None  # "tree", "vertex", "subtree", "edge"
    item: object = None
    message: str = ""

    def __bool__(self):
        return self.ok


def validate(td: TreeDecomposition, g: Graph) -> ValidationReport:
    """Check the tree shape, the subtree property and edge coverage."""
    nodes = td.nodes
    width = td.width
    if not nodes:
        return ValidationReport(False, width, "tree", None, "decomposition has no nodes")
    n_edges = len(td.edges())
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        t = stack.pop()
        for s in td.adj[t]:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    if len(seen) != len(nodes) or n_edges != len(nodes) - 1:
        return ValidationReport(False, width, "tree", None, "tree is not connected and acyclic")
    for t in nodes:
        stray = [v for v in td.bags[t] if v not in g]
        if stray:
            return ValidationReport(False, width, "vertex", stray[0],
                                    f"bag {t} holds {stray[0]!r}, which is not a graph vertex")
    for v in g.vertices:
        sub = td.subtree(v)
        if not sub:
            return ValidationReport(False, width, "subtree", v, f"vertex {v!r} lies in no bag")
        start = min(sub)
        reach = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for s in td.adj[t]:
                if s in sub and s not in reach:
                    reach.add(s)
                    stack.append(s)
        if reach != sub:
            return ValidationReport(False, width, "subtree", v,
                                    f"bags containing {v!r} do not form a subtree")
    for u, v in g.edges():
        if td.covering_node((u, v)) is None:
            return ValidationReport(False, width, "edge", (u, v),
                                    f"edge {{{u!r}, {v!r}}} is not inside any bag")
    return ValidationReport(True, width)


def heuristic_decomposition(g: Graph, method: str = "min-fill") -> TreeDecomposition:
    """Greedy elimination ordering (min-fill or min-degree, lowest vertex breaks ties)."""
    if method not in ("min-fill", "min-degree", "minfill", "mindegree"):
        raise ValueError(f"unknown heuristic {method!r}")
    fill = method.replace("-", "") == "minfill"
    h = g.copy()
    order, bags = [], []

    def score(v):
        nb = h.adj[v]
        if not fill:
            return len(nb)
        return sum(1 for a, b in itertools.combinations(nb, 2) if b not in h.adj[a])

    while h.adj:
        v = min(h.adj, key=lambda w: (score(w), vkey(w)))
        nb = set(h.adj[v])
        bags.append(frozenset(nb | {v}))
        order.append(v)
        for a, b in itertools.combinations(sorted(nb, key=vkey), 2):
            h.add_edge(a, b)
        h.remove_vertex(v)

    if not order:
        return TreeDecomposition({0: ()})
    pos = {v: i for i, v in enumerate(order)}
    edges = []
    roots = []
    for i, v in enumerate(order):
        later = [pos[w] for w in bags[i] if w != v]
        if later:
            edges.append((i, min(later)))
        else:
            roots.append(i)
    edges.extend(zip(roots, roots[1:]))
    return normalize(TreeDecomposition(dict(enumerate(bags)), edges))


def normalize(td: TreeDecomposition) -> TreeDecomposition:
    """Contract tree edges whose one bag is contained in the other; relabel 0..k-1."""
    td = td.copy()
    changed = True
    while changed:
        changed = False
        for s in td.nodes:
            for t in td.neighbors(s):
                if td.bags[s] <= td.bags[t]:
                    for w in td.neighbors(s):
                        if w != t:
                            td.add_edge(w, t)
                        td.remove_edge(s, w)
                    del td.bags[s], td.adj[s]
                    changed = True
                    break
            if changed:
                break
    relabel = {t: i for i, t in enumerate(td.nodes)}
    return TreeDecomposition({relabel[t]: b for t, b in td.bags.items()},
                             [(relabel[s], relabel[t]) for s, t in td.edges()])


@dataclass
class PreparedDecomposition:
    """Output of :func:`prepare_for_splitting`: the decomposition plus the edge leaves."""

    td: TreeDecomposition
    edge_leaf: dict  # (u, v) with vkey(u) < vkey(v) -> leaf node whose bag is {u, v}


def edge_key(u, v) -> tuple:
    return (u, v) if vkey(u) < vkey(v) else (v, u)


def prepare_for_splitting(td: TreeDecomposition, g: Graph) -> PreparedDecomposition:
    """Attach a leaf per graph edge, cap tree degrees at 3, trim each T_u to its edge leaves."""
    report = validate(td, g)
    if not report:
        raise ValueError(f"invalid tree decomposition: {report.message}")
    td = td.copy()
    edge_leaf = {}
    for u, v in g.edges():
        host = td.covering_node((u, v))
        leaf = td.new_node((u, v))
        td.add_edge(leaf, host)
        edge_leaf[edge_key(u, v)] = leaf

    pending = [t for t in td.nodes if td.degree(t) > 3]
    while pending:
        t = pending.pop(0)
        if td.degree(t) <= 3:
            continue
        s1, s2 = td.neighbors(t)[:2]
        t1 = td.new_node(td.bags[t])
        for s in (s1, s2):
            td.remove_edge(t, s)
            td.add_edge(t1, s)
        td.add_edge(t1, t)
        if td.degree(t) > 3:
            pending.insert(0, t)

    for u in g.vertices:
        if g.degree(u) == 0:
            continue
        keep = td.subtree(u)
        terminals = {edge_leaf[edge_key(u, v)] for v in g.adj[u]}
        trimmed = True
        while trimmed:
            trimmed = False
            for t in sorted(keep):
                if t in terminals:
                    continue
                if sum(1 for s in td.adj[t] if s in keep) <= 1:
                    keep.discard(t)
                    td.bags[t] = td.bags[t] - {u}
                    trimmed = True
    return PreparedDecomposition(td, edge_leaf)


def check_prepared(prep: PreparedDecomposition, g: Graph) -> list[str]:
    """Postconditions of :func:`prepare_for_splitting`; returns the problems found."""
    td, problems = prep.td, []
    report = validate(td, g)
    if not report:
        problems.append(report.message)
    for (u, v), leaf in prep.edge_leaf.items():
        if td.bags[leaf] != frozenset((u, v)) or td.degree(leaf) != 1:
            problems.append(f"edge leaf {leaf} for {(u, v)} is malformed")
    if any(td.degree(t) > 3 for t in td.nodes):
        problems.append("tree degree above 3")
    for u in g.vertices:
        if g.degree(u) == 0:
            continue
        sub = td.subtree(u)
        leaves = {t for t in sub if sum(1 for s in td.adj[t] if s in sub) <= 1}
        allowed = {prep.edge_leaf[edge_key(u, v)] for v in g.adj[u]}
        if not leaves <= allowed:
            problems.append(f"T_{u!r} has a leaf that is not an edge leaf")
    return problems

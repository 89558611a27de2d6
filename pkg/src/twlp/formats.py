"""JSON reading and writing for instances, decompositions and run results.

Rationals travel as "num/den" strings (integers as plain strings); output is
key-sorted so repeated runs give byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .gb import GBConstraint, GBProblem, ListOracle, PolyOracle, bits_of
from .graphs import Graph, vkey
from .npo import NPOConstraint, NPOProblem
from .poly import Constraint, POProblem, Polynomial, StructuralError, format_rational, monomial, to_rational

KINDS = ("po", "gb", "npo")


class ParseError(ValueError):
    """Malformed instance file (bad JSON, missing keys, unreadable numbers)."""


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _num(value, where: str) -> Fraction:
    try:
        return to_rational(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: cannot read number {value!r}") from exc


def _need(data: dict, key: str, where: str):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"{where}: missing key {key!r}")
    return data[key]


# ---------------------------------------------------------------- polynomials

def poly_to_json(poly: Polynomial) -> list:
    return [{"vars": {str(j): e for j, e in mono}, "coef": format_rational(c)} for mono, c in poly.terms.items()]


def poly_from_json(terms, where: str = "polynomial") -> Polynomial:
    if not isinstance(terms, list):
        raise ParseError(f"{where}: expected a list of terms")
    out = {}
    for k, term in enumerate(terms):
        at = f"{where} term {k}"
        exps = _need(term, "vars", at)
        coef = _num(_need(term, "coef", at), at)
        try:
            mono = monomial({int(j): int(e) for j, e in exps.items()})
        except (AttributeError, TypeError, ValueError) as exc:
            raise ParseError(f"{at}: bad exponent map {exps!r}") from exc
        out[mono] = out.get(mono, 0) + coef
    return Polynomial(out)


# ---------------------------------------------------------------- PO

def po_to_json(problem: POProblem) -> dict:
    out = {"kind": "po", "n": problem.n, "p": problem.p, "c": [format_rational(v) for v in problem.c],
           "constraints": [{"sense": k.sense, "terms": poly_to_json(k.poly)} for k in problem.constraints]}
    if problem.names:
        out["names"] = list(problem.names)
    return out


def po_from_json(data: dict) -> POProblem:
    n = int(_need(data, "n", "problem"))
    p = int(data.get("p", 0))
    c = [_num(v, "objective") for v in _need(data, "c", "problem")]
    cons = []
    for i, k in enumerate(data.get("constraints", [])):
        poly = poly_from_json(_need(k, "terms", f"constraint {i}"), f"constraint {i}")
        cons.append(Constraint(poly, k.get("sense", ">=")))
    names = data.get("names")
    return POProblem(n, p, tuple(c), tuple(cons), tuple(names) if names else None)


# ---------------------------------------------------------------- GB

def gb_to_json(gb: GBProblem) -> dict:
    cons = []
    for con in gb.constraints:
        o = con.oracle
        entry: dict = {"support": list(con.support)}
        identity = isinstance(o, PolyOracle) and all(enc == ((s, 1),) for s, enc in o.encoding.items())
        if identity:
            entry["predicate"] = poly_to_json(o.poly)
            entry["rhs"] = format_rational(o.rhs)
        else:
            k = len(con.support)
            table = o.truth_table()
            entry["accepted"] = [list(bits_of(i, k)) for i in range(1 << k) if table[i]]
        if con.label:
            entry["label"] = con.label
        cons.append(entry)
    out = {"kind": "gb", "n": gb.n, "c": [format_rational(v) for v in gb.c], "constraints": cons}
    if gb.names:
        out["names"] = list(gb.names)
    return out


def gb_from_json(data: dict) -> GBProblem:
    n = int(_need(data, "n", "problem"))
    c = [_num(v, "objective") for v in _need(data, "c", "problem")]
    cons = []
    for i, k in enumerate(data.get("constraints", [])):
        where = f"constraint {i}"
        if "accepted" in k:
            sup = [int(j) for j in _need(k, "support", where)]
            oracle = ListOracle(sup, [tuple(int(b) for b in row) for row in k["accepted"]])
        elif "predicate" in k:
            poly = poly_from_json(k["predicate"], where)
            oracle = PolyOracle(poly, _num(k.get("rhs", 0), where))
            if "support" in k and list(oracle.support) != sorted(int(j) for j in k["support"]):
                raise ParseError(f"{where}: support does not match the predicate's variables")
        else:
            raise ParseError(f"{where}: needs 'accepted' or 'predicate'")
        cons.append(GBConstraint(oracle, k.get("label", "")))
    return GBProblem(n, tuple(c), cons, data.get("names"))


# ---------------------------------------------------------------- NPO

def _vertex_label(v) -> str:
    return str(v)


def npo_to_json(problem: NPOProblem) -> dict:
    g = problem.graph
    cons = []
    for k in problem.constraints:
        terms = {f"({_vertex_label(k.at)},{_vertex_label(v)})": poly_to_json(p) for v, p in k.terms.items()}
        cons.append({"at": k.at, "sense": k.sense, "terms": terms})
    out = {"kind": "npo", "n": problem.n, "p": problem.p, "c": [format_rational(v) for v in problem.c],
           "graph": {"vertices": g.vertices, "edges": [list(e) for e in g.edges()]},
           "vertex_vars": {_vertex_label(v): sorted(xs) for v, xs in problem.vertex_vars.items()},
           "constraints": cons}
    if problem.names:
        out["names"] = list(problem.names)
    return out


def npo_from_json(data: dict) -> NPOProblem:
    graph = _need(data, "graph", "problem")
    vertices = _need(graph, "vertices", "graph")
    for v in vertices:
        if not isinstance(v, (int, str)) or isinstance(v, bool):
            raise ParseError(f"graph: vertex {v!r} must be an integer or a string")
    by_label = {_vertex_label(v): v for v in vertices}
    if len(by_label) != len(vertices):
        raise ParseError("graph: vertex labels must be distinct")

    def vertex(label, where):
        key = _vertex_label(label)
        if key not in by_label:
            raise ParseError(f"{where}: unknown vertex {label!r}")
        return by_label[key]

    edges = [(vertex(a, "graph edge"), vertex(b, "graph edge")) for a, b in graph.get("edges", [])]
    g = Graph(vertices, edges)
    n = int(_need(data, "n", "problem"))
    p = int(data.get("p", 0))
    c = [_num(v, "objective") for v in _need(data, "c", "problem")]
    owned = {vertex(k, "vertex_vars"): {int(j) for j in js} for k, js in data.get("vertex_vars", {}).items()}
    cons = []
    for i, k in enumerate(data.get("constraints", [])):
        where = f"constraint {i}"
        u = vertex(_need(k, "at", where), where)
        terms = {}
        for key, poly in _need(k, "terms", where).items():
            inner = key.strip()
            if not (inner.startswith("(") and inner.endswith(")")) or inner.count(",") != 1:
                raise ParseError(f"{where}: edge key {key!r} should look like (u,v)")
            a, b = (s.strip() for s in inner[1:-1].split(","))
            if vertex(a, where) != u:
                raise ParseError(f"{where}: edge key {key!r} does not start at {u!r}")
            v = vertex(b, where)
            terms[v] = terms.get(v, Polynomial()) + poly_from_json(poly, where)
        cons.append(NPOConstraint(u, terms, k.get("sense", ">=")))
    return NPOProblem(g, n, p, tuple(c), owned, cons, names=data.get("names"))


# ---------------------------------------------------------------- dispatch

def instance_kind(data: dict) -> str:
    if not isinstance(data, dict):
        raise ParseError("instance must be a JSON object")
    kind = data.get("kind")
    if kind is None:
        if "graph" in data:
            kind = "npo"
        elif any(isinstance(k, dict) and ("accepted" in k or "predicate" in k) for k in data.get("constraints", [])):
            kind = "gb"
        else:
            kind = "po"
    if kind not in KINDS:
        raise ParseError(f"unknown instance kind {kind!r}")
    return kind


def from_json(data: dict):
    kind = instance_kind(data)
    reader = {"po": po_from_json, "gb": gb_from_json, "npo": npo_from_json}[kind]
    try:
        return kind, reader(data)
    except ParseError:
        raise
    except StructuralError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed {kind} instance: {exc}") from exc


def to_json(problem) -> dict:
    if isinstance(problem, POProblem):
        return po_to_json(problem)
    if isinstance(problem, GBProblem):
        return gb_to_json(problem)
    if isinstance(problem, NPOProblem):
        return npo_to_json(problem)
    raise TypeError(f"cannot serialize {type(problem).__name__}")


def load_instance(path: str):
    """``(kind, problem)`` from a JSON file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return from_json(data)


# ---------------------------------------------------------------- results

def _q(v):
    return None if v is None else format_rational(v)


def _extraction(mixture, x, c) -> dict | None:
    if mixture is None or x is None:
        return None
    for idx, (mu, atom) in enumerate(mixture.atoms):
        if atom == tuple(x):
            cost = sum((cj * xj for cj, xj in zip(c, atom)), Fraction(0))
            return {"atom": idx, "weight": format_rational(mu), "atoms": len(mixture.atoms),
                    "cost": format_rational(cost), "rule": "cheapest atom, lexicographically smallest on ties"}
    return None


def gb_run_to_json(run) -> dict:
    out = {"kind": "gb", "status": run.status, "lp_value": _q(run.lp_value), "objective": _q(run.objective)}
    if run.solution is not None:
        out["lp"] = {"method": run.solution.method, "certified": run.solution.certified,
                     "exact": run.solution.exact}
    if run.x is not None:
        names = run.gb.names or [f"x{j}" for j in range(run.gb.n)]
        out["x"] = {names[j]: int(v) for j, v in enumerate(run.x)}
        out["extraction"] = _extraction(run.mixture, run.x, run.gb.c)
    if run.mixture is not None:
        out["mixture"] = run.mixture.to_json()
    return out


def po_run_to_json(run) -> dict:
    out = {"kind": "po", "status": run.status, "lp_value": _q(run.lp_value), "objective": _q(run.objective),
           "violation": _q(run.violation), "plan": run.plan.to_json(), "gb": gb_run_to_json(run.gb_run)}
    if run.x is not None:
        names = run.problem.names or [f"x{j}" for j in range(run.problem.n)]
        out["x"] = {names[j]: format_rational(v) for j, v in enumerate(run.x)}
    return out


def npo_run_to_json(run) -> dict:
    out = {"kind": "npo", "status": run.status, "lp_value": _q(run.lp_value), "theta": format_rational(run.theta),
           "split_vertices": [str(u) for u in sorted(run.split.trees, key=vkey)],
           "po": po_run_to_json(run.po_run)}
    if run.x is not None:
        names = run.source.names or [f"x{j}" for j in range(run.source.n)]
        out["x"] = {names[j]: format_rational(v) for j, v in enumerate(run.x)}
        out["objective"] = format_rational(run.source.objective(run.x))
        out["violations"] = {str(i): format_rational(v) for i, v in sorted(run.violations.items())}
        out["max_violation"] = format_rational(max(run.violations.values(), default=Fraction(0)))
    return out

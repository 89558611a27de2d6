"""Binary discretization of a PO problem into a GB problem and back."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .gb import GBConstraint, GBProblem, ListOracle, PolyOracle
from .graphs import TreeDecomposition
from .poly import POProblem, StructuralError, format_rational, to_rational


@dataclass
class DiscretizationPlan:
    gamma: Fraction
    L: int
    pi: int
    delta: Fraction
    n: int
    p: int
    var_map: dict = field(default_factory=dict)  # continuous j -> [bit ids, most significant first]

    @property
    def n_gb(self) -> int:
        return self.p + (self.n - self.p) * self.L

    def gb_vars(self, j: int) -> list[int]:
        return [j] if j < self.p else self.var_map[j]

    def names(self) -> list[str]:
        out = [f"x{j}" for j in range(self.p)]
        for j in range(self.p, self.n):
            out.extend(f"z{j}_{h}" for h in range(1, self.L + 1))
        return out

    def to_json(self) -> dict:
        return {"gamma": format_rational(self.gamma), "L": self.L, "pi": self.pi,
                "delta": format_rational(self.delta), "n": self.n, "p": self.p,
                "var_map": {str(j): ids for j, ids in self.var_map.items()}}


def bits_needed(gamma: Fraction) -> int:
    """Smallest L with 2**-L <= gamma, i.e. ceil(log2(1/gamma))."""
    L = 0
    while Fraction(1, 2 ** L) > gamma:
        L += 1
    return L


def plan(problem: POProblem, epsilon) -> DiscretizationPlan:
    eps = to_rational(epsilon)
    if not 0 < eps < 1:
        raise StructuralError(f"epsilon must lie in (0, 1), got {eps}")
    pi = problem.pi
    n, p = problem.n, problem.p
    if n == p:
        return DiscretizationPlan(eps, 0, pi, Fraction(0), n, p)
    # with pi = 0 the continuous variables only reach the objective; keep gamma = eps
    gamma = eps / pi if pi else eps
    L = bits_needed(gamma)
    delta = 1 - (1 - gamma) ** pi
    var_map = {j: [p + (j - p) * L + h for h in range(L)] for j in range(p, n)}
    return DiscretizationPlan(gamma, L, pi, delta, n, p, var_map)


def expand(r, L: int) -> list[int]:
    """Greedy bits with ``sum 2**-h z_h <= r < sum 2**-h z_h + 2**-L`` (residual 2**-L at r = 1)."""
    r = to_rational(r)
    if not 0 <= r <= 1:
        raise StructuralError(f"{r} lies outside [0, 1]")
    bits = []
    rest = r
    for h in range(1, L + 1):
        w = Fraction(1, 2 ** h)
        if rest >= w:
            bits.append(1)
            rest -= w
        else:
            bits.append(0)
    return bits


def bit_value(bits: Sequence[int]) -> Fraction:
    return sum((Fraction(int(b), 2 ** h) for h, b in enumerate(bits, start=1)), Fraction(0))


def encode_point(problem: POProblem, pl: DiscretizationPlan, x: Sequence) -> list[int]:
    """GB bit vector for a PO point (binaries copied, continuous values expanded)."""
    out = [0] * pl.n_gb
    for j in range(pl.p):
        out[j] = int(to_rational(x[j]))
    for j in range(pl.p, pl.n):
        for b, z in zip(pl.var_map[j], expand(x[j], pl.L)):
            out[b] = z
    return out


def to_gb(problem: POProblem, pl: DiscretizationPlan) -> GBProblem:
    if (pl.n, pl.p) != (problem.n, problem.p):
        raise StructuralError("plan does not match the problem dimensions")
    encoding = {j: ((j, Fraction(1)),) for j in range(pl.p)}
    for j in range(pl.p, pl.n):
        encoding[j] = tuple((b, Fraction(1, 2 ** h)) for h, b in enumerate(pl.var_map[j], start=1))
    c = [Fraction(0)] * pl.n_gb
    for j in range(pl.p):
        c[j] = problem.c[j]
    for j in range(pl.p, pl.n):
        for b, w in encoding[j]:
            c[b] = problem.c[j] * w
    constraints = []
    for i, con in enumerate(problem.constraints):
        sides = [(con.poly, f"c{i}")]
        if con.sense == "=":
            sides.append((-con.poly, f"c{i}-"))
        for poly, label in sides:
            rhs = -pl.delta * poly.one_norm()
            if not poly.support():
                if poly.terms.get((), Fraction(0)) >= rhs:
                    continue
                if pl.n_gb == 0:
                    raise StructuralError(f"constraint {i} is a violated constant")
                constraints.append(GBConstraint(ListOracle((0,), []), label))
                continue
            enc = {j: encoding[j] for j in poly.support()}
            constraints.append(GBConstraint(PolyOracle(poly, rhs, enc), label))
    return GBProblem(pl.n_gb, c, constraints, pl.names())


def lift_decomposition(td: TreeDecomposition, pl: DiscretizationPlan) -> TreeDecomposition:
    """Replace every continuous variable in every bag by its bits."""
    bags = {}
    for t in td.nodes:
        bag = set()
        for j in td.bags[t]:
            if not isinstance(j, int) or not 0 <= j < pl.n:
                raise StructuralError(f"bag {t} holds {j!r}, not a variable of the problem")
            bag.update(pl.gb_vars(j))
        bags[t] = bag
    return TreeDecomposition(bags, td.edges())


def recover(bits: Sequence[int], pl: DiscretizationPlan) -> list[Fraction]:
    """PO point from GB bits: binaries copied, continuous ``x_j = sum 2**-h z_{j,h}``."""
    if len(bits) != pl.n_gb:
        raise StructuralError(f"expected {pl.n_gb} bits, got {len(bits)}")
    x = [Fraction(int(bits[j])) for j in range(pl.p)]
    for j in range(pl.p, pl.n):
        x.append(bit_value([bits[b] for b in pl.var_map[j]]))
    return x


def width_bound(omega: int, pl: DiscretizationPlan) -> int:
    """Width guaranteed for a lifted decomposition of width ``omega``."""
    return (omega + 1) * max(pl.L, 1) - 1


"""Sparse multivariate polynomials over the rationals and the PO problem model.

Variables are indexed from 0.  A monomial is a sorted tuple of
``(variable, exponent)`` pairs with positive exponents; the empty tuple is the
constant monomial.  All arithmetic is exact (:class:`fractions.Fraction`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

SENSES = (">=", "=")


class StructuralError(ValueError):
    """Raised for malformed input (missing variables, bad dimensions, ...)."""


def to_rational(value) -> Fraction:
    """Parse an int, Fraction, float, decimal string or ``"num/den"`` string.

    Floats go through their shortest decimal repr, so ``0.1`` becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise StructuralError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise StructuralError(f"non-finite coefficient {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise StructuralError(f"cannot parse rational {value!r}") from exc
    raise StructuralError(f"cannot parse rational {value!r}")


def format_rational(q: Fraction) -> str:
    """Render as ``"num/den"`` (or ``"num"`` when integral)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


Monomial = tuple  # tuple[tuple[int, int], ...]


def monomial(exponents: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> Monomial:
    """Canonical monomial from a ``{var: exponent}`` mapping; zero exponents dropped."""
    items = exponents.items() if isinstance(exponents, Mapping) else exponents
    acc: dict[int, int] = {}
    for var, exp in items:
        var, exp = int(var), int(exp)
        if var < 0 or exp < 0:
            raise StructuralError(f"bad monomial entry x{var}^{exp}")
        if exp:
            acc[var] = acc.get(var, 0) + exp
    return tuple(sorted(acc.items()))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return monomial(list(a) + list(b))


class Polynomial:
    """Immutable sparse polynomial ``sum coef * x^alpha``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for mono, coef in (terms or {}).items():
            mono = monomial(mono)
            coef = to_rational(coef)
            if coef:
                total = clean.get(mono, Fraction(0)) + coef
                if total:
                    clean[mono] = total
                else:
                    clean.pop(mono, None)
        self.terms: dict[Monomial, Fraction] = dict(sorted(clean.items()))
        self._hash = None

    # constructors
    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({(): c})

    @classmethod
    def var(cls, j: int, coef=1, exp: int = 1) -> "Polynomial":
        return cls({monomial({j: exp}): coef})

    @classmethod
    def linear(cls, coefs: Mapping[int, object], const=0) -> "Polynomial":
        terms = {monomial({j: 1}): a for j, a in coefs.items()}
        terms[()] = to_rational(const) + to_rational(terms.get((), 0))
        return cls(terms)

    # algebra
    def __add__(self, other):
        other = _as_poly(other)
        terms = dict(self.terms)
        for mono, coef in other.terms.items():
            terms[mono] = terms.get(mono, 0) + coef
        return Polynomial(terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            k = to_rational(other)
            return Polynomial({m: c * k for m, c in self.terms.items()})
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                terms[m] = terms.get(m, 0) + c1 * c2
        return Polynomial(terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        parts = []
        for mono, coef in self.terms.items():
            body = "*".join(f"x{j}" if e == 1 else f"x{j}^{e}" for j, e in mono)
            parts.append(f"{format_rational(coef)}{'*' + body if body else ''}")
        return "Polynomial(" + " + ".join(parts) + ")"

    # queries
    def support(self) -> frozenset[int]:
        return frozenset(j for mono in self.terms for j, _ in mono)

    def one_norm(self) -> Fraction:
        return sum((abs(c) for c in self.terms.values()), Fraction(0))

    def degree(self, variables: Iterable[int] | None = None) -> int:
        """Max total degree, counting only ``variables`` when given."""
        keep = None if variables is None else set(variables)
        best = 0
        for mono in self.terms:
            best = max(best, sum(e for j, e in mono if keep is None or j in keep))
        return best

    def evaluate(self, x) -> Fraction:
        return evaluate(self, x)

    def rename(self, mapping: Mapping[int, int]) -> "Polynomial":
        return Polynomial({monomial((mapping.get(j, j), e) for j, e in mono): c
                           for mono, c in self.terms.items()})


def _as_poly(value) -> Polynomial:
    return value if isinstance(value, Polynomial) else Polynomial.constant(value)


def evaluate(poly: Polynomial, x) -> Fraction:
    """Exact value of ``poly`` at ``x`` (a sequence or a ``{var: value}`` mapping)."""
    total = Fraction(0)
    for mono, coef in poly.terms.items():
        term = coef
        for j, e in mono:
            try:
                xj = x[j]
            except (IndexError, KeyError):
                raise StructuralError(f"no value for variable x{j}") from None
            term *= to_rational(xj) ** e
        total += term
    return total


def one_norm(poly: Polynomial) -> Fraction:
    return poly.one_norm()


@dataclass(frozen=True)
class Constraint:
    poly: Polynomial
    sense: str = ">="

    def __post_init__(self):
        if self.sense not in SENSES:
            raise StructuralError(
                f"unsupported constraint sense {self.sense!r}; use '>=' or '='")


@dataclass(frozen=True)
class POProblem:
    """``min c.x`` s.t. ``f_i(x) >= 0`` / ``= 0``, with x_0..x_{p-1} binary and the
    rest continuous in [0, 1]."""

    n: int
    p: int
    c: tuple
    constraints: tuple = ()
    names: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(to_rational(v) for v in self.c))
        object.__setattr__(self, "constraints", tuple(
            k if isinstance(k, Constraint) else Constraint(*k) for k in self.constraints))
        if not 0 <= self.p <= self.n:
            raise StructuralError(f"need 0 <= p <= n, got p={self.p}, n={self.n}")
        if len(self.c) != self.n:
            raise StructuralError(f"objective has {len(self.c)} entries, expected {self.n}")
        for i, con in enumerate(self.constraints):
            bad = [j for j in con.poly.support() if j >= self.n]
            if bad:
                raise StructuralError(f"constraint {i} uses x{bad[0]} outside 0..{self.n - 1}")

    @property
    def binaries(self) -> range:
        return range(self.p)

    @property
    def continuous(self) -> range:
        return range(self.p, self.n)

    @cached_property
    def pi(self) -> int:
        """Max total degree in continuous variables over all constraint monomials."""
        cont = set(self.continuous)
        return max((k.poly.degree(cont) for k in self.constraints), default=0)

    def objective(self, x) -> Fraction:
        return sum((ci * to_rational(xi) for ci, xi in zip(self.c, x)), Fraction(0))

    def check_point(self, x) -> None:
        if len(x) != self.n:
            raise StructuralError(f"point has {len(x)} entries, expected {self.n}")
        for j in range(self.n):
            v = to_rational(x[j])
            if j < self.p and v not in (0, 1):
                raise StructuralError(f"binary x{j} = {v}")
            if not 0 <= v <= 1:
                raise StructuralError(f"x{j} = {v} outside [0, 1]")


def scaled_violation(problem: POProblem, x: Sequence) -> Fraction:
    """Smallest eps for which ``x`` is scaled-eps feasible (0 iff exactly feasible)."""
    problem.check_point(x)
    worst = Fraction(0)
    for con in problem.constraints:
        value = evaluate(con.poly, x)
        norm = con.poly.one_norm()
        miss = abs(value) if con.sense == "=" else max(Fraction(0), -value)
        if miss and norm:
            worst = max(worst, miss / norm)
    return worst


def rescale_box(poly: Polynomial, bounds: Mapping[int, tuple]) -> Polynomial:
    """Substitute ``x_j = lo + (hi - lo) * x_j'`` so that x_j' lives in [0, 1]."""
    out = Polynomial()
    for mono, coef in poly.terms.items():
        term = Polynomial.constant(coef)
        for j, e in mono:
            if j in bounds:
                lo, hi = (to_rational(b) for b in bounds[j])
                if not hi > lo:
                    raise StructuralError(f"empty or degenerate box for x{j}: [{lo}, {hi}]")
                term = term * (Polynomial.constant(lo) + Polynomial.var(j, hi - lo)) ** e
            else:
                term = term * Polynomial.var(j, 1, e)
        out = out + term
    return out

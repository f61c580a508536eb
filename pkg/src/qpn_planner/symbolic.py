"""
Symbolic probability expressions for case analyses.

Atoms are conditional probabilities Pr(literal | literals). Expressions are
normalised through sympy: false literals become complements of the true
literal's atom and the result is expanded into a polynomial, which makes
equality of two case probabilities decidable.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import reduce
from typing import Any, Callable, Optional, Set, Tuple

import sympy

from qpn_planner.network import Network


class SymbolicProb(ABC):
    def __mul__(self, other: "SymbolicProb") -> "SymbolicProb":
        return Product((self, other))

    def __add__(self, other: "SymbolicProb") -> "SymbolicProb":
        return Sum((self, other))

    @abstractmethod
    def to_sympy(self) -> sympy.Expr:
        pass

    @abstractmethod
    def atoms(self) -> Set["Atom"]:
        pass

    @abstractmethod
    def evaluate(self, lookup: Callable[["Atom"], Any]) -> Any:
        pass

    @abstractmethod
    def render(self, net: Optional[Network] = None) -> str:
        pass


@dataclass(frozen=True)
class Atom(SymbolicProb):
    variable: str
    value: bool
    given: Tuple[Tuple[str, bool], ...] = ()

    @property
    def positive(self) -> "Atom":
        return Atom(self.variable, True, self.given)

    @property
    def symbol(self) -> sympy.Symbol:
        given = ",".join(var if val else f"~{var}" for var, val in self.given)
        name = f"Pr({self.variable}|{given})" if given else f"Pr({self.variable})"
        return sympy.Symbol(name, positive=True)

    def to_sympy(self) -> sympy.Expr:
        return self.symbol if self.value else 1 - self.symbol

    def atoms(self) -> Set["Atom"]:
        return {self}

    def evaluate(self, lookup: Callable[["Atom"], Any]) -> Any:
        return lookup(self)

    def render(self, net: Optional[Network] = None) -> str:
        def lit(var: str, val: bool) -> str:
            if net is not None and net.has(var):
                return net.literal(var, val)
            return var if val else f"~{var}"

        head = lit(self.variable, self.value)
        if not self.given:
            return f"Pr({head})"
        return f"Pr({head}|{' '.join(lit(v, b) for v, b in self.given)})"


@dataclass(frozen=True)
class Const(SymbolicProb):
    value: float

    def to_sympy(self) -> sympy.Expr:
        return sympy.nsimplify(self.value)

    def atoms(self) -> Set[Atom]:
        return set()

    def evaluate(self, lookup: Callable[[Atom], Any]) -> Any:
        return self.value

    def render(self, net: Optional[Network] = None) -> str:
        return f"{self.value:g}"


@dataclass(frozen=True)
class Product(SymbolicProb):
    factors: Tuple[SymbolicProb, ...]

    def to_sympy(self) -> sympy.Expr:
        return sympy.Mul(*(f.to_sympy() for f in self.factors))

    def atoms(self) -> Set[Atom]:
        return set().union(*(f.atoms() for f in self.factors))

    def evaluate(self, lookup: Callable[[Atom], Any]) -> Any:
        return reduce(lambda acc, f: acc * f.evaluate(lookup), self.factors, 1.0)

    def render(self, net: Optional[Network] = None) -> str:
        return "·".join(_wrap(f, net) for f in self.factors) if self.factors else "1"


@dataclass(frozen=True)
class Sum(SymbolicProb):
    terms: Tuple[SymbolicProb, ...]

    def to_sympy(self) -> sympy.Expr:
        return sympy.Add(*(t.to_sympy() for t in self.terms))

    def atoms(self) -> Set[Atom]:
        return set().union(*(t.atoms() for t in self.terms))

    def evaluate(self, lookup: Callable[[Atom], Any]) -> Any:
        return reduce(lambda acc, t: acc + t.evaluate(lookup), self.terms, 0.0)

    def render(self, net: Optional[Network] = None) -> str:
        return " + ".join(t.render(net) for t in self.terms) if self.terms else "0"


@dataclass(frozen=True)
class Complement(SymbolicProb):
    expr: SymbolicProb

    def to_sympy(self) -> sympy.Expr:
        return 1 - self.expr.to_sympy()

    def atoms(self) -> Set[Atom]:
        return self.expr.atoms()

    def evaluate(self, lookup: Callable[[Atom], Any]) -> Any:
        return 1.0 - self.expr.evaluate(lookup)

    def render(self, net: Optional[Network] = None) -> str:
        if isinstance(self.expr, Atom):
            return Atom(self.expr.variable, not self.expr.value, self.expr.given).render(net)
        return f"1 - ({self.expr.render(net)})"


def _wrap(expr: SymbolicProb, net: Optional[Network]) -> str:
    text = expr.render(net)
    return f"({text})" if isinstance(expr, Sum) else text


def simplify(expr: SymbolicProb | sympy.Expr) -> sympy.Expr:
    raw = expr.to_sympy() if isinstance(expr, SymbolicProb) else expr
    return sympy.expand(raw)


def equivalent(a: SymbolicProb | sympy.Expr, b: SymbolicProb | sympy.Expr) -> bool:
    raw_a = a.to_sympy() if isinstance(a, SymbolicProb) else a
    raw_b = b.to_sympy() if isinstance(b, SymbolicProb) else b
    return sympy.expand(raw_a - raw_b) == 0


def is_zero(expr: SymbolicProb | sympy.Expr) -> bool:
    return simplify(expr) == 0

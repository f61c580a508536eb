"""
Network data model for qualitative probabilistic networks.

A network is an influence diagram over binary variables whose links carry
signs instead of conditional probability tables. Networks are immutable;
every transformation returns a new instance.
"""

import itertools
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

import networkx as nx

logger = logging.getLogger(__name__)


class Sign(Enum):
    POSITIVE = "+"
    NEGATIVE = "-"
    ZERO = "0"
    UNKNOWN = "?"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Sign":
        for sign in cls:
            if sign.value == text:
                return sign
        raise ValueError(f"unknown sign '{text}'")


class VariableKind(Enum):
    CHANCE = "chance"
    DECISION = "decision"
    VALUE = "value"


@dataclass(frozen=True)
class Variable:
    id: str
    kind: VariableKind
    literals: Tuple[str, str] = ("", "")

    def __post_init__(self):
        if self.literals == ("", ""):
            upper = self.id.upper()
            object.__setattr__(self, "literals", (upper, f"~{upper}"))

    def label(self, value: bool) -> str:
        return self.literals[0] if value else self.literals[1]

    def parse(self, label: str) -> bool:
        if label == self.literals[0]:
            return True
        if label == self.literals[1]:
            return False
        raise ValueError(f"'{label}' is not a literal of '{self.id}'")


@dataclass(frozen=True)
class Condition:
    """A conjunction of literals; the empty conjunction is `true`."""

    literals: Tuple[Tuple[str, bool], ...] = ()

    @classmethod
    def of(cls, literals: Iterable[Tuple[str, bool]] | Mapping[str, bool]) -> "Condition":
        items = literals.items() if isinstance(literals, Mapping) else literals
        return cls(tuple(sorted(items)))

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(var for var, _ in self.literals)

    @property
    def is_true(self) -> bool:
        return not self.literals

    def as_dict(self) -> Dict[str, bool]:
        return dict(self.literals)

    def holds_in(self, assignment: Mapping[str, bool]) -> bool:
        return all(assignment.get(var) == value for var, value in self.literals)

    def consistent_with(self, assignment: Mapping[str, bool]) -> bool:
        return all(
            assignment[var] == value for var, value in self.literals if var in assignment
        )

    def conjoin(self, other: "Condition") -> Optional["Condition"]:
        merged = self.as_dict()
        for var, value in other.literals:
            if merged.get(var, value) != value:
                return None
            merged[var] = value
        return Condition.of(merged)

    def exclusive_with(self, other: "Condition") -> bool:
        return self.conjoin(other) is None

    def without(self, variable: str) -> "Condition":
        return Condition(tuple(lit for lit in self.literals if lit[0] != variable))

    def render(self, net: "Network") -> str:
        if self.is_true:
            return "true"
        return " ".join(net.variable(var).label(value) for var, value in self.literals)


TRUE = Condition()


@dataclass(frozen=True)
class QualitativeInfluence:
    source: str
    target: str
    entries: Tuple[Tuple[Condition, Sign], ...] = ()

    @classmethod
    def unconditional(cls, source: str, target: str, sign: Sign) -> "QualitativeInfluence":
        return cls(source, target, ((TRUE, sign),))

    @property
    def condition_variables(self) -> Tuple[str, ...]:
        return tuple(sorted({var for cond, _ in self.entries for var in cond.variables}))

    def sign_at(self, assignment: Mapping[str, bool]) -> Sign:
        """Sign of the entry whose condition holds; uncovered regions are Unknown."""
        for cond, sign in self.entries:
            if cond.holds_in(assignment):
                return sign
        return Sign.UNKNOWN

    def render(self, net: "Network") -> str:
        if not self.entries:
            return f"{self.source} -> {self.target}: {{}}"
        parts = [f"{sign}|{cond.render(net)}" for cond, sign in self.entries]
        return f"{self.source} -> {self.target}: " + ", ".join(parts)


@dataclass(frozen=True)
class Network:
    variables: Tuple[Variable, ...]
    influences: Tuple[QualitativeInfluence, ...] = ()
    informational: Tuple[Tuple[str, str], ...] = ()
    dependences: Tuple[Tuple[str, str], ...] = ()

    @cached_property
    def _by_id(self) -> Dict[str, Variable]:
        return {v.id: v for v in self.variables}

    @cached_property
    def _by_pair(self) -> Dict[Tuple[str, str], QualitativeInfluence]:
        return {(i.source, i.target): i for i in self.influences}

    def variable(self, name: str) -> Variable:
        try:
            return self._by_id[name]
        except KeyError:
            raise KeyError(f"unknown variable '{name}'") from None

    def has(self, name: str) -> bool:
        return name in self._by_id

    def kind(self, name: str) -> VariableKind:
        return self.variable(name).kind

    def names(self, kind: VariableKind) -> List[str]:
        return sorted(v.id for v in self.variables if v.kind == kind)

    @property
    def chance_nodes(self) -> List[str]:
        return self.names(VariableKind.CHANCE)

    @property
    def decisions(self) -> List[str]:
        return self.names(VariableKind.DECISION)

    @property
    def value_node(self) -> Optional[str]:
        values = self.names(VariableKind.VALUE)
        return values[0] if values else None

    def influence(self, source: str, target: str) -> Optional[QualitativeInfluence]:
        return self._by_pair.get((source, target))

    def influences_into(self, target: str) -> List[QualitativeInfluence]:
        return sorted(
            (i for i in self.influences if i.target == target), key=lambda i: i.source
        )

    def influences_from(self, source: str) -> List[QualitativeInfluence]:
        return sorted(
            (i for i in self.influences if i.source == source), key=lambda i: i.target
        )

    def parents(self, name: str) -> List[str]:
        return [i.source for i in self.influences_into(name)]

    def context_parents(self, name: str) -> List[str]:
        """Influence sources plus every variable named in an incoming condition."""
        found = set(self.parents(name))
        for inf in self.influences_into(name):
            found.update(inf.condition_variables)
        return sorted(found)

    def successors(self, name: str) -> List[str]:
        return [i.target for i in self.influences_from(name)]

    def observers(self, name: str) -> List[str]:
        return sorted(dst for src, dst in self.informational if src == name)

    def observations(self, decision: str) -> List[str]:
        return sorted(src for src, dst in self.informational if dst == decision)

    def condition_users(self, name: str) -> List[QualitativeInfluence]:
        return [i for i in self.influences if name in i.condition_variables]

    def graph(self) -> nx.DiGraph:
        """All structural edges: influences, condition contexts and information."""
        g = nx.DiGraph()
        g.add_nodes_from(v.id for v in self.variables)
        for inf in self.influences:
            g.add_edge(inf.source, inf.target, kind="influence")
            for var in inf.condition_variables:
                if not g.has_edge(var, inf.target):
                    g.add_edge(var, inf.target, kind="condition")
        for src, dst in self.informational:
            if not g.has_edge(src, dst):
                g.add_edge(src, dst, kind="informational")
        return g

    def topological_order(self) -> List[str]:
        return list(nx.lexicographical_topological_sort(self.graph()))

    def literal(self, name: str, value: bool) -> str:
        return self.variable(name).label(value)

    def render_assignment(self, assignment: Mapping[str, bool]) -> str:
        return " ".join(self.literal(var, assignment[var]) for var in sorted(assignment))

    def with_influence(self, influence: QualitativeInfluence) -> "Network":
        kept = tuple(
            i for i in self.influences if (i.source, i.target) != (influence.source, influence.target)
        )
        return replace(self, influences=kept + (influence,)).canonical()

    def without_influence(self, source: str, target: str) -> "Network":
        kept = tuple(i for i in self.influences if (i.source, i.target) != (source, target))
        return replace(self, influences=kept)

    def without_variable(self, name: str) -> "Network":
        return replace(
            self,
            variables=tuple(v for v in self.variables if v.id != name),
            influences=tuple(
                i for i in self.influences if name not in (i.source, i.target)
            ),
            informational=tuple(link for link in self.informational if name not in link),
            dependences=tuple(link for link in self.dependences if name not in link),
        )

    def canonical(self) -> "Network":
        return Network(
            variables=tuple(sorted(self.variables, key=lambda v: v.id)),
            influences=tuple(
                sorted(self.influences, key=lambda i: (i.source, i.target))
            ),
            informational=tuple(sorted(set(self.informational))),
            dependences=tuple(sorted({tuple(sorted(d)) for d in self.dependences})),  # type: ignore[misc]
        )


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    element: str = field(default="")

    def __str__(self) -> str:
        return f"{self.message} ({self.element})" if self.element else self.message


def all_assignments(variables: List[str]) -> Iterator[Dict[str, bool]]:
    """Every assignment, true literals first; position i matches assignment_index."""
    for bits in itertools.product((True, False), repeat=len(variables)):
        yield dict(zip(variables, bits))


def assignment_index(variables: List[str], assignment: Mapping[str, bool]) -> int:
    index = 0
    for var in variables:
        index = (index << 1) | (0 if assignment[var] else 1)
    return index


def validate(net: Network) -> List[Violation]:
    """Report every structural invariant violation; an empty list means valid."""
    violations: List[Violation] = []

    seen: Dict[str, int] = {}
    for v in net.variables:
        seen[v.id] = seen.get(v.id, 0) + 1
        if v.literals[0] == v.literals[1]:
            violations.append(Violation("literals", "literals must differ", v.id))
    for name, count in sorted(seen.items()):
        if count > 1:
            violations.append(Violation("duplicate-variable", "variable declared twice", name))

    values = net.names(VariableKind.VALUE)
    if not values:
        violations.append(Violation("no-value", "no value node"))
    elif len(values) > 1:
        violations.append(
            Violation("multiple-values", "more than one value node", ", ".join(values))
        )

    pairs: Dict[Tuple[str, str], int] = {}
    for inf in net.influences:
        where = f"{inf.source} -> {inf.target}"
        pairs[(inf.source, inf.target)] = pairs.get((inf.source, inf.target), 0) + 1
        if not (net.has(inf.source) and net.has(inf.target)):
            violations.append(Violation("unknown-variable", "influence endpoint undeclared", where))
            continue
        if net.kind(inf.source) == VariableKind.VALUE:
            violations.append(
                Violation("value-source", "influence from the value node is undefined", where)
            )
        if net.kind(inf.target) == VariableKind.DECISION:
            violations.append(
                Violation("decision-target", "decisions accept informational links only", where)
            )
        if inf.source == inf.target:
            violations.append(Violation("self-loop", "influence on itself", where))
        violations.extend(_entry_violations(net, inf, where))
    for (src, dst), count in sorted(pairs.items()):
        if count > 1:
            violations.append(
                Violation("duplicate-influence", "more than one influence object", f"{src} -> {dst}")
            )

    for src, dst in net.informational:
        where = f"{src} -> {dst}"
        if not (net.has(src) and net.has(dst)):
            violations.append(Violation("unknown-variable", "informational endpoint undeclared", where))
            continue
        if net.kind(dst) != VariableKind.DECISION:
            violations.append(
                Violation("inform-target", "informational links must target decisions", where)
            )
        if net.kind(src) == VariableKind.VALUE:
            violations.append(
                Violation("value-source", "the value node cannot inform a decision", where)
            )

    for a, b in net.dependences:
        if not (net.has(a) and net.has(b)):
            violations.append(Violation("unknown-variable", "dependence endpoint undeclared", f"{a} -- {b}"))

    if not violations or all(v.code not in {"unknown-variable", "duplicate-variable"} for v in violations):
        graph = net.graph()
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            violations.append(
                Violation("cycle", "network is not acyclic", " -> ".join(u for u, _ in cycle))
            )

    if violations:
        logger.debug(f"Validation found {len(violations)} violation(s)")
    return violations


def _entry_violations(
    net: Network, inf: QualitativeInfluence, where: str
) -> List[Violation]:
    found = []
    for cond, _ in inf.entries:
        names = cond.variables
        if len(set(names)) != len(names):
            found.append(Violation("condition-repeat", "variable appears twice in a condition", where))
        if inf.source in names or inf.target in names:
            found.append(
                Violation("condition-endpoint", "condition mentions the influence's own endpoint", where)
            )
        for var in names:
            if not net.has(var):
                found.append(Violation("unknown-variable", f"condition names undeclared '{var}'", where))
            elif net.kind(var) == VariableKind.VALUE:
                found.append(Violation("value-condition", "condition on the value node", where))
    for (c1, _), (c2, _) in itertools.combinations(inf.entries, 2):
        if not c1.exclusive_with(c2):
            found.append(Violation("overlap", "conditions not mutually exclusive", where))
            break
    return found

"""
Partial orders induced by qualitative influences.

Elements are assignments to a node's context parents, indexed with
`assignment_index`. An edge (hi, lo) between classes means the quantity at
`hi` is weakly greater: a conditional probability for chance nodes, a
utility for the value node.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

import networkx as nx
from networkx.utils import UnionFind

from qpn_planner.errors import OrderTooLargeError
from qpn_planner.network import (
    Network,
    QualitativeInfluence,
    Sign,
    VariableKind,
    all_assignments,
    assignment_index,
)

logger = logging.getLogger(__name__)

ElementEdge = Tuple[int, int]


class Preference(Enum):
    YES = "yes"
    NO = "no"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class PartialOrder:
    variables: Tuple[str, ...]
    class_of: Tuple[int, ...]
    classes: Tuple[Tuple[int, ...], ...]
    edges: FrozenSet[Tuple[int, int]]
    collapsed: bool
    element_edges: FrozenSet[ElementEdge]
    element_merges: FrozenSet[ElementEdge]

    @cached_property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.classes)))
        g.add_edges_from(self.edges)
        return g

    @cached_property
    def closure(self) -> nx.DiGraph:
        return nx.transitive_closure_dag(self.graph)

    @cached_property
    def heights(self) -> Tuple[int, ...]:
        """Length of the longest chain of strictly lower classes below each class."""
        height = [0] * len(self.classes)
        for node in reversed(list(nx.topological_sort(self.graph))):
            below = [height[lo] + 1 for lo in self.graph.successors(node)]
            height[node] = max(below, default=0)
        return tuple(height)

    @cached_property
    def downsets(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(
            tuple(sorted({c} | set(self.closure.successors(c))))
            for c in range(len(self.classes))
        )

    def index_of(self, assignment: Mapping[str, bool]) -> int:
        if set(assignment) != set(self.variables):
            raise ValueError(
                f"assignment over {sorted(assignment)} does not match order over "
                f"{list(self.variables)}"
            )
        return assignment_index(list(self.variables), assignment)

    def assignment(self, element: int) -> Dict[str, bool]:
        bits = len(self.variables)
        return {
            var: not ((element >> (bits - 1 - pos)) & 1)
            for pos, var in enumerate(self.variables)
        }

    def with_edges(self, pairs: Iterable[Tuple[Mapping[str, bool], Mapping[str, bool]]]) -> "PartialOrder":
        extra = {(self.index_of(hi), self.index_of(lo)) for hi, lo in pairs}
        return _assemble(
            self.variables, set(self.element_edges) | extra, set(self.element_merges)
        )


def _assemble(
    variables: Sequence[str], edges: set, merges: set
) -> PartialOrder:
    size = 2 ** len(variables)
    uf = UnionFind(range(size))
    for a, b in merges:
        uf.union(a, b)
    roots = sorted({uf[e] for e in range(size)})

    g = nx.DiGraph()
    g.add_nodes_from(roots)
    for hi, lo in edges:
        rh, rl = uf[hi], uf[lo]
        if rh != rl:
            g.add_edge(rh, rl)

    cond = nx.condensation(g)
    collapsed = any(len(cond.nodes[n]["members"]) > 1 for n in cond.nodes)
    # renumber classes by their smallest element for a deterministic layout
    groups = []
    for n in cond.nodes:
        members = sorted(e for e in range(size) if uf[e] in cond.nodes[n]["members"])
        groups.append((members[0], n, tuple(members)))
    groups.sort()
    renumber = {n: pos for pos, (_, n, _) in enumerate(groups)}
    class_of = [0] * size
    for pos, (_, _, members) in enumerate(groups):
        for e in members:
            class_of[e] = pos
    class_edges = frozenset((renumber[a], renumber[b]) for a, b in cond.edges)
    return PartialOrder(
        variables=tuple(variables),
        class_of=tuple(class_of),
        classes=tuple(members for _, _, members in groups),
        edges=class_edges,
        collapsed=collapsed,
        element_edges=frozenset(edges),
        element_merges=frozenset(merges),
    )


def build_order(
    variables: Sequence[str],
    influences: Sequence[QualitativeInfluence],
    max_variables: int = 12,
) -> PartialOrder:
    """Hypercube order over `variables` from the influence entries acting on a node."""
    variables = list(variables)
    if len(variables) > max_variables:
        raise OrderTooLargeError(
            f"{len(variables)} predecessors exceed the explicit order limit of {max_variables}"
        )
    edges: set = set()
    merges: set = set()
    for inf in influences:
        if inf.source not in variables:
            continue
        for cond, sign in inf.entries:
            if sign == Sign.UNKNOWN:
                continue
            for assignment in all_assignments(variables):
                if not assignment[inf.source] or not cond.holds_in(assignment):
                    continue
                high = assignment_index(variables, assignment)
                low = assignment_index(variables, {**assignment, inf.source: False})
                if sign == Sign.POSITIVE:
                    edges.add((high, low))
                elif sign == Sign.NEGATIVE:
                    edges.add((low, high))
                else:
                    merges.add((high, low))
    order = _assemble(variables, edges, merges)
    if order.collapsed:
        logger.warning(f"Sign constraints over {variables} force a cycle; classes collapsed")
    return order


def induced_probability_order(
    net: Network, variable: str, max_variables: int = 12
) -> PartialOrder:
    if net.kind(variable) != VariableKind.CHANCE:
        raise ValueError(f"'{variable}' is not a chance node")
    parents = net.context_parents(variable)
    if not parents:
        raise ValueError(f"'{variable}' has no predecessors")
    return build_order(parents, net.influences_into(variable), max_variables)


def induced_utility_order(net: Network, max_variables: int = 12) -> PartialOrder:
    value = net.value_node
    if value is None:
        raise ValueError("network has no value node")
    return build_order(
        net.context_parents(value), net.influences_into(value), max_variables
    )


def is_preferred(
    po: PartialOrder, o1: Mapping[str, bool], o2: Mapping[str, bool]
) -> Preference:
    c1 = po.class_of[po.index_of(o1)]
    c2 = po.class_of[po.index_of(o2)]
    if c1 == c2:
        return Preference.EQUAL
    if po.closure.has_edge(c1, c2):
        return Preference.YES
    if po.closure.has_edge(c2, c1):
        return Preference.NO
    return Preference.INCOMPARABLE


def to_dot(po: PartialOrder, net: Network, name: str = "order") -> str:
    """DOT text: one node per class, one edge per covering pair."""
    lines = [f"digraph {name} {{", "  rankdir=TB;"]
    for idx, members in enumerate(po.classes):
        labels = [net.render_assignment(po.assignment(e)) or "true" for e in members]
        text = "\\n".join(labels)
        lines.append(f'  c{idx} [shape=box, label="{text}"];')
    reduced = nx.transitive_reduction(po.graph)
    for hi, lo in sorted(reduced.edges):
        lines.append(f"  c{hi} -> c{lo};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def element_labels(po: PartialOrder, net: Network) -> List[str]:
    return [net.render_assignment(po.assignment(e)) for e in range(len(po.class_of))]

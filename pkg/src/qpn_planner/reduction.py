"""
Qualitative evaluation by node removal and arc reversal.

Every operation returns a new network together with a `ReductionStep`
describing what changed, so a reduction can be audited and replayed.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx

from qpn_planner.errors import ReductionError
from qpn_planner.network import (
    Network,
    QualitativeInfluence,
    Sign,
    VariableKind,
    all_assignments,
)
from qpn_planner.signs import chain, normalize, parallel, sign_in_context
from qpn_planner.strategy import Policy

logger = logging.getLogger(__name__)


class StepKind(Enum):
    REMOVE_CHANCE = "remove-chance"
    REVERSE_ARC = "reverse-arc"
    REMOVE_DECISION = "remove-decision"


@dataclass(frozen=True)
class ReductionStep:
    kind: StepKind
    subject: Tuple[str, ...]
    updates: Tuple[QualitativeInfluence, ...]
    justification: str
    rule: str = ""
    policy: Optional[Policy] = None


def _check_chance(net: Network, v: str) -> None:
    if not net.has(v):
        raise ReductionError(f"unknown variable '{v}'")
    if net.kind(v) != VariableKind.CHANCE:
        raise ReductionError(f"'{v}' is not a chance node")


def _is_condition_variable(net: Network, v: str) -> bool:
    return bool(net.condition_users(v))


def remove_barren_node(net: Network, v: str) -> Tuple[Network, ReductionStep]:
    """Drop a chance node nothing depends on."""
    _check_chance(net, v)
    if net.successors(v) or net.observers(v) or _is_condition_variable(net, v):
        raise ReductionError(f"'{v}' is not barren")
    step = ReductionStep(StepKind.REMOVE_CHANCE, (v,), (), "barren", "barren")
    return net.without_variable(v).canonical(), step


def _drop_source_conditions(inf: QualitativeInfluence) -> QualitativeInfluence:
    """Entries conditioned on the link's own source lose that literal and become Unknown."""
    entries = []
    for cond, sign in inf.entries:
        if inf.source in cond.variables:
            entries.append((cond.without(inf.source), Sign.UNKNOWN))
        else:
            entries.append((cond, sign))
    return normalize(QualitativeInfluence(inf.source, inf.target, tuple(entries)))


def remove_chance_node(net: Network, v: str) -> Tuple[Network, ReductionStep]:
    """Splice `v` out, connecting each of its predecessors to its single successor.

    Every former context parent of `v` or of the successor stays a context
    parent of the successor. One the successor depended on with no sign
    contributes Unknown.
    """
    _check_chance(net, v)
    successors = net.successors(v)
    if len(successors) != 1:
        raise ReductionError(f"'{v}' has {len(successors)} successors, need exactly 1")
    if net.observers(v):
        raise ReductionError(f"'{v}' feeds an informational link to {net.observers(v)}")
    if _is_condition_variable(net, v):
        raise ReductionError(f"'{v}' is named in an influence condition")

    (s,) = successors
    out = net.influence(v, s)
    assert out is not None
    above = net.context_parents(v)
    beside = [p for p in net.context_parents(s) if p != v]
    reduced = net.without_variable(v)
    still_beside = set(reduced.context_parents(s))
    updates: List[QualitativeInfluence] = []
    for p in sorted(set(above) | set(beside)):
        unknown = QualitativeInfluence.unconditional(p, s, Sign.UNKNOWN)
        if p not in above:
            # a condition variable of v -> s keeps its unconstrained hold on s
            if p not in still_beside:
                updates.append(unknown)
            continue
        direct = net.influence(p, s)
        if p in beside and direct is None:
            # only named in conditions into s, so its own effect on s is unconstrained
            direct = unknown
        into = net.influence(p, v)
        spliced = _drop_source_conditions(chain(into, out)) if into is not None else unknown
        updates.append(parallel(direct, spliced) if direct is not None else spliced)

    for inf in updates:
        reduced = reduced.with_influence(inf)
    reduced = reduced.canonical()
    if not nx.is_directed_acyclic_graph(reduced.graph()):
        raise ReductionError(f"removing '{v}' would create a cycle")
    step = ReductionStep(
        StepKind.REMOVE_CHANCE,
        (v,),
        tuple(updates),
        f"spliced predecessors of {v} into {s}",
        "splice",
    )
    return reduced, step


def reverse_arc(net: Network, a: str, b: str) -> Tuple[Network, ReductionStep]:
    """Replace a->b with b->a, giving both nodes each other's predecessors.

    The reversed link keeps the original entries. Every inherited or shared
    predecessor link into `a` or `b` is re-annotated Unknown.
    """
    _check_chance(net, a)
    _check_chance(net, b)
    original = net.influence(a, b)
    if original is None:
        raise ReductionError(f"no influence {a} -> {b} to reverse")

    flipped = QualitativeInfluence(b, a, original.entries)
    shared = (set(net.context_parents(a)) | set(net.context_parents(b))) - {a, b}
    updates = [flipped]
    for q in sorted(shared):
        updates.append(QualitativeInfluence.unconditional(q, a, Sign.UNKNOWN))
        updates.append(QualitativeInfluence.unconditional(q, b, Sign.UNKNOWN))

    reversed_net = net.without_influence(a, b)
    for inf in updates:
        reversed_net = reversed_net.with_influence(inf)
    reversed_net = reversed_net.canonical()
    if not nx.is_directed_acyclic_graph(reversed_net.graph()):
        raise ReductionError(f"reversing {a} -> {b} would create a cycle")
    step = ReductionStep(
        StepKind.REVERSE_ARC,
        (a, b),
        tuple(updates),
        f"reversed {a} -> {b}; shared predecessors {sorted(shared)} now Unknown",
        "reverse",
    )
    return reversed_net, step


def remove_decision_node(net: Network, d: str) -> Tuple[Network, ReductionStep]:
    """Fix a decision whose effect on utility has a definite sign in every observed context.

    The forced policy is optimal in every model, so the utility left behind
    is the maximum over both literals and keeps the signs of the remaining
    links. Variables that only conditioned `d -> u` become Unknown parents.
    """
    if not net.has(d) or net.kind(d) != VariableKind.DECISION:
        raise ReductionError(f"'{d}' is not a decision")
    value = net.value_node
    successors = net.successors(d)
    if any(s != value for s in successors):
        raise ReductionError(f"'{d}' influences {successors}, not only the value node")
    if net.observers(d):
        raise ReductionError(f"'{d}' is observed by {net.observers(d)}")
    if _is_condition_variable(net, d):
        raise ReductionError(f"'{d}' is named in an influence condition")

    observed = net.observations(d)
    to_value = net.influence(d, value) if value is not None else None
    table = []
    for context in all_assignments(observed):
        sign = sign_in_context(to_value, context) if to_value is not None else Sign.ZERO
        if sign == Sign.UNKNOWN:
            raise ReductionError(
                f"'{d}' not removable: influence on utility is Unknown given "
                f"{net.render_assignment(context) or 'no observations'}"
            )
        if sign == Sign.ZERO:
            logger.debug(f"Decision {d} indifferent given {context}; choosing false literal")
        table.append(sign == Sign.POSITIVE)

    policy = Policy(d, tuple(observed), tuple(table))
    reduced = net.without_variable(d)
    updates: Tuple[QualitativeInfluence, ...] = ()
    if value is not None:
        # utility still varies with the conditions of d -> u once d follows the policy
        lost = [
            c
            for c in net.context_parents(value)
            if c != d and c not in reduced.context_parents(value)
        ]
        updates = tuple(
            QualitativeInfluence.unconditional(c, value, Sign.UNKNOWN) for c in lost
        )
    for inf in updates:
        reduced = reduced.with_influence(inf)
    step = ReductionStep(
        StepKind.REMOVE_DECISION,
        (d,),
        updates,
        f"policy {policy.render(net)}",
        "decide",
        policy,
    )
    return reduced.canonical(), step


def _frozen(net: Network, v: str) -> bool:
    """Chance nodes reduction must keep: observed, used in conditions, or outcome attributes."""
    if net.observers(v) or _is_condition_variable(net, v):
        return True
    return not net.parents(v) and net.successors(v) == [net.value_node]


def _next_step(
    net: Network,
    order: Sequence[str],
    orient_signals: bool,
    reversed_pairs: Set[Tuple[str, str]],
) -> Optional[Tuple[Network, ReductionStep]]:
    chance = [v for v in order if net.kind(v) == VariableKind.CHANCE]

    for v in sorted(chance):
        if not net.successors(v) and not net.observers(v) and not _is_condition_variable(net, v):
            return remove_barren_node(net, v)

    for v in chance:
        if len(net.successors(v)) == 1 and not _frozen(net, v):
            try:
                return remove_chance_node(net, v)
            except ReductionError as e:
                logger.debug(f"Skipping removal of {v}: {e}")

    for d in sorted(net.decisions):
        try:
            return remove_decision_node(net, d)
        except ReductionError as e:
            logger.debug(f"Decision {d} kept: {e}")

    for v in chance:
        successors = net.successors(v)
        if len(successors) < 2 or _frozen(net, v):
            continue
        ranked = [w for w in order if w in successors]
        kept = net.value_node if net.value_node in successors else ranked[-1]
        for w in ranked:
            if w == kept or net.kind(w) != VariableKind.CHANCE or (w, v) in reversed_pairs:
                continue
            try:
                reversed_net, step = reverse_arc(net, v, w)
                return reversed_net, _relabel(step, "enable")
            except ReductionError as e:
                logger.debug(f"Cannot reverse {v} -> {w}: {e}")

    if orient_signals:
        for s in chance:
            if net.successors(s) or not net.observers(s) or _is_condition_variable(net, s):
                continue
            parents = net.parents(s)
            if (
                len(parents) == 1
                and net.kind(parents[0]) == VariableKind.CHANCE
                and (s, parents[0]) not in reversed_pairs
            ):
                try:
                    reversed_net, step = reverse_arc(net, parents[0], s)
                    return reversed_net, _relabel(step, "orient")
                except ReductionError as e:
                    logger.debug(f"Cannot orient signal {s}: {e}")
    return None


def reduce(net: Network, orient_signals: bool = True) -> Tuple[Network, List[ReductionStep]]:
    """Apply removal rules until none applies.

    Rules in priority order: barren chance nodes, removable chance nodes in
    topological order, removable decisions, arc reversals that leave a chance
    node with one successor, and (optionally) orienting observed signals
    before the state they report on.
    """
    current = net.canonical()
    steps: List[ReductionStep] = []
    # a link reversed once is never reversed back
    reversed_pairs: Set[Tuple[str, str]] = set()
    while True:
        found = _next_step(
            current, current.topological_order(), orient_signals, reversed_pairs
        )
        if found is None:
            break
        current, step = found
        if step.kind == StepKind.REVERSE_ARC:
            reversed_pairs.add((step.subject[0], step.subject[1]))
        logger.debug(f"Reduction step: {step.kind.value} {step.subject} ({step.rule})")
        steps.append(step)
    logger.info(
        f"Reduction finished after {len(steps)} step(s); "
        f"{len(current.variables)} of {len(net.variables)} variables remain"
    )
    return current, steps


def _relabel(step: ReductionStep, rule: str) -> ReductionStep:
    return ReductionStep(
        step.kind, step.subject, step.updates, step.justification, rule, step.policy
    )


def replay(net: Network, steps: Sequence[ReductionStep]) -> Network:
    """Re-apply a step log; each step must reproduce its recorded updates."""
    current = net.canonical()
    for step in steps:
        if step.kind == StepKind.REMOVE_CHANCE:
            if step.rule == "barren":
                current, redo = remove_barren_node(current, step.subject[0])
            else:
                current, redo = remove_chance_node(current, step.subject[0])
        elif step.kind == StepKind.REVERSE_ARC:
            current, redo = reverse_arc(current, *step.subject)
        else:
            current, redo = remove_decision_node(current, step.subject[0])
        if redo.updates != step.updates or redo.policy != step.policy:
            raise ReductionError(f"replay diverged at {step.kind.value} {step.subject}")
    return current


def format_step(step: ReductionStep, net: Network) -> str:
    """One-line record; `net` must declare every variable named by the updates."""
    subject = " -> ".join(step.subject)
    parts = [f"{step.kind.value} {subject}", f"[{step.rule}]", step.justification]
    if step.updates:
        parts.append("; ".join(inf.render(net) for inf in step.updates))
    return " | ".join(parts)


def step_table(steps: Sequence[ReductionStep]) -> List[Dict[str, str]]:
    return [
        {
            "kind": s.kind.value,
            "subject": ",".join(s.subject),
            "rule": s.rule,
            "justification": s.justification,
        }
        for s in steps
    ]

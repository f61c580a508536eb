"""
Strategies, mixed strategies and symbolic case analyses.

A policy maps the observed values of a decision's informational predecessors
to a decision literal. A case analysis lists, for one strategy, every
assignment of the relevant chance variables with its symbolic probability
and the outcome (assignment to the value node's context parents) it yields.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import pandas as pd
import sympy

from qpn_planner.errors import StrategyError
from qpn_planner.network import (
    Network,
    Sign,
    VariableKind,
    all_assignments,
    assignment_index,
)
from qpn_planner.signs import sign_in_context
from qpn_planner.symbolic import Atom, Const, Product, SymbolicProb, equivalent, is_zero, simplify

logger = logging.getLogger(__name__)

Assignment = Tuple[Tuple[str, bool], ...]


def freeze(assignment: Mapping[str, bool]) -> Assignment:
    return tuple(sorted(assignment.items()))


@dataclass(frozen=True)
class Policy:
    decision: str
    observed: Tuple[str, ...]
    table: Tuple[bool, ...]

    def __post_init__(self):
        if len(self.table) != 2 ** len(self.observed):
            raise StrategyError(
                f"policy for '{self.decision}' needs {2 ** len(self.observed)} entries"
            )

    @classmethod
    def constant(cls, decision: str, value: bool) -> "Policy":
        return cls(decision, (), (value,))

    @property
    def is_constant(self) -> bool:
        return len(set(self.table)) == 1

    def choose(self, observed: Mapping[str, bool]) -> bool:
        return self.table[assignment_index(list(self.observed), observed)]

    def varies_on(self, variable: str) -> bool:
        if variable not in self.observed:
            return False
        for assignment in all_assignments(list(self.observed)):
            if assignment[variable] and self.choose(assignment) != self.choose(
                {**assignment, variable: False}
            ):
                return True
        return False

    def render(self, net: Network) -> str:
        if self.is_constant:
            return f"{self.decision}={net.literal(self.decision, self.table[0])}"
        rules = []
        for assignment in all_assignments(list(self.observed)):
            choice = net.literal(self.decision, self.choose(assignment))
            rules.append(f"{net.render_assignment(assignment)}->{choice}")
        return f"{self.decision}[{', '.join(rules)}]"


@dataclass(frozen=True)
class Strategy:
    policies: Tuple[Policy, ...]

    def __post_init__(self):
        names = [p.decision for p in self.policies]
        if len(set(names)) != len(names):
            raise StrategyError(f"decision covered twice in {names}")
        object.__setattr__(
            self, "policies", tuple(sorted(self.policies, key=lambda p: p.decision))
        )

    @property
    def decisions(self) -> Tuple[str, ...]:
        return tuple(p.decision for p in self.policies)

    def policy(self, decision: str) -> Policy:
        for p in self.policies:
            if p.decision == decision:
                return p
        raise StrategyError(f"strategy has no policy for '{decision}'")

    def extended(self, extra: Sequence[Policy]) -> "Strategy":
        present = set(self.decisions)
        return Strategy(self.policies + tuple(p for p in extra if p.decision not in present))

    def decide(self, order: Sequence[str], chance: Mapping[str, bool]) -> Dict[str, bool]:
        """Decision literals induced by observed chance values; `order` is topological.

        Observations missing from `chance` must be ones the policy ignores.
        """
        known: Dict[str, bool] = dict(chance)
        choices: Dict[str, bool] = {}
        for name in order:
            if name not in self.decisions:
                continue
            policy = self.policy(name)
            choices[name] = policy.choose({v: known.get(v, True) for v in policy.observed})
            known[name] = choices[name]
        return choices

    def render(self, net: Network) -> str:
        return "; ".join(p.render(net) for p in self.policies)


@dataclass(frozen=True)
class MixedStrategy:
    components: Tuple[Tuple[Strategy, SymbolicProb], ...]

    def render(self, net: Network) -> str:
        parts = [f"{w.render(net)} × ({s.render(net)})" for s, w in self.components]
        return "mix[" + " + ".join(parts) + "]"


@dataclass(frozen=True)
class CaseRow:
    case: Assignment
    probability: SymbolicProb
    outcome: Assignment


@dataclass(frozen=True)
class CaseAnalysis:
    strategy: Strategy
    outcome_variables: Tuple[str, ...]
    rows: Tuple[CaseRow, ...]

    def outcome_distribution(self) -> Dict[Assignment, sympy.Expr]:
        """Probability of each outcome, rows with equal outcomes summed and expanded."""
        merged: Dict[Assignment, sympy.Expr] = {}
        for row in self.rows:
            merged[row.outcome] = merged.get(row.outcome, 0) + row.probability.to_sympy()
        expanded = {o: sympy.expand(p) for o, p in merged.items()}
        return {o: p for o, p in expanded.items() if p != 0}

    def total(self) -> sympy.Expr:
        return simplify(sum((r.probability.to_sympy() for r in self.rows), sympy.Integer(0)))

    def to_frame(self, net: Network) -> pd.DataFrame:
        records = []
        for pos, row in enumerate(self.rows):
            records.append(
                {
                    "Strategy": self.strategy.render(net) if pos == 0 else "",
                    "Case": net.render_assignment(dict(row.case)) or "-",
                    "Prob": row.probability.render(net),
                    "Outcome": net.render_assignment(dict(row.outcome)),
                }
            )
        return pd.DataFrame(records, columns=["Strategy", "Case", "Prob", "Outcome"])


def enumerate_strategies(
    net: Network, restrict_fixed_observations: bool = True
) -> List[Strategy]:
    """Every combination of policies, one per decision, in a deterministic order.

    With `restrict_fixed_observations`, a decision's policy ignores observed
    decisions whose own policy is constant in the strategy being built.
    """
    decisions = [n for n in net.topological_order() if net.kind(n) == VariableKind.DECISION]
    if not decisions:
        raise StrategyError("network has no decisions")

    strategies: List[Strategy] = []

    def extend(position: int, chosen: Tuple[Policy, ...]) -> None:
        if position == len(decisions):
            strategies.append(Strategy(chosen))
            return
        decision = decisions[position]
        observed = net.observations(decision)
        if restrict_fixed_observations:
            fixed = {p.decision for p in chosen if p.is_constant}
            observed = [o for o in observed if o not in fixed]
        for table in itertools.product((True, False), repeat=2 ** len(observed)):
            extend(position + 1, chosen + (Policy(decision, tuple(observed), table),))

    extend(0, ())
    logger.debug(f"Enumerated {len(strategies)} strategies over {decisions}")
    return strategies


def fixed_decisions(net: Network, s: Strategy) -> Dict[str, bool]:
    """Decisions whose literal does not depend on any chance observation."""
    fixed: Dict[str, bool] = {}
    for name in net.topological_order():
        if name not in s.decisions:
            continue
        policy = s.policy(name)
        if policy.is_constant:
            fixed[name] = policy.table[0]
        elif all(o in fixed for o in policy.observed):
            fixed[name] = policy.choose({o: fixed[o] for o in policy.observed})
    return fixed


def relevant_chance_variables(net: Network, s: Strategy) -> List[str]:
    """Chance variables whose values can change the outcome distribution under `s`.

    Starts from the chance context parents of the value node and the
    observations a policy actually varies on, then closes over chance parents
    whose influence is not Zero once the strategy's fixed decisions are known.
    """
    value = net.value_node
    if value is None:
        raise StrategyError("network has no value node")
    fixed = fixed_decisions(net, s)
    chance = set(net.chance_nodes)
    pending = [v for v in net.context_parents(value) if v in chance]
    for policy in s.policies:
        if policy.decision in fixed:
            continue
        pending.extend(o for o in policy.observed if o in chance and policy.varies_on(o))
    relevant = set()
    while pending:
        v = pending.pop()
        if v in relevant:
            continue
        relevant.add(v)
        for inf in net.influences_into(v):
            if inf.source in chance and sign_in_context(inf, fixed) != Sign.ZERO:
                pending.append(inf.source)
            pending.extend(c for c in inf.condition_variables if c in chance)
    return sorted(relevant)


def _conditioning(net: Network, variable: str, known: Mapping[str, bool]) -> Assignment:
    conditions = {c for inf in net.influences_into(variable) for c in inf.condition_variables}
    given = {}
    for parent in net.context_parents(variable):
        if parent not in known:
            continue
        inf = net.influence(parent, variable)
        if inf is not None and parent not in conditions:
            others = {k: v for k, v in known.items() if k != parent}
            if sign_in_context(inf, others) == Sign.ZERO:
                continue
        given[parent] = known[parent]
    return freeze(given)


def case_analysis(net: Network, s: Strategy) -> CaseAnalysis:
    value = net.value_node
    if value is None:
        raise StrategyError("network has no value node")
    missing = set(net.decisions) - set(s.decisions)
    if missing:
        raise StrategyError(f"strategy leaves {sorted(missing)} undecided")

    order = net.topological_order()
    relevant = relevant_chance_variables(net, s)
    ordered = [v for v in order if v in relevant]
    outcome_vars = tuple(net.context_parents(value))

    rows = []
    for case in all_assignments(ordered):
        known = {**case, **s.decide(order, case)}
        atoms: List[SymbolicProb] = [
            Atom(v, case[v], _conditioning(net, v, known)) for v in ordered
        ]
        probability: SymbolicProb = Product(tuple(atoms)) if atoms else Const(1.0)
        outcome = freeze({o: known[o] for o in outcome_vars})
        rows.append(CaseRow(freeze(case), probability, outcome))
    return CaseAnalysis(s, outcome_vars, tuple(rows))


def realization_equivalent(net: Network, s1: Strategy, s2: Strategy) -> bool:
    d1 = case_analysis(net, s1).outcome_distribution()
    d2 = case_analysis(net, s2).outcome_distribution()
    if set(d1) != set(d2):
        return False
    return all(equivalent(d1[o], d2[o]) for o in d1)


def make_mixed(components: Sequence[Tuple[Strategy, SymbolicProb | float]]) -> MixedStrategy:
    if not components:
        raise StrategyError("a mixed strategy needs at least one component")
    weights: List[SymbolicProb] = []
    for _, weight in components:
        if isinstance(weight, (int, float)):
            if not (0.0 <= weight <= 1.0):
                raise StrategyError(f"weight {weight} outside [0, 1]")
            weights.append(Const(float(weight)))
        else:
            weights.append(weight)
    total = sum((w.to_sympy() for w in weights), sympy.Integer(0))
    if all(isinstance(w, Const) for w in weights):
        if abs(float(total) - 1.0) > 1e-9:
            raise StrategyError(f"weights sum to {float(total):g}, not 1")
    elif not is_zero(total - 1):
        raise StrategyError(f"weights sum to {total}, not 1")
    return MixedStrategy(tuple((s, w) for (s, _), w in zip(components, weights)))


def blended_distribution(net: Network, mixed: MixedStrategy) -> Dict[Assignment, sympy.Expr]:
    blended: Dict[Assignment, sympy.Expr] = {}
    for strategy, weight in mixed.components:
        if is_zero(weight):
            continue
        w = weight.to_sympy()
        for outcome, p in case_analysis(net, strategy).outcome_distribution().items():
            blended[outcome] = blended.get(outcome, 0) + w * p
    expanded = {o: sympy.expand(p) for o, p in blended.items()}
    return {o: p for o, p in expanded.items() if p != 0}


def single(strategies: Sequence[Strategy], net: Network, text: str) -> Optional[Strategy]:
    """Look up a strategy by its rendered form."""
    for s in strategies:
        if s.render(net) == text:
            return s
    return None

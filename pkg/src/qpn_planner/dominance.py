"""
Admissibility: proving strategies dominated.

Symbolic proofs match the case analyses of two strategies row by row:
rows with identical symbolic probability are paired so that every
dominator outcome is weakly preferred in the utility partial order, and at
least one is strictly preferred. When algebra is not enough, an `Oracle`
supplies sampled evidence instead; such proofs carry route "sampled".
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import sympy

from qpn_planner.errors import OracleContradiction, StrategyError
from qpn_planner.network import (
    Network,
    Sign,
    VariableKind,
    all_assignments,
)
from qpn_planner.ordering import PartialOrder, Preference, induced_utility_order, is_preferred
from qpn_planner.oracle import Oracle
from qpn_planner.reduction import ReductionStep, reduce
from qpn_planner.settings import Settings, get_settings
from qpn_planner.signs import sign_in_context
from qpn_planner.strategy import (
    Assignment,
    CaseAnalysis,
    MixedStrategy,
    Policy,
    Strategy,
    blended_distribution,
    case_analysis,
    enumerate_strategies,
    fixed_decisions,
    make_mixed,
)
from qpn_planner.symbolic import Atom, Complement, is_zero

logger = logging.getLogger(__name__)

Row = Tuple[sympy.Expr, Assignment]


class ProofKind(Enum):
    PAIRWISE = "pairwise"
    KWAY = "kway"
    MIXED = "mixed"
    INFO_PRUNE = "info-prune"


@dataclass(frozen=True)
class DominanceProof:
    kind: ProofKind
    dominated: Strategy
    dominators: Tuple[Strategy | MixedStrategy, ...]
    evidence: Tuple[str, ...]
    strict: bool
    route: str = "symbolic"
    rule: str = ""

    def render(self, net: Network) -> List[str]:
        header = f"[{self.kind.value}] {self.dominated.render(net)}"
        lines = [header, f"  route: {self.route}" + (f", rule: {self.rule}" if self.rule else "")]
        lines.extend(f"  by: {d.render(net)}" for d in self.dominators)
        lines.extend(f"  - {e}" for e in self.evidence)
        return lines


@dataclass(frozen=True)
class _Match:
    ok: bool
    strict: bool
    evidence: Tuple[str, ...] = ()
    reason: str = ""


@lru_cache(maxsize=4096)
def _analysis(net: Network, s: Strategy) -> CaseAnalysis:
    return case_analysis(net, s)


@lru_cache(maxsize=8192)
def _rows(net: Network, s: Strategy, merged: bool) -> Tuple[Row, ...]:
    analysis = _analysis(net, s)
    if merged:
        return tuple((p, o) for o, p in analysis.outcome_distribution().items())
    return tuple((sympy.expand(r.probability.to_sympy()), r.outcome) for r in analysis.rows)


def _group(rows: Sequence[Row]) -> Dict[sympy.Expr, List[Assignment]]:
    groups: Dict[sympy.Expr, List[Assignment]] = defaultdict(list)
    for p, outcome in rows:
        groups[p].append(outcome)
    return groups


def _perfect(graph: nx.Graph, top: List) -> Optional[Dict]:
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top)
    return matching if len(matching) == 2 * len(top) else None


def _match(
    net: Network, rows_a: Sequence[Row], rows_b: Sequence[Row], po: PartialOrder
) -> _Match:
    """Pair rows of A with equally probable rows of B whose outcomes A weakly prefers."""
    groups_a, groups_b = _group(rows_a), _group(rows_b)
    if set(groups_a) != set(groups_b) or any(
        len(groups_a[k]) != len(groups_b[k]) for k in groups_a
    ):
        unmatched = sorted(str(k) for k in set(groups_a) ^ set(groups_b))
        detail = f" ({', '.join(unmatched[:3])})" if unmatched else ""
        return _Match(False, False, reason=f"case probabilities differ{detail}")

    evidence: List[str] = []
    strict = False
    for key in sorted(groups_a, key=str):
        outs_a, outs_b = groups_a[key], groups_b[key]
        graph = nx.Graph()
        top = [("a", i) for i in range(len(outs_a))]
        graph.add_nodes_from(top)
        graph.add_nodes_from(("b", j) for j in range(len(outs_b)))
        better = []
        for i, oa in enumerate(outs_a):
            for j, ob in enumerate(outs_b):
                pref = is_preferred(po, dict(oa), dict(ob))
                if pref in (Preference.YES, Preference.EQUAL):
                    graph.add_edge(("a", i), ("b", j))
                if pref == Preference.YES:
                    better.append((i, j))
        matching = _perfect(graph, top)
        if matching is None:
            return _Match(False, False, reason=f"no order-respecting pairing for probability {key}")
        pairs = {i: matching[("a", i)][1] for i in range(len(outs_a))}
        if not strict:
            for i, j in better:
                rest = graph.copy()
                rest.remove_nodes_from([("a", i), ("b", j)])
                rest_top = [n for n in top if n != ("a", i)]
                found = _perfect(rest, rest_top)
                if found is not None:
                    pairs = {k: found[("a", k)][1] for k in range(len(outs_a)) if k != i}
                    pairs[i] = j
                    strict = True
                    break
        for i in sorted(pairs):
            oa, ob = outs_a[i], outs_b[pairs[i]]
            rel = "=" if is_preferred(po, dict(oa), dict(ob)) == Preference.EQUAL else "≻"
            evidence.append(
                f"{key}: {net.render_assignment(dict(oa))} {rel} {net.render_assignment(dict(ob))}"
            )
    if not strict:
        return _Match(True, False, tuple(evidence), "no strictly preferred case")
    return _Match(True, True, tuple(evidence))


def _check_same_network(net: Network, *strategies: Strategy) -> None:
    decisions = set(net.decisions)
    for s in strategies:
        if set(s.decisions) != decisions:
            raise StrategyError(
                f"strategy over {sorted(s.decisions)} does not belong to a network "
                f"deciding {sorted(decisions)}"
            )


def _pairwise_attempt(
    net: Network, sA: Strategy, sB: Strategy, po: PartialOrder
) -> Tuple[Optional[DominanceProof], str]:
    _check_same_network(net, sA, sB)
    reasons = []
    for merged in (True, False):
        m = _match(net, _rows(net, sA, merged), _rows(net, sB, merged), po)
        if m.ok and m.strict:
            proof = DominanceProof(
                ProofKind.PAIRWISE,
                sB,
                (sA,),
                m.evidence,
                True,
                rule="matched outcomes" if merged else "matched cases",
            )
            return proof, ""
        reasons.append(m.reason)
    return None, "; ".join(dict.fromkeys(reasons))


def pairwise_dominates(
    net: Network, sA: Strategy, sB: Strategy, po: PartialOrder
) -> Optional[DominanceProof]:
    """Proof that sA dominates sB by matched cases, or None (which proves nothing)."""
    return _pairwise_attempt(net, sA, sB, po)[0]


def unknown_utility_pairs(
    net: Network, po: PartialOrder
) -> List[Tuple[Dict[str, bool], Dict[str, bool]]]:
    """Outcome pairs differing in one variable whose utility comparison is unconstrained."""
    value = net.value_node
    if value is None:
        return []
    variables = list(po.variables)
    pairs = []
    for p in variables:
        inf = net.influence(p, value)
        for assignment in all_assignments(variables):
            if not assignment[p]:
                continue
            if inf is not None and inf.sign_at(assignment) != Sign.UNKNOWN:
                continue
            lower = {**assignment, p: False}
            if is_preferred(po, assignment, lower) == Preference.INCOMPARABLE:
                pairs.append((assignment, lower))
    return pairs


@lru_cache(maxsize=64)
def _regions(
    net: Network, po: PartialOrder, max_region_pairs: int
) -> Optional[Tuple[Tuple[str, PartialOrder], ...]]:
    """Every orientation of the unknown utility comparisons, or None if there are too many."""
    pairs = unknown_utility_pairs(net, po)
    if len(pairs) > max_region_pairs:
        return None
    regions = []
    for bits in itertools.product((True, False), repeat=len(pairs)):
        oriented = [(hi, lo) if up else (lo, hi) for (hi, lo), up in zip(pairs, bits)]
        label = ", ".join(
            f"{net.render_assignment(hi)} ≥ {net.render_assignment(lo)}" for hi, lo in oriented
        )
        regions.append((label, po.with_edges(oriented)))
    return tuple(regions)


def kway_dominated(
    net: Network,
    s1: Strategy,
    dominators: Sequence[Strategy],
    po: PartialOrder,
    oracle: Optional[Oracle] = None,
    tolerance: float = 1e-12,
    max_region_pairs: int = 6,
) -> Optional[DominanceProof]:
    """Proof that some member of `dominators` is at least as good as s1 in every model.

    Symbolically, each unconstrained utility comparison is oriented both
    ways; every resulting region needs a matched-case proof from some
    dominator. Failing that, `oracle` may confirm it numerically.
    """
    others = [d for d in dict.fromkeys(dominators) if d != s1]
    if len(others) < 2:
        return None
    _check_same_network(net, s1, *others)

    regions = _regions(net, po, max_region_pairs)
    if regions is not None:
        evidence = []
        used: List[Strategy] = []
        strict_any = False
        covered = True
        for label, region in regions:
            best: Optional[Tuple[Strategy, _Match]] = None
            for d in others:
                for merged in (True, False):
                    m = _match(net, _rows(net, d, merged), _rows(net, s1, merged), region)
                    if m.ok and (best is None or (m.strict and not best[1].strict)):
                        best = (d, m)
                if best is not None and best[1].strict:
                    break
            if best is None:
                covered = False
                break
            evidence.append(f"region [{label or 'all'}]: {best[0].render(net)}")
            strict_any = strict_any or best[1].strict
            if best[0] not in used:
                used.append(best[0])
        if covered and strict_any:
            return DominanceProof(ProofKind.KWAY, s1, tuple(used), tuple(evidence), True)
    else:
        logger.debug("Too many unknown utility comparisons; skipping region split")

    if oracle is not None:
        check = oracle.compare(others, s1, tolerance)
        if check.holds and check.strict_models > 0:
            return DominanceProof(
                ProofKind.KWAY,
                s1,
                tuple(others),
                (
                    f"max EU over dominators ≥ EU in {check.samples} sampled models, "
                    f"strictly in {check.strict_models}",
                ),
                True,
                route="sampled",
            )
    return None


def _check_weights(net: Network, m: MixedStrategy) -> None:
    for _, weight in m.components:
        for atom in weight.atoms():
            names = [atom.variable] + [v for v, _ in atom.given]
            missing = [n for n in names if not net.has(n)]
            if missing:
                raise StrategyError(f"weight {weight.render()} names unknown {missing}")


def _mixed_rows(net: Network, m: MixedStrategy, merged: bool) -> List[Row]:
    if merged:
        return [(p, o) for o, p in blended_distribution(net, m).items()]
    rows = []
    for s, weight in m.components:
        if is_zero(weight):
            continue
        for r in _analysis(net, s).rows:
            rows.append((sympy.expand(weight.to_sympy() * r.probability.to_sympy()), r.outcome))
    return rows


def mixed_dominates(
    net: Network,
    m: MixedStrategy,
    s: Strategy,
    po: PartialOrder,
    oracle: Optional[Oracle] = None,
    tolerance: float = 1e-12,
) -> Optional[DominanceProof]:
    _check_weights(net, m)
    _check_same_network(net, s, *(c for c, _ in m.components))
    for merged in (True, False):
        match = _match(net, _mixed_rows(net, m, merged), _rows(net, s, merged), po)
        if match.ok and match.strict:
            return DominanceProof(ProofKind.MIXED, s, (m,), match.evidence, True)
    if oracle is not None:
        check = oracle.compare([m], s, tolerance)
        if check.holds and check.strict_models > 0:
            return DominanceProof(
                ProofKind.MIXED,
                s,
                (m,),
                (
                    f"EU of mixture ≥ EU in {check.samples} sampled models, "
                    f"strictly in {check.strict_models}",
                ),
                True,
                route="sampled",
            )
    return None


def _replace(s: Strategy, policy: Policy) -> Strategy:
    return Strategy(tuple(policy if p.decision == policy.decision else p for p in s.policies))


def _fix(policy: Policy, variable: str, value: bool) -> Policy:
    if variable not in policy.observed:
        return policy
    table = tuple(
        policy.choose({**a, variable: value}) for a in all_assignments(list(policy.observed))
    )
    return Policy(policy.decision, policy.observed, table)


def _uniform_sign(net: Network, source: str, target: str) -> Optional[Sign]:
    inf = net.influence(source, target)
    if inf is None:
        return None
    signs = {inf.sign_at(cell) for cell in all_assignments(list(inf.condition_variables))}
    return signs.pop() if len(signs) == 1 else None


def _influence_graph(net: Network) -> nx.DiGraph:
    """Probabilistic dependence only: influence and condition edges, no information."""
    g = net.graph()
    g.remove_edges_from(
        [(a, b) for a, b, kind in g.edges(data="kind") if kind == "informational"]
    )
    return g


def _costly_information(
    net: Network, s: Strategy, remaining: Sequence[Strategy]
) -> Optional[DominanceProof]:
    """A decision that only costs utility, taken solely for information nobody uses."""
    value = net.value_node
    graph = _influence_graph(net)
    for t in s.decisions:
        if net.successors(t) != [value]:
            continue
        sign = _uniform_sign(net, t, value)
        if sign not in (Sign.NEGATIVE, Sign.POSITIVE):
            continue
        costly = sign == Sign.NEGATIVE
        policy = s.policy(t)
        if not policy.is_constant or policy.table[0] != costly:
            continue
        targets = {i.target for i in net.condition_users(t)}
        if any(tg == value or nx.has_path(graph, tg, value) for tg in targets):
            continue
        affected = {t} | targets
        for tg in targets:
            affected |= nx.descendants(graph, tg)
        watchers = sorted({d for a in affected for d in net.observers(a)})
        if any(not s.policy(d).is_constant for d in watchers):
            continue
        flipped = _replace(s, Policy(t, policy.observed, (not costly,) * len(policy.table)))
        if flipped not in remaining:
            continue
        return DominanceProof(
            ProofKind.INFO_PRUNE,
            s,
            (flipped,),
            (
                f"{net.literal(t, costly)} lowers utility in every context",
                f"no decision acts on what {t} reveals ({', '.join(watchers) or 'none watch'})",
            ),
            True,
            rule="costly-information",
        )
    return None


def _coherence(
    net: Network, s: Strategy, remaining: Sequence[Strategy]
) -> Optional[DominanceProof]:
    """A policy keyed on an inert chance variable is a disguised coin flip."""
    fixed = fixed_decisions(net, s)
    chance = set(net.chance_nodes)
    for policy in s.policies:
        for v in policy.observed:
            if v not in chance or not policy.varies_on(v) or net.condition_users(v):
                continue
            if any(q not in fixed for q in net.context_parents(v) if q not in net.parents(v)):
                continue
            links = net.influences_into(v) + net.influences_from(v)
            if any(sign_in_context(i, fixed) != Sign.ZERO for i in links):
                continue
            components = [
                Strategy(tuple(_fix(p, v, value) for p in s.policies)) for value in (True, False)
            ]
            if any(c == s or c not in remaining for c in components):
                continue
            given = tuple((q, fixed[q]) for q in net.context_parents(v) if q in fixed)
            weight = Atom(v, True, given)
            mixture = MixedStrategy(
                ((components[0], weight), (components[1], Complement(weight)))
            )
            return DominanceProof(
                ProofKind.INFO_PRUNE,
                s,
                tuple(components),
                (
                    f"{policy.decision} varies on {v}, which is inert given "
                    f"{net.render_assignment(fixed) or 'no fixed decisions'}",
                    f"realization-equivalent to {mixture.render(net)}",
                ),
                False,
                rule="coherence",
            )
    return None


def _signal_monotonicity(
    net: Network, s: Strategy, remaining: Sequence[Strategy]
) -> Optional[DominanceProof]:
    """Acting against a signal that was paid for is beaten by not paying for it.

    Shape required: decision x observes one chance signal r, reported only
    while decision t takes its costly literal, about a single state; x helps
    in at most one state of it. The anti-monotone policy is dominated by the
    monotone one together with skipping t and randomising x with the
    probability the signal points the wrong way in the favourable state.
    """
    value = net.value_node
    for x in s.decisions:
        chance_obs = [o for o in net.observations(x) if net.kind(o) == VariableKind.CHANCE]
        if len(chance_obs) != 1:
            continue
        r = chance_obs[0]
        if net.successors(r) or net.condition_users(r) or net.observers(r) != [x]:
            continue
        into_r = net.influences_into(r)
        if len(into_r) != 1 or len(into_r[0].condition_variables) != 1:
            continue
        link = into_r[0]
        state, t = link.source, link.condition_variables[0]
        if net.kind(state) != VariableKind.CHANCE or net.kind(t) != VariableKind.DECISION:
            continue
        if t not in net.observations(x):
            continue
        on, off = link.sign_at({t: True}), link.sign_at({t: False})
        if on in (Sign.POSITIVE, Sign.NEGATIVE) and off == Sign.ZERO:
            t_obs, sigma = True, on
        elif off in (Sign.POSITIVE, Sign.NEGATIVE) and on == Sign.ZERO:
            t_obs, sigma = False, off
        else:
            continue

        to_value = net.influence(x, value)
        if to_value is None or to_value.condition_variables != (state,):
            continue
        if net.successors(x) != [value] or net.observers(x) or net.condition_users(x):
            continue
        at_true, at_false = to_value.sign_at({state: True}), to_value.sign_at({state: False})
        if at_false == Sign.NEGATIVE and at_true in (Sign.POSITIVE, Sign.UNKNOWN):
            good = True
        elif at_true == Sign.NEGATIVE and at_false in (Sign.POSITIVE, Sign.UNKNOWN):
            good = False
        else:
            continue

        cost = Sign.NEGATIVE if t_obs else Sign.POSITIVE
        if net.successors(t) != [value] or _uniform_sign(net, t, value) != cost:
            continue
        if net.observers(t) != [x] or net.condition_users(t) != [link]:
            continue
        state_parents = net.context_parents(state)
        if r in state_parents or any(
            net.kind(q) == VariableKind.DECISION for q in state_parents
        ):
            continue
        if set(net.successors(state)) - {r, value}:
            continue

        # the signal literal that makes the favourable state more likely
        favourable = good if sigma == Sign.POSITIVE else not good
        t_policy, x_policy = s.policy(t), s.policy(x)
        if not t_policy.is_constant or t_policy.table[0] != t_obs:
            continue
        fixed = fixed_decisions(net, s)
        others = [o for o in x_policy.observed if o != r]
        if any(o not in fixed for o in others):
            continue
        base = {o: fixed[o] for o in others}
        if any(x_policy.choose({**base, r: val}) != (val != favourable) for val in (True, False)):
            continue

        monotone_table = tuple(
            (a[r] == favourable) if all(a[o] == base[o] for o in others) else x_policy.choose(a)
            for a in all_assignments(list(x_policy.observed))
        )
        monotone = _replace(s, Policy(x, x_policy.observed, monotone_table))
        skip = _replace(s, Policy(t, t_policy.observed, (not t_obs,) * len(t_policy.table)))
        act = _replace(skip, Policy(x, x_policy.observed, (True,) * len(x_policy.table)))
        idle = _replace(skip, Policy(x, x_policy.observed, (False,) * len(x_policy.table)))
        if any(c not in remaining for c in (monotone, act, idle)):
            continue
        alpha = Atom(r, not favourable, tuple(sorted({state: good, t: t_obs}.items())))
        mixture = make_mixed([(act, alpha), (idle, Complement(alpha))])
        return DominanceProof(
            ProofKind.INFO_PRUNE,
            s,
            (monotone, mixture),
            (
                f"{x} acts against {r}, whose link from {state} is {sigma} under "
                f"{net.literal(t, t_obs)}",
                f"mixture weight {alpha.render(net)} matches it in state "
                f"{net.literal(state, good)} and acts less in the other",
            ),
            True,
            rule="signal-monotonicity",
        )
    return None


def hypothetical_prune(
    net: Network, strategies: Sequence[Strategy]
) -> Tuple[List[Strategy], List[DominanceProof]]:
    """Apply the costly-information, coherence and signal-monotonicity rules once."""
    remaining = list(strategies)
    proofs: List[DominanceProof] = []
    if net.value_node is None:
        return remaining, proofs
    for s in list(strategies):
        for rule in (_costly_information, _coherence, _signal_monotonicity):
            proof = rule(net, s, remaining)
            if proof is not None:
                remaining.remove(s)
                proofs.append(proof)
                logger.debug(f"Pruned {s.render(net)} by {proof.rule}")
                break
    logger.info(f"Hypothetical pruning removed {len(proofs)} of {len(strategies)} strategies")
    return remaining, proofs


@dataclass
class AdmissibilityResult:
    analysis_net: Network
    steps: List[ReductionStep]
    forced: Tuple[Policy, ...]
    strategies: List[Strategy]
    undominated_by_pure: List[Strategy]
    admissible: List[Strategy]
    proofs: List[DominanceProof]
    notes: Dict[Strategy, List[str]] = field(default_factory=dict)

    def lift(self, s: Strategy) -> Strategy:
        """The strategy on the original network, with decisions reduction fixed."""
        return s.extended(self.forced)


class _Search:
    """Mutable state of one admissibility run."""

    def __init__(self, net: Network, po: PartialOrder, oracle: Oracle, settings: Settings):
        self.net = net
        self.po = po
        self.oracle = oracle
        self.options = settings.admissibility
        self.remaining: List[Strategy] = []
        self.proofs: List[DominanceProof] = []
        self.notes: Dict[Strategy, List[str]] = defaultdict(list)

    def _drop(self, proof: DominanceProof) -> None:
        self.remaining.remove(proof.dominated)
        self.proofs.append(proof)
        logger.debug(f"{proof.kind.value} proof ({proof.route}) against {proof.dominated.render(self.net)}")

    def _plausible(self, dominators: List[Strategy | MixedStrategy], s: Strategy) -> bool:
        """Numeric screen: a candidate beaten in some sampled model cannot dominate."""
        return self.oracle.compare(dominators, s, self.options.tolerance).holds

    def pure_pass(self) -> bool:
        progress = False
        for s in list(self.remaining):
            others = [d for d in self.remaining if d != s]
            self.notes[s] = []
            proof = None
            if self.options.pairwise:
                for d in others:
                    proof, reason = _pairwise_attempt(self.net, d, s, self.po)
                    if proof is not None:
                        break
                    self.notes[s].append(f"pairwise vs {d.render(self.net)}: {reason}")
            if proof is None and self.options.kway:
                for pair in itertools.combinations(others, 2):
                    if not self._plausible(list(pair), s):
                        continue
                    proof = kway_dominated(
                        self.net,
                        s,
                        pair,
                        self.po,
                        self.oracle,
                        self.options.tolerance,
                        self.options.max_region_pairs,
                    )
                    if proof is not None:
                        break
                if proof is None and len(others) >= 2:
                    self.notes[s].append("kway: no pair of strategies covers it")
            if proof is not None:
                self._drop(proof)
                progress = True
        return progress

    def mixed_pass(self) -> bool:
        progress = False
        for s in list(self.remaining):
            others = [d for d in self.remaining if d != s]
            atoms = sorted(
                {a.positive for row in _analysis(self.net, s).rows for a in row.probability.atoms()},
                key=lambda a: a.symbol.name,
            )
            proof = None
            for c1, c2 in itertools.combinations(others, 2):
                for atom in atoms:
                    for weight in (atom, Atom(atom.variable, False, atom.given)):
                        candidate = MixedStrategy(((c1, weight), (c2, Complement(weight))))
                        if not self._plausible([candidate], s):
                            continue
                        proof = mixed_dominates(
                            self.net,
                            make_mixed(candidate.components),
                            s,
                            self.po,
                            self.oracle,
                            self.options.tolerance,
                        )
                        if proof is not None:
                            break
                    if proof is not None:
                        break
                if proof is not None:
                    break
            if proof is not None:
                self._drop(proof)
                progress = True
            elif len(others) >= 2:
                self.notes[s].append("mixed: no two-strategy mixture dominates it")
        return progress

    def cross_check(self) -> None:
        for proof in self.proofs:
            if proof.route != "symbolic":
                continue
            check = self.oracle.compare(list(proof.dominators), proof.dominated, self.options.tolerance)
            if not check.holds:
                assert check.violation is not None
                raise OracleContradiction(
                    proof, check.violation, check.eu_dominator or 0.0, check.eu_dominated or 0.0
                )
            if proof.strict and check.strict_models == 0:
                logger.warning(
                    f"Strict {proof.kind.value} proof against "
                    f"{proof.dominated.render(self.net)} was never strict in "
                    f"{check.samples} sampled models"
                )


def admissible_set(net: Network, settings: Optional[Settings] = None) -> AdmissibilityResult:
    """Enumerate strategies and remove every one a proof rules out.

    Analysis runs on the network reduced without signal orientation. Enabled
    techniques repeat until nothing changes; symbolic proofs are then
    falsification-checked against sampled models of the original network.
    """
    settings = settings or get_settings()
    analysis_net, steps = reduce(net, orient_signals=False)
    forced = tuple(step.policy for step in steps if step.policy is not None)
    strategies = enumerate_strategies(analysis_net) if analysis_net.decisions else [Strategy(())]
    logger.info(f"Enumerated {len(strategies)} strategies")

    po = induced_utility_order(analysis_net, settings.reduction.max_order_variables)
    oracle = Oracle(
        net,
        settings.sampler,
        forced,
        settings.oracle.max_chance_variables,
        settings.reduction.max_order_variables,
    )
    search = _Search(analysis_net, po, oracle, settings)
    search.remaining = list(strategies)
    if settings.admissibility.prune:
        search.remaining, pruned = hypothetical_prune(analysis_net, search.remaining)
        search.proofs.extend(pruned)

    undominated_by_pure: Optional[List[Strategy]] = None
    while True:
        if search.pure_pass():
            continue
        if undominated_by_pure is None:
            undominated_by_pure = list(search.remaining)
        if settings.admissibility.mixed and search.mixed_pass():
            continue
        break

    if settings.admissibility.cross_check:
        search.cross_check()
    logger.info(
        f"{len(search.remaining)} admissible of {len(strategies)} strategies "
        f"({len(search.proofs)} proofs)"
    )
    return AdmissibilityResult(
        analysis_net=analysis_net,
        steps=steps,
        forced=forced,
        strategies=strategies,
        undominated_by_pure=undominated_by_pure,
        admissible=list(search.remaining),
        proofs=search.proofs,
        notes={s: search.notes.get(s, []) for s in search.remaining},
    )

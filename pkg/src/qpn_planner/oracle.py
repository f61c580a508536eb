"""
Numeric ground truth for qualitative claims.

The sampler draws fully numeric models that satisfy every sign constraint of
a network with a strict margin. Models are evaluated exactly by enumerating
the joint distribution, vectorised across all samples at once.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from qpn_planner.errors import InfeasibleModelError, ModelSyntaxError, OracleCapacityError
from qpn_planner.network import Network, Sign, VariableKind, all_assignments
from qpn_planner.ordering import PartialOrder, build_order
from qpn_planner.settings import SamplerSettings
from qpn_planner.strategy import MixedStrategy, Policy, Strategy
from qpn_planner.symbolic import Atom, SymbolicProb

logger = logging.getLogger(__name__)

# upper bound on samples × rows held in memory for one enumeration chunk
_CELLS_PER_CHUNK = 2**22
_EXACT = 1e-12


def _margin(epsilon: float, height: int) -> float:
    """Largest usable margin when a strict chain of `height` steps must fit in (0, 1)."""
    return min(epsilon, 1.0 / (height + 3))


def _index(columns: Sequence[np.ndarray], rows: int) -> np.ndarray:
    """Vectorised `assignment_index`: true literal is bit 0, first variable most significant."""
    idx = np.zeros(rows, dtype=np.int64)
    for col in columns:
        idx = (idx << 1) | (~col).astype(np.int64)
    return idx


def _enumerate(variables: Sequence[str], start: int, stop: int) -> Dict[str, np.ndarray]:
    rows = np.arange(start, stop, dtype=np.int64)
    k = len(variables)
    return {v: ((rows >> (k - 1 - j)) & 1) == 0 for j, v in enumerate(variables)}


@dataclass(eq=False)
class ConcreteModel:
    """One numeric instance: a CPT per chance variable and a utility table.

    `cpts[v][i]` is the probability of v's true literal given the i-th
    assignment (in `assignment_index` order) of `parents[v]`.
    """

    index: int
    parents: Dict[str, Tuple[str, ...]]
    cpts: Dict[str, np.ndarray]
    utility_parents: Tuple[str, ...]
    utility: np.ndarray

    def to_text(self, net: Network) -> str:
        lines = [f"# model {self.index}"]
        for v in sorted(self.cpts):
            parents = list(self.parents[v])
            for pos, assignment in enumerate(all_assignments(parents)):
                given = " ".join(net.literal(p, assignment[p]) for p in parents)
                head = f"cpt {v} | {given}" if parents else f"cpt {v}"
                lines.append(f"{head} = {float(self.cpts[v][pos])!r}")
        for pos, assignment in enumerate(all_assignments(list(self.utility_parents))):
            labels = " ".join(net.literal(p, assignment[p]) for p in self.utility_parents)
            head = f"utility {labels}" if labels else "utility"
            lines.append(f"{head} = {float(self.utility[pos])!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, net: Network) -> "ConcreteModel":
        index = 0
        cpts: Dict[str, Dict[int, float]] = {}
        parents: Dict[str, Tuple[str, ...]] = {}
        utility: Dict[int, float] = {}
        value = net.value_node
        utility_parents = tuple(net.context_parents(value)) if value else ()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line.startswith("# model"):
                index = int(line.split()[-1])
                continue
            if not line or line.startswith("#"):
                continue
            head, _, number = line.rpartition("=")
            tokens = head.split()
            try:
                if tokens[0] == "cpt":
                    var = tokens[1]
                    labels = tokens[3:] if len(tokens) > 2 and tokens[2] == "|" else []
                    names = tuple(net.context_parents(var))
                    parents[var] = names
                    assignment = {p: net.variable(p).parse(lab) for p, lab in zip(names, labels)}
                    pos = _index([np.array([assignment[p]]) for p in names], 1)[0]
                    cpts.setdefault(var, {})[int(pos)] = float(number)
                elif tokens[0] == "utility":
                    assignment = {
                        p: net.variable(p).parse(lab)
                        for p, lab in zip(utility_parents, tokens[1:])
                    }
                    pos = _index([np.array([assignment[p]]) for p in utility_parents], 1)[0]
                    utility[int(pos)] = float(number)
                else:
                    raise ModelSyntaxError(f"unexpected record '{tokens[0]}'", lineno)
            except (KeyError, ValueError, IndexError) as e:
                if isinstance(e, ModelSyntaxError):
                    raise
                raise ModelSyntaxError(str(e), lineno) from e
        return cls(
            index=index,
            parents=parents,
            cpts={v: np.array([rows[i] for i in sorted(rows)]) for v, rows in cpts.items()},
            utility_parents=utility_parents,
            utility=np.array([utility[i] for i in sorted(utility)]),
        )


class Sampler:
    """Draws models whose CPT rows and utilities follow each induced partial order.

    A class's value is the maximum of uniform draws over its downset, which
    makes values monotone along every edge; adding `margin × height` makes
    the monotonicity strict by at least the margin.
    """

    def __init__(self, net: Network, settings: SamplerSettings, max_order_variables: int = 12):
        self.net = net
        self.settings = settings
        self.chance = sorted(net.chance_nodes)
        self.orders: Dict[str, PartialOrder] = {}
        for v in self.chance:
            self.orders[v] = self._order(v, max_order_variables)
        value = net.value_node
        self.utility_parents = tuple(net.context_parents(value)) if value else ()
        self.utility_order = (
            self._order(value, max_order_variables) if value else build_order([], [])
        )

    def _order(self, target: str, max_order_variables: int) -> PartialOrder:
        influences = self.net.influences_into(target)
        order = build_order(self.net.context_parents(target), influences, max_order_variables)
        if order.collapsed:
            raise InfeasibleModelError(target, [inf.render(self.net) for inf in influences])
        return order

    def _fill(self, order: PartialOrder, rng: np.random.Generator) -> np.ndarray:
        draws = rng.random(len(order.classes))
        envelope = np.array([draws[list(down)].max() for down in order.downsets])
        heights = np.array(order.heights, dtype=float)
        top = int(heights.max(initial=0))
        eps = _margin(self.settings.epsilon, top)
        values = eps + (1.0 - 2.0 * eps - top * eps) * envelope + eps * heights
        return values[np.array(order.class_of)]

    def draw(self, index: int) -> ConcreteModel:
        rng = np.random.default_rng([self.settings.seed, index])
        cpts = {v: self._fill(self.orders[v], rng) for v in self.chance}
        return ConcreteModel(
            index=index,
            parents={v: self.orders[v].variables for v in self.chance},
            cpts=cpts,
            utility_parents=self.utility_parents,
            utility=self._fill(self.utility_order, rng),
        )


def sample_model(
    net: Network, cfg: SamplerSettings, index: int, max_order_variables: int = 12
) -> ConcreteModel:
    return Sampler(net, cfg, max_order_variables).draw(index)


class ModelBatch:
    """Exact evaluation of many models of one network at once.

    Conditional queries treat a decision as a uniform root unless `forced`
    gives it a policy, in which case it follows that policy.
    """

    def __init__(
        self, net: Network, models: Sequence[ConcreteModel], forced: Sequence[Policy] = ()
    ):
        if not models:
            raise ValueError("a model batch needs at least one model")
        self.net = net
        self.size = len(models)
        self.forced = {p.decision: p for p in forced if net.has(p.decision)}
        order = net.topological_order()
        self.order = [n for n in order if net.kind(n) != VariableKind.VALUE]
        self.free = [n for n in self.order if n not in self.forced]
        self.chance = [n for n in self.order if net.kind(n) == VariableKind.CHANCE]
        self.parents = models[0].parents
        self.cpts = {v: np.stack([m.cpts[v] for m in models]) for v in self.chance}
        self.utility_parents = models[0].utility_parents
        self.utility = np.stack([m.utility for m in models])

    def _chunk(self, variables: Sequence[str]) -> int:
        return max(1, min(2 ** len(variables), _CELLS_PER_CHUNK // self.size))

    def _weights(self, cols: Mapping[str, np.ndarray], rows: int) -> np.ndarray:
        joint = np.ones((self.size, rows))
        for v in self.chance:
            idx = _index([cols[p] for p in self.parents[v]], rows)
            p = self.cpts[v][:, idx]
            joint *= np.where(cols[v], p, 1.0 - p)
        return joint

    def _utilities(self, cols: Mapping[str, np.ndarray], rows: int) -> np.ndarray:
        return self.utility[:, _index([cols[p] for p in self.utility_parents], rows)]

    def _decide(
        self, cols: Dict[str, np.ndarray], rows: int, policies: Mapping[str, Policy]
    ) -> None:
        for name in self.order:
            if name in policies:
                policy = policies[name]
                idx = _index([cols[o] for o in policy.observed], rows)
                cols[name] = np.asarray(policy.table, dtype=bool)[idx]

    def expected_utility(self, strategy: Strategy) -> np.ndarray:
        missing = set(self.net.decisions) - set(strategy.decisions)
        if missing:
            raise ValueError(f"strategy leaves {sorted(missing)} undecided")
        policies = {name: strategy.policy(name) for name in self.net.decisions}
        total = 2 ** len(self.chance)
        step = self._chunk(self.chance)
        eu = np.zeros(self.size)
        for start in range(0, total, step):
            stop = min(total, start + step)
            rows = stop - start
            cols = _enumerate(self.chance, start, stop)
            self._decide(cols, rows, policies)
            eu += (self._weights(cols, rows) * self._utilities(cols, rows)).sum(axis=1)
        return eu

    def _accumulate(
        self,
        given: Mapping[str, bool],
        numerator: Callable[[Mapping[str, np.ndarray], int], np.ndarray],
    ) -> np.ndarray:
        """Σ joint·numerator / Σ joint over rows matching `given`."""
        variables = self.free
        total = 2 ** len(variables)
        step = self._chunk(variables)
        num = np.zeros(self.size)
        den = np.zeros(self.size)
        for start in range(0, total, step):
            stop = min(total, start + step)
            rows = stop - start
            cols = _enumerate(variables, start, stop)
            self._decide(cols, rows, self.forced)
            mask = np.ones(rows, dtype=bool)
            for var, val in given.items():
                mask &= cols[var] == val
            joint = self._weights(cols, rows) * mask
            num += (joint * numerator(cols, rows)).sum(axis=1)
            den += joint.sum(axis=1)
        return num / den

    def conditional(self, variable: str, value: bool, given: Mapping[str, bool]) -> np.ndarray:
        return self._accumulate(given, lambda cols, rows: cols[variable] == value)

    def expectation(self, given: Mapping[str, bool]) -> np.ndarray:
        """Conditional expected utility given a partial assignment."""
        return self._accumulate(given, self._utilities)


def _blend(
    s: Strategy | MixedStrategy,
    pure: Callable[[Strategy], np.ndarray],
    weight: Callable[[SymbolicProb], np.ndarray],
) -> np.ndarray:
    if isinstance(s, Strategy):
        return pure(s)
    return sum(weight(w) * pure(component) for component, w in s.components)


def expected_utility(model: ConcreteModel, net: Network, s: Strategy | MixedStrategy) -> float:
    batch = ModelBatch(net, [model])

    def weight(w: SymbolicProb) -> np.ndarray:
        return np.asarray(
            w.evaluate(lambda a: batch.conditional(a.variable, a.value, dict(a.given))),
            dtype=float,
        )

    return float(np.asarray(_blend(s, batch.expected_utility, weight)).reshape(-1)[0])


@dataclass(frozen=True)
class NumericComparison:
    holds: bool
    strict_models: int
    samples: int
    violation: Optional[int] = None
    eu_dominator: Optional[float] = None
    eu_dominated: Optional[float] = None


class Oracle:
    """Sampled models of a network plus cached exact evaluations.

    `forced` policies fill in decisions that reduction already fixed, so
    strategies built on a reduced network can be evaluated on the original.
    """

    def __init__(
        self,
        net: Network,
        sampler: SamplerSettings,
        forced: Sequence[Policy] = (),
        max_chance_variables: int = 20,
        max_order_variables: int = 12,
    ):
        if len(net.chance_nodes) > max_chance_variables:
            raise OracleCapacityError(
                f"{len(net.chance_nodes)} chance variables exceed the exact "
                f"enumeration limit of {max_chance_variables}"
            )
        self.net = net
        self.settings = sampler
        self.forced = tuple(forced)
        self.max_order_variables = max_order_variables
        self._eu: Dict[Strategy, np.ndarray] = {}
        self._atoms: Dict[Atom, np.ndarray] = {}

    @cached_property
    def models(self) -> List[ConcreteModel]:
        sampler = Sampler(self.net, self.settings, self.max_order_variables)
        models = [sampler.draw(i) for i in range(self.settings.samples)]
        logger.info(
            f"Sampled {len(models)} models (seed {self.settings.seed}, "
            f"epsilon {self.settings.epsilon})"
        )
        return models

    @cached_property
    def batch(self) -> ModelBatch:
        return ModelBatch(self.net, self.models, self.forced)

    def lift(self, s: Strategy) -> Strategy:
        return s.extended(self.forced)

    def probability(self, atom: Atom) -> np.ndarray:
        if atom not in self._atoms:
            self._atoms[atom] = self.batch.conditional(atom.variable, atom.value, dict(atom.given))
        return self._atoms[atom]

    def weight(self, w: SymbolicProb) -> np.ndarray:
        value = w.evaluate(self.probability)
        return np.broadcast_to(np.asarray(value, dtype=float), (self.batch.size,))

    def _pure(self, s: Strategy) -> np.ndarray:
        if s not in self._eu:
            self._eu[s] = self.batch.expected_utility(self.lift(s))
        return self._eu[s]

    def expected_utility(self, s: Strategy | MixedStrategy) -> np.ndarray:
        return _blend(s, self._pure, self.weight)

    def compare(
        self,
        dominators: Sequence[Strategy | MixedStrategy],
        dominated: Strategy | MixedStrategy,
        tolerance: float = _EXACT,
    ) -> NumericComparison:
        """Check max EU over `dominators` against the dominated strategy in every model."""
        best = np.max(np.stack([self.expected_utility(d) for d in dominators]), axis=0)
        eu = self.expected_utility(dominated)
        below = np.flatnonzero(best < eu - tolerance)
        strict = int(np.count_nonzero(best > eu + tolerance))
        if below.size:
            i = int(below[0])
            return NumericComparison(
                False, strict, len(eu), self.models[i].index, float(best[i]), float(eu[i])
            )
        return NumericComparison(True, strict, len(eu))


def check_dominance_numeric(
    net: Network,
    cfg: SamplerSettings,
    sA: Strategy | MixedStrategy,
    sB: Strategy | MixedStrategy,
    tolerance: float = _EXACT,
) -> NumericComparison:
    return Oracle(net, cfg).compare([sA], sB, tolerance)


@dataclass(frozen=True)
class SignCheck:
    source: str
    target: str
    sign: Sign
    context: Tuple[Tuple[str, bool], ...]
    origin: str
    positive: int
    negative: int
    zero: int

    @property
    def violations(self) -> int:
        if self.sign == Sign.POSITIVE:
            return self.negative
        if self.sign == Sign.NEGATIVE:
            return self.positive
        if self.sign == Sign.ZERO:
            return self.positive + self.negative
        return 0


@dataclass
class SignReport:
    checks: List[SignCheck] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks)

    def render(self, net: Network) -> List[str]:
        lines = []
        for c in self.checks:
            ctx = net.render_assignment(dict(c.context)) or "-"
            lines.append(
                f"{c.source} -> {c.target} {c.sign} given {ctx} [{c.origin}]: "
                f"+{c.positive} -{c.negative} 0:{c.zero} violations={c.violations}"
            )
        return lines


def verify_reduction_signs(
    net: Network,
    reduced: Network,
    log: Sequence,
    cfg: SamplerSettings,
    max_order_variables: int = 12,
    tolerance: float = _EXACT,
) -> SignReport:
    """Check every reduced-network sign against sampled models of the original network.

    For each entry and each assignment of the target's other context
    parents consistent with its condition, the difference between the
    source's two literals is tallied per model. Decisions the log removed
    follow their recorded policies.
    """
    sampler = Sampler(net, cfg, max_order_variables)
    forced = [step.policy for step in log if step.policy is not None]
    batch = ModelBatch(net, [sampler.draw(i) for i in range(cfg.samples)], forced)
    origin: Dict[Tuple[str, str], str] = {}
    for pos, step in enumerate(log, start=1):
        for inf in step.updates:
            origin[(inf.source, inf.target)] = f"step {pos} {step.kind.value} {','.join(step.subject)}"

    report = SignReport()
    for inf in reduced.influences:
        background = [p for p in reduced.context_parents(inf.target) if p != inf.source]
        is_value = reduced.kind(inf.target) == VariableKind.VALUE
        for cond, sign in inf.entries:
            for ctx in all_assignments(background):
                if not cond.holds_in(ctx):
                    continue
                if is_value:
                    diff = batch.expectation({**ctx, inf.source: True}) - batch.expectation(
                        {**ctx, inf.source: False}
                    )
                else:
                    diff = batch.conditional(
                        inf.target, True, {**ctx, inf.source: True}
                    ) - batch.conditional(inf.target, True, {**ctx, inf.source: False})
                report.checks.append(
                    SignCheck(
                        inf.source,
                        inf.target,
                        sign,
                        tuple(sorted(ctx.items())),
                        origin.get((inf.source, inf.target), "original"),
                        int(np.count_nonzero(diff > tolerance)),
                        int(np.count_nonzero(diff < -tolerance)),
                        int(np.count_nonzero(np.abs(diff) <= tolerance)),
                    )
                )
    logger.info(
        f"Checked {len(report.checks)} sign contexts over {cfg.samples} models; "
        f"{report.violations} violation(s)"
    )
    return report


def check_model(
    net: Network, model: ConcreteModel, epsilon: float, max_order_variables: int = 12
) -> List[str]:
    """Independent re-check of a model against the network's sign constraints."""
    problems: List[str] = []

    def check(name: str, table: np.ndarray, order: PartialOrder) -> None:
        eps = _margin(epsilon, max(order.heights, default=0))
        for hi, lo in sorted(order.element_edges):
            if order.class_of[hi] == order.class_of[lo]:
                continue
            if table[hi] - table[lo] < eps - _EXACT:
                problems.append(
                    f"{name}: entry {hi} exceeds entry {lo} by {table[hi] - table[lo]:.3g} < {eps}"
                )
        for a, b in sorted(order.element_merges):
            if abs(table[a] - table[b]) > _EXACT:
                problems.append(f"{name}: entries {a} and {b} should be equal")

    for v in net.chance_nodes:
        table = model.cpts[v]
        if np.any(table <= 0.0) or np.any(table >= 1.0):
            problems.append(f"{v}: probability outside (0, 1)")
        order = build_order(
            net.context_parents(v), net.influences_into(v), max_order_variables
        )
        check(v, table, order)
    value = net.value_node
    if value is not None:
        order = build_order(
            net.context_parents(value), net.influences_into(value), max_order_variables
        )
        check(value, model.utility, order)
    return problems

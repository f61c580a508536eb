"""Random small networks for property checks."""

import logging

import numpy as np

from qpn_planner.network import (
    Condition,
    Network,
    QualitativeInfluence,
    Sign,
    Variable,
    VariableKind,
)

logger = logging.getLogger(__name__)

_SIGNS = (Sign.POSITIVE, Sign.NEGATIVE, Sign.ZERO, Sign.UNKNOWN)


def random_network(seed: int, max_variables: int = 6, max_observations: int = 1) -> Network:
    """A valid random network with one value node, 1-2 decisions and chance nodes.

    Nodes are created in a random topological order and only link forward.
    Conditions on influences into a node use predecessors that are not
    themselves influence sources of that node, so every induced order is
    acyclic and every network is samplable. Each decision observes at most
    `max_observations` earlier variables.
    """
    rng = np.random.default_rng(seed)
    size = int(rng.integers(3, max_variables + 1))
    n_decisions = int(rng.integers(1, min(2, size - 2) + 1))
    kinds = [VariableKind.DECISION] * n_decisions + [VariableKind.CHANCE] * (
        size - 1 - n_decisions
    )
    rng.shuffle(kinds)  # type: ignore[arg-type]
    names = [f"v{i}" for i in range(len(kinds))]
    variables = [Variable(n, k) for n, k in zip(names, kinds)] + [
        Variable("u", VariableKind.VALUE)
    ]

    influences = []
    informational = []
    for pos, target in enumerate(names + ["u"]):
        earlier = names[:pos]
        if target != "u" and kinds[pos] == VariableKind.DECISION:
            watched = [src for src in earlier if rng.random() < 0.4][:max_observations]
            informational.extend((src, target) for src in watched)
            continue
        sources = [src for src in earlier if rng.random() < 0.5]
        if target == "u":
            decisions = [n for n, k in zip(names, kinds) if k == VariableKind.DECISION]
            sources = sorted(set(sources) | {d for d in decisions if rng.random() < 0.7})
            if not sources:
                sources = [earlier[int(rng.integers(len(earlier)))]]
        spare = [n for n in earlier if n not in sources]
        for src in sources:
            influences.append(_random_influence(rng, src, target, spare))

    net = Network(
        variables=tuple(variables),
        influences=tuple(influences),
        informational=tuple(informational),
    ).canonical()
    logger.debug(f"Generated random network {seed} with {len(variables)} variables")
    return net


def _random_influence(
    rng: np.random.Generator, source: str, target: str, spare: list
) -> QualitativeInfluence:
    if spare and rng.random() < 0.25:
        condition_var = spare[int(rng.integers(len(spare)))]
        entries = tuple(
            (Condition.of({condition_var: value}), _SIGNS[int(rng.integers(len(_SIGNS)))])
            for value in (True, False)
        )
        return QualitativeInfluence(source, target, entries)
    return QualitativeInfluence.unconditional(
        source, target, _SIGNS[int(rng.integers(len(_SIGNS)))]
    )

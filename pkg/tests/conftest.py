import pytest

from qpn_planner.model_file import TEST_TREAT, parse
from qpn_planner.network import (
    Condition,
    Network,
    QualitativeInfluence,
    Sign,
    Variable,
    VariableKind,
)
from qpn_planner.reduction import reduce
from qpn_planner.settings import SamplerSettings
from qpn_planner.strategy import enumerate_strategies, single


@pytest.fixture
def test_treat():
    return parse(TEST_TREAT)


@pytest.fixture
def analysis_net(test_treat):
    net, _ = reduce(test_treat, orient_signals=False)
    return net


@pytest.fixture
def strategies(analysis_net):
    return enumerate_strategies(analysis_net)


@pytest.fixture
def pick(analysis_net, strategies):
    """Look up a test/treat strategy by its rendered form."""

    def lookup(text):
        found = single(strategies, analysis_net, text)
        assert found is not None, f"no strategy renders as {text!r}"
        return found

    return lookup


@pytest.fixture
def sampler():
    return SamplerSettings(seed=42, samples=500, epsilon=0.01)


def chain_network(s1: Sign, s2: Sign) -> Network:
    """a -> b -> c -> u with the given signs on the first two links."""
    chance = [Variable(n, VariableKind.CHANCE) for n in ("a", "b", "c")]
    return Network(
        variables=tuple(chance) + (Variable("u", VariableKind.VALUE),),
        influences=(
            QualitativeInfluence.unconditional("a", "b", s1),
            QualitativeInfluence.unconditional("b", "c", s2),
            QualitativeInfluence.unconditional("c", "u", Sign.POSITIVE),
        ),
    ).canonical()


def conditioned(source: str, target: str, *entries) -> QualitativeInfluence:
    """Influence from (assignment dict, sign) pairs."""
    return QualitativeInfluence(
        source, target, tuple((Condition.of(cond), sign) for cond, sign in entries)
    )


def make_network(kinds, *influences, informational=()) -> Network:
    """Network from {name: kind} plus a value node `u`."""
    variables = tuple(Variable(n, k) for n, k in kinds.items())
    return Network(
        variables=variables + (Variable("u", VariableKind.VALUE),),
        influences=tuple(influences),
        informational=tuple(informational),
    ).canonical()

import pytest

from qpn_planner.dominance import (
    ProofKind,
    admissible_set,
    hypothetical_prune,
    kway_dominated,
    mixed_dominates,
    pairwise_dominates,
    unknown_utility_pairs,
)
from qpn_planner.errors import StrategyError
from qpn_planner.network import (
    Network,
    QualitativeInfluence,
    Sign,
    Variable,
    VariableKind,
)
from qpn_planner.oracle import Oracle, check_dominance_numeric
from qpn_planner.ordering import induced_utility_order
from qpn_planner.settings import (
    AdmissibilitySettings,
    SamplerSettings,
    Settings,
)
from qpn_planner.strategy import Policy, Strategy, enumerate_strategies, make_mixed
from qpn_planner.symbolic import Atom, Complement

NO_TEST_NO_TREAT = "t=~T; x=~X"
EMPIRIC = "t=~T; x=X"
TREAT_IF_POSITIVE = "t=T; x[R->X, ~R->~X]"
TREAT_IF_NEGATIVE = "t=T; x[R->~X, ~R->X]"
TEST_NEVER_TREAT = "t=T; x=~X"
TEST_ALWAYS_TREAT = "t=T; x=X"

ADMISSIBLE = {NO_TEST_NO_TREAT, TREAT_IF_POSITIVE, EMPIRIC}


@pytest.fixture
def po(analysis_net):
    return induced_utility_order(analysis_net)


@pytest.fixture
def oracle(test_treat):
    return Oracle(test_treat, SamplerSettings(seed=42, samples=10000))


@pytest.fixture
def inert_signal():
    """Decision x observes c; c leaves utility unchanged and x's effect is unsigned."""
    return Network(
        variables=(
            Variable("c", VariableKind.CHANCE),
            Variable("x", VariableKind.DECISION),
            Variable("u", VariableKind.VALUE),
        ),
        influences=(
            QualitativeInfluence.unconditional("c", "u", Sign.ZERO),
            QualitativeInfluence.unconditional("x", "u", Sign.UNKNOWN),
        ),
        informational=(("c", "x"),),
    ).canonical()


def run_settings(samples=2000, **techniques):
    return Settings(
        sampler=SamplerSettings(seed=42, samples=samples),
        admissibility=AdmissibilitySettings(**techniques),
    )


def rendered(strategies, net):
    return {s.render(net) for s in strategies}


def test_not_testing_dominates_testing_without_treatment(analysis_net, po, pick):
    proof = pairwise_dominates(analysis_net, pick(NO_TEST_NO_TREAT), pick(TEST_NEVER_TREAT), po)
    assert proof is not None
    assert proof.kind == ProofKind.PAIRWISE
    assert proof.strict and proof.route == "symbolic"
    # one matched pair per disease state, each with identical probability on both sides
    assert len(proof.evidence) == 2
    assert {line.split(":")[0] for line in proof.evidence} == {"Pr(d)", "1 - Pr(d)"}


def test_empiric_therapy_dominates_test_and_always_treat(analysis_net, po, pick):
    proof = pairwise_dominates(analysis_net, pick(EMPIRIC), pick(TEST_ALWAYS_TREAT), po)
    assert proof is not None
    assert all("≻" in line for line in proof.evidence)


def test_dominance_is_not_symmetric(analysis_net, po, pick):
    assert pairwise_dominates(analysis_net, pick(TEST_NEVER_TREAT), pick(NO_TEST_NO_TREAT), po) is None


def test_no_strategy_dominates_itself(analysis_net, po, strategies):
    for s in strategies:
        assert pairwise_dominates(analysis_net, s, s, po) is None


def test_treat_if_negative_survives_pairwise(analysis_net, po, pick, strategies):
    target = pick(TREAT_IF_NEGATIVE)
    for other in strategies:
        if other != target:
            assert pairwise_dominates(analysis_net, other, target, po) is None


def test_treat_if_negative_sometimes_beats_treat_if_positive(test_treat, pick):
    check = check_dominance_numeric(
        test_treat,
        SamplerSettings(seed=42, samples=10000),
        pick(TREAT_IF_POSITIVE),
        pick(TREAT_IF_NEGATIVE),
    )
    assert not check.holds
    assert check.eu_dominated > check.eu_dominator


def test_mixture_dominates_treat_if_negative(analysis_net, po, pick, oracle):
    """Skip the test and treat with the chance a sick patient would have tested negative."""
    alpha = Atom("r", False, (("d", True), ("t", True)))
    mixture = make_mixed([(pick(EMPIRIC), alpha), (pick(NO_TEST_NO_TREAT), Complement(alpha))])
    target = pick(TREAT_IF_NEGATIVE)

    check = oracle.compare([mixture], target, 1e-12)
    assert check.holds and check.samples == 10000
    assert check.strict_models == 10000

    proof = mixed_dominates(analysis_net, mixture, target, po, oracle)
    assert proof is not None
    assert proof.kind == ProofKind.MIXED


def test_mixture_without_oracle_proves_nothing(analysis_net, po, pick):
    alpha = Atom("r", False, (("d", True), ("t", True)))
    mixture = make_mixed([(pick(EMPIRIC), alpha), (pick(NO_TEST_NO_TREAT), Complement(alpha))])
    assert mixed_dominates(analysis_net, mixture, pick(TREAT_IF_NEGATIVE), po) is None


def test_mixture_with_unknown_weight_variable(analysis_net, po, pick):
    alpha = Atom("ghost", True)
    mixture = make_mixed([(pick(EMPIRIC), alpha), (pick(NO_TEST_NO_TREAT), Complement(alpha))])
    with pytest.raises(StrategyError):
        mixed_dominates(analysis_net, mixture, pick(TREAT_IF_NEGATIVE), po)


def test_foreign_strategy_rejected(analysis_net, po, pick):
    foreign = Strategy((Policy.constant("q", True),))
    with pytest.raises(StrategyError):
        pairwise_dominates(analysis_net, foreign, pick(EMPIRIC), po)


def test_kway_symbolic_regions(inert_signal):
    """Following c is beaten by always or never acting, whichever way x matters."""
    po = induced_utility_order(inert_signal)
    act, idle, follow = (
        Strategy((Policy.constant("x", True),)),
        Strategy((Policy.constant("x", False),)),
        Strategy((Policy("x", ("c",), (True, False)),)),
    )
    assert len(unknown_utility_pairs(inert_signal, po)) == 2
    assert pairwise_dominates(inert_signal, act, follow, po) is None
    assert pairwise_dominates(inert_signal, idle, follow, po) is None

    proof = kway_dominated(inert_signal, follow, [act, idle], po)
    assert proof is not None
    assert proof.kind == ProofKind.KWAY
    assert proof.route == "symbolic"
    assert len(proof.evidence) == 4
    assert set(proof.dominators) == {act, idle}


def test_kway_needs_two_other_strategies(inert_signal):
    po = induced_utility_order(inert_signal)
    follow = Strategy((Policy("x", ("c",), (True, False)),))
    act = Strategy((Policy.constant("x", True),))
    assert kway_dominated(inert_signal, follow, [act, follow], po) is None


def test_kway_sampled_route(inert_signal):
    """With no region split allowed, the oracle supplies the evidence."""
    po = induced_utility_order(inert_signal)
    act, idle, follow = (
        Strategy((Policy.constant("x", True),)),
        Strategy((Policy.constant("x", False),)),
        Strategy((Policy("x", ("c",), (True, False)),)),
    )
    oracle = Oracle(inert_signal, SamplerSettings(seed=7, samples=300))
    proof = kway_dominated(inert_signal, follow, [act, idle], po, oracle, max_region_pairs=0)
    assert proof is not None
    assert proof.route == "sampled"
    assert kway_dominated(inert_signal, follow, [act, idle], po, max_region_pairs=0) is None


def test_hypothetical_pruning_rules(analysis_net, strategies):
    remaining, proofs = hypothetical_prune(analysis_net, strategies)
    assert rendered(remaining, analysis_net) == ADMISSIBLE
    rules = {p.dominated.render(analysis_net): p.rule for p in proofs}
    assert rules == {
        TEST_ALWAYS_TREAT: "costly-information",
        TEST_NEVER_TREAT: "costly-information",
        TREAT_IF_NEGATIVE: "signal-monotonicity",
        "t=~T; x[R->X, ~R->~X]": "coherence",
        "t=~T; x[R->~X, ~R->X]": "coherence",
    }
    assert all(p.kind == ProofKind.INFO_PRUNE for p in proofs)


def test_coherence_proof_is_weak(analysis_net, strategies):
    _, proofs = hypothetical_prune(analysis_net, strategies)
    coherence = [p for p in proofs if p.rule == "coherence"]
    assert coherence and not any(p.strict for p in coherence)
    assert rendered(coherence[0].dominators, analysis_net) == {EMPIRIC, NO_TEST_NO_TREAT}


def test_signal_monotonicity_dominators(analysis_net, strategies):
    _, proofs = hypothetical_prune(analysis_net, strategies)
    (proof,) = [p for p in proofs if p.rule == "signal-monotonicity"]
    monotone, mixture = proof.dominators
    assert monotone.render(analysis_net) == TREAT_IF_POSITIVE
    weight = mixture.components[0][1]
    assert weight == Atom("r", False, (("d", True), ("t", True)))


def test_pruning_needs_dominators_present(analysis_net, pick):
    """Without never-treat strategies, testing and never treating cannot be pruned."""
    subset = [pick(TEST_NEVER_TREAT), pick(TREAT_IF_POSITIVE)]
    remaining, proofs = hypothetical_prune(analysis_net, subset)
    assert remaining == subset
    assert proofs == []


def test_final_admissible_set(test_treat):
    result = admissible_set(test_treat, run_settings())
    assert len(result.strategies) == 8
    assert rendered(result.admissible, result.analysis_net) == ADMISSIBLE
    assert rendered(result.undominated_by_pure, result.analysis_net) == ADMISSIBLE
    assert result.forced == ()
    assert len(result.proofs) == 5
    assert set(result.notes) == set(result.admissible)


def test_pairwise_only(test_treat):
    result = admissible_set(
        test_treat, run_settings(pairwise=True, kway=False, mixed=False, prune=False)
    )
    survivors = rendered(result.admissible, result.analysis_net)
    assert len(survivors) == 6
    assert TEST_ALWAYS_TREAT not in survivors
    assert TEST_NEVER_TREAT not in survivors
    assert {p.kind for p in result.proofs} == {ProofKind.PAIRWISE}


def test_more_techniques_never_grow_the_set(test_treat):
    pairwise = admissible_set(
        test_treat, run_settings(pairwise=True, kway=False, mixed=False, prune=False)
    )
    kway = admissible_set(
        test_treat, run_settings(pairwise=True, kway=True, mixed=False, prune=False)
    )
    full = admissible_set(test_treat, run_settings())
    assert set(full.admissible) <= set(kway.admissible) <= set(pairwise.admissible)


def test_failed_proofs_are_explained(test_treat):
    result = admissible_set(
        test_treat, run_settings(pairwise=True, kway=False, mixed=False, prune=False)
    )
    notes = {s.render(result.analysis_net): n for s, n in result.notes.items()}
    assert any("case probabilities differ" in line for line in notes[TREAT_IF_NEGATIVE])


def test_fully_reduced_network_has_one_strategy():
    net = Network(
        variables=(Variable("d", VariableKind.DECISION), Variable("u", VariableKind.VALUE)),
        influences=(QualitativeInfluence.unconditional("d", "u", Sign.POSITIVE),),
    ).canonical()
    result = admissible_set(net, run_settings(samples=50))
    assert result.admissible == [Strategy(())]
    lifted = result.lift(result.admissible[0])
    assert lifted.policy("d").table == (True,)


def test_unrestricted_enumeration_is_larger(analysis_net):
    assert len(enumerate_strategies(analysis_net, restrict_fixed_observations=False)) == 32

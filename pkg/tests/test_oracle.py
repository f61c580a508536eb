import numpy as np
import pytest

from qpn_planner.dominance import DominanceProof, ProofKind
from qpn_planner.errors import (
    InfeasibleModelError,
    ModelSyntaxError,
    OracleCapacityError,
    OracleContradiction,
)
from qpn_planner.network import (
    Network,
    QualitativeInfluence,
    Sign,
    Variable,
    VariableKind,
)
from qpn_planner.oracle import (
    ConcreteModel,
    ModelBatch,
    Oracle,
    Sampler,
    check_model,
    expected_utility,
    sample_model,
    verify_reduction_signs,
)
from qpn_planner.reduction import reduce, remove_chance_node
from qpn_planner.settings import SamplerSettings
from qpn_planner.strategy import Policy, Strategy
from qpn_planner.symbolic import Atom
from tests.conftest import chain_network, conditioned, make_network

P, N, Z = Sign.POSITIVE, Sign.NEGATIVE, Sign.ZERO
CHANCE = VariableKind.CHANCE


@pytest.fixture
def single_decision():
    return Network(
        variables=(Variable("d", VariableKind.DECISION), Variable("u", VariableKind.VALUE)),
        influences=(QualitativeInfluence.unconditional("d", "u", P),),
    ).canonical()


def test_sampled_models_satisfy_signs(test_treat, sampler):
    oracle = Oracle(test_treat, sampler)
    for model in oracle.models[:50]:
        assert check_model(test_treat, model, sampler.epsilon) == []


def test_model_probabilities_in_open_interval(test_treat, sampler):
    model = sample_model(test_treat, sampler, 0)
    for table in model.cpts.values():
        assert np.all((table > 0) & (table < 1))


def test_sampling_is_deterministic(test_treat, sampler):
    first = sample_model(test_treat, sampler, 5)
    again = sample_model(test_treat, sampler, 5)
    other = sample_model(test_treat, sampler, 6)
    assert np.array_equal(first.utility, again.utility)
    assert all(np.array_equal(first.cpts[v], again.cpts[v]) for v in first.cpts)
    assert not np.array_equal(first.utility, other.utility)


def test_model_text_round_trip(test_treat, sampler):
    model = sample_model(test_treat, sampler, 3)
    text = model.to_text(test_treat)
    assert text.startswith("# model 3")
    assert "cpt r | D T = " in text
    restored = ConcreteModel.from_text(text, test_treat)
    assert restored.index == 3
    assert np.array_equal(restored.utility, model.utility)
    for v in model.cpts:
        assert np.array_equal(restored.cpts[v], model.cpts[v])


def test_model_text_rejects_unknown_record(test_treat):
    with pytest.raises(ModelSyntaxError) as err:
        ConcreteModel.from_text("# model 0\nweight d = 0.5\n", test_treat)
    assert err.value.line == 2


def test_contradictory_order_has_no_model():
    net = Network(
        variables=(
            Variable("p", VariableKind.CHANCE),
            Variable("q", VariableKind.CHANCE),
            Variable("v", VariableKind.VALUE),
        ),
        influences=(
            conditioned("p", "v", ({"q": True}, P), ({"q": False}, N)),
            QualitativeInfluence.unconditional("q", "v", Z),
        ),
    ).canonical()
    with pytest.raises(InfeasibleModelError) as err:
        Sampler(net, SamplerSettings())
    assert err.value.variable == "v"


def test_capacity_limit(test_treat, sampler):
    with pytest.raises(OracleCapacityError):
        Oracle(test_treat, sampler, max_chance_variables=2)


def test_positive_decision_prefers_true(single_decision, sampler):
    oracle = Oracle(single_decision, sampler)
    act = Strategy((Policy.constant("d", True),))
    idle = Strategy((Policy.constant("d", False),))
    assert np.all(oracle.expected_utility(act) > oracle.expected_utility(idle))
    check = oracle.compare([act], idle)
    assert check.holds and check.strict_models == sampler.samples


def test_single_model_expected_utility_matches_batch(test_treat, sampler, pick):
    oracle = Oracle(test_treat, sampler)
    s = pick("t=T; x[R->X, ~R->~X]")
    single = expected_utility(oracle.models[4], test_treat, s)
    assert single == pytest.approx(oracle.expected_utility(s)[4])


def test_compare_reports_first_violation(test_treat, sampler, pick):
    oracle = Oracle(test_treat, sampler)
    check = oracle.compare([pick("t=T; x=X")], pick("t=~T; x=X"))
    assert not check.holds
    assert check.violation is not None
    assert check.eu_dominator < check.eu_dominated


def test_conditionals_sum_to_one(test_treat, sampler):
    oracle = Oracle(test_treat, sampler)
    given = (("d", True), ("t", True))
    total = oracle.probability(Atom("r", True, given)) + oracle.probability(Atom("r", False, given))
    assert np.allclose(total, 1.0)


def test_untested_signal_ignores_disease(test_treat, sampler):
    oracle = Oracle(test_treat, sampler)
    sick = oracle.probability(Atom("r", True, (("d", True), ("t", False))))
    well = oracle.probability(Atom("r", True, (("d", False), ("t", False))))
    assert np.allclose(sick, well)


def test_test_treat_reduction_signs_hold(test_treat, sampler):
    reduced, steps = reduce(test_treat)
    report = verify_reduction_signs(test_treat, reduced, steps, sampler)
    assert report.checks
    assert report.violations == 0
    origins = {c.origin for c in report.checks}
    assert any(o.startswith("step 4 reverse-arc") for o in origins)


@pytest.mark.parametrize("s1", [P, N, Z])
@pytest.mark.parametrize("s2", [P, N, Z])
def test_chain_splice_is_sound(s1, s2):
    net = chain_network(s1, s2)
    reduced, step = remove_chance_node(net, "b")
    report = verify_reduction_signs(net, reduced, [step], SamplerSettings(seed=1, samples=1000))
    assert report.violations == 0


def test_splice_under_condition_parent_is_sound():
    net = make_network(
        {"a": CHANCE, "b": CHANCE, "c": CHANCE},
        QualitativeInfluence.unconditional("a", "b", P),
        QualitativeInfluence.unconditional("b", "u", P),
        conditioned("c", "u", ({"a": True}, P), ({"a": False}, P)),
    )
    reduced, step = remove_chance_node(net, "b")
    report = verify_reduction_signs(net, reduced, [step], SamplerSettings(seed=3, samples=1000))
    assert report.violations == 0
    assert any(c.source == "c" and c.sign == P for c in report.checks)


def test_splice_keeping_link_conditions_is_sound():
    net = make_network(
        {"a": CHANCE, "b": CHANCE, "c": CHANCE},
        QualitativeInfluence.unconditional("a", "b", P),
        conditioned("b", "u", ({"c": True}, P), ({"c": False}, N)),
    )
    reduced, step = remove_chance_node(net, "b")
    report = verify_reduction_signs(net, reduced, [step], SamplerSettings(seed=4, samples=1000))
    assert report.violations == 0
    signs = {(c.source, c.context, c.sign) for c in report.checks}
    assert ("a", (("c", True),), P) in signs
    assert ("a", (("c", False),), N) in signs


def test_decision_removal_signs_hold(sampler):
    net = make_network(
        {"a": CHANCE, "c": CHANCE, "d": VariableKind.DECISION},
        QualitativeInfluence.unconditional("a", "u", P),
        conditioned("d", "u", ({"c": True}, P), ({"c": False}, N)),
        informational=[("c", "d")],
    )
    reduced, steps = reduce(net)
    assert steps[0].policy.table == (True, False)
    report = verify_reduction_signs(net, reduced, steps, sampler)
    assert report.violations == 0
    assert any(c.source == "a" and c.sign == P for c in report.checks)


def test_forced_decision_follows_its_policy(single_decision, sampler):
    models = [sample_model(single_decision, sampler, i) for i in range(20)]
    forced = ModelBatch(single_decision, models, [Policy.constant("d", True)])
    assert np.allclose(forced.expectation({}), forced.utility[:, 0])
    free = ModelBatch(single_decision, models)
    assert np.allclose(free.expectation({}), free.utility.mean(axis=1))


def test_contradiction_message(analysis_net, pick):
    proof = DominanceProof(
        ProofKind.PAIRWISE, pick("t=T; x=~X"), (pick("t=~T; x=~X"),), ("Pr(d): a ≻ b",), True
    )
    err = OracleContradiction(proof, 7, 0.25, 0.5)
    assert str(err).startswith("sampled model 7 contradicts pairwise proof")
    assert "EU(dominator)=0.25 < EU(dominated)=0.5" in str(err)

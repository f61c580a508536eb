import itertools

import pytest

from qpn_planner.errors import ReductionError
from qpn_planner.network import Condition, QualitativeInfluence, Sign
from qpn_planner.signs import (
    add,
    add_all,
    chain,
    merge_cells,
    multiply,
    normalize,
    parallel,
    sign_in_context,
)
from tests.conftest import conditioned

P, N, Z, U = Sign.POSITIVE, Sign.NEGATIVE, Sign.ZERO, Sign.UNKNOWN

MULTIPLY = {
    P: {P: P, N: N, Z: Z, U: U},
    N: {P: N, N: P, Z: Z, U: U},
    Z: {P: Z, N: Z, Z: Z, U: Z},
    U: {P: U, N: U, Z: Z, U: U},
}

ADD = {
    P: {P: P, N: U, Z: P, U: U},
    N: {P: U, N: N, Z: N, U: U},
    Z: {P: P, N: N, Z: Z, U: U},
    U: {P: U, N: U, Z: U, U: U},
}


@pytest.mark.parametrize("s1,s2", list(itertools.product(Sign, repeat=2)))
def test_multiply_table(s1, s2):
    """Chaining is sign multiplication, with zero absorbing even Unknown."""
    assert multiply(s1, s2) == MULTIPLY[s1][s2]


@pytest.mark.parametrize("s1,s2", list(itertools.product(Sign, repeat=2)))
def test_add_table(s1, s2):
    """Parallel combination: opposite signs and Unknown give Unknown."""
    assert add(s1, s2) == ADD[s1][s2]


def test_operators_commute():
    for s1, s2 in itertools.product(Sign, repeat=2):
        assert multiply(s1, s2) == multiply(s2, s1)
        assert add(s1, s2) == add(s2, s1)


def test_add_all_of_nothing_is_zero():
    assert add_all([]) == Z
    assert add_all([P, Z, P]) == P
    assert add_all([P, N]) == U


def test_chain_multiplies_entries():
    i1 = QualitativeInfluence.unconditional("a", "b", N)
    i2 = QualitativeInfluence.unconditional("b", "c", N)
    combined = chain(i1, i2)
    assert (combined.source, combined.target) == ("a", "c")
    assert combined.sign_at({}) == P


def test_chain_conjoins_conditions():
    """Entries with contradictory conditions produce no combined entry."""
    i1 = conditioned("a", "b", ({"q": True}, P), ({"q": False}, N))
    i2 = conditioned("b", "c", ({"q": True}, N), ({"q": False}, P))
    combined = chain(i1, i2)
    assert len(combined.entries) == 2
    assert combined.sign_at({"q": True}) == N
    assert combined.sign_at({"q": False}) == N


def test_chain_rejects_unconnected_links():
    i1 = QualitativeInfluence.unconditional("a", "b", P)
    i2 = QualitativeInfluence.unconditional("c", "d", P)
    with pytest.raises(ReductionError):
        chain(i1, i2)


def test_parallel_refines_conditions():
    """Test/treat: treatment helps (or not) via c and always harms via y."""
    via_c = conditioned("x", "u", ({"d": True}, P), ({"d": False}, Z))
    via_y = QualitativeInfluence.unconditional("x", "u", N)
    combined = parallel(via_c, via_y)
    assert combined.sign_at({"d": True}) == U
    assert combined.sign_at({"d": False}) == N


def test_parallel_merges_equal_cells():
    i1 = conditioned("a", "b", ({"q": True}, P), ({"q": False}, P))
    i2 = QualitativeInfluence.unconditional("a", "b", Z)
    combined = parallel(i1, i2)
    assert combined.entries == ((Condition(), P),)


def test_parallel_rejects_different_links():
    with pytest.raises(ReductionError):
        parallel(
            QualitativeInfluence.unconditional("a", "b", P),
            QualitativeInfluence.unconditional("a", "c", P),
        )


def test_sign_in_context_folds_free_cells():
    inf = conditioned("x", "u", ({"d": True}, U), ({"d": False}, N))
    assert sign_in_context(inf, {"d": False}) == N
    assert sign_in_context(inf, {}) == U


def test_sign_in_context_treats_uncovered_cells_as_unknown():
    inf = conditioned("x", "u", ({"d": True}, P))
    assert sign_in_context(inf, {"d": True}) == P
    assert sign_in_context(inf, {"d": False}) == U
    assert sign_in_context(inf, {}) == U


def test_normalize_combines_overlapping_entries():
    inf = conditioned("a", "b", ({}, P), ({"q": True}, N))
    fixed = normalize(inf)
    assert fixed.sign_at({"q": True}) == U
    assert fixed.sign_at({"q": False}) == P


def test_merge_cells_collapses_to_true():
    cells = [
        (Condition.of({"p": True, "q": True}), Z),
        (Condition.of({"p": True, "q": False}), Z),
        (Condition.of({"p": False, "q": True}), Z),
        (Condition.of({"p": False, "q": False}), Z),
    ]
    assert merge_cells(cells) == ((Condition(), Z),)

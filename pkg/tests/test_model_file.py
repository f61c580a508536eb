import pytest

from qpn_planner.errors import ModelSyntaxError
from qpn_planner.generate import random_network
from qpn_planner.model_file import TEST_TREAT, parse, serialize, to_dot
from qpn_planner.network import Sign, VariableKind, validate


def test_parse_test_treat(test_treat):
    assert test_treat.chance_nodes == ["c", "d", "r", "y", "z"]
    assert test_treat.decisions == ["t", "x"]
    assert test_treat.value_node == "u"
    dr = test_treat.influence("d", "r")
    assert dr.sign_at({"t": True}) == Sign.POSITIVE
    assert dr.sign_at({"t": False}) == Sign.ZERO


def test_round_trip_builtin(test_treat):
    assert parse(serialize(test_treat)) == test_treat


@pytest.mark.parametrize("seed", range(100))
def test_round_trip_random(seed):
    net = random_network(seed)
    assert validate(net) == []
    assert parse(serialize(net)) == net


def test_custom_literals_survive():
    text = """
    var s : chance literals sick well
    var act : decision literals treat wait
    var u : value
    influence s -> u : -
    influence act -> u : + | s=sick
    influence act -> u : - | s=well
    """
    net = parse(text)
    assert net.literal("s", False) == "well"
    assert net.influence("act", "u").sign_at({"s": True}) == Sign.POSITIVE
    assert "literals sick well" in serialize(net)
    assert parse(serialize(net)) == net


def test_comments_and_blank_lines_ignored():
    net = parse("# header\n\nvar u : value  # the value node\n")
    assert net.kind("u") == VariableKind.VALUE


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("var u : value\nvar a : weird\n", 2, "unknown variable kind"),
        ("var u : value\ninfluence a => u : +\n", 2, "malformed influence"),
        ("var u : value\nvar a : chance\ninfluence a -> u : *\n", 3, "unknown sign"),
        ("var u : value\nvar a : chance\ninfluence a -> u : + | q=Q\n", 3, "undeclared"),
        ("var a : chance\nvar a : chance\n", 2, "declared twice"),
        ("var a : chance\nfrobnicate a\n", 2, "unrecognised"),
        ("var a : chance\nvar u : value\ninfluence a -> u : + | a=B\n", 3, "not a literal"),
    ],
)
def test_syntax_errors_name_the_line(text, line, fragment):
    with pytest.raises(ModelSyntaxError) as err:
        parse(text)
    assert err.value.line == line
    assert fragment in str(err.value)


def test_dot_shapes(test_treat):
    dot = to_dot(test_treat)
    assert "x [shape=box" in dot
    assert "u [shape=hexagon" in dot
    assert "d [shape=ellipse" in dot
    assert "r -> x [style=dashed]" in dot
    assert "d -> t [dir=none, style=dotted]" in dot
    assert 'd -> r [label="+|T, 0|~T"]' in dot


def test_builtin_text_is_stable():
    assert TEST_TREAT.count("influence") == 10

import pytest

from qpn_planner.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, run
from qpn_planner.model_file import TEST_TREAT
from qpn_planner.settings import SamplerSettings, Settings


@pytest.fixture
def settings():
    return Settings(sampler=SamplerSettings(seed=42, samples=200))


@pytest.fixture
def model(tmp_path):
    path = tmp_path / "test_treat.qpn"
    path.write_text(TEST_TREAT, encoding="utf-8")
    return str(path)


def test_example_prints_builtin(capsys, settings):
    assert run(["example", "test-treat"], settings) == EXIT_OK
    assert capsys.readouterr().out == TEST_TREAT


def test_random_example_depends_on_seed(capsys, settings):
    run(["example", "random", "--seed", "3"], settings)
    first = capsys.readouterr().out
    run(["example", "random", "--seed", "3"], settings)
    assert capsys.readouterr().out == first
    assert "var" in first


def test_validate_ok(capsys, settings, model):
    assert run(["validate", model], settings) == EXIT_OK
    assert "valid" in capsys.readouterr().out


def test_validate_reports_missing_value_node(capsys, settings, tmp_path):
    empty = tmp_path / "empty.qpn"
    empty.write_text("", encoding="utf-8")
    assert run(["validate", str(empty)], settings) == EXIT_INVALID
    assert "no value node" in capsys.readouterr().out


def test_syntax_error_is_invalid(capsys, settings, tmp_path):
    bad = tmp_path / "bad.qpn"
    bad.write_text("var u : value\nvar a : weird\n", encoding="utf-8")
    assert run(["reduce", str(bad)], settings) == EXIT_INVALID
    assert "line 2" in capsys.readouterr().err


def test_missing_file_is_usage_error(capsys, settings, tmp_path):
    assert run(["reduce", str(tmp_path / "absent.qpn")], settings) == EXIT_USAGE
    assert "cannot read" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["admissible"],
        ["admissible", "m.qpn", "--kway", "--mixed"],
        ["example", "nonexistent"],
    ],
)
def test_bad_arguments(capsys, settings, argv):
    assert run(argv, settings) == EXIT_USAGE


def test_reduce_writes_dot(capsys, settings, model, tmp_path):
    out = tmp_path / "reduced.dot"
    assert run(["reduce", model, "--dot", str(out)], settings) == EXIT_OK
    report = capsys.readouterr().out
    assert "REDUCTION STEPS" in report
    assert "[orient]" in report
    assert out.read_text(encoding="utf-8").startswith("digraph")


def test_reduce_without_orientation(capsys, settings, model):
    run(["reduce", model, "--no-orient"], settings)
    assert "[orient]" not in capsys.readouterr().out


def test_order_unknown_node(capsys, settings, model):
    assert run(["order", model, "--node", "q"], settings) == EXIT_USAGE


def test_order_of_signal(capsys, settings, model):
    assert run(["order", model, "--node", "r"], settings) == EXIT_OK
    assert "PROBABILITY ORDER (r)" in capsys.readouterr().out


def test_strategies(capsys, settings, model):
    assert run(["strategies", model, "--cases"], settings) == EXIT_OK
    out = capsys.readouterr().out
    assert "STRATEGIES (8)" in out
    assert "t=T; x[R->X, ~R->~X]" in out
    assert "CASE ANALYSES" in out


def test_admissible(capsys, settings, model):
    assert run(["admissible", model, "--samples", "500"], settings) == EXIT_OK
    out = capsys.readouterr().out
    assert "ADMISSIBLE (3)" in out
    assert "signal-monotonicity" in out


def test_admissible_pairwise_only(capsys, settings, model):
    assert run(["admissible", model, "--pairwise-only"], settings) == EXIT_OK
    assert "ADMISSIBLE (6)" in capsys.readouterr().out


def test_admissible_plot(capsys, settings, model, tmp_path):
    plot = tmp_path / "plots" / "gaps.png"
    assert run(["admissible", model, "--plot", str(plot)], settings) == EXIT_OK
    assert plot.exists()


def test_reports_are_reproducible(capsys, settings, model):
    run(["admissible", model], settings)
    first = capsys.readouterr().out
    run(["admissible", model], settings)
    assert capsys.readouterr().out == first


def test_verify(capsys, settings, model):
    code = run(["verify", model], settings)
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "violations: 0" in out

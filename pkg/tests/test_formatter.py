import pytest

from asym_unify import asym_unify
from checker import check_unifier
from compressed_decider import decide
from formatter import format_check_result, format_outcome, format_stats, format_substitution, format_system, format_trace
from generators import generate_sigma, generate_sigma_prime
from problem_parser import parse_problem_text, parse_substitution_text
from ta_baseline import ta_unify
from terms import Substitution, plus, var


def test_stats_lines():
    text = format_stats(decide(generate_sigma(1)).stats)
    lines = text.splitlines()
    assert lines[0] == "algorithm=slp"
    assert "max_label_length=0b111" in lines
    assert any(line.startswith("rule.") for line in lines)
    assert lines[-1].startswith("wall_time=")


def test_failure_rule_is_reported(system):
    text = format_stats(asym_unify(system("U =d V * W\nU =d X + Y")).stats)
    assert "failure_rule=e" in text.splitlines()


@pytest.mark.parametrize("make", [generate_sigma, generate_sigma_prime])
def test_system_reads_back(make):
    s = make(2)
    again = parse_problem_text(format_system(s))
    assert again.asymmetric == s.asymmetric
    assert [str(eq) for eq in again.equations] == [str(eq) for eq in s.equations]


def test_solved_system_lists_its_programs():
    text = format_system(decide(generate_sigma(1)).solved)
    assert "[slp:N" in text
    assert "\nSLP:\n" in text


def test_compressed_substitution_reads_back():
    sigma = decide(generate_sigma(2)).unifier(compressed=True)
    text = format_substitution(sigma)
    assert "SLP:" in text
    back = parse_substitution_text(text)
    assert back.materialize().bindings == sigma.materialize().bindings


def test_plain_substitution_sorted():
    text = format_substitution(Substitution({"Y": plus(var("a"), var("b")), "X": var("Y")}))
    assert text == "X -> Y\nY -> (a + b)"


def test_outcome_and_trace(occurs_check, system):
    assert format_outcome(ta_unify(occurs_check)).startswith("not-unifiable (dependency-cycle)\nwitness: ")
    outcome = ta_unify(system("X = A * Y\nX = B * Z"), trace=True)
    assert format_trace(outcome.stats).splitlines()[0].startswith(outcome.stats.trace[0].rule + ": ")


def test_check_result_marks():
    problem = parse_problem_text("X = Y + Z")
    good = format_check_result(check_unifier(problem, Substitution({"X": plus(var("Y"), var("Z"))})))
    assert good.splitlines()[-1] == "✅ substitution verified"
    bad = format_check_result(check_unifier(problem, Substitution()))
    assert bad.startswith("❌ X = Y + Z")
    assert bad.splitlines()[-1] == "❌ 1 violation(s)"

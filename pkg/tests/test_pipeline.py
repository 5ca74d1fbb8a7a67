import pytest

from errors import NotInFragmentError
from generators import generate_sigma, generate_sigma_prime
from pipeline import ALGORITHMS, applicable_algorithms, as_asymmetric, run_pipeline, solve_problem
from results import Verdict


def test_applicable_algorithms(system):
    assert applicable_algorithms(generate_sigma(1)) == ["ta", "hom", "slp"]
    assert applicable_algorithms(generate_sigma_prime(1)) == list(ALGORITHMS)
    assert applicable_algorithms(system("X = Y + Z")) == ["ta", "slp"]


def test_hom_falls_back_to_slp(system):
    outcome = solve_problem(system("X = Y + Z"), "hom")
    assert outcome.unifiable
    assert outcome.stats.algorithm == "slp"


def test_require_hom(system):
    with pytest.raises(NotInFragmentError):
        solve_problem(system("X = Y + Z"), "hom", require_hom=True)


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        solve_problem(generate_sigma(0), "rewrite")


def test_symmetric_deciders_take_the_erasure():
    outcome = solve_problem(generate_sigma_prime(1), "ta")
    assert outcome.unifiable
    assert outcome.stats.algorithm == "ta"


def test_as_asymmetric(system):
    s = as_asymmetric(system("X = Y + Z\nX = W"))
    assert s.asymmetric
    assert [str(eq) for eq in s.equations] == ["Y + Z =d X", "X =d W"]
    assert as_asymmetric(s) is s
    assert solve_problem(generate_sigma(1), "asym").unifiable


def test_pipeline_on_sigma():
    result = run_pipeline(generate_sigma(1))
    assert set(result["results"]) == {"ta", "hom", "slp"}
    assert result["check_result"]["passed"]
    for entry in result["results"].values():
        assert entry["decision"] == Verdict.UNIFIABLE.value
        assert entry["check_result"]["passed"]
        assert entry["substitution"]
    assert "execution_log" not in result


def test_pipeline_on_asymmetric_system():
    result = run_pipeline(generate_sigma_prime(1), ["asym"])
    assert list(result["results"]) == ["slp", "asym"]
    assert result["results"]["asym"]["check_result"]["asymmetric"]
    assert result["check_result"]["passed"]


def test_pipeline_reports_failures(occurs_check):
    result = run_pipeline(occurs_check, ["ta"])
    assert result["results"]["ta"]["reason"] == "dependency-cycle"
    assert result["results"]["ta"]["substitution"] is None
    assert result["check_result"]["passed"]


def test_pipeline_skips_hom_outside_fragment(system):
    result = run_pipeline(system("X = Y + Z"), ["hom"], verbose=True)
    assert "hom" not in result["results"]
    skipped = result["execution_log"][-1]
    assert (skipped["algorithm"], skipped["status"]) == ("hom", "skipped")


def test_verbose_banners(capsys):
    result = run_pipeline(generate_sigma(0), ["ta"], verbose=True)
    out = capsys.readouterr().out
    assert "[step 1/2] slp" in out
    assert "[step 2/2] ta" in out
    assert "🎉 all deciders agree" in out
    assert [entry["algorithm"] for entry in result["execution_log"]] == ["slp", "ta"]

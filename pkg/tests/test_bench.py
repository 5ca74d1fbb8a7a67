import math

import pytest

from bench import COLUMNS, BenchReport, bench, instances
from generators import GenSpec


def test_empty_report():
    report = bench([], ["ta"], progress=False)
    assert report.empty
    assert list(report.frame.columns) == COLUMNS
    assert report.summary().empty


def test_instances():
    assert [inst.n for inst in instances("sigma", min_n=1, max_n=3)] == [1, 2, 3]
    randoms = instances("random", seeds=range(3), spec=GenSpec(variables=5, sums=2, products=2))
    assert [inst.seed for inst in randoms] == [0, 1, 2]


def test_sigma_rows_agree():
    report = bench(["sigma"], ["ta", "slp"], max_n=2, workers=2, progress=False)
    frame = report.frame
    assert len(frame) == 6
    assert set(frame["decision"]) == {"unifiable"}
    assert frame["agrees"].all()
    assert report.disagreements().empty
    assert frame[frame["algorithm"] == "ta"]["size"].tolist() == [5, 8, 11]


def test_hom_rows_are_skipped_outside_fragment():
    report = bench(["random"], ["hom"], seeds=range(4), spec=GenSpec(variables=6, sums=3, products=0), progress=False)
    assert set(report.frame["decision"]) == {"skipped"}
    assert report.frame["agrees"].isna().all()


def test_budget_rows_are_left_out():
    report = bench(["sigma"], ["ta"], budget=5, min_n=3, max_n=4, progress=False)
    assert len(report.budget_exceeded()) == 2
    assert report.completed().empty
    assert math.isnan(report.slope("sigma", "ta"))


def test_csv(tmp_path):
    report = bench(["sigma-prime"], ["asym"], max_n=1, progress=False)
    path = tmp_path / "out.csv"
    report.to_csv(path)
    assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(COLUMNS)


def test_random_corpus_agrees_with_oracle():
    report = bench(["random"], ["ta", "hom", "asym"], seeds=range(40),
                   spec=GenSpec(variables=7, sums=4, products=4, labels=2), progress=False)
    assert report.disagreements().empty


@pytest.mark.slow
def test_sigma_sweep_shapes():
    report = bench(["sigma"], ["ta", "hom", "slp"], max_n=6, progress=False)
    assert report.disagreements().empty
    ratios = report.growth_ratios("sigma", "ta")
    assert (ratios.loc[3:] >= 2).all()
    # the rule count grows like |S|^4; small n bend the fitted line, hence 4.5
    assert bench(["sigma"], ["slp"], max_n=14, progress=False).slope("sigma", "slp") <= 4.5


@pytest.mark.slow
def test_sigma_prime_sweep():
    report = bench(["sigma-prime"], ["asym", "ta"], max_n=5, progress=False)
    assert report.disagreements().empty
    assert set(report.completed()["decision"]) == {"unifiable"}


@pytest.mark.slow
@pytest.mark.parametrize("acyclic", [False, True])
def test_large_random_corpus(acyclic):
    report = bench(["random"], ["ta", "hom", "asym"], seeds=range(500),
                   spec=GenSpec(variables=8, sums=5, products=5, labels=2, acyclic=acyclic), progress=False)
    assert report.disagreements().empty
    baseline = report.frame[report.frame["algorithm"] == "ta"]
    assert len(report.completed().query("algorithm == 'ta'")) >= 0.95 * len(baseline)


def test_report_default_frame():
    assert BenchReport().empty

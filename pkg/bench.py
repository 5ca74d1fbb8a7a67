# bench.py
"""
Benchmark runner: every (instance, algorithm) pair of the requested families,
with the compressed decider's decision as the oracle column, growth ratios of
the splitting-rule counts and log-log slopes of total rule counts vs |S|.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from config import get_settings
from errors import NotInFragmentError
from generators import Family, GenSpec, generate_random, generate_sigma, generate_sigma_prime
from pipeline import ORACLE, solve_problem
from results import Outcome, Verdict
from terms import StandardSystem

logger = logging.getLogger(__name__)

COLUMNS = [
    "family", "n", "seed", "algorithm", "size", "decision", "reason",
    "rules_total", "splitting", "fresh_variables", "restarts",
    "max_slp_size", "max_slp_depth", "max_label_length",
    "wall_time", "oracle_decision", "agrees",
]

SKIPPED = "skipped"


@dataclass(frozen=True)
class Instance:
    family: str
    n: Optional[int]
    seed: Optional[int]
    system: StandardSystem


def instances(family: Union[Family, str], *, min_n: int = 0, max_n: int = 6, seeds: Iterable[int] = range(10),
              spec: Optional[GenSpec] = None) -> list[Instance]:
    family = Family(family)
    if family is Family.SIGMA:
        return [Instance(family.value, n, None, generate_sigma(n)) for n in range(min_n, max_n + 1)]
    if family is Family.SIGMA_PRIME:
        return [Instance(family.value, n, None, generate_sigma_prime(n)) for n in range(min_n, max_n + 1)]
    spec = spec or GenSpec()
    return [Instance(family.value, None, seed, generate_random(spec.model_copy(update={"seed": seed}))) for seed in seeds]


def _row(instance: Instance, alg: str, outcome: Optional[Outcome], error: Optional[str] = None) -> dict:
    row = {
        "family": instance.family,
        "n": instance.n,
        "seed": instance.seed,
        "algorithm": alg,
        "size": len(instance.system),
    }
    if outcome is None:
        row.update(decision=SKIPPED, reason=error)
        return row
    stats = outcome.stats
    row.update(
        decision=outcome.verdict.value,
        reason=outcome.reason.value if outcome.reason else None,
        rules_total=stats.total_rules,
        splitting=stats.splitting,
        fresh_variables=stats.fresh_variables,
        restarts=stats.restarts,
        max_slp_size=stats.max_slp_size,
        max_slp_depth=stats.max_slp_depth,
        max_label_length=bin(stats.max_label_length),
        wall_time=stats.wall_time,
    )
    return row


def _run(instance: Instance, alg: str, budget: Optional[int]) -> dict:
    try:
        outcome = solve_problem(instance.system, alg, budget=budget, require_hom=True)
    except NotInFragmentError as e:
        return _row(instance, alg, None, str(e))
    return _row(instance, alg, outcome)


def _agrees(alg: str, decision: str, oracle: Optional[str]) -> Optional[bool]:
    finished = {Verdict.UNIFIABLE.value, Verdict.NOT_UNIFIABLE.value}
    if decision not in finished or oracle not in finished:
        return None
    if alg == "asym":
        return decision != Verdict.UNIFIABLE.value or oracle == Verdict.UNIFIABLE.value
    return decision == oracle


@dataclass
class BenchReport:
    frame: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=COLUMNS))

    @property
    def empty(self) -> bool:
        return self.frame.empty

    def completed(self) -> pd.DataFrame:
        """Rows that finished within budget."""
        done = {Verdict.UNIFIABLE.value, Verdict.NOT_UNIFIABLE.value}
        return self.frame[self.frame["decision"].isin(done)]

    def budget_exceeded(self) -> pd.DataFrame:
        return self.frame[self.frame["decision"] == Verdict.BUDGET_EXCEEDED.value]

    def growth_ratios(self, family: str, algorithm: str) -> pd.Series:
        """splitting(n) / splitting(n-1), indexed by n; NaN where the previous count is 0."""
        rows = self.completed()
        rows = rows[(rows["family"] == family) & (rows["algorithm"] == algorithm)].dropna(subset=["n"]).sort_values("n")
        if rows.empty:
            return pd.Series(dtype=float)
        counts = rows.set_index("n")["splitting"].astype(float)
        return (counts / counts.shift(1).replace(0.0, np.nan)).iloc[1:]

    def slope(self, family: str, algorithm: str) -> float:
        """Log-log slope of total rule applications against |S|; NaN with fewer than two points."""
        rows = self.completed()
        rows = rows[(rows["family"] == family) & (rows["algorithm"] == algorithm) & (rows["rules_total"] > 0)]
        if rows["size"].nunique() < 2:
            return math.nan
        x = np.log(rows["size"].astype(float).to_numpy())
        y = np.log(rows["rules_total"].astype(float).to_numpy())
        return float(np.polyfit(x, y, 1)[0])

    def disagreements(self) -> pd.DataFrame:
        return self.frame[self.frame["agrees"] == False]  # noqa: E712

    def summary(self) -> pd.DataFrame:
        out = []
        for (family, algorithm), rows in self.frame.groupby(["family", "algorithm"], sort=True):
            ratios = self.growth_ratios(family, algorithm)
            out.append({
                "family": family,
                "algorithm": algorithm,
                "instances": len(rows),
                "budget_exceeded": int((rows["decision"] == Verdict.BUDGET_EXCEEDED.value).sum()),
                "min_growth": float(ratios.min()) if not ratios.dropna().empty else math.nan,
                "slope": self.slope(family, algorithm),
            })
        return pd.DataFrame(out)

    def to_csv(self, path) -> None:
        self.frame.to_csv(path, index=False, columns=COLUMNS)


def bench(
    families: Iterable[Union[Family, str]],
    algorithms: Iterable[str],
    budget: Optional[int] = None,
    *,
    min_n: int = 0,
    max_n: int = 6,
    seeds: Iterable[int] = range(10),
    spec: Optional[GenSpec] = None,
    workers: Optional[int] = None,
    progress: bool = True,
) -> BenchReport:
    """
    Runs every algorithm on every instance of the families.

    Args:
        families: sigma, sigma-prime and/or random
        algorithms: ta, hom, slp, asym; the oracle (slp) always runs
        budget: rule-application limit per run
        workers: thread pool size (defaults to the configured bench_workers)

    Returns:
        BenchReport: one row per (instance, algorithm); an empty report for no families
    """
    algorithms = list(dict.fromkeys(algorithms))
    pool = [inst for family in families for inst in instances(family, min_n=min_n, max_n=max_n, seeds=seeds, spec=spec)]
    if not pool:
        return BenchReport()
    runs = list(dict.fromkeys([ORACLE, *algorithms]))
    workers = get_settings().bench_workers if workers is None else workers

    rows: dict[tuple[int, str], dict] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(_run, inst, alg, budget): (i, alg) for i, inst in enumerate(pool) for alg in runs}
        for future in tqdm(as_completed(futures), total=len(futures), desc="bench", disable=not progress):
            rows[futures[future]] = future.result()

    table = []
    for i, inst in enumerate(pool):
        oracle = rows[(i, ORACLE)]["decision"]
        for alg in algorithms:
            row = rows[(i, alg)]
            row["oracle_decision"] = oracle
            row["agrees"] = _agrees(alg, row["decision"], oracle)
            table.append(row)
    frame = pd.DataFrame(table).reindex(columns=COLUMNS)
    report = BenchReport(frame)
    excluded = len(report.budget_exceeded())
    if excluded:
        logger.warning("%d runs exceeded the budget and are left out of the slope fits", excluded)
    return report

# compressed_decider.py
"""
Polynomial-time decision procedure for unification modulo one-sided
distributivity. Lateral path labels are straight-line programs, so labels of
exponential length stay polynomial in size.

Rule numbering in stats and traces:
  0     variable replacement (label variables survive)
  i     sum cancellation
  ii    equal labels into one target: sources identified
  iii   equal labels out of one source: targets identified
  iv    prefix split
  v     equal-length labels that differ: mismatched labels identified
  vi    shorter label that is not a prefix: mismatched labels identified
  vii   propagation over an existing sum
  viii  propagation creating the sum (fresh variables)
  ix    cycle in LD or LP (failure)
  x     path concatenation
"""
import logging
from typing import Optional

import slp
from config import get_settings
from results import FailureReason, Outcome, RunStats
from saturation import LabelAlgebra, SaturationState, run
from slp import Slp
from terms import StandardSystem

logger = logging.getLogger(__name__)

RULES = {
    "zero": "0",
    "sum": "i",
    "target": "ii",
    "source": "iii",
    "prefix": "iv",
    "mismatch": "v",
    "shorter": "vi",
    "propagate": "vii",
    "fresh": "viii",
    "cycle": "ix",
    "concat": "x",
}


class SlpAlgebra(LabelAlgebra):
    """Labels are SLP handles; nothing is decompressed."""

    def atom(self, name: str) -> Slp:
        return slp.atom(name)

    def length(self, label: Slp) -> int:
        return label.length

    def equal(self, a: Slp, b: Slp) -> bool:
        return slp.equal(a, b)

    def first_mismatch(self, a: Slp, b: Slp) -> Optional[tuple[int, str, str]]:
        return slp.first_mismatch(a, b)

    def suffix(self, label: Slp, keep: int) -> Slp:
        return slp.suffix(label, keep)

    def concat(self, a: Slp, b: Slp) -> Slp:
        return slp.concat(a, b)

    def terminals(self, label: Slp) -> frozenset:
        return label.terminals

    def to_slp(self, label: Slp) -> Slp:
        return label

    def observe(self, label: Slp, stats: RunStats) -> None:
        stats.max_slp_size = max(stats.max_slp_size, slp.size(label))
        stats.max_slp_depth = max(stats.max_slp_depth, label.depth)


def _settings(budget: Optional[int], trace: Optional[bool]) -> tuple[RunStats, int]:
    settings = get_settings()
    stats = RunStats(algorithm="slp", splitting_rules=["vii", "viii"])
    stats.enable_trace(settings.trace if trace is None else trace)
    return stats, settings.saturation_budget if budget is None else budget


def new_state(s: StandardSystem, *, budget: Optional[int] = None, trace: Optional[bool] = None) -> SaturationState:
    """Step 1: LD and LP graphs of s, with the initial label variables noted."""
    stats, budget = _settings(budget, trace)
    return SaturationState(s, SlpAlgebra(), RULES, stats, budget)


def apply_rule_zero(state: SaturationState, u: str, v: str) -> SaturationState:
    """Identify u and v. Identifying two label variables leaves a restart pending."""
    state.merge(u, v)
    return state


def cycle_check(state: SaturationState) -> Optional[tuple[FailureReason, list]]:
    return state.cycle_check()


def process_class(state: SaturationState, members: list[str]) -> SaturationState:
    """Run the class composite rule. A cycle found midway is left for the next cycle_check."""
    state.process_class(members)
    return state


def to_dag_solved(state: SaturationState) -> StandardSystem:
    return state.to_dag_solved()


def decide(s: StandardSystem, *, budget: Optional[int] = None, trace: Optional[bool] = None) -> Outcome:
    """
    Decides unifiability of a symmetric standard-form system in polynomial time.

    Args:
        s: the system
        budget: rule-application guard (defaults to the configured saturation budget)
        trace: record one trace entry per rule application

    Returns:
        Outcome: UNIFIABLE with the compressed dag-solved form, NOT_UNIFIABLE
        with a reason and a cycle witness, or BUDGET_EXCEEDED.
    """
    stats, budget = _settings(budget, trace)
    return run(s, SlpAlgebra(), RULES, stats, budget)

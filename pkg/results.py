# results.py
"""
Outcome and statistics types shared by every decider.
"""
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, PrivateAttr

from terms import StandardSystem, Substitution, extract_unifier


class Verdict(str, Enum):
    UNIFIABLE = "unifiable"
    NOT_UNIFIABLE = "not-unifiable"
    BUDGET_EXCEEDED = "budget-exceeded"


class FailureReason(str, Enum):
    DEPENDENCY_CYCLE = "dependency-cycle"
    PROPAGATION_CYCLE = "propagation-cycle"
    RULE_E = "rule-e"
    RULE_E_PRIME = "rule-e-prime"
    RULE_F = "rule-f"
    RULE_F_PRIME = "rule-f-prime"
    # a restricted product whose right factor is bound to a sum through other products
    FORCED_REDEX = "forced-redex"


class TraceEntry(BaseModel):
    rule: str
    equations: list[str] = Field(default_factory=list)

    def __str__(self) -> str:
        return f"{self.rule}: " + "; ".join(self.equations)


class RunStats(BaseModel):
    """Counters of one run. Every counter only grows while the run is in progress."""

    algorithm: str
    rule_counts: dict[str, int] = Field(default_factory=dict)
    splitting_rules: list[str] = Field(default_factory=list)
    sum_transformations: int = 0
    fresh_variables: int = 0
    restarts: int = 0
    wall_time: float = 0.0
    label_vars_initial: int = 0
    label_vars_final: int = 0
    class_count: int = 0
    max_slp_size: int = 0
    max_slp_depth: int = 0
    max_label_length: int = 0
    fragment: Optional[str] = None
    failure_rule: Optional[str] = None
    trace: list[TraceEntry] = Field(default_factory=list)

    _tracing: bool = PrivateAttr(default=False)
    _started: float = PrivateAttr(default_factory=time.perf_counter)

    def enable_trace(self, on: bool = True) -> "RunStats":
        self._tracing = on
        return self

    def bump(self, rule: str, *equations) -> None:
        self.rule_counts[rule] = self.rule_counts.get(rule, 0) + 1
        if self._tracing:
            self.trace.append(TraceEntry(rule=rule, equations=[str(e) for e in equations]))

    def count(self, rule: str) -> int:
        return self.rule_counts.get(rule, 0)

    @property
    def total_rules(self) -> int:
        return sum(self.rule_counts.values())

    @property
    def splitting(self) -> int:
        return sum(self.rule_counts.get(rule, 0) for rule in self.splitting_rules)

    def stop_clock(self) -> "RunStats":
        self.wall_time = time.perf_counter() - self._started
        return self


@dataclass
class Outcome:
    verdict: Verdict
    stats: RunStats
    reason: Optional[FailureReason] = None
    solved: Optional[StandardSystem] = None
    witness: Optional[list] = None
    substitution: Optional[Substitution] = None

    @property
    def unifiable(self) -> bool:
        return self.verdict is Verdict.UNIFIABLE

    def unifier(self, *, compressed: bool = False, cap: Optional[int] = None) -> Substitution:
        if not self.unifiable:
            raise ValueError(f"no unifier: run ended with {self.verdict.value}")
        if self.substitution is not None:
            return self.substitution if compressed else self.substitution.materialize(cap)
        return extract_unifier(self.solved, compressed=compressed, cap=cap)

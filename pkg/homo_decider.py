# homo_decider.py
"""
Single-homomorphism fragment: one variable T only ever occurs as a left
factor, so X = T * Y reads X = h(Y) and a lateral path is h^n. Labels are then
plain integers: equality and prefix tests compare lengths, suffix and
concatenation are subtraction and addition.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import slp
from config import get_settings
from errors import NotInFragmentError
from results import Outcome, RunStats
from saturation import LabelAlgebra, run
from slp import Slp
from terms import StandardSystem

logger = logging.getLogger(__name__)

FRAGMENT = "single-homomorphism"

# rule names of the single-homomorphism rule set
RULES = {
    "zero": "0",
    "sum": "i",
    "target": "ii",
    "source": "iii",
    "prefix": "iv",
    "concat": "v",
    "cycle": "vi",
    "propagate": "vii",
    "fresh": "vii",
    "mismatch": "mismatch",
    "shorter": "mismatch",
}


@dataclass(frozen=True)
class TypedSystem:
    """A system with its type assignment: `hom` is the one tau1 variable, everything else is tau2."""

    system: StandardSystem
    hom: str
    tau2: frozenset

    @property
    def tau1(self) -> frozenset:
        return frozenset((self.hom,))

    def h_equations(self) -> list[tuple[str, str]]:
        """(X, Y) for every X = h(Y)."""
        return [(eq.lhs, eq.rhs.right.name) for eq in self.system.equations if eq.kind == "product"]

    def __str__(self) -> str:
        lines = []
        for eq in self.system.equations:
            if eq.kind == "product":
                lines.append(f"{eq.lhs} = h({eq.rhs.right.name})")
            else:
                lines.append(str(eq))
        return "\n".join(lines)


def typecheck(s: StandardSystem) -> TypedSystem:
    """
    Infers the tau1/tau2 partition from product positions.

    Args:
        s: symmetric standard-form system

    Returns:
        TypedSystem: when exactly one variable is a left factor and it occurs nowhere else

    Raises:
        NotInFragmentError: no products, several left factors, or a left factor in tau2 position
    """
    if s.asymmetric:
        raise NotInFragmentError("asymmetric systems are outside the single-homomorphism fragment")
    factors = sorted({eq.rhs.left.name for eq in s.equations if eq.kind == "product"}, key=s.rank)
    if not factors:
        raise NotInFragmentError("no product equations, so there is no homomorphism variable")
    if len(factors) > 1:
        raise NotInFragmentError(f"several left factors: {', '.join(factors)}")
    hom = factors[0]
    for eq in s.equations:
        if eq.kind == "path":
            raise NotInFragmentError(f"'{eq}' is already a lateral path")
        positions = {eq.lhs} | ({eq.rhs.right.name} if eq.kind == "product" else eq.rhs_variables())
        if hom in positions:
            raise NotInFragmentError(f"{hom} is a left factor but also occurs in '{eq}'")
    tau2 = frozenset(name for name in s.variables if name != hom)
    return TypedSystem(s, hom, tau2)


class PowerAlgebra(LabelAlgebra):
    """Labels are exponents n of h^n."""

    def __init__(self, hom: str):
        self.hom = hom

    def atom(self, name: str) -> int:
        return 1

    def length(self, label: int) -> int:
        return label

    def equal(self, a: int, b: int) -> bool:
        return a == b

    def first_mismatch(self, a: int, b: int) -> None:
        return None

    def suffix(self, label: int, keep: int) -> int:
        return keep

    def concat(self, a: int, b: int) -> int:
        return a + b

    def terminals(self, label: int) -> frozenset:
        return frozenset()

    def to_slp(self, label: int) -> Slp:
        return slp.power(slp.atom(self.hom), label)


def decide_hom(t: TypedSystem, *, budget: Optional[int] = None, trace: Optional[bool] = None) -> Outcome:
    """
    Decides a typed single-homomorphism system.

    Args:
        t: output of typecheck
        budget: rule-application guard (defaults to the configured saturation budget)
        trace: record one trace entry per rule application

    Returns:
        Outcome: the solved form renders h^n as power(atom(T), n), so it is
        printed, materialized and verified like a compressed one.
    """
    settings = get_settings()
    stats = RunStats(algorithm="hom", splitting_rules=["vii"], fragment=FRAGMENT)
    stats.enable_trace(settings.trace if trace is None else trace)
    budget = settings.saturation_budget if budget is None else budget
    outcome = run(t.system, PowerAlgebra(t.hom), RULES, stats, budget, prefix_in_cleanup=True)
    logger.debug("hom over %s: %s", t.hom, outcome.verdict.value)
    return outcome

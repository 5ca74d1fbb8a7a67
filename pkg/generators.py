# generators.py
"""
Problem families for the benchmarks and the oracle sweeps.

sigma(n) is the symmetric family on which the baseline needs exponentially
many sum transformations; sigma_prime(n) is the same system with every
equation written term-first. Variables use subscript words: X_{1^3 2} is
named X_1112, and the empty word names X and Y themselves.
"""
import logging
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from terms import Equation, StandardSystem, plus, times, var

logger = logging.getLogger(__name__)

LABEL = "T"


class Family(str, Enum):
    SIGMA = "sigma"
    SIGMA_PRIME = "sigma-prime"
    RANDOM = "random"


class GenSpec(BaseModel):
    """Generator parameters. Random systems are a pure function of these fields."""

    family: Family = Family.RANDOM
    n: int = Field(0, ge=0, description="Size index of the sigma families")
    seed: int = Field(0, ge=0, description="Seed of the random family")
    variables: int = Field(6, ge=2, le=64, description="Size of the pool A0..A{k-1}")
    sums: int = Field(3, ge=0, description="Number of sum equations")
    products: int = Field(3, ge=0, description="Number of product equations")
    labels: int = Field(1, ge=1, description="Left factors are drawn from A0..A{labels-1}")
    shared_lhs: float = Field(0.3, ge=0.0, le=1.0, description="Chance of reusing an existing left-hand side")
    acyclic: bool = Field(False, description="Order variables so no dependency cycle can be built")
    label_operands: bool = Field(False, description="Let label variables occur outside left-factor position")

    @model_validator(mode="after")
    def _labels_fit(self) -> "GenSpec":
        if self.labels >= self.variables:
            raise ValueError("labels must leave at least one non-label variable")
        return self


def _x(word: str) -> str:
    return f"X_{word}" if word else "X"


def _y(word: str) -> str:
    return f"Y_{word}" if word else "Y"


def sigma_equations(n: int) -> list[tuple[str, str, str, str]]:
    """The five schemas for 0 <= i <= n as (lhs, op, left, right), duplicates removed."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rows: dict[tuple, None] = {}
    for i in range(n + 1):
        ones, twos = "1" * i, "2" * i
        rows.setdefault((_x(ones), "+", _x(ones + "1"), _x(ones + "2")))
        rows.setdefault((_y(twos), "+", _y(twos + "1"), _y(twos + "2")))
        rows.setdefault((_y(twos + "1"), "*", LABEL, _x(ones + "2")))
        rows.setdefault((_x(""), "*", LABEL, _y("")))
        rows.setdefault((_x(ones + "1"), "+", _x(ones + "11"), _x(ones + "12")))
    return list(rows)


def _build(row: tuple[str, str, str, str]):
    lhs, op, left, right = row
    build = plus if op == "+" else times
    return lhs, build(var(left), var(right))


def generate_sigma(n: int) -> StandardSystem:
    """sigma(n): 3n + 5 equations, a single label variable T."""
    equations = [Equation(lhs, rhs) for lhs, rhs in map(_build, sigma_equations(n))]
    return StandardSystem.of(equations, asymmetric=False)


def generate_sigma_prime(n: int) -> StandardSystem:
    """sigma'(n): sigma(n) with every equation written t =d X."""
    equations = [Equation(lhs, rhs, True, term_first=True) for lhs, rhs in map(_build, sigma_equations(n))]
    return StandardSystem.of(equations, asymmetric=True)


def generate_random(spec: GenSpec) -> StandardSystem:
    """
    Deterministic random standard-form system.

    With acyclic set, label variables never occur on the left and every other
    right-hand side variable has a higher index than its left-hand side, so
    the dependency graph is acyclic by construction. Propagation cycles and
    splitting are still possible.
    """
    rng = np.random.default_rng(spec.seed)
    pool = [f"A{i}" for i in range(spec.variables)]
    labels = pool[: spec.labels]
    others = pool[spec.labels:]
    operands = pool if spec.label_operands else others
    kinds = ["+"] * spec.sums + ["*"] * spec.products
    rng.shuffle(kinds)

    used_lhs: list[str] = []
    equations: list[Equation] = []
    for op in kinds:
        if used_lhs and rng.random() < spec.shared_lhs:
            lhs = used_lhs[int(rng.integers(len(used_lhs)))]
        elif spec.acyclic:
            lhs = others[int(rng.integers(len(others) - 1))] if len(others) > 1 else others[0]
        else:
            lhs = operands[int(rng.integers(len(operands)))]
        if spec.acyclic:
            higher = [name for name in others if int(name[1:]) > int(lhs[1:])]
            choices = higher + (labels if spec.label_operands else [])
            if not choices:
                continue
        else:
            choices = operands
        left = choices[int(rng.integers(len(choices)))]
        right = choices[int(rng.integers(len(choices)))]
        if op == "*":
            left = labels[int(rng.integers(len(labels)))]
            rhs = times(var(left), var(right))
        else:
            rhs = plus(var(left), var(right))
        equations.append(Equation(lhs, rhs))
        if lhs not in used_lhs:
            used_lhs.append(lhs)
    system = StandardSystem.of(equations, asymmetric=False)
    logger.debug("random seed=%d: %d equations over %d variables", spec.seed, len(system), len(system.variables))
    return system


def generate(spec: GenSpec) -> StandardSystem:
    if spec.family is Family.SIGMA:
        return generate_sigma(spec.n)
    if spec.family is Family.SIGMA_PRIME:
        return generate_sigma_prime(spec.n)
    return generate_random(spec)


def random_corpus(count: int, base: Optional[GenSpec] = None) -> list[tuple[int, StandardSystem]]:
    """`count` systems with seeds 0..count-1, each on `base`'s size parameters."""
    base = base or GenSpec()
    return [(seed, generate_random(base.model_copy(update={"seed": seed}))) for seed in range(count)]

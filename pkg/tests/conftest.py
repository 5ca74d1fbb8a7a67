import itertools
import os

# before any project module reads the settings
os.environ["DISTRIB_CHECK_INVARIANTS"] = "1"
os.environ.setdefault("DISTRIB_LOG_LEVEL", "WARNING")

import pytest

from config import get_settings
from problem_parser import parse_problem_text
from terms import Term, plus, times, var

get_settings.cache_clear()

ATOMS = ("a", "b")


def normal_terms(atoms=ATOMS) -> list[Term]:
    """Every normal term of depth <= 1 over `atoms`."""
    leaves = [var(a) for a in atoms]
    out = list(leaves)
    for left, right in itertools.product(leaves, repeat=2):
        out.append(plus(left, right))
        out.append(times(left, right))
    return out


@pytest.fixture
def system():
    """Parse a problem from text."""
    return parse_problem_text


@pytest.fixture
def occurs_check():
    return parse_problem_text("X = Y + Z\nY = X * W")


@pytest.fixture
def propagation_cycles():
    return [
        parse_problem_text("Z = V2 + V3\nZ = V1 * V3"),
        parse_problem_text("X = X1 + X2\nX = V * X2"),
    ]

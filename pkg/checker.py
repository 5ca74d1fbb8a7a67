# checker.py
"""
Checker - validates a substitution against a problem, equation by equation
"""
import logging
from typing import Optional

import slp
from config import get_settings
from errors import MaterializationError
from terms import Equation, Path, StandardSystem, Substitution, Term, e_equal, is_normal, normalize, times, var

logger = logging.getLogger(__name__)


def rhs_term(eq: Equation) -> Term:
    """The right-hand side as a plain term; lateral paths are decompressed."""
    rhs = eq.rhs
    if isinstance(rhs, Path):
        result: Term = var(rhs.tail)
        for symbol in reversed(slp.expand(rhs.label)):
            result = times(var(symbol), result)
        return result
    return rhs


def _check_equation(eq: Equation, sigma: Substitution, cap: int) -> Optional[str]:
    """Returns None when the equation holds, else the failure message."""
    left = sigma.image(eq.lhs, cap)
    right = sigma.apply(rhs_term(eq), cap)
    if not e_equal(left, right):
        return "sides are not equal modulo distributivity"
    if eq.asymmetric:
        if eq.term_first:
            restricted = left
        else:
            restricted = sigma.apply(normalize(rhs_term(eq)), cap)
        if not is_normal(restricted):
            return "instantiated irreducible side is reducible"
    return None


def check_unifier(problem: StandardSystem, sigma: Substitution, cap: Optional[int] = None) -> dict:
    """
    Validates sigma against every equation of problem

    Args:
        problem: the system to solve
        sigma: candidate unifier, compressed or not
        cap: materialization cap (defaults to the configured one)

    Returns:
        dict: {
            "passed": bool,
            "violations": [{"rule": str, "message": str}],
            "check_details": [{"rule": str, "equation": str, "status": str, "message": str}],
            "first_failure": str | None,
        }
    """
    cap = get_settings().materialization_cap if cap is None else cap
    violations = []
    check_details = []
    first_failure = None
    unverified = 0

    for index, eq in enumerate(problem.equations, 1):
        rule = "irreducible" if eq.asymmetric else "unifies"
        try:
            failure = _check_equation(eq, sigma, cap)
            if failure is None:
                check_details.append({"rule": rule, "equation": str(eq), "status": "passed", "message": f"equation {index} holds"})
                continue
            violations.append({"rule": rule, "message": f"equation {index} '{eq}': {failure}"})
            check_details.append({"rule": rule, "equation": str(eq), "status": "failed", "message": failure})
        except MaterializationError as e:
            unverified += 1
            check_details.append({"rule": rule, "equation": str(eq), "status": "not-materializable", "message": str(e)})
            continue
        except Exception as e:
            logger.exception("checking equation %d failed", index)
            violations.append({"rule": rule, "message": f"equation {index} '{eq}': check failed: {e}"})
            check_details.append({"rule": rule, "equation": str(eq), "status": "failed", "message": f"check failed: {e}"})
        if first_failure is None:
            first_failure = str(eq)

    return {
        "passed": not violations and not unverified,
        "violations": violations,
        "check_details": check_details,
        "first_failure": first_failure,
        "not_materializable": unverified,
    }


def verify_unifier(problem: StandardSystem, sigma: Substitution, cap: Optional[int] = None) -> bool:
    report = check_unifier(problem, sigma, cap)
    if report["first_failure"] is not None:
        logger.info("first failing equation: %s", report["first_failure"])
    return report["passed"]

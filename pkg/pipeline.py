# pipeline.py
import json
import logging
from typing import Optional

from asym_unify import asym_unify, check_asymmetry
from checker import check_unifier
from compressed_decider import decide
from errors import MaterializationError, NotInFragmentError, StandardFormError
from formatter import format_substitution, format_system
from homo_decider import decide_hom, typecheck
from results import Outcome, Verdict
from ta_baseline import ta_unify
from terms import Equation, StandardSystem, symmetric_erasure

logger = logging.getLogger(__name__)

ALGORITHMS = ("ta", "hom", "slp", "asym")
ORACLE = "slp"


def as_asymmetric(s: StandardSystem) -> StandardSystem:
    """A symmetric system as term-first =d equations; normalized unifiers are unchanged."""
    if s.asymmetric:
        return s
    equations = tuple(Equation(eq.lhs, eq.rhs, True, term_first=eq.kind != "var") for eq in s.equations)
    return StandardSystem(equations, s.originals, s.fresh, True)


def applicable_algorithms(s: StandardSystem) -> list[str]:
    algorithms = ["ta"]
    try:
        typecheck(symmetric_erasure(s))
        algorithms.append("hom")
    except NotInFragmentError:
        pass
    algorithms.append("slp")
    if s.asymmetric:
        algorithms.append("asym")
    return algorithms


def solve_problem(
    system: StandardSystem,
    alg: str,
    *,
    budget: Optional[int] = None,
    trace: Optional[bool] = None,
    require_hom: bool = False,
) -> Outcome:
    """
    Runs one decider on a parsed system.

    Args:
        system: symmetric or asymmetric standard-form system
        alg: one of ta, hom, slp, asym; ta/hom/slp decide the symmetric erasure
        budget: rule-application limit passed to the decider
        trace: record per-rule trace entries
        require_hom: with alg=hom, raise instead of falling back to slp

    Returns:
        Outcome: the decider's result

    Raises:
        NotInFragmentError: alg=hom, require_hom and typecheck rejects the system
    """
    if alg not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {alg!r}; expected one of {', '.join(ALGORITHMS)}")
    if alg == "asym":
        return asym_unify(as_asymmetric(system), budget, trace=trace)
    erased = symmetric_erasure(system)
    if erased is not system:
        logger.info("%s decides the symmetric erasure of an asymmetric system", alg)
    if alg == "ta":
        return ta_unify(erased, budget, trace=trace)
    if alg == "hom":
        try:
            typed = typecheck(erased)
        except NotInFragmentError as e:
            if require_hom:
                raise
            logger.info("not in the single-homomorphism fragment (%s); falling back to slp", e)
            return decide(erased, budget=budget, trace=trace)
        return decide_hom(typed, budget=budget, trace=trace)
    return decide(erased, budget=budget, trace=trace)


def _verify(system: StandardSystem, alg: str, outcome: Outcome, cap: Optional[int]) -> dict:
    """Checker report for a unifiable outcome, against the system the decider answered for."""
    target = as_asymmetric(system) if alg == "asym" else symmetric_erasure(system)
    try:
        sigma = outcome.unifier(compressed=True)
    except MaterializationError as e:
        return {"passed": False, "violations": [], "check_details": [], "first_failure": None,
                "not_materializable": 1, "error": str(e)}
    report = check_unifier(target, sigma, cap)
    if alg == "asym":
        report["asymmetric"] = report["passed"] and check_asymmetry(sigma, target, cap)
    return report


def _agrees(alg: str, outcome: Outcome, oracle: Optional[Outcome]) -> Optional[bool]:
    if oracle is None or oracle.verdict is Verdict.BUDGET_EXCEEDED or outcome.verdict is Verdict.BUDGET_EXCEEDED:
        return None
    if alg == "asym":
        # asymmetric unifiers are symmetric ones, never the converse
        return not outcome.unifiable or oracle.unifiable
    return outcome.verdict is oracle.verdict


def run_pipeline(
    system: StandardSystem,
    algorithms: Optional[list[str]] = None,
    verbose: bool = False,
    *,
    budget: Optional[int] = None,
    cap: Optional[int] = None,
) -> dict:
    """
    Runs several deciders on one system, cross-checks their decisions against
    the compressed decider and verifies every unifier with the checker.

    Args:
        system: parsed problem
        algorithms: deciders to run (defaults to every applicable one)
        verbose: print step banners and return the execution log

    Returns:
        dict: {
            "problem": str,
            "results": {alg: {"decision", "reason", "stats", "substitution", "check_result"}},
            "check_result": {"passed": bool, "violations": [...], "check_details": [...]},
            "execution_log": [...]   # verbose only
        }
    """
    algorithms = list(algorithms or applicable_algorithms(system))
    if ORACLE in algorithms:
        algorithms.remove(ORACLE)
    algorithms.insert(0, ORACLE)
    total = len(algorithms)
    execution_log = []
    results: dict[str, dict] = {}
    outcomes: dict[str, Outcome] = {}
    violations = []
    check_details = []

    for step, alg in enumerate(algorithms, 1):
        if verbose:
            print("\n" + "=" * 60)
            print(f" [step {step}/{total}] {alg}")
            print("=" * 60)
        try:
            outcome = solve_problem(system, alg, budget=budget, require_hom=True)
        except (NotInFragmentError, StandardFormError) as e:
            execution_log.append({"algorithm": alg, "status": "skipped", "error": str(e)})
            if verbose:
                print(f"⚠️ {alg} skipped: {e}")
            continue
        outcomes[alg] = outcome
        entry = {
            "decision": outcome.verdict.value,
            "reason": outcome.reason.value if outcome.reason else None,
            "stats": outcome.stats.model_dump(exclude={"trace"}),
            "substitution": None,
            "check_result": None,
        }
        if outcome.unifiable:
            report = _verify(system, alg, outcome, cap)
            entry["check_result"] = report
            if "error" not in report:
                entry["substitution"] = format_substitution(outcome.unifier(compressed=True))
            status = "passed" if report["passed"] else ("not-materializable" if report.get("not_materializable") else "failed")
            check_details.append({"rule": "unifier", "equation": alg, "status": status,
                                  "message": f"{alg} unifier {status}"})
            if status == "failed":
                violations.append({"rule": "unifier", "message": f"{alg} unifier does not verify"})
        agreement = _agrees(alg, outcome, outcomes.get(ORACLE)) if alg != ORACLE else None
        if agreement is False:
            violations.append({"rule": "agreement", "message": f"{alg} says {outcome.verdict.value}, "
                               f"{ORACLE} says {outcomes[ORACLE].verdict.value}"})
        elif agreement:
            check_details.append({"rule": "agreement", "equation": alg, "status": "passed",
                                  "message": f"{alg} agrees with {ORACLE}"})
        results[alg] = entry
        execution_log.append({"algorithm": alg, "status": "completed", "decision": entry["decision"],
                              "rules": outcome.stats.total_rules, "wall_time": outcome.stats.wall_time})
        if verbose:
            mark = "✅" if outcome.unifiable else "❌"
            print(f"{mark} {alg}: {entry['decision']}" + (f" ({entry['reason']})" if entry["reason"] else ""))
            print(f"   - rule applications: {outcome.stats.total_rules}")
            print(f"   - splitting rules: {outcome.stats.splitting}")

    check_result = {
        "passed": not violations,
        "violations": violations,
        "check_details": check_details,
    }
    final = {
        "problem": format_system(system),
        "results": results,
        "check_result": check_result,
    }
    if verbose:
        final["execution_log"] = execution_log
        print("\n" + "=" * 60)
        print("🎉 all deciders agree" if check_result["passed"] else "⚠️ cross-check failed")
        print("=" * 60)
    return final


if __name__ == "__main__":
    from generators import generate_sigma

    result = run_pipeline(generate_sigma(1), verbose=True)
    print(json.dumps(result["check_result"], ensure_ascii=False, indent=2))

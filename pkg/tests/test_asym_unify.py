import itertools

import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from asym_unify import asym_unify, check_asymmetry, normalize_substitution
from checker import check_unifier
from conftest import normal_terms
from errors import MaterializationError, StandardFormError
from generators import GenSpec, generate_random, generate_sigma, generate_sigma_prime
from pipeline import as_asymmetric
from results import FailureReason, Verdict
from ta_baseline import ta_unify
from terms import Substitution, normalize, plus, times, var

FAILING = [
    ("U =d V * W\nU =d X + Y", "e", FailureReason.RULE_E),
    ("U =d V * W\nW =d X + Y", "e'", FailureReason.RULE_E_PRIME),
    ("U =d V * W\nX + Y =d U", "f", FailureReason.RULE_F),
    ("U =d V * W\nX + Y =d W", "f'", FailureReason.RULE_F_PRIME),
]


@pytest.mark.parametrize("text, rule, reason", FAILING)
def test_failure_rules(system, text, rule, reason):
    outcome = asym_unify(system(text))
    assert outcome.verdict is Verdict.NOT_UNIFIABLE
    assert outcome.reason is reason
    assert outcome.stats.failure_rule == rule
    assert outcome.stats.count(rule) == 1
    assert len(outcome.witness) == 2


@pytest.mark.parametrize("text, rule, reason", FAILING)
def test_failing_systems_have_no_small_solution(system, text, rule, reason):
    s = system(text)
    for v, w, x, y in itertools.product(normal_terms(), repeat=4):
        sigma = Substitution({"U": normalize(times(v, w)), "V": v, "W": w, "X": x, "Y": y})
        assert not check_unifier(s, sigma)["passed"]


PRESERVING = [
    ("a", "U =d V\nV =d A * B", "U =d A * B", "UAB"),
    ("b", "U =d V * W\nU =d X * Y", "U =d V * W\nV =d X\nW =d Y", "UVWXY"),
    ("c", "U =d V * W\nX * Y =d U", "U =d V * W\nV =d X\nW =d Y", "UVWXY"),
    ("d", "A + B =d X\nC + D =d X", "A + B =d X\nA =d C\nB =d D", "XABCD"),
    ("g", "V * W =d U\nU =d X + Y", "V * W =d U\nW1 + W2 =d W\nV * W1 =d X\nV * W2 =d Y", "VWXY"),
    ("h", "V * W =d U\nX + Y =d U", "V * W =d U\nW1 + W2 =d W\nV * W1 =d X\nV * W2 =d Y", "VWXY"),
]


def _small_solutions(s, compared):
    """Asymmetric unifiers with every free variable drawn from normal_terms(), projected on `compared`.

    Variables that are some left-hand side get the normal form of their first
    definition; tuples with a compared value outside the pool are dropped.
    """
    pool = normal_terms()
    allowed = set(pool)
    free = [name for name in s.variables if name not in {eq.lhs for eq in s.equations}]
    found = set()
    for values in itertools.product(pool, repeat=len(free)):
        image = dict(zip(free, values))
        grown = True
        while grown:
            grown = False
            for eq in s.equations:
                if eq.lhs not in image and eq.rhs_variables() <= image.keys():
                    image[eq.lhs] = normalize(Substitution(image).apply(eq.rhs))
                    grown = True
        picked = tuple(image[name] for name in compared)
        if all(term in allowed for term in picked) and check_unifier(s, Substitution(image))["passed"]:
            found.add(picked)
    return found


@pytest.mark.parametrize("rule, premise, conclusion, compared", PRESERVING)
def test_rules_preserve_small_solutions(system, rule, premise, conclusion, compared):
    before = system(premise)
    assert asym_unify(before).stats.count(rule) >= 1
    solutions = _small_solutions(before, compared)
    assert solutions
    assert solutions == _small_solutions(system(conclusion), compared)


def test_variable_equation(system):
    outcome = asym_unify(system("X =d Y"))
    assert outcome.unifiable
    assert outcome.stats.count("a") == 1
    sigma = outcome.unifier()
    assert sigma.image("X") is sigma.image("Y")


def test_binding_unifier(system):
    s = system("X =d A * B")
    outcome = asym_unify(s)
    assert outcome.unifiable
    sigma = outcome.unifier()
    assert sigma.image("X") is times(var("A"), var("B"))
    assert check_asymmetry(sigma, s)


def test_cancellation_kinds(system):
    assert asym_unify(system("X =d A * B\nX =d C * D")).stats.count("b") == 1
    assert asym_unify(system("X =d A * B\nC * D =d X")).stats.count("c") == 1
    assert asym_unify(system("A + B =d X\nC + D =d X")).stats.count("d") == 1


def test_term_first_product_splits(system):
    s = system("V * W =d U\nU =d X + Y")
    outcome = asym_unify(s)
    assert outcome.unifiable
    assert outcome.stats.count("g") == 1
    assert outcome.stats.fresh_variables == 2
    assert check_asymmetry(outcome.unifier(), s)


def test_term_first_sum_splits_with_h(system):
    s = system("V * W =d U\nX + Y =d U")
    outcome = asym_unify(s)
    assert outcome.unifiable
    assert outcome.stats.count("h") == 1
    assert check_asymmetry(outcome.unifier(), s)


def test_forced_redex(system):
    s = system("U =d V * W\nA * B =d W\nB =d X + Y")
    outcome = asym_unify(s)
    assert outcome.verdict is Verdict.NOT_UNIFIABLE
    assert outcome.reason is FailureReason.FORCED_REDEX
    assert outcome.witness == ["U =d V * W"]
    # the symmetric reading is solvable
    assert ta_unify(system("U = V * W\nW = A * B\nB = X + Y")).unifiable


def test_cycles_fail_like_the_baseline(system):
    outcome = asym_unify(system("X =d Y + Z\nY =d X * W"))
    assert outcome.reason is FailureReason.DEPENDENCY_CYCLE


def test_rejects_symmetric_input():
    with pytest.raises(StandardFormError):
        asym_unify(generate_sigma(0))


def test_budget():
    assert asym_unify(generate_sigma_prime(3), budget=5).verdict is Verdict.BUDGET_EXCEEDED


def test_trace(system):
    outcome = asym_unify(system("V * W =d U\nU =d X + Y"), trace=True)
    assert len(outcome.stats.trace) == outcome.stats.total_rules
    assert outcome.stats.trace[0].rule in ("g", "a")


@pytest.mark.parametrize("n", range(4))
def test_sigma_prime_is_unifiable(n):
    s = generate_sigma_prime(n)
    outcome = asym_unify(s)
    assert outcome.unifiable
    assert outcome.stats.splitting > 0
    assert check_asymmetry(outcome.unifier(), s)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10_000), st.booleans())
def test_asymmetric_unifiers_are_symmetric_ones(seed, acyclic):
    s = generate_random(GenSpec(seed=seed, variables=7, sums=4, products=4, labels=2, acyclic=acyclic))
    outcome = asym_unify(as_asymmetric(s))
    assume(outcome.verdict is not Verdict.BUDGET_EXCEEDED)
    if outcome.unifiable:
        assert ta_unify(s).verdict is not Verdict.NOT_UNIFIABLE
        try:
            sigma = outcome.unifier()
        except MaterializationError:
            return
        assert check_asymmetry(sigma, as_asymmetric(s))


def test_normalize_substitution():
    t, a, b = var("T"), var("a"), var("b")
    sigma = normalize_substitution(Substitution({"X": times(t, plus(a, b)), "Y": a}))
    assert sigma.bindings["X"] is plus(times(t, a), times(t, b))
    assert sigma.bindings["Y"] is a
    assert normalize_substitution(sigma).bindings == sigma.bindings


@pytest.mark.slow
def test_splitting_grows_on_sigma_prime():
    counts = []
    for n in range(6):
        outcome = asym_unify(generate_sigma_prime(n))
        assert outcome.unifiable
        counts.append(outcome.stats.splitting)
    assert all(later > earlier for earlier, later in zip(counts, counts[1:]))
    for n in range(2, 5):
        assert counts[n + 1] / counts[n] >= 2

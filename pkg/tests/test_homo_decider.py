import pytest
from hypothesis import assume, given, settings, strategies as st

from checker import verify_unifier
from compressed_decider import decide
from errors import NotInFragmentError
from generators import GenSpec, generate_random, generate_sigma, generate_sigma_prime
from homo_decider import FRAGMENT, decide_hom, typecheck
from results import Verdict


def test_sigma_typechecks():
    typed = typecheck(generate_sigma(2))
    assert typed.hom == "T"
    assert "T" not in typed.tau2
    assert typed.tau1 == frozenset({"T"})
    assert ("X", "Y") in typed.h_equations()
    assert "X = h(Y)" in str(typed)


@pytest.mark.parametrize(
    "text",
    [
        "X = Y + Z",
        "X = A * Y\nX = B * Z",
        "X = T * Y\nT = A + B",
        "X = T * Y\nZ = Y + T",
        "X = T * T",
    ],
)
def test_outside_fragment(system, text):
    with pytest.raises(NotInFragmentError):
        typecheck(system(text))


def test_asymmetric_outside_fragment():
    with pytest.raises(NotInFragmentError):
        typecheck(generate_sigma_prime(0))


@pytest.mark.parametrize("n", range(11))
def test_matches_compressed_decider_on_sigma(n):
    s = generate_sigma(n)
    hom = decide_hom(typecheck(s))
    general = decide(s)
    assert hom.verdict is general.verdict is Verdict.UNIFIABLE
    assert hom.stats.fragment == FRAGMENT
    assert hom.stats.max_label_length == general.stats.max_label_length


@pytest.mark.parametrize("n", range(3))
def test_hom_unifier_verifies(n):
    outcome = decide_hom(typecheck(generate_sigma(n)))
    assert verify_unifier(generate_sigma(n), outcome.unifier())


def test_propagation_cycle(propagation_cycles):
    outcome = decide_hom(typecheck(propagation_cycles[0]))
    assert outcome.verdict is Verdict.NOT_UNIFIABLE


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_matches_compressed_decider_on_random(seed, acyclic):
    s = generate_random(GenSpec(seed=seed, variables=7, sums=4, products=4, labels=1, acyclic=acyclic))
    try:
        typed = typecheck(s)
    except NotInFragmentError:
        assume(False)
    assert decide_hom(typed).verdict is decide(s).verdict

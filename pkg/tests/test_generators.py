import pytest
from pydantic import ValidationError

from generators import Family, GenSpec, generate, generate_random, generate_sigma, generate_sigma_prime, random_corpus
from ta_baseline import build_dep_graph, has_cycle
from terms import is_abc_reduced, symmetric_erasure


def test_sigma_zero():
    assert {str(eq) for eq in generate_sigma(0).equations} == {
        "X = X_1 + X_2",
        "Y = Y_1 + Y_2",
        "Y_1 = T * X_2",
        "X = T * Y",
        "X_1 = X_11 + X_12",
    }


@pytest.mark.parametrize("n", range(8))
def test_sigma_shape(n):
    s = generate_sigma(n)
    assert len(s) == 3 * n + 5
    assert is_abc_reduced(s)
    assert s.label_variables == frozenset({"T"})
    assert not s.asymmetric


def test_sigma_names_use_subscript_words():
    names = set(generate_sigma(3).variables)
    assert {"X_1112", "Y_2221", "X_1111"} <= names


@pytest.mark.parametrize("n", range(4))
def test_sigma_prime_erases_to_sigma(n):
    s = generate_sigma_prime(n)
    assert s.asymmetric
    assert all(eq.term_first for eq in s.equations)
    assert {str(eq) for eq in symmetric_erasure(s).equations} == {str(eq) for eq in generate_sigma(n).equations}


def test_negative_size():
    with pytest.raises(ValueError):
        generate_sigma(-1)


def test_random_is_deterministic():
    spec = GenSpec(seed=17, variables=8, sums=5, products=5, labels=2)
    assert str(generate_random(spec)) == str(generate_random(spec))
    assert str(generate_random(spec)) != str(generate_random(spec.model_copy(update={"seed": 18})))


def test_random_left_factors_are_labels():
    s = generate_random(GenSpec(seed=3, variables=8, sums=2, products=8, labels=2))
    for eq in s.equations:
        if eq.kind == "product":
            assert eq.rhs.left.name in {"A0", "A1"}
            assert eq.rhs.right.name not in {"A0", "A1"}


@pytest.mark.parametrize("seed", range(25))
def test_acyclic_random_has_acyclic_dependencies(seed):
    s = generate_random(GenSpec(seed=seed, variables=8, sums=5, products=5, labels=2, acyclic=True))
    assert not has_cycle(build_dep_graph(s))
    assert not {eq.lhs for eq in s.equations} & {"A0", "A1"}


def test_spec_validation():
    with pytest.raises(ValidationError):
        GenSpec(variables=4, labels=4)
    with pytest.raises(ValidationError):
        GenSpec(shared_lhs=1.5)
    with pytest.raises(ValidationError):
        GenSpec(family="lattice")


def test_generate_dispatches_on_family():
    assert str(generate(GenSpec(family=Family.SIGMA, n=2))) == str(generate_sigma(2))
    assert generate(GenSpec(family="sigma-prime", n=1)).asymmetric


def test_random_corpus_seeds():
    corpus = random_corpus(5, GenSpec(variables=6, sums=2, products=2))
    assert [seed for seed, _ in corpus] == list(range(5))
    assert str(corpus[2][1]) == str(generate_random(GenSpec(seed=2, variables=6, sums=2, products=2)))

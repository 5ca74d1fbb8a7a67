import pytest
from hypothesis import given, settings, strategies as st

import slp
from errors import MaterializationError, NotDagSolvedError, SignatureError, StandardFormError
from terms import (
    App,
    Equation,
    Op,
    Path,
    StandardSystem,
    Substitution,
    decompose,
    e_equal,
    extract_unifier,
    fold,
    format_term,
    is_dag_solved,
    is_normal,
    normalize,
    plus,
    symmetric_erasure,
    times,
    var,
)

a, b, c, d = var("a"), var("b"), var("c"), var("d")


def _terms():
    leaves = st.sampled_from("abc").map(var)
    return st.recursive(
        leaves,
        lambda inner: st.tuples(st.sampled_from([plus, times]), inner, inner).map(lambda t: t[0](t[1], t[2])),
        max_leaves=12,
    )


def _has_redex(term) -> bool:
    return fold(
        term,
        lambda v: False,
        lambda n, l, r: l or r or (n.op is Op.TIMES and isinstance(n.right, App) and n.right.op is Op.PLUS),
    )


def _chain(tail, depth):
    for _ in range(depth):
        tail = times(var("T"), tail)
    return tail


def test_distributes_on_the_left_only():
    assert normalize(times(a, plus(b, c))) is plus(times(a, b), times(a, c))
    assert normalize(times(plus(a, b), c)) is times(plus(a, b), c)


def test_nested_sum_distributes_through():
    assert normalize(times(a, plus(b, plus(c, d)))) is plus(times(a, b), plus(times(a, c), times(a, d)))


def test_hash_consing():
    assert plus(var("a"), var("b")) is plus(a, b)
    assert times(a, b) is not times(b, a)


def test_foreign_operator_rejected():
    with pytest.raises(SignatureError):
        from terms import app

        app("-", a, b)


def test_deep_chain_normalizes_iteratively():
    term = _chain(plus(var("Y"), var("Z")), 3000)
    assert normalize(term) is plus(_chain(var("Y"), 3000), _chain(var("Z"), 3000))
    assert format_term(_chain(var("Y"), 3000)).count("T") == 3000


@settings(max_examples=200, deadline=None)
@given(_terms())
def test_normal_form_properties(term):
    nf = normalize(term)
    assert is_normal(nf)
    assert normalize(nf) is nf
    assert not _has_redex(nf)
    assert e_equal(term, nf)


def test_equation_shape_checks():
    with pytest.raises(StandardFormError):
        Equation("X", var("X"))
    with pytest.raises(StandardFormError):
        Equation("X", plus(plus(a, b), c))
    with pytest.raises(StandardFormError):
        Equation("X", plus(a, b), term_first=True)


def test_system_requires_registered_variables():
    with pytest.raises(StandardFormError):
        StandardSystem((Equation("X", plus(a, b)),), ("X", "a"))


def test_decompose_names_inner_subterms():
    s = decompose([(var("X"), plus(var("Y"), times(var("A"), var("B"))))])
    assert [str(eq) for eq in s.equations] == ["_v1 = A * B", "X = Y + _v1"]
    assert s.fresh == ("_v1",)


def test_decompose_asymmetric_orientation():
    s = decompose([(var("X"), times(var("A"), plus(var("B"), var("C"))))], asymmetric=True)
    assert [str(eq) for eq in s.equations] == ["_v1 =d B + C", "X =d A * _v1"]
    t = decompose([(plus(var("A"), var("B")), var("X"))], asymmetric=True)
    assert [str(eq) for eq in t.equations] == ["A + B =d X"]
    assert t.equations[0].term_first


def test_decompose_rejects_reserved_prefix():
    with pytest.raises(SignatureError):
        decompose([(var("_v1"), var("X"))])


def test_symmetric_erasure():
    s = decompose([(var("X"), plus(var("Y"), var("Z")))], asymmetric=True)
    erased = symmetric_erasure(s)
    assert not erased.asymmetric
    assert [str(eq) for eq in erased.equations] == ["X = Y + Z"]


def test_dag_solved_and_unifier():
    s = StandardSystem.of([Equation("X", plus(var("Y"), var("Z"))), Equation("Y", times(var("A"), var("B")))])
    assert is_dag_solved(s)
    sigma = extract_unifier(s)
    assert sigma.bindings["X"] is plus(times(var("A"), var("B")), var("Z"))
    assert sigma.bindings["Y"] is times(var("A"), var("B"))


def test_not_dag_solved():
    cyclic = StandardSystem.of([Equation("X", plus(var("Y"), var("Z"))), Equation("Y", times(var("X"), var("B")))])
    assert not is_dag_solved(cyclic)
    with pytest.raises(NotDagSolvedError):
        extract_unifier(cyclic)
    twice = StandardSystem.of([Equation("X", plus(var("Y"), var("Z"))), Equation("X", times(var("A"), var("B")))])
    assert not is_dag_solved(twice)


def test_lateral_binding_materializes():
    sigma = Substitution(lateral={"X": Path(slp.power(slp.atom("T"), 3), "Y")})
    assert sigma.is_compressed
    assert sigma.materialize().bindings["X"] is _chain(var("Y"), 3)


def test_materialization_cap():
    sigma = Substitution(lateral={"X": Path(slp.power(slp.atom("T"), 100), "Y")})
    with pytest.raises(MaterializationError):
        sigma.image("X", cap=10)


def test_apply_shares_images():
    sigma = Substitution({"Y": plus(a, b)})
    assert sigma.apply(times(var("T"), var("Y"))) is times(var("T"), plus(a, b))

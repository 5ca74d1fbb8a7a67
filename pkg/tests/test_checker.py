import slp
from checker import check_unifier, verify_unifier
from problem_parser import parse_problem_text
from terms import Path, Substitution, plus, times, var


def test_passing_unifier():
    problem = parse_problem_text("X = Y + Z")
    report = check_unifier(problem, Substitution({"X": plus(var("Y"), var("Z"))}))
    assert report["passed"]
    assert report["check_details"][0]["status"] == "passed"
    assert report["first_failure"] is None


def test_empty_substitution_fails():
    problem = parse_problem_text("X = Y + Z")
    report = check_unifier(problem, Substitution())
    assert not report["passed"]
    assert report["violations"][0]["rule"] == "unifies"
    assert report["first_failure"] == "X = Y + Z"
    assert not verify_unifier(problem, Substitution())


def test_equal_modulo_distributivity():
    problem = parse_problem_text("X = T * Y")
    sigma = Substitution({
        "Y": plus(var("b"), var("c")),
        "X": plus(times(var("T"), var("b")), times(var("T"), var("c"))),
    })
    assert verify_unifier(problem, sigma)


def test_reducible_restricted_side():
    problem = parse_problem_text("X =d Y * Z")
    sigma = Substitution({
        "Y": var("b"),
        "Z": plus(var("c"), var("d")),
        "X": plus(times(var("b"), var("c")), times(var("b"), var("d"))),
    })
    report = check_unifier(problem, sigma)
    assert not report["passed"]
    assert report["violations"][0]["rule"] == "irreducible"
    # the symmetric reading of the same equation holds
    assert verify_unifier(parse_problem_text("X = Y * Z"), sigma)


def test_term_first_restriction_is_on_the_variable():
    problem = parse_problem_text("Y * Z =d X")
    sigma = Substitution({"Y": var("b"), "X": times(var("b"), var("Z"))})
    assert verify_unifier(problem, sigma)


def test_not_materializable_is_reported_separately():
    problem = parse_problem_text("X = T * Y")
    sigma = Substitution(lateral={"X": Path(slp.power(slp.atom("T"), 100), "Y")})
    report = check_unifier(problem, sigma, cap=10)
    assert not report["passed"]
    assert report["not_materializable"] == 1
    assert report["violations"] == []
    assert report["check_details"][0]["status"] == "not-materializable"

import random

from pwlmbqi.ground import GroundModel, check, extract_points
from pwlmbqi.pwl import FunctionPoint
from pwlmbqi.smtlib import parse_script
from pwlmbqi.terms import evaluate

HEAD = """(declare-fun f (Int) Int)(declare-fun g (Int Int) Int)(declare-fun P (Int) Bool)
(declare-fun x () Int)(declare-fun y () Int)(declare-fun b () Bool)"""


def run(body, **kw):
    s = parse_script(HEAD + body)
    return s, check(s.assertions, **kw)


def test_positive_application():
    s, r = run("(assert (> (f 0) 0))")
    assert r.status == "sat"
    assert r.model.apply("f", (0,)) > 0


def test_contradictory_bounds():
    assert run("(assert (> (f 0) 0))(assert (< (f 0) 0))")[1].status == "unsat"


def test_no_integer_between():
    assert run("(assert (> x 0))(assert (< x 1))")[1].status == "unsat"


def test_congruence():
    assert run("(assert (= x y))(assert (not (= (f x) (f y))))")[1].status == "unsat"
    assert run("(assert (= (f (f 0)) 5))(assert (= (f 0) 0))")[1].status == "unsat"
    s, r = run("(assert (distinct (g x y) (g y x)))")
    assert r.status == "sat"
    assert r.model.apply("x", ()) != r.model.apply("y", ())


def test_predicates_and_bool_constants():
    s, r = run("(assert (or (P x) b))(assert (not b))(assert (= x 4))")
    assert r.status == "sat" and r.model.apply("P", (4,)) is True
    assert run("(assert (P x))(assert (not (P 3)))(assert (= x 3))")[1].status == "unsat"


def test_div_mod():
    s, r = run("(assert (= (mod x 3) 2))(assert (> x 10))(assert (= (div x 3) y))")
    assert r.status == "sat"
    xv = r.model.apply("x", ())
    assert xv % 3 == 2 and xv > 10 and xv // 3 == r.model.apply("y", ())


def test_ite_terms():
    s, r = run("(assert (> (ite (P x) x y) 4))(assert (< x 0))")
    assert r.status == "sat"
    for a in s.assertions:
        assert evaluate(a, r.model.values, r.model) is True


def test_model_defaults_are_minimal():
    s, r = run("(assert (> (f 0) (f 1)))")
    assert r.status == "sat"
    assert r.model.apps["f"] == {(0,): 1, (1,): 0}


def test_extract_points():
    m = GroundModel(apps={"f": {(1,): 3, (0,): 2}})
    assert extract_points(m, "f") == [FunctionPoint((0,), 2), FunctionPoint((1,), 3)]
    assert extract_points(m, "g") == []


def test_nested_points():
    s, r = run("(assert (= (f 0) 2))(assert (= (f (f 0)) 5))")
    assert r.status == "sat"
    assert extract_points(r.model, "f") == [FunctionPoint((0,), 2), FunctionPoint((2,), 5)]


def test_deterministic():
    body = "(assert (or (> (f x) (g x y)) (P (+ x y))))(assert (< (f 1) x))"
    a = run(body)[1].model
    b = run(body)[1].model
    assert a.values == b.values and a.apps == b.apps


def test_decision_budget_gives_unknown():
    body = "".join(f"(assert (or (P {i}) (P {i + 1})))" for i in range(12))
    body += "(assert (> x 0))"
    r = run(body, max_decisions=1)[1]
    assert r.status == "unknown"


def test_models_are_consistent_random():
    rng = random.Random(8)
    ops = ["<", "<=", "=", ">="]
    terms = ["x", "y", "(f x)", "(f y)", "(g x y)", "(f (f x))", "1", "(+ x 1)"]
    for _ in range(40):
        parts = []
        for _ in range(rng.randint(1, 4)):
            a, b = rng.choice(terms), rng.choice(terms)
            parts.append(f"(assert ({rng.choice(ops)} {a} {b}))")
        s, r = run("".join(parts))
        if r.status == "sat":
            for a in s.assertions:
                assert evaluate(a, r.model.values, r.model) is True

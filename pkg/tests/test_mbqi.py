import pytest

from pwlmbqi.ground import GroundModel
from pwlmbqi.mbqi import (SAT, UNKNOWN, UNSAT, CandidateModel, Config, build_candidate,
                          find_counterexample, normalize, replay_certificate, solve,
                          verify_model)
from pwlmbqi.pwl import Halfspace, LinearForm, PwlIte
from pwlmbqi.smtlib import Declaration, parse_script, print_model, print_term

F = Declaration("f", ("Int",), "Int")
R = Declaration("R", ("Int", "Int"), "Bool")
F_GT_X = "(declare-fun f (Int) Int)(assert (forall ((x Int)) (> (f x) x)))"
EQ = ("(declare-fun R (Int Int) Bool)"
      "(assert (forall ((x Int) (y Int)) (=> (R x y) (= x y))))"
      "(assert (forall ((x Int) (y Int)) (=> (= x y) (R x y))))")
EQ_TREE = PwlIte(Halfspace((1, -1), 0), PwlIte(Halfspace((-1, 1), 0), True, False), False)


def quants(text):
    return normalize(parse_script(text))[1]


def test_build_candidate_smart_line():
    gm = GroundModel(apps={"f": {(0,): 2, (1,): 3}})
    m = build_candidate(gm, [F], "smart")
    assert m.interp["f"] == LinearForm((1,), 2)
    params, body = m.definition("f")
    assert print_term(body) == "(+ x 2)"


def test_build_candidate_defaults():
    g = Declaration("g", ("Int",), "Int")
    m = build_candidate(GroundModel(), [g, R], "smart")
    assert m.apply("g", (17,)) == 0
    assert m.apply("R", (1, 1)) is False


def test_build_candidate_off_table():
    m = build_candidate(GroundModel(apps={"f": {(0,): 1}}), [F], "off")
    assert print_term(m.definition("f")[1]) == "(ite (= x 0) 1 0)"


def test_counterexamples_f_greater_x():
    q = quants(F_GT_X)[0]
    zero = CandidateModel([F], {"f": LinearForm((0,), 0)})
    assert find_counterexample(zero, q) == {"x": 0}
    succ = CandidateModel([F], {"f": LinearForm((1,), 1)})
    assert find_counterexample(succ, q) is None


def test_equality_relation_model_satisfies_axioms():
    m = CandidateModel([R], {"R": EQ_TREE})
    for q in quants(EQ):
        assert find_counterexample(m, q) is None


@pytest.mark.parametrize("mode", ["smart", "non-smart"])
def test_f_greater_x_learned(mode):
    r = solve(parse_script(F_GT_X), Config(mode=mode))
    assert r.verdict == SAT
    assert all(r.model.apply("f", (a,)) > a for a in range(-50, 51))
    assert "define-fun f" in print_model(r.model)


def test_off_mode_diverges():
    r = solve(parse_script(F_GT_X), Config(mode="off", max_iters=5))
    assert r.verdict == UNKNOWN and r.reason == "iteration limit"
    assert [c["x"] for found in r.counterexamples for _, c in found] == [0, 1, 2, 3, 4]
    assert r.stats["iterations"] == 5


def test_unsat_certificate():
    s = parse_script(F_GT_X + "(assert (<= (f 5) 2))")
    r = solve(s)
    assert r.verdict == UNSAT
    assert "(> (f 5) 5)" in [print_term(t) for t in r.certificate]
    assert replay_certificate(s, r.certificate)


def test_equality_axioms_smart():
    r = solve(parse_script(EQ), Config(mode="smart"))
    assert r.verdict == SAT
    assert all(r.model.apply("R", (a, b)) == (a == b) for a in range(-5, 6) for b in range(-5, 6))


def test_verify_model_rejects_bad_model():
    s = parse_script(F_GT_X)
    ground, qs, _ = normalize(s)
    with pytest.raises(Exception):
        verify_model(CandidateModel([F], {"f": LinearForm((1,), 0)}), ground, qs)


def test_normalize_skolem_and_nesting():
    s = parse_script("(declare-fun f (Int) Int)"
                     "(assert (exists ((k Int)) (> (f k) 3)))"
                     "(assert (and (> (f 0) 0) (forall ((x Int)) (forall ((y Int)) "
                     "(=> (= x y) (>= (f x) (+ y 1)))))))"
                     "(assert (not (exists ((z Int)) (< (f z) (- 5)))))")
    ground, qs, sk = normalize(s)
    assert [d.name for d in sk] == ["k"]
    assert len(ground) == 2
    assert [q.binders for q in qs] == [(("x", "Int"), ("y", "Int")), (("z", "Int"),)]
    r = solve(s)
    assert r.verdict == SAT


def test_alternation_unsupported():
    s = parse_script("(declare-fun f (Int) Int)"
                     "(assert (forall ((x Int)) (exists ((y Int)) (> (f y) x))))")
    r = solve(s)
    assert r.verdict == UNKNOWN and r.reason.startswith("unsupported")


def test_timeout_reports_resource_out():
    r = solve(parse_script(F_GT_X), Config(mode="off", max_iters=10 ** 6, timeout=0.5))
    assert r.verdict in ("resourceout", UNKNOWN)
    assert r.stats["time"] < 1.5


def test_config_validation():
    with pytest.raises(ValueError):
        Config(mode="clever")
    with pytest.raises(ValueError):
        Config(max_iters=0)
    with pytest.raises(ValueError):
        Config(timeout=0)


def test_bool_argument_predicate():
    s = parse_script("(declare-fun Q (Bool Int) Bool)"
                     "(assert (forall ((b Bool) (x Int)) (= (Q b x) b)))")
    r = solve(s)
    assert r.verdict == SAT
    assert r.model.apply("Q", (True, 3)) is True and r.model.apply("Q", (False, 3)) is False


def test_deterministic_runs():
    a = solve(parse_script(EQ))
    b = solve(parse_script(EQ))
    assert print_model(a.model) == print_model(b.model)
    assert a.stats["iterations"] == b.stats["iterations"]

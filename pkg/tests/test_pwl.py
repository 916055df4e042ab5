import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import binary_entropy
from pwlmbqi.pwl import (FunctionPoint, Halfspace, LexBelow, LinearForm, PwlIte,
                         evaluate_pwl, fit_function, fit_predicate_greedy,
                         fit_predicate_recursive, information_gain, lex_split,
                         order_points, param_vars, pwl_to_term, seed_pair_index,
                         split_condition, value_table)
from pwlmbqi.smtlib import print_term
from pwlmbqi.terms import Var, evaluate

EQ_POS = [(0, 0), (1, 1), (-1, -1)]
EQ_NEG = [(-1, 0), (0, 1), (1, 0), (1, 2)]


def render(t, n=1):
    return print_term(pwl_to_term(t, param_vars(n)))


def test_fit_function_single_line():
    assert fit_function([((0,), 2), ((1,), 3)]) == LinearForm((1,), 2)
    assert render(LinearForm((1,), 2)) == "(+ x 2)"


def test_fit_function_single_point():
    assert fit_function([((5,), 7)]) == LinearForm((0,), 7)


def test_fit_function_two_segments():
    t = fit_function([((0,), 0), ((1,), 1), ((2,), 4)])
    assert t == PwlIte(LexBelow((2,)), LinearForm((1,), 0), LinearForm((0,), 4))
    for x, v in [(0, 0), (1, 1), (2, 4)]:
        assert evaluate_pwl(t, (x,)) == v


def test_fit_function_empty():
    assert fit_function([], n=2) == LinearForm((0, 0), 0)


def test_conflicting_points_rejected():
    with pytest.raises(ValueError):
        fit_function([((0,), 1), ((0,), 2)])


def test_split_condition_examples():
    assert print_term(split_condition((1, 5), (2, 0))) == "(< x 2)"
    assert print_term(split_condition((0, 0), (0, 1))) == "(or (< x 0) (and (= x 0) (< y 1)))"
    assert print_term(split_condition((3,), (5,))) == "(< x 5)"


def test_split_condition_classifies():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 3)
        a = tuple(rng.randint(-3, 3) for _ in range(n))
        b = tuple(rng.randint(-3, 3) for _ in range(n))
        if a == b:
            continue
        a, b = min(a, b), max(a, b)
        cond = lex_split(a, b)
        assert cond(a) and not cond(b)
        xs = param_vars(n)
        term = split_condition(a, b)
        env_a = {v.name: x for v, x in zip(xs, a)}
        env_b = {v.name: x for v, x in zip(xs, b)}
        assert evaluate(term, env_a) is True and evaluate(term, env_b) is False


def test_greedy_all_positive():
    t = fit_predicate_greedy([((0,), True), ((3,), True)])
    assert t is True
    assert render(False) == "false"


def test_greedy_threshold():
    t = fit_predicate_greedy([((0,), False), ((1,), True), ((2,), True)])
    assert t == Halfspace((1,), 1)


def test_greedy_equality_relation_exact():
    pts = [(p, True) for p in EQ_POS] + [(p, False) for p in EQ_NEG]
    t = fit_predicate_greedy(pts)
    assert all(evaluate_pwl(t, p) == v for p, v in pts)


def test_recursive_equality_tree_golden():
    pts = [(p, True) for p in EQ_POS] + [(p, False) for p in EQ_NEG]
    t = fit_predicate_recursive(pts)
    assert t == PwlIte(Halfspace((1, -1), 0), PwlIte(Halfspace((-1, 1), 0), True, False), False)
    assert render(t, 2) == "(ite (>= (- x y) 0) (>= (- y x) 0) false)"


def test_recursive_base_cases():
    assert fit_predicate_recursive([((0,), False), ((4,), False)]) is False
    assert fit_predicate_recursive([]) is False


def test_recursive_one_dimension():
    t = fit_predicate_recursive([((0,), True), ((1,), False)])
    assert evaluate_pwl(t, (0,)) is True and evaluate_pwl(t, (1,)) is False
    assert isinstance(t, PwlIte) and t.cond((0,)) and not t.cond((1,))


def test_information_gain_examples():
    assert information_gain([False, False], [True, True]) == 1.0
    assert information_gain([False], [False]) == 0.0
    assert information_gain([False, True], [False, True]) == 0.0


def test_seed_pair():
    # 1-based pair (2, 3) is index 1
    assert seed_pair_index([False, False, True, True]) == 1
    assert seed_pair_index([False, True]) == 0
    labels = [False, True, False]
    g0 = binary_entropy(1 / 3) - 2 / 3 * binary_entropy(1 / 2)
    assert math.isclose(information_gain(labels[:1], labels[1:]), g0)
    assert math.isclose(information_gain(labels[:2], labels[2:]), g0)
    assert seed_pair_index(labels) == 0


def test_order_points_layout():
    pts = [FunctionPoint((i,), i >= 2) for i in range(5)]
    order = [p.args[0] for p in order_points(pts)]
    assert order == [1, 2, 3, 4, 0]


def test_value_table():
    t = value_table([((0,), 1)], 0)
    assert render(t) == "(ite (= x 0) 1 0)"
    assert evaluate_pwl(t, (0,)) == 1 and evaluate_pwl(t, (9,)) == 0


def test_term_rendering_agrees_with_evaluation():
    rng = random.Random(2)
    pts = [((rng.randint(-9, 9), rng.randint(-9, 9)), rng.random() < 0.5) for _ in range(25)]
    seen = {}
    for a, v in pts:
        seen.setdefault(a, v)
    t = fit_predicate_recursive(list(seen.items()))
    term = pwl_to_term(t, param_vars(2))
    for _ in range(200):
        x = (rng.randint(-20, 20), rng.randint(-20, 20))
        assert evaluate(term, {"x": x[0], "y": x[1]}) == evaluate_pwl(t, x)


point_sets = st.integers(1, 3).flatmap(lambda n: st.dictionaries(
    st.tuples(*[st.integers(-30, 30)] * n), st.integers(-30, 30), min_size=1, max_size=25))


@settings(max_examples=60, deadline=None)
@given(point_sets)
def test_fit_function_exact(d):
    t = fit_function(list(d.items()))
    assert all(evaluate_pwl(t, a) == v for a, v in d.items())


label_sets = st.integers(1, 3).flatmap(lambda n: st.dictionaries(
    st.tuples(*[st.integers(-10, 10)] * n), st.booleans(), min_size=1, max_size=20))


@settings(max_examples=60, deadline=None)
@given(label_sets)
def test_predicate_fitters_exact(d):
    pts = list(d.items())
    for fit in (fit_predicate_greedy, fit_predicate_recursive):
        t = fit(pts)
        assert all(evaluate_pwl(t, a) == v for a, v in pts)


@settings(max_examples=30, deadline=None)
@given(label_sets)
def test_recursive_without_early_stop_exact(d):
    pts = list(d.items())
    t = fit_predicate_recursive(pts, stop_on_first_unsat=False)
    assert all(evaluate_pwl(t, a) == v for a, v in pts)


def test_param_names():
    assert [v.name for v in param_vars(4)] == ["x0", "x1", "x2", "x3"]
    assert param_vars(1) == (Var("x"),)

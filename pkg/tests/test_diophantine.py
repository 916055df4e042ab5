import random

import pytest

from oracles import check_dioph, dioph_brute
from pwlmbqi.diophantine import (EquationSystem, is_sat, push_equation, solve,
                                 solve_integer_system)


def test_two_points_give_x_plus_2():
    s = push_equation(EquationSystem(1), (0,), 2)
    assert is_sat(s)
    assert solve(s) == ((0,), 2)
    s = push_equation(s, (1,), 3)
    assert is_sat(s)
    assert solve(s) == ((1,), 2)


def test_duplicate_row_is_harmless():
    s = EquationSystem(1).push((0,), 2).push((1,), 3)
    assert s.push((1,), 3).solve() == s.solve()


def test_parity_conflict():
    s = EquationSystem(1).push((0,), 0).push((2,), 1)
    assert not s.is_sat()
    with pytest.raises(ValueError):
        s.solve()


def test_empty_systems():
    assert EquationSystem(1).is_sat()
    assert EquationSystem(2).solve() == ((0, 0), 0)


def test_single_constant_row():
    assert EquationSystem(1).push((0,), 0).solve() == ((0,), 0)
    assert EquationSystem(1).push((5,), 7).solve() == ((0,), 7)


def test_persistence():
    base = EquationSystem(1).push((0,), 0)
    bad = base.push((0,), 1)
    assert not bad.is_sat()
    assert base.is_sat() and len(base) == 1


def test_needs_hermite_reduction():
    # solvable over Z although no pivot-only assignment works
    x = solve_integer_system([[2, 3]], [1], 2)
    assert x is not None and 2 * x[0] + 3 * x[1] == 1


def test_arity_mismatch():
    with pytest.raises(ValueError):
        EquationSystem(2).push((1,), 0)


def test_against_brute_force_small():
    rng = random.Random(11)
    for _ in range(150):
        n = rng.randint(1, 2)
        rows = [(tuple(rng.randint(-4, 4) for _ in range(n)), rng.randint(-6, 6))
                for _ in range(rng.randint(1, 4))]
        s = EquationSystem(n)
        for a, v in rows:
            s = s.push(a, v)
        oracle = dioph_brute(rows, n, 30)
        if oracle is not None:
            assert s.is_sat()
        if s.is_sat():
            assert check_dioph(rows, *s.solve())

"""Random small QF_UFLIA scripts for differential testing."""
from __future__ import annotations

import random

HEADER = """(set-logic QF_UFLIA)
(declare-fun x () Int)
(declare-fun y () Int)
(declare-fun z () Int)
(declare-fun f (Int) Int)
(declare-fun g (Int Int) Int)
(declare-fun P (Int) Bool)
"""


def _int(rng, d):
    if d <= 0 or rng.random() < 0.3:
        return rng.choice(["x", "y", "z", str(rng.randint(0, 3)), f"(- {rng.randint(1, 3)})"])
    k = rng.randrange(7)
    if k == 0:
        return f"(f {_int(rng, d - 1)})"
    if k == 1:
        return f"(g {_int(rng, d - 1)} {_int(rng, d - 1)})"
    if k == 2:
        return f"(+ {_int(rng, d - 1)} {_int(rng, d - 1)})"
    if k == 3:
        return f"(- {_int(rng, d - 1)} {_int(rng, d - 1)})"
    if k == 4:
        k = rng.randint(-3, 3)
        return f"(* {k if k >= 0 else f'(- {-k})'} {_int(rng, d - 1)})"
    if k == 5:
        return f"(ite {_bool(rng, d - 1)} {_int(rng, d - 1)} {_int(rng, d - 1)})"
    return f"(f {_int(rng, d - 1)})"


def _atom(rng, d):
    k = rng.randrange(5)
    if k == 4:
        return f"(P {_int(rng, d)})"
    op = ["<=", "<", "=", ">="][k]
    return f"({op} {_int(rng, d)} {_int(rng, d)})"


def _bool(rng, d):
    if d <= 0 or rng.random() < 0.5:
        return _atom(rng, max(d, 1))
    k = rng.randrange(4)
    if k == 0:
        return f"(not {_bool(rng, d - 1)})"
    if k == 1:
        return f"(and {_bool(rng, d - 1)} {_bool(rng, d - 1)})"
    if k == 2:
        return f"(or {_bool(rng, d - 1)} {_bool(rng, d - 1)})"
    return f"(=> {_bool(rng, d - 1)} {_bool(rng, d - 1)})"


def random_ground_script(rng: random.Random) -> str:
    lines = [HEADER]
    for _ in range(rng.randint(3, 9)):
        lines.append(f"(assert {_bool(rng, 2)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"

"""Piecewise-linear interpretations learned from finite sets of function points.

Three fitters are provided:

* :func:`fit_function` greedily covers lexicographically sorted points with
  affine segments, opening a new segment when the Diophantine system of the
  current one becomes unsatisfiable.
* :func:`fit_predicate_greedy` does the same for Boolean points, each segment
  being a single halfspace ``s.x >= c``.
* :func:`fit_predicate_recursive` builds a decision tree whose internal nodes
  are halfspaces, so every leaf is a convex polyhedron with a constant value.

All fitters are exact on their input points and total on Z^n.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import log2

from .diophantine import EquationSystem
from .feasibility import InequalitySystem
from .terms import (FALSE, TRUE, And, BoolConst, Cmp, IntConst, Ite, Not, Or,
                    Var, linear_term)


@dataclass(frozen=True)
class FunctionPoint:
    args: tuple
    value: object  # int for functions, bool for predicates


@dataclass(frozen=True)
class LinearForm:
    slopes: tuple
    intercept: int

    def __call__(self, x):
        return sum(s * v for s, v in zip(self.slopes, x)) + self.intercept


@dataclass(frozen=True)
class Halfspace:
    """The test ``slopes . x >= bound``."""
    slopes: tuple
    bound: int

    def __call__(self, x):
        return sum(s * v for s, v in zip(self.slopes, x)) >= self.bound


@dataclass(frozen=True)
class LexBelow:
    """``x[:len(prefix)]`` is lexicographically smaller than ``prefix``."""
    prefix: tuple

    def __call__(self, x):
        return tuple(x[:len(self.prefix)]) < self.prefix


@dataclass(frozen=True)
class PointEq:
    point: tuple

    def __call__(self, x):
        return tuple(x) == self.point


@dataclass(frozen=True)
class PwlIte:
    cond: object
    then: object
    else_: object


def evaluate_pwl(t, x):
    while isinstance(t, PwlIte):
        t = t.then if t.cond(x) else t.else_
    if isinstance(t, bool):
        return t
    return t(x)


def pwl_depth(t) -> int:
    if isinstance(t, PwlIte):
        return 1 + max(pwl_depth(t.then), pwl_depth(t.else_))
    return 0


def pwl_leaves(t) -> int:
    if isinstance(t, PwlIte):
        return pwl_leaves(t.then) + pwl_leaves(t.else_)
    return 1


# ---------------------------------------------------------------------------
# conversion to terms

def param_vars(n: int, sorts=None):
    names = ("x", "y", "z")[:n] if n <= 3 else tuple(f"x{i}" for i in range(n))
    sorts = sorts or ("Int",) * n
    return tuple(Var(name, s) for name, s in zip(names, sorts))


def condition_term(cond, xs):
    if isinstance(cond, Halfspace):
        return Cmp(">=", linear_term(zip(xs, cond.slopes)), IntConst(cond.bound))
    if isinstance(cond, LexBelow):
        disj = []
        for i, v in enumerate(cond.prefix):
            eqs = [Cmp("=", xs[j], IntConst(cond.prefix[j])) for j in range(i)]
            lt = Cmp("<", xs[i], IntConst(v))
            disj.append(And(tuple(eqs) + (lt,)) if eqs else lt)
        return disj[0] if len(disj) == 1 else Or(tuple(disj))
    if isinstance(cond, PointEq):
        eqs = tuple(Cmp("=", x, IntConst(v)) for x, v in zip(xs, cond.point))
        if not eqs:
            return TRUE
        return eqs[0] if len(eqs) == 1 else And(eqs)
    raise TypeError(f"unknown condition {cond!r}")


def pwl_to_term(t, xs):
    """Render ``t`` as a term over the Int argument terms ``xs``."""
    if isinstance(t, bool):
        return BoolConst(t)
    if isinstance(t, LinearForm):
        return linear_term(zip(xs, t.slopes), t.intercept)
    if isinstance(t, Halfspace):
        return condition_term(t, xs)
    c = condition_term(t.cond, xs)
    a, b = pwl_to_term(t.then, xs), pwl_to_term(t.else_, xs)
    if a == TRUE and b == FALSE:
        return c
    if a == FALSE and b == TRUE:
        return Not(c)
    return Ite(c, a, b)


def split_condition(last_covered, first_uncovered, params=None):
    """Term true on every point lex-<= ``last_covered``, false from ``first_uncovered`` on."""
    cond = lex_split(last_covered, first_uncovered)
    params = params or param_vars(len(last_covered))
    return condition_term(cond, params)


def lex_split(a, b) -> LexBelow:
    a, b = tuple(a), tuple(b)
    if not a < b:
        raise ValueError("split needs last_covered lexicographically before first_uncovered")
    d = next(i for i, (u, v) in enumerate(zip(a, b)) if u != v)
    return LexBelow(b[:d + 1])


# ---------------------------------------------------------------------------
# input handling

def _prepare(points):
    """Deduplicate, check consistency and sort lexicographically."""
    seen = {}
    n = None
    for p in points:
        if not isinstance(p, FunctionPoint):
            p = FunctionPoint(tuple(p[0]), p[1])
        args = tuple(int(a) for a in p.args)
        if n is None:
            n = len(args)
        elif len(args) != n:
            raise ValueError("points of mixed arity")
        if args in seen and seen[args] != p.value:
            raise ValueError(f"conflicting values at {args}")
        seen[args] = p.value
    return [FunctionPoint(a, seen[a]) for a in sorted(seen)], (n or 0)


def _fold_halfspace(h: Halfspace):
    if not any(h.slopes):
        return 0 >= h.bound
    return h


# ---------------------------------------------------------------------------
# functions

def fit_function(points, n=None, deadline=None):
    """Greedy piecewise-linear function through integer points."""
    pts, k = _prepare(points)
    n = k if pts else (n or 0)
    if not pts:
        return LinearForm((0,) * n, 0)
    segments = []  # (segment, last covered args, first uncovered args)
    i = 0
    while i < len(pts):
        sys = EquationSystem(n)
        start = i
        while i < len(pts):
            nxt = sys.push(pts[i].args, pts[i].value)
            if not nxt.is_sat():
                break
            sys = nxt
            i += 1
        assert i > start, "a single point always fits"
        slopes, c = sys.solve()
        seg = LinearForm(slopes, c)
        segments.append((seg, pts[i - 1].args, pts[i].args if i < len(pts) else None))
    return _chain(segments)


def _chain(segments):
    t = segments[-1][0]
    for seg, last, first in reversed(segments[:-1]):
        t = PwlIte(lex_split(last, first), seg, t)
    return t


# ---------------------------------------------------------------------------
# predicates

def fit_predicate_greedy(points, n=None, deadline=None):
    """Greedy predicate: lexicographic segments, each one halfspace."""
    pts, k = _prepare(points)
    if not pts:
        return False
    segments = []
    i = 0
    while i < len(pts):
        sys = InequalitySystem(k)
        while i < len(pts):
            nxt = sys.push(pts[i].args, bool(pts[i].value))
            if not nxt.is_sat(deadline):
                break
            sys = nxt
            i += 1
        slopes, c = sys.solve(deadline)
        seg = _fold_halfspace(Halfspace(slopes, c))
        segments.append((seg, pts[i - 1].args, pts[i].args if i < len(pts) else None))
    return _chain(segments)


def _entropy(pos: int, total: int) -> float:
    if total == 0 or pos == 0 or pos == total:
        return 0.0
    p = pos / total
    return -p * log2(p) - (1 - p) * log2(1 - p)


def information_gain(left_labels, right_labels) -> float:
    left, right = list(left_labels), list(right_labels)
    n = len(left) + len(right)
    if n == 0:
        return 0.0
    lp, rp = sum(map(bool, left)), sum(map(bool, right))
    return (_entropy(lp + rp, n)
            - len(left) / n * _entropy(lp, len(left))
            - len(right) / n * _entropy(rp, len(right)))


def seed_pair_index(labels) -> int:
    """Index ``i`` of the adjacent differing pair ``(i, i+1)`` with maximal gain (leftmost on ties)."""
    best, best_gain = None, None
    for i in range(len(labels) - 1):
        if labels[i] != labels[i + 1]:
            g = information_gain(labels[:i + 1], labels[i + 1:])
            if best is None or g > best_gain:
                best, best_gain = i, g
    if best is None:
        raise ValueError("points carry a single label")
    return best


def order_points(points):
    """Seed pair first, then the points to its right, then those to its left going outward."""
    pts, _ = _prepare(points)
    i = seed_pair_index([bool(p.value) for p in pts])
    return [pts[i], pts[i + 1]] + pts[i + 2:] + pts[:i][::-1]


def fit_predicate_recursive(points, n=None, stop_on_first_unsat=True, deadline=None):
    """Decision tree over halfspaces, exact on the input points."""
    pts, _ = _prepare(points)
    return _recursive(pts, stop_on_first_unsat, deadline)


def _recursive(pts, stop_on_first_unsat, deadline):
    if not any(p.value for p in pts):
        return False
    if all(p.value for p in pts):
        return True
    n = len(pts[0].args)
    ordered = order_points(pts)
    sys = InequalitySystem(n)
    for p in ordered:
        nxt = sys.push(p.args, bool(p.value))
        if nxt.is_sat(deadline):
            sys = nxt
        elif stop_on_first_unsat:
            break
    slopes, c = sys.solve(deadline)
    h = Halfspace(slopes, c)
    plus = [p for p in pts if h(p.args)]
    minus = [p for p in pts if not h(p.args)]
    if not plus or not minus:
        h = _fallback_separator(ordered[0], ordered[1])
        plus = [p for p in pts if h(p.args)]
        minus = [p for p in pts if not h(p.args)]
    return PwlIte(h, _recursive(plus, stop_on_first_unsat, deadline),
                  _recursive(minus, stop_on_first_unsat, deadline))


def _fallback_separator(p, q) -> Halfspace:
    """Halfspace through the positive point with normal towards it from the negative one."""
    pos, neg = (p, q) if p.value else (q, p)
    s = tuple(a - b for a, b in zip(pos.args, neg.args))
    return Halfspace(s, sum(a * b for a, b in zip(s, pos.args)))


# ---------------------------------------------------------------------------
# plain value tables (no learning)

def value_table(points, default):
    """Nested ``ite`` over exact argument tests, ``default`` elsewhere."""
    pts, n = _prepare(points)
    leaf = default if isinstance(default, bool) else LinearForm((0,) * n, default)
    t = leaf
    for p in reversed(pts):
        v = p.value if isinstance(p.value, bool) else LinearForm((0,) * n, p.value)
        t = PwlIte(PointEq(p.args), v, t)
    return t

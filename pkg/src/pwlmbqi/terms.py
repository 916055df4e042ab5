"""Sorted term language for UFLIA plus evaluation, substitution and simplification.

Terms are immutable dataclasses. Integer constants are Python ints and thus
arbitrary precision. Sorts are plain strings: ``"Int"``, ``"Bool"`` or the name
of an uninterpreted sort (only present before sort relaxation).

Model objects passed to :func:`evaluate` and :func:`substitute_model` are duck
typed. ``evaluate`` needs ``m.apply(symbol, values)``; ``substitute_model``
needs ``m.definition(symbol) -> (params, body)`` where ``params`` is a tuple of
:class:`Var`.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Union

from .errors import EvaluationError, SortError, UnsupportedFeature

INT = "Int"
BOOL = "Bool"


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str
    sort: str = INT


@dataclass(frozen=True)
class Apply:
    symbol: str
    args: tuple
    sort: str = INT


@dataclass(frozen=True)
class Add:
    args: tuple


@dataclass(frozen=True)
class Sub:
    args: tuple


@dataclass(frozen=True)
class Neg:
    arg: "Term"


@dataclass(frozen=True)
class MulConst:
    coef: int
    arg: "Term"


@dataclass(frozen=True)
class Div:
    arg: "Term"
    divisor: int


@dataclass(frozen=True)
class Mod:
    arg: "Term"
    divisor: int


@dataclass(frozen=True)
class Cmp:
    op: str  # one of = < <= > >=
    lhs: "Term"
    rhs: "Term"


@dataclass(frozen=True)
class Iff:
    """Equality between two Boolean terms."""
    lhs: "Term"
    rhs: "Term"


@dataclass(frozen=True)
class Not:
    arg: "Term"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    lhs: "Term"
    rhs: "Term"


@dataclass(frozen=True)
class Ite:
    cond: "Term"
    then: "Term"
    else_: "Term"


@dataclass(frozen=True)
class Forall:
    binders: tuple  # ((name, sort), ...)
    body: "Term"


@dataclass(frozen=True)
class Exists:
    binders: tuple
    body: "Term"


Term = Union[IntConst, BoolConst, Var, Apply, Add, Sub, Neg, MulConst, Div, Mod,
             Cmp, Iff, Not, And, Or, Implies, Ite, Forall, Exists]

TRUE = BoolConst(True)
FALSE = BoolConst(False)

CMP_OPS = ("=", "<", "<=", ">", ">=")
_NEGATED_CMP = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}


def const(v):
    if isinstance(v, bool):
        return BoolConst(v)
    return IntConst(v)


def sort_of(t) -> str:
    if isinstance(t, (IntConst, Add, Sub, Neg, MulConst, Div, Mod)):
        return INT
    if isinstance(t, (Var, Apply)):
        return t.sort
    if isinstance(t, Ite):
        return sort_of(t.then)
    return BOOL


def is_ground(t) -> bool:
    return not free_vars(t) and not has_quantifier(t)


def children(t) -> tuple:
    if isinstance(t, (Apply, Add, Sub, And, Or)):
        return t.args
    if isinstance(t, (Neg, MulConst, Div, Mod, Not)):
        return (t.arg,)
    if isinstance(t, (Cmp, Iff, Implies)):
        return (t.lhs, t.rhs)
    if isinstance(t, Ite):
        return (t.cond, t.then, t.else_)
    if isinstance(t, (Forall, Exists)):
        return (t.body,)
    return ()


def subterms(t):
    """Yield every subterm of ``t`` (pre-order, with repetition)."""
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        stack.extend(reversed(children(u)))


def has_quantifier(t) -> bool:
    return any(isinstance(u, (Forall, Exists)) for u in subterms(t))


def free_vars(t, bound=frozenset()) -> set:
    if isinstance(t, Var):
        return set() if t.name in bound else {t}
    if isinstance(t, (Forall, Exists)):
        return free_vars(t.body, bound | {n for n, _ in t.binders})
    out = set()
    for c in children(t):
        out |= free_vars(c, bound)
    return out


def applied_symbols(t) -> set:
    return {u.symbol for u in subterms(t) if isinstance(u, Apply)}


def rebuild(t, kids):
    """Return ``t`` with its children replaced by ``kids`` (same order)."""
    if isinstance(t, Apply):
        return Apply(t.symbol, tuple(kids), t.sort)
    if isinstance(t, (Add, Sub, And, Or)):
        return type(t)(tuple(kids))
    if isinstance(t, (Neg, Not)):
        return type(t)(kids[0])
    if isinstance(t, MulConst):
        return MulConst(t.coef, kids[0])
    if isinstance(t, (Div, Mod)):
        return type(t)(kids[0], t.divisor)
    if isinstance(t, Cmp):
        return Cmp(t.op, kids[0], kids[1])
    if isinstance(t, (Iff, Implies)):
        return type(t)(kids[0], kids[1])
    if isinstance(t, Ite):
        return Ite(kids[0], kids[1], kids[2])
    if isinstance(t, (Forall, Exists)):
        return type(t)(t.binders, kids[0])
    return t


def map_term(t, fn):
    """Bottom-up rewrite: ``fn`` sees each node after its children are rewritten."""
    kids = children(t)
    if kids:
        new = [map_term(k, fn) for k in kids]
        if any(a is not b for a, b in zip(new, kids)):
            t = rebuild(t, new)
    return fn(t)


def substitute(t, mapping: dict):
    """Replace free variables by name. Respects quantifier shadowing."""
    if not mapping:
        return t
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, (Forall, Exists)):
        inner = {k: v for k, v in mapping.items() if all(k != n for n, _ in t.binders)}
        return type(t)(t.binders, substitute(t.body, inner))
    kids = children(t)
    if not kids:
        return t
    new = [substitute(k, mapping) for k in kids]
    if all(a is b for a, b in zip(new, kids)):
        return t
    return rebuild(t, new)


# ---------------------------------------------------------------------------
# integer helpers

def ediv(a: int, b: int) -> int:
    """SMT-LIB (Euclidean) integer division."""
    if b == 0:
        raise EvaluationError("division by zero")
    return (a - emod(a, b)) // b


def emod(a: int, b: int) -> int:
    if b == 0:
        raise EvaluationError("modulo by zero")
    return a % abs(b)


# ---------------------------------------------------------------------------
# evaluation

def evaluate(t, env: dict | None = None, m=None):
    """Evaluate a quantifier-free term to an int or bool."""
    env = env or {}
    return _eval(t, env, m)


def _eval(t, env, m):
    if isinstance(t, IntConst) or isinstance(t, BoolConst):
        return t.value
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name}") from None
    if isinstance(t, Apply):
        vals = tuple(_eval(a, env, m) for a in t.args)
        if m is None:
            raise EvaluationError(f"no interpretation for {t.symbol}")
        return m.apply(t.symbol, vals)
    if isinstance(t, Add):
        return sum(_eval(a, env, m) for a in t.args)
    if isinstance(t, Sub):
        vals = [_eval(a, env, m) for a in t.args]
        return vals[0] - sum(vals[1:])
    if isinstance(t, Neg):
        return -_eval(t.arg, env, m)
    if isinstance(t, MulConst):
        return t.coef * _eval(t.arg, env, m)
    if isinstance(t, Div):
        return ediv(_eval(t.arg, env, m), t.divisor)
    if isinstance(t, Mod):
        return emod(_eval(t.arg, env, m), t.divisor)
    if isinstance(t, Cmp):
        a, b = _eval(t.lhs, env, m), _eval(t.rhs, env, m)
        op = t.op
        if op == "=":
            return a == b
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        return a >= b
    if isinstance(t, Iff):
        return _eval(t.lhs, env, m) == _eval(t.rhs, env, m)
    if isinstance(t, Not):
        return not _eval(t.arg, env, m)
    if isinstance(t, And):
        return all(_eval(a, env, m) for a in t.args)
    if isinstance(t, Or):
        return any(_eval(a, env, m) for a in t.args)
    if isinstance(t, Implies):
        return (not _eval(t.lhs, env, m)) or _eval(t.rhs, env, m)
    if isinstance(t, Ite):
        return _eval(t.then, env, m) if _eval(t.cond, env, m) else _eval(t.else_, env, m)
    raise UnsupportedFeature(f"cannot evaluate quantified term {type(t).__name__}")


# ---------------------------------------------------------------------------
# quantifier handling

def instantiate(q: Forall, c: dict):
    """Plug the values of ``c`` into the binders of ``q``."""
    mapping = {}
    for name, _ in q.binders:
        if name not in c:
            raise ValueError(f"missing value for binder {name}")
        mapping[name] = const(c[name])
    return substitute(q.body, mapping)


def negate_for_check(q: Forall):
    """Return ``(binders, not body)`` with the negation pushed over the top connective."""
    if not isinstance(q, Forall):
        raise ValueError("expected a universally quantified term")
    if has_quantifier(q.body):
        raise UnsupportedFeature("nested quantifiers")
    return q.binders, push_not(q.body)


def push_not(b):
    if isinstance(b, BoolConst):
        return BoolConst(not b.value)
    if isinstance(b, Not):
        return b.arg
    if isinstance(b, And):
        return Or(tuple(Not(a) for a in b.args))
    if isinstance(b, Or):
        return And(tuple(Not(a) for a in b.args))
    if isinstance(b, Implies):
        return And((b.lhs, Not(b.rhs)))
    if isinstance(b, Cmp) and b.op != "=":
        return Cmp(_NEGATED_CMP[b.op], b.lhs, b.rhs)
    return Not(b)


def substitute_model(t, m):
    """Unfold every uninterpreted application using the definitions of ``m``."""
    def unfold(u):
        if isinstance(u, Apply):
            params, body = m.definition(u.symbol)
            return substitute(body, {p.name: a for p, a in zip(params, u.args)})
        return u
    return map_term(t, unfold)


# ---------------------------------------------------------------------------
# linear arithmetic normal form

def term_key(t) -> str:
    return repr(t)


def linearize(t):
    """Decompose an Int term into ``({atom: coef}, const)``.

    Atoms are the subterms that are not linear combinations themselves
    (variables, applications, ite, div, mod).
    """
    coeffs: dict = {}
    c = _lin(t, 1, coeffs)
    return {k: v for k, v in coeffs.items() if v}, c


def _lin(t, k, acc) -> int:
    if isinstance(t, IntConst):
        return k * t.value
    if isinstance(t, Add):
        return sum(_lin(a, k, acc) for a in t.args)
    if isinstance(t, Sub):
        c = _lin(t.args[0], k, acc)
        for a in t.args[1:]:
            c += _lin(a, -k, acc)
        return c
    if isinstance(t, Neg):
        return _lin(t.arg, -k, acc)
    if isinstance(t, MulConst):
        return _lin(t.arg, k * t.coef, acc)
    if sort_of(t) != INT:
        raise SortError(f"expected Int term, got {type(t).__name__}")
    acc[t] = acc.get(t, 0) + k
    return 0


def linear_term(coeffs, const_=0):
    """Build a readable Int term for ``sum(coef * atom) + const``.

    ``coeffs`` is an iterable of ``(atom, coef)`` pairs; zero coefficients are
    skipped. Positive parts come first so ``x - y`` prints as ``(- x y)``.
    """
    pos, neg = [], []
    for atom, k in coeffs:
        if k == 0:
            continue
        part = atom if abs(k) == 1 else MulConst(abs(k), atom)
        (pos if k > 0 else neg).append(part)
    if const_ > 0:
        pos.append(IntConst(const_))
    elif const_ < 0:
        neg.append(IntConst(-const_))
    if not pos and not neg:
        return IntConst(0)
    if not neg:
        return pos[0] if len(pos) == 1 else Add(tuple(pos))
    if not pos:
        head = Neg(neg[0])
        return head if len(neg) == 1 else Sub((head,) + tuple(neg[1:]))
    head = pos[0] if len(pos) == 1 else Add(tuple(pos))
    return Sub((head,) + tuple(neg))


def _sorted_atoms(coeffs: dict):
    return sorted(coeffs.items(), key=lambda kv: term_key(kv[0]))


def normalize_cmp(op, coeffs: dict, c: int):
    """Canonical atom for ``sum(coeffs) op c``; returns a Term.

    Inequalities become ``<=`` with gcd-reduced coefficients (integer
    tightening); equalities keep ``=`` with a positive leading coefficient.
    """
    items = _sorted_atoms(coeffs)
    if not items:
        return BoolConst({"=": 0 == c, "<": 0 < c, "<=": 0 <= c, ">": 0 > c, ">=": 0 >= c}[op])
    if op == "<":
        op, c = "<=", c - 1
    elif op == ">":
        op, c = ">=", c + 1
    if op == ">=":
        items = [(a, -k) for a, k in items]
        op, c = "<=", -c
    g = 0
    for _, k in items:
        g = gcd(g, k)
    if op == "=":
        if c % g:
            return FALSE
        sign = 1 if items[0][1] > 0 else -1
        items = [(a, sign * k // g) for a, k in items]
        return Cmp("=", linear_term(items), IntConst(sign * c // g))
    items = [(a, k // g) for a, k in items]
    return Cmp("<=", linear_term(items), IntConst(c // g))


# ---------------------------------------------------------------------------
# simplification

def simplify(t):
    """Constant folding, flattening and comparison normalization."""
    return map_term(t, _simp_node)


def _simp_node(t):
    if isinstance(t, (Add, Sub, Neg, MulConst)):
        coeffs, c = linearize(t)
        return linear_term(_sorted_atoms(coeffs), c)
    if isinstance(t, (Div, Mod)):
        if isinstance(t.arg, IntConst) and t.divisor != 0:
            f = ediv if isinstance(t, Div) else emod
            return IntConst(f(t.arg.value, t.divisor))
        return t
    if isinstance(t, Cmp):
        lc, lk = linearize(t.lhs)
        rc, rk = linearize(t.rhs)
        for a, k in rc.items():
            lc[a] = lc.get(a, 0) - k
        lc = {a: k for a, k in lc.items() if k}
        return normalize_cmp(t.op, lc, rk - lk)
    if isinstance(t, Not):
        a = t.arg
        if isinstance(a, BoolConst):
            return BoolConst(not a.value)
        if isinstance(a, Not):
            return a.arg
        if isinstance(a, Cmp) and a.op == "<=":
            coeffs, k = linearize(a.lhs)
            return normalize_cmp(">", coeffs, a.rhs.value - k)
        return t
    if isinstance(t, (And, Or)):
        absorbing = isinstance(t, Or)
        out, seen = [], set()
        for a in t.args:
            parts = a.args if type(a) is type(t) else (a,)
            for p in parts:
                if isinstance(p, BoolConst):
                    if p.value == absorbing:
                        return BoolConst(absorbing)
                    continue
                if p not in seen:
                    seen.add(p)
                    out.append(p)
        for p in out:
            if Not(p) in seen:
                return BoolConst(absorbing)
        if not out:
            return BoolConst(not absorbing)
        if len(out) == 1:
            return out[0]
        return type(t)(tuple(out))
    if isinstance(t, Implies):
        a, b = t.lhs, t.rhs
        if a == FALSE or b == TRUE:
            return TRUE
        if a == TRUE:
            return b
        if b == FALSE:
            return _simp_node(Not(a))
        return t
    if isinstance(t, Iff):
        a, b = t.lhs, t.rhs
        if a == b:
            return TRUE
        if isinstance(a, BoolConst) and isinstance(b, BoolConst):
            return BoolConst(a.value == b.value)
        if isinstance(a, BoolConst):
            a, b = b, a
        if isinstance(b, BoolConst):
            return a if b.value else _simp_node(Not(a))
        return t
    if isinstance(t, Ite):
        if isinstance(t.cond, BoolConst):
            return t.then if t.cond.value else t.else_
        if t.then == t.else_:
            return t.then
        if t.then == TRUE and t.else_ == FALSE:
            return t.cond
        if t.then == FALSE and t.else_ == TRUE:
            return _simp_node(Not(t.cond))
        return t
    if isinstance(t, (Forall, Exists)):
        if isinstance(t.body, BoolConst):
            return t.body
        return t
    return t

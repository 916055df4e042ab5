"""Decision procedure for quantifier-free UFLIA.

The formula is Tseitin-encoded into clauses over three kinds of Boolean
variables: linear atoms ``sum(k*v) <= c`` over integer unknowns, Boolean
unknowns (free variables and predicate applications), and auxiliary
definitions. A chronological DPLL search assigns the non-auxiliary variables.
After every propagation round the asserted atoms are checked against the
rational relaxation; on a full assignment an integer model is computed by
branch-and-bound (L1-minimal, so unconstrained unknowns come out as 0).

Uninterpreted functions are handled by purification: every application
instance gets its own unknown, and functional consistency is enforced lazily.
When the integer model gives two instances of the same symbol equal arguments
but different values, the congruence lemma ``args equal -> values equal`` is
added and the search continues.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import gcd

from .errors import EvaluationError, ResourceOut, SolverError, UnsupportedFeature
from .pwl import FunctionPoint
from .simplex import DEFAULT_BOXES, integer_feasible, solve_lp
from .terms import (BOOL, Add, And, Apply, BoolConst, Cmp, Div, Exists,
                    Forall, Iff, Implies, IntConst, Ite, Mod, MulConst, Neg,
                    Not, Or, Sub, Var, evaluate, sort_of)


class GroundModel:
    """Values of free variables plus a finite table per uninterpreted symbol."""

    def __init__(self, values=None, apps=None):
        self.values = dict(values or {})
        self.apps = {k: dict(v) for k, v in (apps or {}).items()}

    def apply(self, symbol, args):
        key = tuple(int(a) for a in args)
        try:
            return self.apps[symbol][key]
        except KeyError:
            raise EvaluationError(f"{symbol}{key} not in ground model") from None

    def __repr__(self):
        return f"GroundModel(values={self.values!r}, apps={self.apps!r})"


def extract_points(m: GroundModel, symbol) -> list:
    """Function points of ``symbol``, sorted by argument tuple."""
    table = m.apps.get(symbol, {})
    return [FunctionPoint(args, table[args]) for args in sorted(table)]


@dataclass
class CheckResult:
    status: str  # sat | unsat | unknown
    model: GroundModel | None = None
    reason: str | None = None
    stats: dict = field(default_factory=dict)


@dataclass
class _Instance:
    symbol: str
    args: tuple  # frozen linear forms
    sort: str
    ref: int  # integer unknown index, or SAT variable for Bool results


ITE_SPLIT_LIMIT = 256
_ARITH = (Add, Sub, Neg, MulConst, Div, Mod)


def _arith_ite(t):
    """First ``ite`` reachable through arithmetic operators only."""
    if isinstance(t, Ite):
        return t
    if isinstance(t, _ARITH):
        for k in (t.args if isinstance(t, (Add, Sub)) else (t.arg,)):
            r = _arith_ite(k)
            if r is not None:
                return r
    return None


def _leaves(t) -> int:
    if isinstance(t, Ite):
        return _leaves(t.then) + _leaves(t.else_)
    if isinstance(t, (Add, Sub)):
        n = 1
        for k in t.args:
            n *= _leaves(k)
        return n
    if isinstance(t, _ARITH):
        return _leaves(t.arg)
    return 1


def _replace(t, old, new):
    if t == old:
        return new
    if isinstance(t, (Add, Sub)):
        return type(t)(tuple(_replace(k, old, new) for k in t.args))
    if isinstance(t, (Neg,)):
        return Neg(_replace(t.arg, old, new))
    if isinstance(t, MulConst):
        return MulConst(t.coef, _replace(t.arg, old, new))
    if isinstance(t, (Div, Mod)):
        return type(t)(_replace(t.arg, old, new), t.divisor)
    return t


def _freeze(coeffs: dict, c: int):
    return tuple(sorted((v, k) for v, k in coeffs.items() if k)), c


class _Encoder:
    def __init__(self):
        self.nvars = 1  # variable 1 is the constant true
        self.kind = {1: "aux"}
        self.atoms = {}  # var -> (items, bound)
        self.atom_index = {}
        self.bool_names = {}  # free Boolean variable name -> var
        self.ivars = []  # keys of integer unknowns
        self.ivar_index = {}
        self.clauses = [[1]]
        self.instances = []
        self.inst_index = {}
        self.memo_lit = {}
        self.memo_lin = {}
        self.memo_gate = {}
        self.fresh = 0

    # variables ------------------------------------------------------------
    def new_var(self, kind):
        self.nvars += 1
        self.kind[self.nvars] = kind
        return self.nvars

    def ivar(self, key):
        i = self.ivar_index.get(key)
        if i is None:
            i = len(self.ivars)
            self.ivars.append(key)
            self.ivar_index[key] = i
        return i

    def fresh_ivar(self):
        self.fresh += 1
        return self.ivar(("fresh", self.fresh))

    # gates ----------------------------------------------------------------
    def le(self, coeffs: dict, c: int) -> int:
        """Literal for ``sum(coeffs) <= c``."""
        items = sorted((v, k) for v, k in coeffs.items() if k)
        if not items:
            return 1 if 0 <= c else -1
        g = 0
        for _, k in items:
            g = gcd(g, k)
        items = [(v, k // g) for v, k in items]
        c = c // g
        sign = 1
        if items[0][1] < 0:
            items = [(v, -k) for v, k in items]
            c = -c - 1
            sign = -1
        key = (tuple(items), c)
        v = self.atom_index.get(key)
        if v is None:
            v = self.new_var("atom")
            self.atom_index[key] = v
            self.atoms[v] = key
        return sign * v

    def eq(self, coeffs: dict, c: int) -> int:
        coeffs = {v: k for v, k in coeffs.items() if k}
        if not coeffs:
            return 1 if c == 0 else -1
        g = 0
        for k in coeffs.values():
            g = gcd(g, k)
        if c % g:
            return -1
        return self.conj([self.le(coeffs, c), self.le({v: -k for v, k in coeffs.items()}, -c)])

    def conj(self, lits) -> int:
        out = []
        for l in lits:
            if l == -1:
                return -1
            if l != 1 and l not in out:
                out.append(l)
        if any(-l in out for l in out):
            return -1
        if not out:
            return 1
        if len(out) == 1:
            return out[0]
        key = ("and", tuple(sorted(out)))
        a = self.memo_gate.get(key)
        if a is None:
            a = self.new_var("aux")
            self.memo_gate[key] = a
            for l in out:
                self.clauses.append([-a, l])
            self.clauses.append([a] + [-l for l in out])
        return a

    def disj(self, lits) -> int:
        return -self.conj([-l for l in lits])

    def iff(self, a, b) -> int:
        if a == b:
            return 1
        if a == -b:
            return -1
        if abs(a) == 1:
            return b if a == 1 else -b
        if abs(b) == 1:
            return a if b == 1 else -a
        key = ("iff",) + tuple(sorted((a, b)))
        x = self.memo_gate.get(key)
        if x is None:
            x = self.new_var("aux")
            self.memo_gate[key] = x
            self.clauses += [[-x, -a, b], [-x, a, -b], [x, a, b], [x, -a, -b]]
        return x

    def ite(self, c, a, b) -> int:
        if c == 1:
            return a
        if c == -1:
            return b
        if a == b:
            return a
        key = ("ite", c, a, b)
        x = self.memo_gate.get(key)
        if x is None:
            x = self.new_var("aux")
            self.memo_gate[key] = x
            self.clauses += [[-c, -x, a], [-c, x, -a], [c, -x, b], [c, x, -b]]
        return x

    # terms ----------------------------------------------------------------
    def lit(self, t) -> int:
        r = self.memo_lit.get(t)
        if r is None:
            r = self._lit(t)
            self.memo_lit[t] = r
        return r

    def _lit(self, t) -> int:
        if isinstance(t, BoolConst):
            return 1 if t.value else -1
        if isinstance(t, Var):
            v = self.bool_names.get(t.name)
            if v is None:
                v = self.new_var("bool")
                self.bool_names[t.name] = v
            return v
        if isinstance(t, Apply):
            return self.instance(t)
        if isinstance(t, Not):
            return -self.lit(t.arg)
        if isinstance(t, And):
            return self.conj([self.lit(a) for a in t.args])
        if isinstance(t, Or):
            return self.disj([self.lit(a) for a in t.args])
        if isinstance(t, Implies):
            return self.disj([-self.lit(t.lhs), self.lit(t.rhs)])
        if isinstance(t, Iff):
            return self.iff(self.lit(t.lhs), self.lit(t.rhs))
        if isinstance(t, Ite):
            return self.ite(self.lit(t.cond), self.lit(t.then), self.lit(t.else_))
        if isinstance(t, Cmp):
            ite = _arith_ite(t.lhs) or _arith_ite(t.rhs)
            if ite is not None and _leaves(t.lhs) * _leaves(t.rhs) <= ITE_SPLIT_LIMIT:
                # case split on the condition instead of naming the ite
                c = self.lit(ite.cond)
                hi = Cmp(t.op, _replace(t.lhs, ite, ite.then), _replace(t.rhs, ite, ite.then))
                lo = Cmp(t.op, _replace(t.lhs, ite, ite.else_), _replace(t.rhs, ite, ite.else_))
                return self.ite(c, self.lit(hi), self.lit(lo))
            lc, lk = self.lin(t.lhs)
            rc, rk = self.lin(t.rhs)
            d = dict(lc)
            for v, k in rc:
                d[v] = d.get(v, 0) - k
            c = rk - lk
            op = t.op
            if op == "=":
                return self.eq(d, c)
            if op == "<=":
                return self.le(d, c)
            if op == "<":
                return self.le(d, c - 1)
            neg = {v: -k for v, k in d.items()}
            if op == ">=":
                return self.le(neg, -c)
            return self.le(neg, -c - 1)
        if isinstance(t, (Forall, Exists)):
            raise SolverError("quantified term given to the ground solver")
        raise UnsupportedFeature(f"Boolean term {type(t).__name__}")

    def lin(self, t):
        r = self.memo_lin.get(t)
        if r is None:
            acc: dict = {}
            c = self._lin(t, 1, acc)
            r = _freeze(acc, c)
            self.memo_lin[t] = r
        return r

    def _lin(self, t, k, acc) -> int:
        if isinstance(t, IntConst):
            return k * t.value
        if isinstance(t, Add):
            return sum(self._lin(a, k, acc) for a in t.args)
        if isinstance(t, Sub):
            c = self._lin(t.args[0], k, acc)
            for a in t.args[1:]:
                c += self._lin(a, -k, acc)
            return c
        if isinstance(t, Neg):
            return self._lin(t.arg, -k, acc)
        if isinstance(t, MulConst):
            return self._lin(t.arg, k * t.coef, acc)
        items, c = self.lin_atom(t)
        for v, kk in items:
            acc[v] = acc.get(v, 0) + k * kk
        return k * c

    def lin_atom(self, t):
        if isinstance(t, Var):
            if t.sort == BOOL:
                raise UnsupportedFeature("Boolean variable in arithmetic position")
            return ((self.ivar(("var", t.name)), 1),), 0
        if isinstance(t, Apply):
            return ((self.instance(t), 1),), 0
        if isinstance(t, Ite):
            v = self.fresh_ivar()
            c = self.lit(t.cond)
            for branch, guard in ((t.then, -c), (t.else_, c)):
                items, k = self.lin(branch)
                d = {v: 1}
                for u, kk in items:
                    d[u] = d.get(u, 0) - kk
                self.clauses.append([guard, self.eq(d, k)])
            return ((v, 1),), 0
        if isinstance(t, (Div, Mod)):
            if t.divisor == 0:
                raise UnsupportedFeature("division by zero")
            key = ("divmod", t.arg, t.divisor)
            pair = self.memo_gate.get(key)
            if pair is None:
                q, r = self.fresh_ivar(), self.fresh_ivar()
                items, k = self.lin(t.arg)
                d = {u: kk for u, kk in items}
                d[q] = d.get(q, 0) - t.divisor
                d[r] = d.get(r, 0) - 1
                self.clauses.append([self.eq(d, -k)])
                self.clauses.append([self.le({r: -1}, 0)])
                self.clauses.append([self.le({r: 1}, abs(t.divisor) - 1)])
                pair = (q, r)
                self.memo_gate[key] = pair
            return ((pair[0] if isinstance(t, Div) else pair[1], 1),), 0
        raise UnsupportedFeature(f"Int term {type(t).__name__}")

    def instance(self, t: Apply) -> int:
        args = tuple(self.lin(a if sort_of(a) != BOOL else Ite(a, IntConst(1), IntConst(0)))
                     for a in t.args)
        key = (t.symbol, args)
        inst = self.inst_index.get(key)
        if inst is None:
            if t.sort == BOOL:
                ref = self.new_var("bool")
            else:
                ref = self.ivar(("app", t.symbol, args))
            inst = _Instance(t.symbol, args, t.sort, ref)
            self.inst_index[key] = inst
            self.instances.append(inst)
        return inst.ref


def _lin_value(lin, vals):
    items, c = lin
    return sum(k * vals[v] for v, k in items) + c


class GroundSolver:
    """One-shot solver instance; not thread safe, create one per check."""

    def __init__(self, deadline=None, max_decisions=100000, boxes=DEFAULT_BOXES,
                 verify=True, core_limit=40):
        self.deadline = deadline
        self.max_decisions = max_decisions
        self.boxes = boxes
        self.verify = verify
        self.core_limit = core_limit

    def check(self, assertions) -> CheckResult:
        try:
            return self._check(list(assertions))
        except UnsupportedFeature as e:
            return CheckResult("unknown", reason=f"unsupported: {e}")
        except ResourceOut as e:
            return CheckResult("unknown", reason=f"resource out: {e}")

    # ------------------------------------------------------------------
    def _check(self, assertions):
        enc = _Encoder()
        for a in assertions:
            if sort_of(a) != BOOL:
                raise SolverError("assertion is not Boolean")
            enc.clauses.append([enc.lit(a)])
        self.enc = enc
        self.assign = {}
        self.trail = []
        self.qhead = 0
        self.decisions = []  # (trail length, var, flipped)
        self.occurs = {}
        self.learned = []
        self.lemma_pairs = set()
        self.incomplete = False
        self.stats = {"decisions": 0, "conflicts": 0, "lemmas": 0, "lp_checks": 0}
        for ci in range(len(enc.clauses)):
            self._watch(ci)
        ok = self._propagate(range(len(enc.clauses)))
        last_atoms = None
        while True:
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise ResourceOut("deadline reached")
            if ok:
                atoms = self._asserted_atoms()
                if atoms and atoms != last_atoms:
                    last_atoms = atoms
                    core = self._relaxation_conflict(atoms)
                    if core is not None:
                        ok = self._learn([-l for l in core])
                        continue
                var = self._pick()
                if var is None:
                    status = self._full_check(atoms)
                    if status == "sat":
                        return self._finish(assertions)
                    if status == "continue":
                        ok = self._propagate(self._pending)
                        continue
                    ok = False
                    continue
                self.stats["decisions"] += 1
                if self.stats["decisions"] > self.max_decisions:
                    return CheckResult("unknown", reason="decision budget", stats=self.stats)
                self.decisions.append((len(self.trail), var, False))
                self._set(var, False)
                ok = self._propagate(())
            else:
                self.stats["conflicts"] += 1
                if not self._backtrack():
                    if self.incomplete:
                        return CheckResult("unknown", reason="feasibility box exhausted",
                                           stats=self.stats)
                    return CheckResult("unsat", stats=self.stats)
                ok = self._propagate(self.learned)

    # boolean engine ------------------------------------------------------
    def _watch(self, ci):
        for l in self.enc.clauses[ci]:
            self.occurs.setdefault(l, []).append(ci)

    def _value(self, l):
        a = self.assign.get(abs(l))
        if a is None:
            return None
        return a if l > 0 else not a

    def _set(self, var, val):
        self.assign[var] = val
        self.trail.append(var)

    def _clause_status(self, ci):
        unassigned = None
        count = 0
        for l in self.enc.clauses[ci]:
            v = self._value(l)
            if v:
                return True
            if v is None:
                count += 1
                unassigned = l
        if count == 0:
            return False
        if count == 1:
            self._set(abs(unassigned), unassigned > 0)
        return None

    def _propagate(self, pending) -> bool:
        for ci in pending:
            if self._clause_status(ci) is False:
                return False
        while self.qhead < len(self.trail):
            var = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -var if self.assign[var] else var
            for ci in self.occurs.get(false_lit, ()):
                if self._clause_status(ci) is False:
                    return False
        return True

    def _backtrack(self) -> bool:
        while self.decisions:
            size, var, flipped = self.decisions.pop()
            for v in self.trail[size:]:
                del self.assign[v]
            del self.trail[size:]
            self.qhead = size
            if not flipped:
                self.decisions.append((size, var, True))
                self._set(var, True)
                return True
        return False

    def _learn(self, clause) -> bool:
        enc = self.enc
        enc.clauses.append(list(clause))
        ci = len(enc.clauses) - 1
        self._watch(ci)
        self.learned.append(ci)
        return self._clause_status(ci) is not False and self._propagate(())

    def _pick(self):
        kind = self.enc.kind
        fallback = None
        for v in range(2, self.enc.nvars + 1):
            if v not in self.assign:
                if kind[v] != "aux":
                    return v
                if fallback is None:
                    fallback = v
        return fallback

    # theory --------------------------------------------------------------
    def _asserted_atoms(self):
        atoms = self.enc.atoms
        return tuple(v if self.assign[v] else -v for v in self.trail if v in atoms)

    def _rows(self, lits):
        index = {}
        raw = []
        for l in lits:
            items, c = self.enc.atoms[abs(l)]
            if l < 0:
                items, c = tuple((v, -k) for v, k in items), -c - 1
            raw.append((items, c))
            for v, _ in items:
                index.setdefault(v, len(index))
        n = len(index)
        rows = []
        for items, c in raw:
            a = [0] * n
            for v, k in items:
                a[index[v]] = k
            rows.append((tuple(a), c))
        return rows, index

    def _relaxation_conflict(self, lits):
        self.stats["lp_checks"] += 1
        rows, _ = self._rows(lits)
        if solve_lp(rows, len(rows[0][0]), None, self.deadline).status == "optimal":
            return None
        if len(lits) > self.core_limit:
            return list(lits)
        core = list(lits)
        for l in list(reversed(core)):
            trial = [x for x in core if x != l]
            if not trial:
                continue
            rows, _ = self._rows(trial)
            if solve_lp(rows, len(rows[0][0]), None, self.deadline).status != "optimal":
                core = trial
        return core

    def _full_check(self, atoms):
        enc = self.enc
        vals = [0] * len(enc.ivars)
        if atoms:
            rows, index = self._rows(atoms)
            res = integer_feasible(rows, len(index), self.boxes, self.deadline)
            if res.status != "sat":
                if res.status == "unknown":
                    self.incomplete = True
                self._learn_blocking(atoms)
                return "conflict"
            for v, i in index.items():
                vals[v] = res.x[i]
        self.vals = vals
        lemmas = self._congruence_lemmas(vals)
        if not lemmas:
            return "sat"
        enc.clauses.extend(lemmas)
        # includes auxiliary definitions created while building the lemmas
        self._pending = list(range(self._watched_upto, len(enc.clauses)))
        for ci in self._pending:
            self._watch(ci)
            self.learned.append(ci)
        self._watched_upto = len(enc.clauses)
        return "continue"

    def _learn_blocking(self, atoms):
        enc = self.enc
        enc.clauses.append([-l for l in atoms])
        ci = len(enc.clauses) - 1
        self._watch(ci)
        self.learned.append(ci)
        self._watched_upto = len(enc.clauses)

    def _congruence_lemmas(self, vals):
        enc = self.enc
        self._watched_upto = len(enc.clauses)
        seen = {}
        out = []
        for inst in list(enc.instances):
            key = (inst.symbol, tuple(_lin_value(a, vals) for a in inst.args))
            other = seen.get(key)
            if other is None:
                seen[key] = inst
                continue
            if self._inst_value(inst, vals) == self._inst_value(other, vals):
                continue
            pair = (id(other), id(inst))
            if pair in self.lemma_pairs:
                raise SolverError("congruence lemma did not take effect")
            self.lemma_pairs.add(pair)
            self.stats["lemmas"] += 1
            lits = []
            for a, b in zip(other.args, inst.args):
                d = dict(a[0])
                for v, k in b[0]:
                    d[v] = d.get(v, 0) - k
                lits.append(-enc.eq(d, b[1] - a[1]))
            if inst.sort == BOOL:
                lits.append(enc.iff(other.ref, inst.ref))
            else:
                lits.append(enc.eq({other.ref: 1, inst.ref: -1} if other.ref != inst.ref else {}, 0))
            out.append(lits)
        return out

    def _inst_value(self, inst, vals):
        if inst.sort == BOOL:
            return self.assign.get(inst.ref, False)
        return vals[inst.ref]

    def _finish(self, assertions):
        enc = self.enc
        vals = self.vals
        values = {}
        for key, i in enc.ivar_index.items():
            if key[0] == "var":
                values[key[1]] = vals[i]
        for name, v in enc.bool_names.items():
            values[name] = self.assign.get(v, False)
        apps = {}
        for inst in enc.instances:
            args = tuple(_lin_value(a, vals) for a in inst.args)
            apps.setdefault(inst.symbol, {})[args] = self._inst_value(inst, vals)
        model = GroundModel(values, apps)
        if self.verify:
            for a in assertions:
                if evaluate(a, values, model) is not True:
                    raise SolverError("ground model fails its own assertions")
        return CheckResult("sat", model, stats=self.stats)


def check(assertions, deadline=None, **kw) -> CheckResult:
    return GroundSolver(deadline=deadline, **kw).check(assertions)

"""Model-based quantifier instantiation with learned piecewise-linear candidates."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import ResourceOut, SolverError, UnsupportedFeature
from .ground import GroundSolver, extract_points
from .pwl import (LinearForm, evaluate_pwl, fit_function, fit_predicate_greedy,
                  fit_predicate_recursive, param_vars, pwl_to_term, value_table)
from .simplex import DEFAULT_BOXES
from .smtlib import Declaration, Script, relax_sorts
from .terms import (BOOL, And, Apply, BoolConst, Exists, Forall, Implies,
                    IntConst, Ite, Not, Or, const, evaluate, has_quantifier,
                    instantiate, negate_for_check, push_not, simplify,
                    substitute, substitute_model, Var)

MODES = ("smart", "non-smart", "off")

SAT, UNSAT, UNKNOWN, RESOURCE_OUT = "sat", "unsat", "unknown", "resourceout"


@dataclass
class Config:
    mode: str = "smart"
    max_iters: int = 500
    timeout: float = 30.0
    boxes: tuple = DEFAULT_BOXES
    external_solver: str | None = None
    verify_models: bool = True
    seed: int = 0
    stop_on_first_unsat: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.max_iters <= 0:
            raise ValueError("max_iters must be positive")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")


class CandidateModel:
    """Interpretation of every declared symbol: a PWL term, or a constant for 0-ary symbols."""

    def __init__(self, declarations, interp):
        self.declarations = list(declarations)
        self.interp = dict(interp)
        self._decls = {d.name: d for d in self.declarations}
        missing = [d.name for d in self.declarations if d.name not in self.interp]
        if missing:
            raise ValueError(f"no interpretation for {missing}")

    def definition(self, sym):
        d = self._decls[sym]
        t = self.interp[sym]
        if d.arity == 0:
            return (), const(t)
        params = param_vars(d.arity, d.arg_sorts)
        xs = [Ite(p, IntConst(1), IntConst(0)) if p.sort == BOOL else p for p in params]
        return params, pwl_to_term(t, xs)

    def apply(self, sym, args):
        t = self.interp[sym]
        if self._decls[sym].arity == 0:
            return t
        return evaluate_pwl(t, tuple(int(a) for a in args))

    def __repr__(self):
        return f"CandidateModel({self.interp!r})"


@dataclass
class SolveResult:
    verdict: str
    model: CandidateModel | None = None
    certificate: list = field(default_factory=list)
    reason: str | None = None
    stats: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)  # per iteration: [(assertion index, valuation)]


class Inconclusive(Exception):
    pass


# ---------------------------------------------------------------------------
# candidate construction

def build_candidate(gm, decls, mode="smart", stop_on_first_unsat=True, deadline=None):
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    interp = {}
    for d in decls:
        pts = extract_points(gm, d.name)
        pred = d.sort == BOOL
        if d.arity == 0:
            interp[d.name] = pts[0].value if pts else (False if pred else 0)
        elif not pts:
            interp[d.name] = False if pred else LinearForm((0,) * d.arity, 0)
        elif mode == "off":
            interp[d.name] = value_table(pts, False if pred else 0)
        elif not pred:
            interp[d.name] = fit_function(pts, d.arity, deadline)
        elif mode == "smart":
            interp[d.name] = fit_predicate_recursive(pts, d.arity, stop_on_first_unsat, deadline)
        else:
            interp[d.name] = fit_predicate_greedy(pts, d.arity, deadline)
    return CandidateModel(decls, interp)


def find_counterexample(m: CandidateModel, q: Forall, deadline=None, boxes=DEFAULT_BOXES):
    """Binder valuation falsifying ``q`` under ``m``, or ``None`` if ``q`` holds."""
    binders, neg = negate_for_check(q)
    query = simplify(substitute_model(neg, m))
    r = GroundSolver(deadline=deadline, boxes=boxes).check([query])
    if r.status == "unsat":
        return None
    if r.status == "unknown":
        raise Inconclusive(r.reason)
    vals = r.model.values
    return {name: vals.get(name, False if sort == BOOL else 0) for name, sort in binders}


# ---------------------------------------------------------------------------
# preprocessing

class _Normalizer:
    def __init__(self, decls):
        self.used = {d.name for d in decls}
        self.local = set()  # binder names taken inside the current assertion
        self.skolems = []

    def fresh(self, name, local=False):
        k = 0
        cand = name
        while cand in self.used or cand in self.local:
            k += 1
            cand = f"{name}!{k}"
        (self.local if local else self.used).add(cand)
        return cand

    def split(self, t, out):
        if isinstance(t, And):
            for a in t.args:
                self.split(a, out)
        elif isinstance(t, Not) and isinstance(t.arg, Or):
            for a in t.arg.args:
                self.split(Not(a), out)
        elif isinstance(t, Exists) or (isinstance(t, Not) and isinstance(t.arg, Forall)):
            binders, body = (t.binders, t.body) if isinstance(t, Exists) else \
                (t.arg.binders, Not(t.arg.body))
            mapping = {}
            for name, sort in binders:
                sk = self.fresh(name)
                self.skolems.append(Declaration(sk, (), sort))
                mapping[name] = Apply(sk, (), sort)
            self.split(substitute(body, mapping), out)
        else:
            out.append(self.prenex(t))

    def prenex(self, t):
        """Pull universal quantifiers out of positive positions."""
        if not has_quantifier(t):
            return t
        self.local = set()
        binders, body = self._pull(t)
        if has_quantifier(body):
            raise UnsupportedFeature("quantifier alternation")
        return Forall(tuple(binders), body)

    def _pull(self, t):
        if isinstance(t, Forall):
            mapping, binders = {}, []
            for name, sort in t.binders:
                new = self.fresh(name, local=True)
                binders.append((new, sort))
                if new != name:
                    mapping[name] = Var(new, sort)
            inner_b, inner = self._pull(substitute(t.body, mapping) if mapping else t.body)
            return binders + inner_b, inner
        if isinstance(t, Not) and isinstance(t.arg, Exists):
            return self._pull(Forall(t.arg.binders, Not(t.arg.body)))
        if isinstance(t, Not) and has_quantifier(t.arg):
            pushed = push_not(t.arg)
            if pushed == t:
                raise UnsupportedFeature("negated quantifier")
            return self._pull(pushed)
        if isinstance(t, (And, Or)):
            binders, args = [], []
            for a in t.args:
                b, body = self._pull(a)
                binders += b
                args.append(body)
            return binders, type(t)(tuple(args))
        if isinstance(t, Implies):
            if has_quantifier(t.lhs):
                raise UnsupportedFeature("quantifier in implication premise")
            b, body = self._pull(t.rhs)
            return b, Implies(t.lhs, body)
        if has_quantifier(t):
            raise UnsupportedFeature(f"quantifier below {type(t).__name__}")
        return [], t


def normalize(script: Script):
    """Split a script into ground assertions, universal assertions and Skolem declarations."""
    norm = _Normalizer(script.declarations)
    parts = []
    for a in script.assertions:
        norm.split(a, parts)
    ground = [p for p in parts if not isinstance(p, Forall)]
    quants = [p for p in parts if isinstance(p, Forall)]
    return ground, quants, norm.skolems


# ---------------------------------------------------------------------------
# main loop

def solve(script: Script, cfg: Config | None = None) -> SolveResult:
    cfg = cfg or Config()
    start = time.monotonic()
    deadline = start + cfg.timeout if cfg.timeout else None
    stats = {"iterations": 0, "instantiations": 0, "fit_calls": 0,
             "ground_time": 0.0, "fit_time": 0.0, "check_time": 0.0}
    result = SolveResult(UNKNOWN, stats=stats)
    try:
        script = relax_sorts(script)
        try:
            ground, quants, skolems = normalize(script)
        except UnsupportedFeature as e:
            result.reason = f"unsupported: {e}"
            return result
        decls = list(script.declarations) + skolems
        _loop(ground, quants, decls, cfg, deadline, result)
    except ResourceOut as e:
        result.verdict = RESOURCE_OUT
        result.reason = str(e)
    finally:
        stats["time"] = time.monotonic() - start
    return result


def _loop(ground, quants, decls, cfg, deadline, result):
    stats = result.stats
    insts = []
    seen = set()
    nfun = sum(1 for d in decls if d.arity > 0)
    for _ in range(cfg.max_iters):
        stats["iterations"] += 1
        t0 = time.monotonic()
        r = GroundSolver(deadline=deadline, boxes=cfg.boxes,
                         verify=cfg.verify_models).check(ground + insts)
        stats["ground_time"] += time.monotonic() - t0
        if r.status == "unsat":
            result.verdict = UNSAT
            result.certificate = list(insts)
            return
        if r.status == "unknown":
            result.reason = f"ground check: {r.reason}"
            return
        t0 = time.monotonic()
        cand = build_candidate(r.model, decls, cfg.mode, cfg.stop_on_first_unsat, deadline)
        stats["fit_calls"] += nfun
        stats["fit_time"] += time.monotonic() - t0
        t0 = time.monotonic()
        found = []
        try:
            for qi, q in enumerate(quants):
                c = find_counterexample(cand, q, deadline, cfg.boxes)
                if c is not None:
                    found.append((qi, c))
        except Inconclusive as e:
            result.reason = f"counterexample check: {e}"
            return
        finally:
            stats["check_time"] += time.monotonic() - t0
        result.counterexamples.append(found)
        if not found:
            if cfg.verify_models:
                verify_model(cand, ground, quants, deadline, cfg.boxes)
            result.verdict = SAT
            result.model = cand
            return
        for qi, c in found:
            key = (qi, tuple(sorted(c.items())))
            if key in seen:
                raise SolverError(f"instantiation {key} repeated")
            seen.add(key)
            insts.append(instantiate(quants[qi], c))
            stats["instantiations"] += 1
    result.reason = "iteration limit"


def verify_model(m: CandidateModel, ground, quants, deadline=None, boxes=DEFAULT_BOXES):
    """Raise :class:`SolverError` unless ``m`` satisfies every assertion."""
    for g in ground:
        if evaluate(g, {}, m) is not True:
            raise SolverError("candidate model violates a ground assertion")
    for q in quants:
        binders, neg = negate_for_check(q)
        r = GroundSolver(deadline=deadline, boxes=boxes).check([substitute_model(neg, m)])
        if r.status != "unsat":
            raise SolverError(f"candidate model fails re-verification ({r.status})")


def replay_certificate(script: Script, certificate, deadline=None) -> bool:
    """True when the ground assertions plus ``certificate`` are ground-unsat."""
    ground, _, _ = normalize(relax_sorts(script))
    return GroundSolver(deadline=deadline).check(list(ground) + list(certificate)).status == "unsat"

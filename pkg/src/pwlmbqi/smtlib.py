"""Reader and printer for the SMT-LIB 2.6 subset used by UFLIA problems.

``define-fun`` and ``let`` are macro-expanded while parsing, so the resulting
:class:`Script` only contains declarations and assertions. ``div`` and ``mod``
follow SMT-LIB Euclidean semantics (remainder always non-negative).
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .errors import SmtParseError, SortError, UnsupportedFeature
from .terms import (BOOL, INT, Add, And, Apply, BoolConst, Cmp, Div, Exists,
                    Forall, Iff, Implies, IntConst, Ite, Mod, MulConst, Neg,
                    Not, Or, Sub, Var, sort_of, substitute)

log = logging.getLogger(__name__)

KNOWN_LOGICS = {"UFLIA", "LIA", "QF_UFLIA", "QF_LIA", "UF", "QF_UF", "ALL",
                "UFIDL", "QF_UFIDL", "IDL", "QF_IDL", "AUFLIA"}


@dataclass(frozen=True)
class Declaration:
    name: str
    arg_sorts: tuple
    sort: str

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


@dataclass
class Script:
    declarations: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    logic: str | None = None
    info: list = field(default_factory=list)
    sorts: list = field(default_factory=list)

    def decl_map(self) -> dict:
        return {d.name: d for d in self.declarations}

    def function_symbols(self) -> list:
        """Names of uninterpreted symbols with at least one argument."""
        return [d.name for d in self.declarations if d.arity > 0]


# ---------------------------------------------------------------------------
# lexer / s-expressions

@dataclass(frozen=True)
class Tok:
    kind: str  # sym, num, str, kw, dec
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


_SIMPLE_SYM = re.compile(r"[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*\Z")
_RESERVED = {"let", "forall", "exists", "match", "par", "!", "_", "as", "true", "false",
             "NUMERAL", "DECIMAL", "STRING"}


def _tokens(text: str):
    i, line, col, n = 0, 1, 1, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch in "()":
            yield Tok(ch, ch, line, col)
            i += 1
            col += 1
            continue
        if ch == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SmtParseError("unterminated quoted symbol", line, col)
            body = text[i + 1:j]
            line += body.count("\n")
            col = (len(body) - body.rfind("\n")) if "\n" in body else col + len(body) + 2
            i = j + 1
            yield Tok("sym", body, start_line, start_col)
            continue
        if ch == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise SmtParseError("unterminated string literal", line, col)
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        buf.append('"')
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            s = "".join(buf)
            line += s.count("\n")
            col = (len(s) - s.rfind("\n")) if "\n" in s else col + (j + 1 - i)
            i = j + 1
            yield Tok("str", s, start_line, start_col)
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in '();|"':
            j += 1
        word = text[i:j]
        col += j - i
        i = j
        if word.isdigit():
            yield Tok("num", word, start_line, start_col)
        elif re.fullmatch(r"\d+\.\d+", word):
            yield Tok("dec", word, start_line, start_col)
        elif word.startswith(":"):
            yield Tok("kw", word, start_line, start_col)
        elif word.startswith("#"):
            yield Tok("bin", word, start_line, start_col)
        else:
            yield Tok("sym", word, start_line, start_col)


def read_sexprs(text: str) -> list:
    stack: list = [SList([], 0, 0)]
    for tok in _tokens(text):
        if tok.kind == "(":
            stack.append(SList([], tok.line, tok.col))
        elif tok.kind == ")":
            if len(stack) == 1:
                raise SmtParseError("unbalanced ')'", tok.line, tok.col)
            done = stack.pop()
            stack[-1].items.append(done)
        else:
            stack[-1].items.append(tok)
    if len(stack) != 1:
        top = stack[-1]
        raise SmtParseError("missing ')'", top.line, top.col)
    return stack[0].items


def _pos(x):
    return x.line, x.col


def _sym(x, what="symbol") -> str:
    if isinstance(x, Tok) and x.kind == "sym":
        return x.text
    raise SmtParseError(f"expected {what}", *_pos(x))


# ---------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self):
        self.script = Script()
        self.decls: dict = {}
        self.macros: dict = {}  # name -> (params, body, sort)
        self.sorts: set = set()

    # sorts
    def sort(self, x) -> str:
        if isinstance(x, Tok) and x.kind == "sym":
            if x.text in (INT, BOOL) or x.text in self.sorts:
                return x.text
            if x.text == "Real":
                raise UnsupportedFeature("sort Real")
            raise SortError(f"{x.line}:{x.col}: unknown sort {x.text}")
        raise UnsupportedFeature(f"{x.line}:{x.col}: parametric or indexed sort")

    def declare(self, name, arg_sorts, sort, where):
        if name in self.decls or name in self.macros:
            raise SortError(f"{where[0]}:{where[1]}: symbol {name} declared twice")
        d = Declaration(name, tuple(arg_sorts), sort)
        self.decls[name] = d
        self.script.declarations.append(d)

    # commands
    def command(self, cmd):
        if not isinstance(cmd, SList) or not cmd.items:
            raise SmtParseError("expected a command", *_pos(cmd))
        head = _sym(cmd.items[0], "command name")
        args = cmd.items[1:]
        where = _pos(cmd)
        if head == "set-logic":
            logic = _sym(args[0], "logic")
            if logic not in KNOWN_LOGICS:
                log.warning("unknown logic %s accepted; only the term language is checked", logic)
            self.script.logic = logic
        elif head == "set-info":
            key = args[0].text if isinstance(args[0], Tok) else ""
            val = " ".join(a.text for a in args[1:] if isinstance(a, Tok))
            self.script.info.append((key, val))
        elif head in ("set-option", "get-info", "get-option", "check-sat", "get-model",
                      "exit", "get-assertions"):
            pass
        elif head == "declare-sort":
            name = _sym(args[0])
            arity = int(args[1].text) if len(args) > 1 else 0
            if arity:
                raise UnsupportedFeature(f"{where[0]}:{where[1]}: parametric sort {name}")
            if name in self.sorts or name in (INT, BOOL):
                raise SortError(f"{where[0]}:{where[1]}: sort {name} declared twice")
            self.sorts.add(name)
            self.script.sorts.append(name)
        elif head == "declare-fun":
            if len(args) != 3 or not isinstance(args[1], SList):
                raise SmtParseError("malformed declare-fun", *where)
            self.declare(_sym(args[0]), [self.sort(s) for s in args[1].items],
                         self.sort(args[2]), where)
        elif head == "declare-const":
            if len(args) != 2:
                raise SmtParseError("malformed declare-const", *where)
            self.declare(_sym(args[0]), [], self.sort(args[1]), where)
        elif head == "define-fun":
            if len(args) != 4 or not isinstance(args[1], SList):
                raise SmtParseError("malformed define-fun", *where)
            name = _sym(args[0])
            params = []
            for p in args[1].items:
                if not isinstance(p, SList) or len(p.items) != 2:
                    raise SmtParseError("malformed parameter", *_pos(p))
                params.append(Var(_sym(p.items[0]), self.sort(p.items[1])))
            sort = self.sort(args[2])
            body = self.term(args[3], {p.name: p for p in params})
            self.expect(body, sort, args[3])
            if name in self.decls or name in self.macros:
                raise SortError(f"{where[0]}:{where[1]}: symbol {name} declared twice")
            self.macros[name] = (tuple(params), body, sort)
        elif head == "assert":
            if len(args) != 1:
                raise SmtParseError("assert takes one term", *where)
            t = self.term(args[0], {})
            self.expect(t, BOOL, args[0])
            self.script.assertions.append(t)
        else:
            raise UnsupportedFeature(f"{where[0]}:{where[1]}: command {head}")

    def expect(self, t, sort, x):
        s = sort_of(t)
        if s != sort:
            raise SortError(f"{x.line}:{x.col}: expected sort {sort}, got {s}")

    # terms
    def term(self, x, scope):
        if isinstance(x, Tok):
            return self.atom(x, scope)
        if not x.items:
            raise SmtParseError("empty application", *_pos(x))
        head = x.items[0]
        if isinstance(head, SList):
            raise UnsupportedFeature(f"{x.line}:{x.col}: indexed or qualified identifier")
        if head.kind != "sym":
            raise SmtParseError("expected operator", *_pos(head))
        op = head.text
        rest = x.items[1:]
        if op == "let":
            return self.let(x, rest, scope)
        if op in ("forall", "exists"):
            return self.quant(op, x, rest, scope)
        if op == "!":
            return self.term(rest[0], scope)
        if op in ("match", "_", "as", "lambda"):
            raise UnsupportedFeature(f"{x.line}:{x.col}: {op}")
        args = [self.term(a, scope) for a in rest]
        return self.app(op, args, x, rest)

    def atom(self, x, scope):
        if x.kind == "num":
            return IntConst(int(x.text))
        if x.kind == "dec":
            raise UnsupportedFeature(f"{x.line}:{x.col}: decimal literal")
        if x.kind != "sym":
            raise UnsupportedFeature(f"{x.line}:{x.col}: literal {x.text}")
        name = x.text
        if name in scope:
            return scope[name]
        if name == "true":
            return BoolConst(True)
        if name == "false":
            return BoolConst(False)
        return self.app(name, [], x, [])

    def let(self, x, rest, scope):
        if len(rest) != 2 or not isinstance(rest[0], SList):
            raise SmtParseError("malformed let", *_pos(x))
        inner = dict(scope)
        for b in rest[0].items:
            if not isinstance(b, SList) or len(b.items) != 2:
                raise SmtParseError("malformed let binding", *_pos(b))
            inner[_sym(b.items[0])] = self.term(b.items[1], scope)
        return self.term(rest[1], inner)

    def quant(self, op, x, rest, scope):
        if len(rest) != 2 or not isinstance(rest[0], SList) or not rest[0].items:
            raise SmtParseError(f"malformed {op}", *_pos(x))
        inner = dict(scope)
        binders = []
        for b in rest[0].items:
            if not isinstance(b, SList) or len(b.items) != 2:
                raise SmtParseError("malformed binder", *_pos(b))
            name, sort = _sym(b.items[0]), self.sort(b.items[1])
            binders.append((name, sort))
            inner[name] = Var(name, sort)
        body = self.term(rest[1], inner)
        self.expect(body, BOOL, rest[1])
        cls = Forall if op == "forall" else Exists
        return cls(tuple(binders), body)

    def app(self, op, args, x, raw):
        where = f"{x.line}:{x.col}"

        def need(sort, lo=1, hi=None):
            if len(args) < lo or (hi is not None and len(args) > hi):
                raise SmtParseError(f"wrong number of arguments to {op}", x.line, x.col)
            for a, r in zip(args, raw):
                self.expect(a, sort, r)

        if op == "+":
            need(INT)
            return Add(tuple(args))
        if op == "-":
            need(INT)
            if len(args) == 1:
                a = args[0]
                if isinstance(a, IntConst):
                    return IntConst(-a.value)
                return Neg(a)
            return Sub(tuple(args))
        if op == "*":
            need(INT, 2)
            k, others = 1, []
            for a in args:
                c = _const_value(a)
                if c is None:
                    others.append(a)
                else:
                    k *= c
            if len(others) > 1:
                raise UnsupportedFeature(f"{where}: nonlinear multiplication")
            return IntConst(k) if not others else MulConst(k, others[0])
        if op in ("div", "mod"):
            need(INT, 2, 2)
            d = _const_value(args[1])
            if d is None:
                raise UnsupportedFeature(f"{where}: {op} by a non-constant")
            return (Div if op == "div" else Mod)(args[0], d)
        if op == "abs":
            need(INT, 1, 1)
            a = args[0]
            return Ite(Cmp(">=", a, IntConst(0)), a, Neg(a))
        if op in ("<", "<=", ">", ">="):
            need(INT, 2)
            return _chain(args, lambda a, b: Cmp(op, a, b))
        if op == "=":
            self._same_sort(op, args, x)
            if sort_of(args[0]) == BOOL:
                return _chain(args, Iff)
            return _chain(args, lambda a, b: Cmp("=", a, b))
        if op == "distinct":
            self._same_sort(op, args, x)
            eq = Iff if sort_of(args[0]) == BOOL else (lambda a, b: Cmp("=", a, b))
            parts = [Not(eq(args[i], args[j]))
                     for i in range(len(args)) for j in range(i + 1, len(args))]
            return parts[0] if len(parts) == 1 else And(tuple(parts))
        if op in ("and", "or"):
            need(BOOL, 0)
            return (And if op == "and" else Or)(tuple(args))
        if op == "not":
            need(BOOL, 1, 1)
            return Not(args[0])
        if op == "=>":
            need(BOOL, 2)
            t = args[-1]
            for a in reversed(args[:-1]):
                t = Implies(a, t)
            return t
        if op == "xor":
            need(BOOL, 2)
            t = args[0]
            for a in args[1:]:
                t = Not(Iff(t, a))
            return t
        if op == "ite":
            if len(args) != 3:
                raise SmtParseError("ite takes three arguments", x.line, x.col)
            self.expect(args[0], BOOL, raw[0])
            if sort_of(args[1]) != sort_of(args[2]):
                raise SortError(f"{where}: ite branches have different sorts")
            return Ite(args[0], args[1], args[2])
        if op in self.decls:
            d = self.decls[op]
            if len(args) != d.arity:
                raise SortError(f"{where}: {op} expects {d.arity} arguments")
            for a, s, r in zip(args, d.arg_sorts, raw):
                self.expect(a, s, r)
            return Apply(op, tuple(args), d.sort)
        if op in self.macros:
            params, body, _ = self.macros[op]
            if len(args) != len(params):
                raise SortError(f"{where}: {op} expects {len(params)} arguments")
            for a, p, r in zip(args, params, raw):
                self.expect(a, p.sort, r)
            return substitute(body, {p.name: a for p, a in zip(params, args)})
        if op in ("select", "store", "str.++", "bvadd", "to_real", "to_int", "is_int"):
            raise UnsupportedFeature(f"{where}: {op}")
        raise SortError(f"{where}: unknown symbol {op}")

    def _same_sort(self, op, args, x):
        if len(args) < 2:
            raise SmtParseError(f"{op} needs at least two arguments", x.line, x.col)
        s = sort_of(args[0])
        if any(sort_of(a) != s for a in args):
            raise SortError(f"{x.line}:{x.col}: arguments of {op} differ in sort")


def _const_value(t):
    if isinstance(t, IntConst):
        return t.value
    if isinstance(t, Neg) and isinstance(t.arg, IntConst):
        return -t.arg.value
    if isinstance(t, MulConst) and isinstance(t.arg, IntConst):
        return t.coef * t.arg.value
    return None


def _chain(args, mk):
    parts = [mk(a, b) for a, b in zip(args, args[1:])]
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def parse_script(text: str) -> Script:
    p = _Parser()
    for cmd in read_sexprs(text):
        p.command(cmd)
    return p.script


def parse_term(text: str, script: Script | None = None, variables=()):
    """Parse a single term against the declarations of ``script``."""
    p = _Parser()
    if script is not None:
        p.sorts = set(script.sorts)
        p.decls = script.decl_map()
    items = read_sexprs(text)
    if len(items) != 1:
        raise SmtParseError("expected exactly one term")
    return p.term(items[0], {v.name: v for v in variables})


def parse_model(text: str, script: Script) -> dict:
    """Parse a ``get-model`` response into ``{symbol: (params, body)}``.

    Each definition is sort-checked against the declaration in ``script``.
    """
    items = read_sexprs(text)
    if len(items) == 1 and isinstance(items[0], SList):
        items = items[0].items
    if items and isinstance(items[0], Tok) and items[0].text == "model":
        items = items[1:]
    p = _Parser()
    p.sorts = set(script.sorts)
    p.decls = script.decl_map()
    out = {}
    for d in items:
        if not (isinstance(d, SList) and d.items and _sym(d.items[0]) == "define-fun"):
            raise SmtParseError("expected define-fun in model", *_pos(d))
        _, name_tok, params_x, sort_x, body_x = d.items
        name = _sym(name_tok)
        decl = p.decls.get(name)
        if decl is None:
            raise SortError(f"model defines undeclared symbol {name}")
        params = tuple(Var(_sym(q.items[0]), p.sort(q.items[1])) for q in params_x.items)
        if tuple(v.sort for v in params) != decl.arg_sorts or p.sort(sort_x) != decl.sort:
            raise SortError(f"model definition of {name} does not match its declaration")
        body = p.term(body_x, {v.name: v for v in params})
        p.expect(body, decl.sort, body_x)
        out[name] = (params, body)
    return out


# ---------------------------------------------------------------------------
# sort relaxation

def _relax_sort(s):
    return s if s in (INT, BOOL) else INT


def _relax_term(t):
    if isinstance(t, Var):
        return Var(t.name, _relax_sort(t.sort))
    if isinstance(t, Apply):
        return Apply(t.symbol, tuple(_relax_term(a) for a in t.args), _relax_sort(t.sort))
    if isinstance(t, (Forall, Exists)):
        return type(t)(tuple((n, _relax_sort(s)) for n, s in t.binders), _relax_term(t.body))
    from .terms import children, rebuild
    kids = children(t)
    if not kids:
        return t
    return rebuild(t, [_relax_term(k) for k in kids])


def relax_sorts(s: Script) -> Script:
    """Replace every uninterpreted sort by Int and drop the sort declarations."""
    if not s.sorts:
        return s
    decls = [Declaration(d.name, tuple(_relax_sort(a) for a in d.arg_sorts), _relax_sort(d.sort))
             for d in s.declarations]
    return Script(decls, [_relax_term(a) for a in s.assertions], s.logic, list(s.info), [])


# ---------------------------------------------------------------------------
# printing

def quote_symbol(name: str) -> str:
    if _SIMPLE_SYM.match(name) and name not in _RESERVED:
        return name
    return f"|{name}|"


def print_int(v: int) -> str:
    return str(v) if v >= 0 else f"(- {-v})"


_OPNAMES = {Add: "+", Sub: "-", And: "and", Or: "or"}


def print_term(t) -> str:
    parts: list = []
    _emit(t, parts)
    return "".join(parts)


def _emit(t, out):
    if isinstance(t, IntConst):
        out.append(print_int(t.value))
    elif isinstance(t, BoolConst):
        out.append("true" if t.value else "false")
    elif isinstance(t, Var):
        out.append(quote_symbol(t.name))
    elif isinstance(t, Apply):
        if not t.args:
            out.append(quote_symbol(t.symbol))
        else:
            _emit_app(quote_symbol(t.symbol), t.args, out)
    elif type(t) in _OPNAMES:
        _emit_app(_OPNAMES[type(t)], t.args, out)
    elif isinstance(t, Neg):
        _emit_app("-", (t.arg,), out)
    elif isinstance(t, MulConst):
        out.append(f"(* {print_int(t.coef)} ")
        _emit(t.arg, out)
        out.append(")")
    elif isinstance(t, (Div, Mod)):
        out.append("(div " if isinstance(t, Div) else "(mod ")
        _emit(t.arg, out)
        out.append(f" {print_int(t.divisor)})")
    elif isinstance(t, Cmp):
        _emit_app(t.op, (t.lhs, t.rhs), out)
    elif isinstance(t, Iff):
        _emit_app("=", (t.lhs, t.rhs), out)
    elif isinstance(t, Not):
        _emit_app("not", (t.arg,), out)
    elif isinstance(t, Implies):
        _emit_app("=>", (t.lhs, t.rhs), out)
    elif isinstance(t, Ite):
        _emit_app("ite", (t.cond, t.then, t.else_), out)
    elif isinstance(t, (Forall, Exists)):
        out.append("(forall (" if isinstance(t, Forall) else "(exists (")
        out.append(" ".join(f"({quote_symbol(n)} {quote_symbol(s)})" for n, s in t.binders))
        out.append(") ")
        _emit(t.body, out)
        out.append(")")
    else:
        raise TypeError(f"cannot print {t!r}")


def _emit_app(name, args, out):
    out.append("(" + name)
    for a in args:
        out.append(" ")
        _emit(a, out)
    out.append(")")


def print_declaration(d: Declaration) -> str:
    args = " ".join(quote_symbol(s) for s in d.arg_sorts)
    return f"(declare-fun {quote_symbol(d.name)} ({args}) {quote_symbol(d.sort)})"


def print_script(s: Script) -> str:
    lines = []
    if s.logic:
        lines.append(f"(set-logic {s.logic})")
    for name in s.sorts:
        lines.append(f"(declare-sort {quote_symbol(name)} 0)")
    lines.extend(print_declaration(d) for d in s.declarations)
    lines.extend(f"(assert {print_term(a)})" for a in s.assertions)
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


def print_definition(decl: Declaration, params, body) -> str:
    ps = " ".join(f"({quote_symbol(p.name)} {quote_symbol(p.sort)})" for p in params)
    return f"(define-fun {quote_symbol(decl.name)} ({ps}) {quote_symbol(decl.sort)} {print_term(body)})"


def print_model(m) -> str:
    """Render a candidate model as a ``get-model`` response."""
    lines = ["("]
    for d in m.declarations:
        params, body = m.definition(d.name)
        lines.append("  " + print_definition(d, params, body))
    lines.append(")")
    return "\n".join(lines)

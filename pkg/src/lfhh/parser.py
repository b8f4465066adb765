"""Recursive-descent parsers for signatures, judgments and HH programs."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .encoding import (
    And, AtomD, AtomG, ForallD, ForallG, HHProgram, Hastype, Implies, ImpliesD, Istype, TrueG,
)
from .syntax import (
    TM, TY, App, Arrow, BVar, Const, FamApp, FamConst, FamilyDecl, KindPi, Lam, LfContext,
    LfDecl, LfFamily, LfObject, LfSignature, MetaVar, Name, ObjectDecl, Pi, SApp, SBVar,
    SConst, SimpleType, SLam, STerm, SVar, TYPE, Var,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0,
                 expected: frozenset[str] = frozenset()):
        self.line, self.col, self.expected = line, col, expected
        where = f"{line}:{col}: " if line else ""
        exp = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{where}{message}{exp}")


class UnboundName(ParseError):
    pass


_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<arrow>->)
  | (?P<imp>=>)
  | (?P<meta>\?[A-Za-z_][A-Za-z0-9_']*)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[{}\[\]().:&\\])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            out.append(Token("punct" if kind in ("arrow", "imp") else kind, tok, line,
                             pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Stream:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        t = self.peek
        return t.kind == "punct" and t.text in texts

    def at_id(self, *words: str) -> bool:
        return self.peek.kind == "id" and (not words or self.peek.text in words)

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message: str, expected=()) -> ParseError:
        t = self.peek
        got = t.text or "end of input"
        return ParseError(f"{message}, found {got!r}", t.line, t.col, frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}", {text})
        return self.next()

    def ident(self) -> Token:
        if self.peek.kind != "id":
            raise self.error("expected an identifier", {"identifier"})
        return self.next()


# ---------------------------------------------------------------------------
# LF: raw named trees, resolved to the right level afterwards

@dataclass(frozen=True)
class _R:
    tag: str            # id | app | pi | lam | type
    tok: Token
    a: object = None
    b: object = None
    name: str | None = None


def _lf_expr(s: _Stream) -> _R:
    if s.at("{", "["):
        open_tok = s.next()
        close = "}" if open_tok.text == "{" else "]"
        x = s.ident()
        s.expect(":")
        dom = _lf_expr(s)
        s.expect(close)
        body = _lf_expr(s)
        return _R("pi" if close == "}" else "lam", open_tok, dom, body, x.text)
    left = _lf_app(s)
    if s.at("->"):
        tok = s.next()
        return _R("pi", tok, left, _lf_expr(s), "_")
    return left


def _lf_app(s: _Stream) -> _R:
    head = _lf_atom(s)
    while s.peek.kind == "id" or s.at("(", "[", "{"):
        if s.at("[", "{"):
            arg = _lf_expr(s)
            head = _R("app", arg.tok, head, arg)
            break
        head = _R("app", head.tok, head, _lf_atom(s))
    return head


def _lf_atom(s: _Stream) -> _R:
    if s.at("("):
        s.next()
        e = _lf_expr(s)
        s.expect(")")
        return e
    if s.peek.kind == "id":
        t = s.next()
        return _R("type", t) if t.text == "type" else _R("id", t, name=t.text)
    raise s.error("expected a term", {"identifier", "(", "[", "{"})


class _Resolver:
    """Turns raw trees into LF terms.

    ``sig`` may be None while reading a signature: unknown identifiers then
    become constants of the syntactic level they occur at, and the kernel
    reports them later.
    """

    def __init__(self, sig: LfSignature | None, ctx: LfContext | None = None):
        self.sig = sig
        self.ctx = ctx or LfContext()

    def _err(self, r: _R, msg: str, cls=ParseError):
        return cls(msg, r.tok.line, r.tok.col)

    def is_kind(self, r: _R) -> bool:
        while r.tag == "pi":
            r = r.b
        return r.tag == "type"

    def kind(self, r: _R, scope: list[str]):
        if r.tag == "type":
            return TYPE
        if r.tag == "pi":
            return KindPi(r.name, self.family(r.a, scope), self.kind(r.b, [r.name] + scope))
        raise self._err(r, "expected a kind")

    def family(self, r: _R, scope: list[str]) -> LfFamily:
        if r.tag == "pi":
            return Pi(r.name, self.family(r.a, scope), self.family(r.b, [r.name] + scope))
        if r.tag == "app":
            return FamApp(self.family(r.a, scope), self.obj(r.b, scope))
        if r.tag == "id":
            if r.name in scope:
                raise self._err(r, f"variable {r.name} used as a type family")
            if self.sig is not None:
                d = self.sig.lookup(r.name)
                if d is None:
                    raise self._err(r, f"unbound name {r.name}", UnboundName)
                if not d.is_family:
                    raise self._err(r, f"{r.name} is an object constant, not a type family")
            return FamConst(r.name)
        raise self._err(r, "expected a type family")

    def obj(self, r: _R, scope: list[str]) -> LfObject:
        if r.tag == "lam":
            return Lam(r.name, self.family(r.a, scope), self.obj(r.b, [r.name] + scope))
        if r.tag == "app":
            return App(self.obj(r.a, scope), self.obj(r.b, scope))
        if r.tag == "id":
            if r.name in scope:
                return BVar(scope.index(r.name))
            if self.ctx.lookup(r.name) is not None:
                return Var(r.name)
            if self.sig is not None:
                d = self.sig.lookup(r.name)
                if d is None:
                    raise self._err(r, f"unbound name {r.name}", UnboundName)
                if d.is_family:
                    raise self._err(r, f"{r.name} is a type family, not an object")
            return Const(r.name)
        raise self._err(r, "expected an object")


def parse_signature(text: str) -> LfSignature:
    s = _Stream(text)
    decls = []
    res = _Resolver(None)
    while s.peek.kind != "eof":
        name = s.ident()
        s.expect(":")
        if s.at("."):
            raise s.error("expected a classifier", {"identifier", "(", "{", "type"})
        r = _lf_expr(s)
        s.expect(".")
        if res.is_kind(r):
            decls.append(LfDecl(name.text, FamilyDecl(res.kind(r, []))))
        else:
            decls.append(LfDecl(name.text, ObjectDecl(res.family(r, []))))
    return LfSignature(tuple(decls))


def parse_object(text: str, sig: LfSignature, ctx: LfContext | None = None) -> LfObject:
    s = _Stream(text)
    r = _lf_expr(s)
    if s.peek.kind != "eof":
        raise s.error("unexpected trailing input", {"end of input"})
    return _Resolver(sig, ctx).obj(r, [])


def parse_family(text: str, sig: LfSignature, ctx: LfContext | None = None) -> LfFamily:
    s = _Stream(text)
    r = _lf_expr(s)
    if s.peek.kind != "eof":
        raise s.error("unexpected trailing input", {"end of input"})
    return _Resolver(sig, ctx).family(r, [])


def parse_judgment(text: str, sig: LfSignature,
                   ctx: LfContext | None = None) -> tuple[LfObject, LfFamily]:
    """Parse ``M : A`` with names resolved against ``sig`` and binders."""
    s = _Stream(text)
    m = _lf_expr(s)
    s.expect(":")
    a = _lf_expr(s)
    if s.at("."):
        s.next()
    if s.peek.kind != "eof":
        raise s.error("unexpected trailing input", {"end of input"})
    res = _Resolver(sig, ctx)
    return res.obj(m, []), res.family(a, [])


# ---------------------------------------------------------------------------
# simply typed terms and HH formulas

def _stype(s: _Stream) -> SimpleType:
    if s.at("("):
        s.next()
        t = _stype(s)
        s.expect(")")
    elif s.at_id("ty", "tm"):
        t = TY if s.next().text == "ty" else TM
    else:
        raise s.error("expected a simple type", {"ty", "tm", "("})
    if s.at("->"):
        s.next()
        return Arrow(t, _stype(s))
    return t


class _HHReader:
    def __init__(self, s: _Stream, constants: dict[Name, SimpleType],
                 free: set[Name] | None = None, metas: dict[Name, SimpleType] | None = None):
        self.s = s
        self.constants = constants
        self.free = free or set()
        self.metas = metas or {}

    def term(self, scope: list[str]) -> STerm:
        s = self.s
        if s.at("\\"):
            s.next()
            x = s.ident().text
            s.expect(":")
            ty = _stype(s)
            s.expect(".")
            return SLam(x, ty, self.term([x] + scope))
        head = self.targ(scope)
        while (s.peek.kind in ("id", "meta")
               and not s.at_id("forall", "hastype", "istype", "true")) or s.at("("):
            head = SApp(head, self.targ(scope))
        if s.at("\\"):
            head = SApp(head, self.term(scope))
        return head

    def targ(self, scope: list[str]) -> STerm:
        s = self.s
        if s.at("("):
            s.next()
            t = self.term(scope)
            s.expect(")")
            return t
        if s.peek.kind == "meta":
            tok = s.next()
            name = tok.text[1:]
            if name not in self.metas:
                raise ParseError(f"unknown metavariable {tok.text}", tok.line, tok.col)
            return MetaVar(name, self.metas[name])
        tok = s.ident()
        if tok.text in scope:
            return SBVar(scope.index(tok.text))
        if tok.text in self.free:
            return SVar(tok.text)
        if tok.text in self.constants:
            return SConst(tok.text, self.constants[tok.text])
        raise UnboundName(f"unbound name {tok.text}", tok.line, tok.col)

    def formula(self, scope: list[str]):
        s = self.s
        if s.at_id("forall"):
            s.next()
            x = s.ident().text
            s.expect(":")
            ty = _stype(s)
            s.expect(".")
            return ("all", x, ty, self.formula([x] + scope))
        left = self.conj(scope)
        if s.at("=>"):
            s.next()
            return ("imp", left, self.formula(scope))
        return left

    def conj(self, scope):
        left = self.unit(scope)
        while self.s.at("&"):
            self.s.next()
            left = ("and", left, self.unit(scope))
        return left

    def unit(self, scope):
        s = self.s
        if s.at("("):
            s.next()
            f = self.formula(scope)
            s.expect(")")
            return f
        if s.at_id("true"):
            s.next()
            return ("true",)
        if s.at_id("hastype"):
            s.next()
            t = self.targ(scope)
            a = self.targ(scope)
            return ("atom", Hastype(t, a))
        if s.at_id("istype"):
            s.next()
            return ("atom", Istype(self.targ(scope)))
        raise s.error("expected a formula", {"forall", "hastype", "istype", "true", "("})


def _to_goal(f):
    tag = f[0]
    if tag == "atom":
        return AtomG(f[1])
    if tag == "true":
        return TrueG()
    if tag == "and":
        return And(_to_goal(f[1]), _to_goal(f[2]))
    if tag == "imp":
        return Implies(_to_clause(f[1]), _to_goal(f[2]))
    return ForallG(f[1], f[2], _to_goal(f[3]))


def _to_clause(f):
    tag = f[0]
    if tag == "atom":
        return AtomD(f[1])
    if tag == "imp":
        return ImpliesD(_to_goal(f[1]), _to_clause(f[2]))
    if tag == "all":
        return ForallD(f[1], f[2], _to_clause(f[3]))
    raise ParseError(f"'{tag}' is not allowed in a program clause")


def parse_sterm(text: str, constants: dict[Name, SimpleType], free: set[Name] | None = None,
                metas: dict[Name, SimpleType] | None = None) -> STerm:
    s = _Stream(text)
    t = _HHReader(s, constants, free, metas).term([])
    if s.peek.kind != "eof":
        raise s.error("unexpected trailing input", {"end of input"})
    return t


def parse_goal(text: str, constants: dict[Name, SimpleType], free: set[Name] | None = None,
               metas: dict[Name, SimpleType] | None = None):
    s = _Stream(text)
    f = _HHReader(s, constants, free, metas).formula([])
    if s.at("."):
        s.next()
    if s.peek.kind != "eof":
        raise s.error("unexpected trailing input", {"end of input"})
    return _to_goal(f)


def parse_clause(text: str, constants: dict[Name, SimpleType], free: set[Name] | None = None,
                 metas: dict[Name, SimpleType] | None = None):
    s = _Stream(text)
    f = _HHReader(s, constants, free, metas).formula([])
    if s.at("."):
        s.next()
    if s.peek.kind != "eof":
        raise s.error("unexpected trailing input", {"end of input"})
    return _to_clause(f)


def parse_program(text: str, constants: dict[Name, SimpleType] | None = None
                  ) -> tuple[HHProgram, dict[Name, SimpleType]]:
    """Read ``name : stype.`` declarations and clauses terminated by ``.``.

    Returns the program and the constant table (given plus declared).
    """
    s = _Stream(text)
    consts = dict(constants or {})
    clauses = []
    while s.peek.kind != "eof":
        nxt = s.toks[s.i + 1]
        if s.peek.kind == "id" and nxt.kind == "punct" and nxt.text == ":" \
                and not s.at_id("forall", "hastype", "istype", "true"):
            name = s.next().text
            s.next()
            consts[name] = _stype(s)
            s.expect(".")
            continue
        f = _HHReader(s, consts).formula([])
        s.expect(".")
        clauses.append(_to_clause(f))
    return HHProgram(tuple(clauses)), consts

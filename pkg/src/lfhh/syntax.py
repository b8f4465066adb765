"""Term languages shared by the whole pipeline.

Three languages live here: LF (kinds, families, objects), the simply typed
target calculus over the base types ``ty`` and ``tm``, and the helpers both
need (fresh names, substitution, normalization).

Bound variables are de Bruijn indices (``BVar`` / ``SBVar``); binder nodes
keep a display name that is excluded from equality. Two terms are therefore
alpha-equivalent exactly when they compare equal with ``==``.
Free variables are named (``Var`` / ``SVar``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

Name = str


def fresh_name(base: Name, avoid: Iterable[Name]) -> Name:
    """Return ``base`` or ``base`` with the smallest numeric suffix not in ``avoid``."""
    avoid = set(avoid)
    if base not in avoid:
        return base
    root = re.sub(r"\d+$", "", base) or base
    i = 1
    while f"{root}{i}" in avoid:
        i += 1
    return f"{root}{i}"


# ---------------------------------------------------------------------------
# LF

@dataclass(frozen=True)
class Const:
    name: Name


@dataclass(frozen=True)
class Var:
    name: Name


@dataclass(frozen=True)
class BVar:
    index: int


@dataclass(frozen=True)
class App:
    fun: "LfObject"
    arg: "LfObject"


@dataclass(frozen=True)
class Lam:
    binder: Name = field(compare=False)
    annot: "LfFamily" = None  # type: ignore[assignment]
    body: "LfObject" = None  # type: ignore[assignment]


@dataclass(frozen=True)
class FamConst:
    name: Name


@dataclass(frozen=True)
class FamApp:
    head: "LfFamily"
    arg: "LfObject"


@dataclass(frozen=True)
class Pi:
    binder: Name = field(compare=False)
    domain: "LfFamily" = None  # type: ignore[assignment]
    body: "LfFamily" = None  # type: ignore[assignment]


@dataclass(frozen=True)
class TypeKind:
    pass


@dataclass(frozen=True)
class KindPi:
    binder: Name = field(compare=False)
    domain: "LfFamily" = None  # type: ignore[assignment]
    body: "LfKind" = None  # type: ignore[assignment]


TYPE = TypeKind()

LfObject = Union[Const, Var, BVar, App, Lam]
LfFamily = Union[FamConst, FamApp, Pi]
LfKind = Union[TypeKind, KindPi]
LfTerm = Union[LfObject, LfFamily, LfKind]


@dataclass(frozen=True)
class FamilyDecl:
    kind: LfKind


@dataclass(frozen=True)
class ObjectDecl:
    type: LfFamily


@dataclass(frozen=True)
class LfDecl:
    name: Name
    classifier: Union[FamilyDecl, ObjectDecl]

    @property
    def is_family(self) -> bool:
        return isinstance(self.classifier, FamilyDecl)


@dataclass(frozen=True)
class LfSignature:
    decls: tuple[LfDecl, ...] = ()

    def lookup(self, name: Name) -> LfDecl | None:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def names(self) -> set[Name]:
        return {d.name for d in self.decls}

    def prefix(self, n: int) -> "LfSignature":
        return LfSignature(self.decls[:n])

    def __len__(self) -> int:
        return len(self.decls)


@dataclass(frozen=True)
class LfContext:
    bindings: tuple[tuple[Name, LfFamily], ...] = ()

    def lookup(self, name: Name) -> LfFamily | None:
        for n, a in reversed(self.bindings):
            if n == name:
                return a
        return None

    def extend(self, name: Name, family: LfFamily) -> "LfContext":
        return LfContext(self.bindings + ((name, family),))

    def names(self) -> set[Name]:
        return {n for n, _ in self.bindings}


EMPTY_CONTEXT = LfContext()


def _lf_map(t: LfTerm, leaf: Callable[[LfTerm, int], LfTerm], depth: int = 0) -> LfTerm:
    """Rebuild ``t`` bottom-up, calling ``leaf(node, depth)`` on Var/BVar nodes."""
    if isinstance(t, (Var, BVar)):
        return leaf(t, depth)
    if isinstance(t, (Const, FamConst, TypeKind)):
        return t
    if isinstance(t, App):
        return App(_lf_map(t.fun, leaf, depth), _lf_map(t.arg, leaf, depth))
    if isinstance(t, FamApp):
        return FamApp(_lf_map(t.head, leaf, depth), _lf_map(t.arg, leaf, depth))
    if isinstance(t, Lam):
        return Lam(t.binder, _lf_map(t.annot, leaf, depth), _lf_map(t.body, leaf, depth + 1))
    if isinstance(t, Pi):
        return Pi(t.binder, _lf_map(t.domain, leaf, depth), _lf_map(t.body, leaf, depth + 1))
    if isinstance(t, KindPi):
        return KindPi(t.binder, _lf_map(t.domain, leaf, depth), _lf_map(t.body, leaf, depth + 1))
    raise TypeError(f"not an LF term: {t!r}")


def lf_shift(t: LfTerm, d: int, cutoff: int = 0) -> LfTerm:
    if d == 0:
        return t

    def leaf(v, depth):
        if isinstance(v, BVar) and v.index >= cutoff + depth:
            return BVar(v.index + d)
        return v
    return _lf_map(t, leaf)


def _lf_subst_index(t: LfTerm, j: int, s: LfObject) -> LfTerm:
    def leaf(v, depth):
        if isinstance(v, BVar) and v.index == j + depth:
            return lf_shift(s, depth)
        return v
    return _lf_map(t, leaf)


def lf_open(body: LfTerm, arg: LfObject) -> LfTerm:
    """Instantiate the outermost bound variable of a binder body with ``arg``."""
    return lf_shift(_lf_subst_index(body, 0, lf_shift(arg, 1)), -1)


def lf_close(t: LfTerm, name: Name) -> LfTerm:
    """Abstract the free variable ``name``; the result is a binder body."""
    def leaf(v, depth):
        if isinstance(v, Var) and v.name == name:
            return BVar(depth)
        return v
    return _lf_map(lf_shift(t, 1), leaf)


def subst_object(target: LfTerm, var: Name, replacement: LfObject) -> LfTerm:
    """Capture-avoiding substitution of ``replacement`` for the free variable ``var``."""
    def leaf(v, depth):
        if isinstance(v, Var) and v.name == var:
            return lf_shift(replacement, depth)
        return v
    return _lf_map(target, leaf)


def lf_free_vars(t: LfTerm) -> set[Name]:
    out: set[Name] = set()

    def leaf(v, depth):
        if isinstance(v, Var):
            out.add(v.name)
        return v
    _lf_map(t, leaf)
    return out


def lf_loose_bvars(t: LfTerm) -> bool:
    found = []

    def leaf(v, depth):
        if isinstance(v, BVar) and v.index >= depth:
            found.append(v)
        return v
    _lf_map(t, leaf)
    return bool(found)


def lf_constants(t: LfTerm) -> set[Name]:
    if isinstance(t, (Const, FamConst)):
        return {t.name}
    if isinstance(t, (Var, BVar, TypeKind)):
        return set()
    if isinstance(t, App):
        return lf_constants(t.fun) | lf_constants(t.arg)
    if isinstance(t, FamApp):
        return lf_constants(t.head) | lf_constants(t.arg)
    if isinstance(t, Lam):
        return lf_constants(t.annot) | lf_constants(t.body)
    if isinstance(t, (Pi, KindPi)):
        return lf_constants(t.domain) | lf_constants(t.body)
    raise TypeError(f"not an LF term: {t!r}")


def lf_size(t: LfTerm) -> int:
    """Node count with application written as juxtaposition.

    Constants, variables and binders count one each; application nodes are
    free, so ``c ([x:nat][y:num z] z)`` has size 7.
    """
    if isinstance(t, (Const, Var, BVar, FamConst, TypeKind)):
        return 1
    if isinstance(t, App):
        return lf_size(t.fun) + lf_size(t.arg)
    if isinstance(t, FamApp):
        return lf_size(t.head) + lf_size(t.arg)
    if isinstance(t, Lam):
        return 1 + lf_size(t.annot) + lf_size(t.body)
    if isinstance(t, (Pi, KindPi)):
        return 1 + lf_size(t.domain) + lf_size(t.body)
    raise TypeError(f"not an LF term: {t!r}")


def lf_normalize(t: LfTerm) -> LfTerm:
    """Beta-normalize every object occurring in ``t``.

    Only called on well-typed input, where it terminates.
    """
    if isinstance(t, (Const, Var, BVar, FamConst, TypeKind)):
        return t
    if isinstance(t, App):
        f = lf_normalize(t.fun)
        a = lf_normalize(t.arg)
        if isinstance(f, Lam):
            return lf_normalize(lf_open(f.body, a))
        return App(f, a)
    if isinstance(t, FamApp):
        return FamApp(lf_normalize(t.head), lf_normalize(t.arg))
    if isinstance(t, Lam):
        return Lam(t.binder, lf_normalize(t.annot), lf_normalize(t.body))
    if isinstance(t, Pi):
        return Pi(t.binder, lf_normalize(t.domain), lf_normalize(t.body))
    if isinstance(t, KindPi):
        return KindPi(t.binder, lf_normalize(t.domain), lf_normalize(t.body))
    raise TypeError(f"not an LF term: {t!r}")


def lf_spine(t: LfObject) -> tuple[LfObject, list[LfObject]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    return t, args[::-1]


def family_spine(a: LfFamily) -> tuple[FamConst, list[LfObject]]:
    args = []
    while isinstance(a, FamApp):
        args.append(a.arg)
        a = a.head
    if not isinstance(a, FamConst):
        raise TypeError(f"family application headed by {a!r}")
    return a, args[::-1]


# ---------------------------------------------------------------------------
# Simple types and terms

@dataclass(frozen=True)
class Ty:
    def __str__(self) -> str:
        return "ty"


@dataclass(frozen=True)
class Tm:
    def __str__(self) -> str:
        return "tm"


@dataclass(frozen=True)
class Arrow:
    dom: "SimpleType"
    cod: "SimpleType"

    def __str__(self) -> str:
        d = f"({self.dom})" if isinstance(self.dom, Arrow) else str(self.dom)
        return f"{d} -> {self.cod}"


TY = Ty()
TM = Tm()
SimpleType = Union[Ty, Tm, Arrow]


def arrows(doms: Iterable[SimpleType], cod: SimpleType) -> SimpleType:
    for d in reversed(list(doms)):
        cod = Arrow(d, cod)
    return cod


def arity(ty: SimpleType) -> int:
    n = 0
    while isinstance(ty, Arrow):
        n += 1
        ty = ty.cod
    return n


@dataclass(frozen=True)
class SConst:
    name: Name
    type: SimpleType


@dataclass(frozen=True)
class SVar:
    name: Name


@dataclass(frozen=True)
class SBVar:
    index: int


@dataclass(frozen=True)
class MetaVar:
    name: Name
    type: SimpleType


@dataclass(frozen=True)
class SApp:
    fun: "STerm"
    arg: "STerm"


@dataclass(frozen=True)
class SLam:
    binder: Name = field(compare=False)
    annot: SimpleType = None  # type: ignore[assignment]
    body: "STerm" = None  # type: ignore[assignment]


STerm = Union[SConst, SVar, SBVar, MetaVar, SApp, SLam]


class SimpleTypeError(Exception):
    pass


def sapp(fun: STerm, *args: STerm) -> STerm:
    for a in args:
        fun = SApp(fun, a)
    return fun


def st_map(t: STerm, leaf: Callable[[STerm, int], STerm], depth: int = 0) -> STerm:
    if isinstance(t, (SVar, SBVar, MetaVar)):
        return leaf(t, depth)
    if isinstance(t, SConst):
        return t
    if isinstance(t, SApp):
        return SApp(st_map(t.fun, leaf, depth), st_map(t.arg, leaf, depth))
    if isinstance(t, SLam):
        return SLam(t.binder, t.annot, st_map(t.body, leaf, depth + 1))
    raise TypeError(f"not a simply typed term: {t!r}")


def st_shift(t: STerm, d: int, cutoff: int = 0) -> STerm:
    if d == 0:
        return t

    def leaf(v, depth):
        if isinstance(v, SBVar) and v.index >= cutoff + depth:
            return SBVar(v.index + d)
        return v
    return st_map(t, leaf)


def st_subst_index(t: STerm, j: int, s: STerm) -> STerm:
    def leaf(v, depth):
        if isinstance(v, SBVar) and v.index == j + depth:
            return st_shift(s, depth)
        return v
    return st_map(t, leaf)


def st_open(body: STerm, arg: STerm) -> STerm:
    return st_shift(st_subst_index(body, 0, st_shift(arg, 1)), -1)


def st_close(t: STerm, name: Name, at: int = 0) -> STerm:
    """Abstract ``name`` into a binder sitting ``at`` binders above ``t``."""
    def leaf(v, depth):
        if isinstance(v, SVar) and v.name == name:
            return SBVar(at + depth)
        return v
    return st_map(st_shift(t, 1, at), leaf)


def st_open_at(body: STerm, arg: STerm, at: int) -> STerm:
    """Instantiate the binder ``at`` levels above ``body`` with ``arg``."""
    return st_shift(st_subst_index(body, at, st_shift(arg, at + 1)), -1, at)


def st_subst_var(t: STerm, name: Name, replacement: STerm) -> STerm:
    def leaf(v, depth):
        if isinstance(v, SVar) and v.name == name:
            return st_shift(replacement, depth)
        return v
    return st_map(t, leaf)


def st_free_vars(t: STerm) -> set[Name]:
    out: set[Name] = set()

    def leaf(v, depth):
        if isinstance(v, SVar):
            out.add(v.name)
        return v
    st_map(t, leaf)
    return out


def st_metavars(t: STerm) -> set[MetaVar]:
    out: set[MetaVar] = set()

    def leaf(v, depth):
        if isinstance(v, MetaVar):
            out.add(v)
        return v
    st_map(t, leaf)
    return out


def st_has_loose(t: STerm, depth: int = 0) -> bool:
    found = []

    def leaf(v, d):
        if isinstance(v, SBVar) and v.index >= d:
            found.append(v)
        return v
    st_map(t, leaf, depth)
    return bool(found)


def st_spine(t: STerm) -> tuple[STerm, list[STerm]]:
    args = []
    while isinstance(t, SApp):
        args.append(t.arg)
        t = t.fun
    return t, args[::-1]


def st_typeof(t: STerm, env: dict[Name, SimpleType] | None = None,
              bound: tuple[SimpleType, ...] = ()) -> SimpleType:
    """Simple type of ``t``; ``bound[0]`` types de Bruijn index 0."""
    env = env or {}
    if isinstance(t, SConst):
        return t.type
    if isinstance(t, MetaVar):
        return t.type
    if isinstance(t, SVar):
        if t.name not in env:
            raise SimpleTypeError(f"untyped free variable {t.name}")
        return env[t.name]
    if isinstance(t, SBVar):
        if t.index >= len(bound):
            raise SimpleTypeError(f"loose bound variable {t.index}")
        return bound[t.index]
    if isinstance(t, SLam):
        return Arrow(t.annot, st_typeof(t.body, env, (t.annot,) + bound))
    if isinstance(t, SApp):
        f = st_typeof(t.fun, env, bound)
        a = st_typeof(t.arg, env, bound)
        if not isinstance(f, Arrow):
            raise SimpleTypeError(f"applying a term of type {f}")
        if f.dom != a:
            raise SimpleTypeError(f"argument of type {a} where {f.dom} expected")
        return f.cod
    raise TypeError(f"not a simply typed term: {t!r}")


def st_beta(t: STerm) -> STerm:
    """Beta-normal form. Terminates on simply typed input."""
    if isinstance(t, (SConst, SVar, SBVar, MetaVar)):
        return t
    if isinstance(t, SLam):
        return SLam(t.binder, t.annot, st_beta(t.body))
    f = st_beta(t.fun)
    a = st_beta(t.arg)
    if isinstance(f, SLam):
        return st_beta(st_open(f.body, a))
    return SApp(f, a)


def st_eta_contract(t: STerm) -> STerm:
    if isinstance(t, SApp):
        return SApp(st_eta_contract(t.fun), st_eta_contract(t.arg))
    if isinstance(t, SLam):
        body = st_eta_contract(t.body)
        if (isinstance(body, SApp) and body.arg == SBVar(0)
                and not st_has_loose(body.fun, 0)):
            return st_shift(body.fun, -1)
        return SLam(t.binder, t.annot, body)
    return t


def _head_type(h: STerm, env: dict[Name, SimpleType],
               bound: tuple[SimpleType, ...]) -> SimpleType | None:
    try:
        return st_typeof(h, env, bound)
    except SimpleTypeError:
        return None


def st_eta_long(t: STerm, ty: SimpleType | None, env: dict[Name, SimpleType] | None = None,
                bound: tuple[SimpleType, ...] = ()) -> STerm:
    """Eta-expand a beta-normal term at type ``ty``.

    Heads whose type cannot be determined are left as they are.
    """
    env = env or {}
    if isinstance(ty, Arrow):
        if isinstance(t, SLam):
            return SLam(t.binder, t.annot, st_eta_long(t.body, ty.cod, env, (t.annot,) + bound))
        body = SApp(st_shift(t, 1), SBVar(0))
        return SLam("x", ty.dom, st_eta_long(body, ty.cod, env, (ty.dom,) + bound))
    if isinstance(t, SLam):
        return SLam(t.binder, t.annot, st_eta_long(t.body, None, env, (t.annot,) + bound))
    head, args = st_spine(t)
    hty = _head_type(head, env, bound)
    out = head
    for a in args:
        dom = None
        if isinstance(hty, Arrow):
            dom, hty = hty.dom, hty.cod
        else:
            hty = None
        out = SApp(out, st_eta_long(a, dom, env, bound))
    return out


def st_normalize(t: STerm, eta_long: bool = True,
                 env: dict[Name, SimpleType] | None = None) -> STerm:
    """Beta-normal form, eta-long when ``eta_long`` is set."""
    nf = st_beta(t)
    if not eta_long:
        return nf
    try:
        ty = st_typeof(nf, env)
    except SimpleTypeError:
        ty = None
    return st_eta_long(nf, ty, env)


def st_equal_modulo(a: STerm, b: STerm) -> bool:
    """Equality modulo alpha, beta and eta."""
    return st_eta_contract(st_beta(a)) == st_eta_contract(st_beta(b))


def alpha_equal(a, b) -> bool:
    """Alpha-equivalence at any syntactic level.

    Binder names are excluded from equality, so this is structural comparison.
    """
    return a == b


def st_size(t: STerm) -> int:
    if isinstance(t, SApp):
        return st_size(t.fun) + st_size(t.arg)
    if isinstance(t, SLam):
        return 1 + st_size(t.body)
    return 1

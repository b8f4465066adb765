"""Decision procedures for LF judgments.

Objects are inferred from their annotations; ``check_object`` infers and
then compares against the expected family by conversion. Every successful
inference returns a derivation tree that :func:`validate_derivation`
re-checks node by node without calling the inference functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .syntax import (
    TYPE, App, BVar, Const, EMPTY_CONTEXT, FamApp, FamConst, FamilyDecl, KindPi, Lam,
    LfContext, LfFamily, LfKind, LfObject, LfSignature, LfTerm, Name, ObjectDecl, Pi,
    TypeKind, Var, fresh_name, lf_close, lf_constants, lf_free_vars, lf_normalize,
    lf_open, lf_shift,
)

BETA_ETA = "beta_eta"
BETA = "beta"


class ErrorKind:
    UNBOUND_NAME = "UnboundName"
    NOT_A_FUNCTION = "NotAFunction"
    DOMAIN_MISMATCH = "DomainMismatch"
    KIND_MISMATCH = "KindMismatch"
    ILL_FORMED_SIGNATURE = "IllFormedSignature"


@dataclass(frozen=True)
class LfTypeError:
    """A kernel rejection.

    ``location`` is a path of steps (``fun``, ``arg``, ``annot``, ``body``,
    ``domain``, ``head``) from the subject to the failing node. For a domain
    mismatch, ``expected``/``got`` hold the two families in normal form and
    ``pinpoint`` the first pair of differing atomic subfamilies, printed with
    their binder names.
    """

    kind: str
    message: str
    location: tuple[str, ...] = ()
    expected: LfTerm | None = None
    got: LfTerm | None = None
    pinpoint: tuple[str, str] | None = None
    decl_index: int | None = None
    cause: "LfTypeError | None" = None

    def __str__(self) -> str:
        return self.message


class KernelError(Exception):
    def __init__(self, error: LfTypeError):
        super().__init__(str(error))
        self.error = error


@dataclass(frozen=True)
class DerivationTree:
    rule: str
    context: LfContext
    subject: object
    classifier: object
    premises: tuple["DerivationTree", ...] = ()
    eigen: Name | None = None


@dataclass(frozen=True)
class Derivable:
    derivation: DerivationTree


@dataclass(frozen=True)
class NotDerivable:
    reason: LfTypeError


CheckResult = Union[Derivable, NotDerivable]


@dataclass(frozen=True)
class Ok:
    value: object
    derivation: DerivationTree | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Err:
    error: LfTypeError


# ---------------------------------------------------------------------------
# conversion

def _conv(a: LfTerm, b: LfTerm, eta: bool) -> bool:
    if isinstance(a, Lam) and isinstance(b, Lam):
        return _conv(a.annot, b.annot, eta) and _conv(a.body, b.body, eta)
    if eta and isinstance(a, Lam) and _is_object(b):
        return _conv(a.body, App(lf_shift(b, 1), BVar(0)), eta)
    if eta and isinstance(b, Lam) and _is_object(a):
        return _conv(App(lf_shift(a, 1), BVar(0)), b.body, eta)
    if type(a) is not type(b):
        return False
    if isinstance(a, App):
        return _conv(a.fun, b.fun, eta) and _conv(a.arg, b.arg, eta)
    if isinstance(a, FamApp):
        return _conv(a.head, b.head, eta) and _conv(a.arg, b.arg, eta)
    if isinstance(a, (Pi, KindPi)):
        return _conv(a.domain, b.domain, eta) and _conv(a.body, b.body, eta)
    return a == b


def _is_object(t) -> bool:
    return isinstance(t, (Const, Var, BVar, App, Lam))


def equal_family(sig: LfSignature, ctx: LfContext, a: LfFamily, b: LfFamily,
                 conversion: str = BETA_ETA) -> bool:
    """Convertibility of two well-kinded families."""
    return _conv(lf_normalize(a), lf_normalize(b), conversion == BETA_ETA)


def equal_kind(a: LfKind, b: LfKind, conversion: str = BETA_ETA) -> bool:
    return _conv(lf_normalize(a), lf_normalize(b), conversion == BETA_ETA)


# ---------------------------------------------------------------------------
# printing helper for diagnostics (kept local to avoid an import cycle)

def _show(t) -> str:
    from .printer import show_lf
    return show_lf(t)


def _pinpoint(expected: LfTerm, got: LfTerm) -> tuple[str, str]:
    """First differing pair along parallel Pi-chains, printed under shared binders."""
    from .printer import show_lf
    names: list[Name] = []
    avoid = lf_constants(expected) | lf_constants(got) | lf_free_vars(expected) | lf_free_vars(got)
    a, b = lf_normalize(expected), lf_normalize(got)
    while isinstance(a, Pi) and isinstance(b, Pi):
        if not _conv(a.domain, b.domain, True):
            a, b = a.domain, b.domain
            continue
        n = fresh_name(a.binder, avoid | set(names))
        names.insert(0, n)
        a, b = a.body, b.body
    return show_lf(a, names, avoid), show_lf(b, names, avoid)


# ---------------------------------------------------------------------------
# inference

class _Checker:
    def __init__(self, sig: LfSignature, conversion: str):
        self.sig = sig
        self.conversion = conversion

    def fresh(self, ctx: LfContext, hint: Name) -> Name:
        return fresh_name(hint, ctx.names() | self.sig.names())

    def fail(self, kind, message, loc, **kw):
        raise KernelError(LfTypeError(kind, message, tuple(loc), **kw))

    def conv(self, ctx, a, b) -> bool:
        return equal_family(self.sig, ctx, a, b, self.conversion)

    def infer(self, ctx: LfContext, m: LfObject, loc: list[str]) -> tuple[LfFamily, DerivationTree]:
        if isinstance(m, Const):
            d = self.sig.lookup(m.name)
            if d is None or not isinstance(d.classifier, ObjectDecl):
                self.fail(ErrorKind.UNBOUND_NAME, f"unbound object constant {m.name}", loc)
            a = lf_normalize(d.classifier.type)
            return a, DerivationTree("obj-const", ctx, m, a)
        if isinstance(m, Var):
            a = ctx.lookup(m.name)
            if a is None:
                self.fail(ErrorKind.UNBOUND_NAME, f"unbound variable {m.name}", loc)
            a = lf_normalize(a)
            return a, DerivationTree("obj-var", ctx, m, a)
        if isinstance(m, BVar):
            self.fail(ErrorKind.UNBOUND_NAME, f"loose bound variable #{m.index}", loc)
        if isinstance(m, App):
            fty, fd = self.infer(ctx, m.fun, loc + ["fun"])
            if not isinstance(fty, Pi):
                self.fail(ErrorKind.NOT_A_FUNCTION,
                          f"{_show(m.fun)} has type {_show(fty)}, not a function type",
                          loc + ["fun"], got=fty)
            aty, ad = self.infer(ctx, m.arg, loc + ["arg"])
            if not self.conv(ctx, fty.domain, aty):
                exp, got = lf_normalize(fty.domain), lf_normalize(aty)
                pin = _pinpoint(exp, got)
                self.fail(ErrorKind.DOMAIN_MISMATCH,
                          f"argument {_show(m.arg)} has type {_show(got)} "
                          f"but {_show(exp)} was expected ({pin[1]} vs {pin[0]})",
                          loc + ["arg"], expected=exp, got=got, pinpoint=pin)
            res = lf_normalize(lf_open(fty.body, m.arg))
            return res, DerivationTree("obj-app", ctx, m, res, (fd, ad))
        if isinstance(m, Lam):
            kd = self.family_is_type(ctx, m.annot, loc + ["annot"])
            x = self.fresh(ctx, m.binder)
            inner = ctx.extend(x, lf_normalize(m.annot))
            bty, bd = self.infer(inner, lf_open(m.body, Var(x)), loc + ["body"])
            res = Pi(m.binder, lf_normalize(m.annot), lf_close(bty, x))
            return res, DerivationTree("obj-lam", ctx, m, res, (kd, bd), eigen=x)
        raise TypeError(f"not an LF object: {m!r}")

    def family_is_type(self, ctx, a, loc) -> DerivationTree:
        k, d = self.kind_of(ctx, a, loc)
        if not isinstance(k, TypeKind):
            self.fail(ErrorKind.KIND_MISMATCH,
                      f"{_show(a)} has kind {_show(k)}, expected type", loc, expected=TYPE, got=k)
        return d

    def kind_of(self, ctx: LfContext, a: LfFamily, loc: list[str]) -> tuple[LfKind, DerivationTree]:
        if isinstance(a, FamConst):
            d = self.sig.lookup(a.name)
            if d is None or not isinstance(d.classifier, FamilyDecl):
                self.fail(ErrorKind.UNBOUND_NAME, f"unbound family constant {a.name}", loc)
            k = lf_normalize(d.classifier.kind)
            return k, DerivationTree("fam-const", ctx, a, k)
        if isinstance(a, FamApp):
            hk, hd = self.kind_of(ctx, a.head, loc + ["head"])
            if not isinstance(hk, KindPi):
                self.fail(ErrorKind.KIND_MISMATCH,
                          f"{_show(a.head)} has kind {_show(hk)} and takes no arguments",
                          loc + ["head"], got=hk)
            try:
                aty, ad = self.infer(ctx, a.arg, loc + ["arg"])
            except KernelError as e:
                self.fail(ErrorKind.KIND_MISMATCH,
                          f"ill-typed index {_show(a.arg)}: {e.error.message}",
                          loc + ["arg"], cause=e.error)
            if not self.conv(ctx, hk.domain, aty):
                self.fail(ErrorKind.KIND_MISMATCH,
                          f"index {_show(a.arg)} has type {_show(aty)} but "
                          f"{_show(hk.domain)} was expected",
                          loc + ["arg"], expected=lf_normalize(hk.domain), got=aty)
            res = lf_normalize(lf_open(hk.body, a.arg))
            return res, DerivationTree("fam-app", ctx, a, res, (hd, ad))
        if isinstance(a, Pi):
            dd = self.family_is_type(ctx, a.domain, loc + ["domain"])
            x = self.fresh(ctx, a.binder)
            inner = ctx.extend(x, lf_normalize(a.domain))
            bd = self.family_is_type(inner, lf_open(a.body, Var(x)), loc + ["body"])
            return TYPE, DerivationTree("fam-pi", ctx, a, TYPE, (dd, bd), eigen=x)
        raise TypeError(f"not an LF family: {a!r}")

    def kind_ok(self, ctx: LfContext, k: LfKind, loc: list[str]) -> DerivationTree:
        if isinstance(k, TypeKind):
            return DerivationTree("kind-type", ctx, k, "kind")
        if isinstance(k, KindPi):
            dd = self.family_is_type(ctx, k.domain, loc + ["domain"])
            x = self.fresh(ctx, k.binder)
            inner = ctx.extend(x, lf_normalize(k.domain))
            bd = self.kind_ok(inner, lf_open(k.body, Var(x)), loc + ["body"])
            return DerivationTree("kind-pi", ctx, k, "kind", (dd, bd), eigen=x)
        raise TypeError(f"not an LF kind: {k!r}")


def infer_object(sig: LfSignature, ctx: LfContext, m: LfObject,
                 conversion: str = BETA_ETA) -> Ok | Err:
    """Infer the normal-form type of ``m``; ``Ok.derivation`` holds the tree."""
    try:
        a, d = _Checker(sig, conversion).infer(ctx, m, [])
    except KernelError as e:
        return Err(e.error)
    return Ok(a, d)


def check_family(sig: LfSignature, ctx: LfContext, a: LfFamily,
                 conversion: str = BETA_ETA) -> Ok | Err:
    try:
        k, d = _Checker(sig, conversion).kind_of(ctx, a, [])
    except KernelError as e:
        return Err(e.error)
    return Ok(k, d)


def check_object(sig: LfSignature, ctx: LfContext, m: LfObject, a: LfFamily,
                 conversion: str = BETA_ETA) -> CheckResult:
    ch = _Checker(sig, conversion)
    try:
        got, d = ch.infer(ctx, m, [])
        if not ch.conv(ctx, a, got):
            exp = lf_normalize(a)
            pin = _pinpoint(exp, got)
            ch.fail(ErrorKind.DOMAIN_MISMATCH,
                    f"{_show(m)} has type {_show(got)} but {_show(exp)} was expected",
                    [], expected=exp, got=got, pinpoint=pin)
    except KernelError as e:
        return NotDerivable(e.error)
    return Derivable(DerivationTree("obj-conv", ctx, m, lf_normalize(a), (d,)))


def check_context(sig: LfSignature, ctx: LfContext, conversion: str = BETA_ETA) -> CheckResult:
    ch = _Checker(sig, conversion)
    prems = []
    seen: set[Name] = set()
    try:
        for i, (n, a) in enumerate(ctx.bindings):
            if n in seen or n in sig.names():
                ch.fail(ErrorKind.ILL_FORMED_SIGNATURE, f"duplicate name {n} in context", [])
            seen.add(n)
            prems.append(ch.family_is_type(LfContext(ctx.bindings[:i]), a, []))
    except KernelError as e:
        return NotDerivable(e.error)
    return Derivable(DerivationTree("ctx", ctx, None, "context", tuple(prems)))


def check_signature(sig: LfSignature, conversion: str = BETA_ETA) -> CheckResult:
    """Each declaration must be well-formed in the signature prefix before it."""
    prems = []
    seen: set[Name] = set()
    for i, decl in enumerate(sig.decls):
        ch = _Checker(sig.prefix(i), conversion)
        try:
            if decl.name in seen:
                ch.fail(ErrorKind.ILL_FORMED_SIGNATURE, f"duplicate declaration of {decl.name}", [])
            seen.add(decl.name)
            if isinstance(decl.classifier, FamilyDecl):
                prems.append(ch.kind_ok(EMPTY_CONTEXT, decl.classifier.kind, []))
            else:
                prems.append(ch.family_is_type(EMPTY_CONTEXT, decl.classifier.type, []))
        except KernelError as e:
            inner = e.error
            kind = inner.kind if inner.kind == ErrorKind.UNBOUND_NAME \
                else ErrorKind.ILL_FORMED_SIGNATURE
            return NotDerivable(LfTypeError(
                kind, f"declaration {i} ({decl.name}): {inner.message}",
                inner.location, inner.expected, inner.got, inner.pinpoint, i, inner))
    return Derivable(DerivationTree("sig", EMPTY_CONTEXT, sig, "signature", tuple(prems)))


# ---------------------------------------------------------------------------
# independent replay of derivations

def validate_derivation(sig: LfSignature, tree: DerivationTree,
                        conversion: str = BETA_ETA) -> bool:
    """Re-check ``tree`` one rule instance at a time."""
    try:
        return _valid(sig, tree, conversion == BETA_ETA)
    except (TypeError, AttributeError, ValueError):
        return False


def _same(a, b, eta) -> bool:
    return _conv(lf_normalize(a), lf_normalize(b), eta)


def _fresh_for(x: Name | None, sig: LfSignature, ctx: LfContext, *terms) -> bool:
    if x is None or x in ctx.names() or x in sig.names():
        return False
    return not any(x in lf_free_vars(t) for t in terms if t is not None)


def _valid(sig: LfSignature, t: DerivationTree, eta: bool) -> bool:
    ctx, s, c, ps = t.context, t.subject, t.classifier, t.premises
    r = t.rule
    if r == "sig":
        if s != sig or len(ps) != len(sig.decls):
            return False
        for i, (decl, p) in enumerate(zip(sig.decls, ps)):
            sub = sig.prefix(i)
            if p.context != EMPTY_CONTEXT or decl.name in sub.names():
                return False
            want = decl.classifier.kind if decl.is_family else decl.classifier.type
            if p.subject != want or not _valid(sub, p, eta):
                return False
            if not decl.is_family and p.classifier != TYPE:
                return False
        return True
    if r == "ctx":
        if len(ps) != len(ctx.bindings):
            return False
        for i, ((n, a), p) in enumerate(zip(ctx.bindings, ps)):
            if p.context != LfContext(ctx.bindings[:i]) or p.subject != a or p.classifier != TYPE:
                return False
            if not _valid(sig, p, eta):
                return False
        return True
    if r == "obj-const":
        d = sig.lookup(s.name)
        return (isinstance(s, Const) and d is not None and not d.is_family
                and not ps and _same(d.classifier.type, c, eta))
    if r == "obj-var":
        a = ctx.lookup(s.name) if isinstance(s, Var) else None
        return a is not None and not ps and _same(a, c, eta)
    if r == "obj-app":
        if not isinstance(s, App) or len(ps) != 2:
            return False
        f, a = ps
        if f.context != ctx or a.context != ctx or f.subject != s.fun or a.subject != s.arg:
            return False
        if not isinstance(f.classifier, Pi) or not _same(f.classifier.domain, a.classifier, eta):
            return False
        return (_same(lf_open(f.classifier.body, s.arg), c, eta)
                and _valid(sig, f, eta) and _valid(sig, a, eta))
    if r == "obj-lam":
        if not isinstance(s, Lam) or len(ps) != 2 or not isinstance(c, Pi):
            return False
        k, b = ps
        x = t.eigen
        if not _fresh_for(x, sig, ctx, s):
            return False
        if k.context != ctx or k.subject != s.annot or k.classifier != TYPE:
            return False
        if b.context != ctx.extend(x, lf_normalize(s.annot)) \
                or b.subject != lf_open(s.body, Var(x)):
            return False
        if not _same(c.domain, s.annot, eta) \
                or not _same(lf_open(c.body, Var(x)), b.classifier, eta):
            return False
        return _valid(sig, k, eta) and _valid(sig, b, eta)
    if r == "obj-conv":
        if len(ps) != 1 or ps[0].context != ctx or ps[0].subject != s:
            return False
        return _same(ps[0].classifier, c, eta) and _valid(sig, ps[0], eta)
    if r == "fam-const":
        d = sig.lookup(s.name)
        return (isinstance(s, FamConst) and d is not None and d.is_family
                and not ps and _same(d.classifier.kind, c, eta))
    if r == "fam-app":
        if not isinstance(s, FamApp) or len(ps) != 2:
            return False
        h, a = ps
        if h.context != ctx or a.context != ctx or h.subject != s.head or a.subject != s.arg:
            return False
        if not isinstance(h.classifier, KindPi) \
                or not _same(h.classifier.domain, a.classifier, eta):
            return False
        return (_same(lf_open(h.classifier.body, s.arg), c, eta)
                and _valid(sig, h, eta) and _valid(sig, a, eta))
    if r in ("fam-pi", "kind-pi"):
        want = Pi if r == "fam-pi" else KindPi
        if not isinstance(s, want) or len(ps) != 2:
            return False
        if r == "fam-pi" and c != TYPE:
            return False
        d, b = ps
        x = t.eigen
        if not _fresh_for(x, sig, ctx, s):
            return False
        if d.context != ctx or d.subject != s.domain or d.classifier != TYPE:
            return False
        if b.context != ctx.extend(x, lf_normalize(s.domain)) \
                or b.subject != lf_open(s.body, Var(x)):
            return False
        if r == "fam-pi" and b.classifier != TYPE:
            return False
        return _valid(sig, d, eta) and _valid(sig, b, eta)
    if r == "kind-type":
        return isinstance(s, TypeKind) and not ps
    return False

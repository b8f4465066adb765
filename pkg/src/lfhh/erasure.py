"""Dependency-forgetting translation of LF into the simply typed calculus.

Families and kinds become simple types over ``ty``/``tm``; objects become
simply typed terms over the reflected constants, which reuse the LF names.
"""

from __future__ import annotations

from .syntax import (
    TM, TY, App, Arrow, BVar, Const, FamApp, FamConst, FamilyDecl, KindPi, Lam, LfFamily,
    LfKind, LfObject, LfSignature, Name, Pi, SApp, SBVar, SConst, SimpleType, SLam, STerm,
    SVar, TypeKind, Var,
)

# The footnoted refinement (one base type per family head instead of a single
# ``tm``) would plug in here; only the collapsing translation is provided.
ERASURE_MODES = ("collapse",)


class ErasureError(Exception):
    pass


class UnboundName(ErasureError):
    pass


class NotAtomic(ErasureError):
    pass


def erase_classifier(a: LfFamily | LfKind) -> SimpleType:
    if isinstance(a, TypeKind):
        return TY
    if isinstance(a, (FamConst, FamApp)):
        return TM
    if isinstance(a, (Pi, KindPi)):
        return Arrow(erase_classifier(a.domain), erase_classifier(a.body))
    raise TypeError(f"not a family or kind: {a!r}")


def reflect_signature(sig: LfSignature) -> list[tuple[Name, SimpleType]]:
    out = []
    for d in sig.decls:
        c = d.classifier
        out.append((d.name, erase_classifier(c.kind if isinstance(c, FamilyDecl) else c.type)))
    return out


def reflected_table(sig: LfSignature) -> dict[Name, SimpleType]:
    return dict(reflect_signature(sig))


def erase_object(m: LfObject, sig: LfSignature) -> STerm:
    """Erase an object; defined on every well-scoped object, typed or not."""
    table = reflected_table(sig)

    def go(t):
        if isinstance(t, Const):
            if t.name not in table:
                raise UnboundName(t.name)
            return SConst(t.name, table[t.name])
        if isinstance(t, Var):
            return SVar(t.name)
        if isinstance(t, BVar):
            return SBVar(t.index)
        if isinstance(t, App):
            return SApp(go(t.fun), go(t.arg))
        if isinstance(t, Lam):
            return SLam(t.binder, erase_classifier(t.annot), go(t.body))
        raise TypeError(f"not an LF object: {t!r}")
    return go(m)


def erase_family_term(a: LfFamily, sig: LfSignature) -> STerm:
    """Reify an atomic family as a term of type ``ty``."""
    if isinstance(a, Pi):
        raise NotAtomic("Pi-type in atomic position")
    if isinstance(a, FamConst):
        table = reflected_table(sig)
        if a.name not in table:
            raise UnboundName(a.name)
        return SConst(a.name, table[a.name])
    if isinstance(a, FamApp):
        return SApp(erase_family_term(a.head, sig), erase_object(a.arg, sig))
    raise TypeError(f"not an LF family: {a!r}")

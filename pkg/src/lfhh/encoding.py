"""Hereditary Harrop formulas and the translation of LF into them.

A signature becomes a program defining ``istype`` and ``hastype``; a typing
judgment becomes a goal. Formula quantifiers bind de Bruijn indices that are
shared with the term level: under ``k`` quantifiers and ``j`` lambdas, index
``j + i`` names the ``i``-th enclosing quantifier.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Union

from . import erasure
from .kernel import Derivable, check_signature
from .syntax import (
    TY, FamilyDecl, LfDecl, LfFamily, LfObject, LfSignature,
    Name, Pi, SConst, SimpleType, SimpleTypeError, STerm, SVar, TypeKind, Var, lf_open, sapp,
    st_close, st_normalize, st_open_at, st_typeof,
)


@dataclass(frozen=True)
class Hastype:
    term: STerm
    type: STerm


@dataclass(frozen=True)
class Istype:
    type: STerm


Atom = Union[Hastype, Istype]


@dataclass(frozen=True)
class AtomG:
    atom: Atom


@dataclass(frozen=True)
class And:
    left: "HHGoal"
    right: "HHGoal"


@dataclass(frozen=True)
class Implies:
    hyp: "HHClause"
    concl: "HHGoal"


@dataclass(frozen=True)
class ForallG:
    binder: Name = field(compare=False)
    type: SimpleType = None  # type: ignore[assignment]
    body: "HHGoal" = None  # type: ignore[assignment]


@dataclass(frozen=True)
class TrueG:
    pass


@dataclass(frozen=True)
class AtomD:
    atom: Atom


@dataclass(frozen=True)
class ImpliesD:
    premise: "HHGoal"
    head: "HHClause"


@dataclass(frozen=True)
class ForallD:
    binder: Name = field(compare=False)
    type: SimpleType = None  # type: ignore[assignment]
    body: "HHClause" = None  # type: ignore[assignment]


HHGoal = Union[AtomG, And, Implies, ForallG, TrueG]
HHClause = Union[AtomD, ImpliesD, ForallD]
Formula = Union[HHGoal, HHClause]


@dataclass(frozen=True)
class HHProgram:
    clauses: tuple[HHClause, ...] = ()

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)


class EncodingError(Exception):
    pass


class IllFormedSignature(EncodingError):
    pass


class IllSortedSubject(EncodingError):
    pass


# ---------------------------------------------------------------------------
# generic traversal

def map_atom(a: Atom, fn: Callable[[STerm], STerm]) -> Atom:
    if isinstance(a, Hastype):
        return Hastype(fn(a.term), fn(a.type))
    return Istype(fn(a.type))


def map_terms(f: Formula, fn: Callable[[STerm, int], STerm], depth: int = 0) -> Formula:
    """Rebuild ``f`` applying ``fn(term, quantifier_depth)`` to every term."""
    if isinstance(f, AtomG):
        return AtomG(map_atom(f.atom, lambda t: fn(t, depth)))
    if isinstance(f, AtomD):
        return AtomD(map_atom(f.atom, lambda t: fn(t, depth)))
    if isinstance(f, TrueG):
        return f
    if isinstance(f, And):
        return And(map_terms(f.left, fn, depth), map_terms(f.right, fn, depth))
    if isinstance(f, Implies):
        return Implies(map_terms(f.hyp, fn, depth), map_terms(f.concl, fn, depth))
    if isinstance(f, ImpliesD):
        return ImpliesD(map_terms(f.premise, fn, depth), map_terms(f.head, fn, depth))
    if isinstance(f, ForallG):
        return ForallG(f.binder, f.type, map_terms(f.body, fn, depth + 1))
    if isinstance(f, ForallD):
        return ForallD(f.binder, f.type, map_terms(f.body, fn, depth + 1))
    raise TypeError(f"not a formula: {f!r}")


def terms_of(f: Formula) -> list[STerm]:
    out: list[STerm] = []

    def grab(t, depth):
        out.append(t)
        return t
    map_terms(f, grab)
    return out


def close_formula(f: Formula, name: Name) -> Formula:
    return map_terms(f, lambda t, d: st_close(t, name, d))


def open_formula(f: Formula, arg: STerm) -> Formula:
    return map_terms(f, lambda t, d: st_open_at(t, arg, d))


def clause_head(c: HHClause) -> Atom:
    while not isinstance(c, AtomD):
        c = c.body if isinstance(c, ForallD) else c.head
    return c.atom


def atom_predicate(a: Atom) -> str:
    return "hastype" if isinstance(a, Hastype) else "istype"


def check_formula_types(f: Formula, env: dict[Name, SimpleType] | None = None) -> None:
    """Raise :class:`SimpleTypeError` unless every atom is simply well-typed.

    ``hastype`` takes a term and a ``ty``; ``istype`` takes a ``ty``.
    """
    env = dict(env or {})

    def go(f, bound):
        if isinstance(f, (AtomG, AtomD)):
            a = f.atom
            if isinstance(a, Hastype):
                st_typeof(a.term, env, bound)
                if st_typeof(a.type, env, bound) != TY:
                    raise SimpleTypeError("second argument of hastype must have type ty")
            elif st_typeof(a.type, env, bound) != TY:
                raise SimpleTypeError("argument of istype must have type ty")
        elif isinstance(f, And):
            go(f.left, bound), go(f.right, bound)
        elif isinstance(f, Implies):
            go(f.hyp, bound), go(f.concl, bound)
        elif isinstance(f, ImpliesD):
            go(f.premise, bound), go(f.head, bound)
        elif isinstance(f, (ForallG, ForallD)):
            go(f.body, (f.type,) + bound)
    go(f, ())


def strip_polarity(f: Formula):
    """Forget the goal/clause distinction, for comparing the two translations."""
    if isinstance(f, (AtomG, AtomD)):
        return ("atom", f.atom)
    if isinstance(f, (Implies, ImpliesD)):
        l, r = (f.hyp, f.concl) if isinstance(f, Implies) else (f.premise, f.head)
        return ("imp", strip_polarity(l), strip_polarity(r))
    if isinstance(f, (ForallG, ForallD)):
        return ("all", f.type, strip_polarity(f.body))
    if isinstance(f, And):
        return ("and", strip_polarity(f.left), strip_polarity(f.right))
    return ("true",)


# ---------------------------------------------------------------------------
# translation

_scratch = itertools.count()


def _scratch_name(hint: Name) -> Name:
    # '#' never appears in parsed identifiers, so these cannot clash.
    return f"{hint}#{next(_scratch)}"


def _hastype(subject: STerm, a: LfFamily, sig: LfSignature) -> Hastype:
    return Hastype(st_normalize(subject, eta_long=False), erasure.erase_family_term(a, sig))


def type_to_goal(a: LfFamily, subject: STerm, sig: LfSignature) -> HHGoal:
    if isinstance(a, Pi):
        x = _scratch_name(a.binder)
        hyp = type_to_clause(a.domain, SVar(x), sig)
        concl = type_to_goal(lf_open(a.body, Var(x)), sapp(subject, SVar(x)), sig)
        body = close_formula(Implies(hyp, concl), x)
        return ForallG(a.binder, erasure.erase_classifier(a.domain), body)
    return AtomG(_hastype(subject, a, sig))


def type_to_clause(a: LfFamily, subject: STerm, sig: LfSignature) -> HHClause:
    if isinstance(a, Pi):
        x = _scratch_name(a.binder)
        prem = type_to_goal(a.domain, SVar(x), sig)
        head = type_to_clause(lf_open(a.body, Var(x)), sapp(subject, SVar(x)), sig)
        body = close_formula(ImpliesD(prem, head), x)
        return ForallD(a.binder, erasure.erase_classifier(a.domain), body)
    return AtomD(_hastype(subject, a, sig))


def kind_to_istype_clause(decl: LfDecl, sig: LfSignature) -> HHClause:
    if not isinstance(decl.classifier, FamilyDecl):
        raise EncodingError(f"{decl.name} is not a family declaration")
    table = erasure.reflected_table(sig)
    head = SConst(decl.name, table[decl.name])

    def go(k, subject):
        if isinstance(k, TypeKind):
            return AtomD(Istype(subject))
        x = _scratch_name(k.binder)
        prem = type_to_goal(k.domain, SVar(x), sig)
        rest = go(lf_open(k.body, Var(x)), sapp(subject, SVar(x)))
        body = close_formula(ImpliesD(prem, rest), x)
        return ForallD(k.binder, erasure.erase_classifier(k.domain), body)
    return go(decl.classifier.kind, head)


def encode_signature(sig: LfSignature, checked: bool = False) -> HHProgram:
    """One clause per declaration, in declaration order."""
    if not checked:
        res = check_signature(sig)
        if not isinstance(res, Derivable):
            raise IllFormedSignature(str(res.reason))
    table = erasure.reflected_table(sig)
    clauses = []
    for d in sig.decls:
        if isinstance(d.classifier, FamilyDecl):
            clauses.append(kind_to_istype_clause(d, sig))
        else:
            clauses.append(type_to_clause(d.classifier.type, SConst(d.name, table[d.name]), sig))
    return HHProgram(tuple(clauses))


def judgment_to_goal(sig: LfSignature, m: LfObject, a: LfFamily) -> HHGoal:
    subject = erasure.erase_object(m, sig)
    want = erasure.erase_classifier(a)
    try:
        ty = st_typeof(subject)
    except SimpleTypeError as e:
        raise IllSortedSubject(f"erased subject is not simply typed: {e}") from e
    if ty != want:
        raise IllSortedSubject(f"erased subject has type {ty}, expected {want}")
    return type_to_goal(a, subject, sig)


__all__ = [
    "And", "Atom", "AtomD", "AtomG", "EncodingError", "ForallD", "ForallG", "HHClause",
    "HHGoal", "HHProgram", "Hastype", "IllFormedSignature", "IllSortedSubject", "Implies",
    "ImpliesD", "Istype", "TrueG", "atom_predicate", "check_formula_types", "clause_head",
    "close_formula", "encode_signature", "judgment_to_goal", "kind_to_istype_clause",
    "map_terms", "open_formula", "strip_polarity", "terms_of", "type_to_clause", "type_to_goal",
]

"""Canonical concrete syntax for LF, simply typed terms and HH programs.

LF uses Twelf notation: ``{x:A} B`` for Pi, ``[x:A] M`` for lambda, ``type``
for the kind. Simply typed lambdas print as ``\\x:tm. M`` and quantifiers as
``forall x:T. F``; implication ``=>`` associates to the right.
"""

from __future__ import annotations

from .encoding import (
    And, AtomD, AtomG, ForallD, ForallG, HHProgram, Hastype, Implies, ImpliesD, Istype,
    TrueG, terms_of,
)
from .syntax import (
    App, BVar, Const, FamApp, FamConst, FamilyDecl, KindPi, Lam, LfSignature, MetaVar,
    Pi, SApp, SBVar, SConst, SimpleType, SLam, STerm, SVar, TypeKind, Var, fresh_name,
    lf_constants, lf_free_vars, st_free_vars,
)


def show_stype(t: SimpleType) -> str:
    return str(t)


# ---------------------------------------------------------------------------
# LF

def show_lf(t, names: list[str] | None = None, avoid: set[str] | None = None) -> str:
    """Print an LF term; ``names[i]`` displays de Bruijn index ``i``."""
    names = list(names or [])
    if avoid is None:
        avoid = lf_constants(t) | lf_free_vars(t)
    return _lf(t, names, avoid)


def _bind(hint: str, names: list[str], avoid: set[str]) -> str:
    return fresh_name(hint if hint and hint != "_" else "x", avoid | set(names))


def _lf(t, names, avoid) -> str:
    if isinstance(t, (Const, FamConst, Var)):
        return t.name
    if isinstance(t, BVar):
        return names[t.index] if t.index < len(names) else f"#{t.index}"
    if isinstance(t, TypeKind):
        return "type"
    if isinstance(t, (App, FamApp)):
        fun = t.fun if isinstance(t, App) else t.head
        f = _lf(fun, names, avoid)
        if isinstance(fun, Lam):
            f = f"({f})"
        a = _lf(t.arg, names, avoid)
        if isinstance(t.arg, (App, Lam)):
            a = f"({a})"
        return f"{f} {a}"
    if isinstance(t, Lam):
        x = _bind(t.binder, names, avoid)
        return f"[{x}:{_lf(t.annot, names, avoid)}] {_lf(t.body, [x] + names, avoid)}"
    if isinstance(t, (Pi, KindPi)):
        x = _bind(t.binder, names, avoid)
        return f"{{{x}:{_lf(t.domain, names, avoid)}}} {_lf(t.body, [x] + names, avoid)}"
    raise TypeError(f"not an LF term: {t!r}")


def show_signature(sig: LfSignature) -> str:
    lines = []
    for d in sig.decls:
        c = d.classifier.kind if isinstance(d.classifier, FamilyDecl) else d.classifier.type
        lines.append(f"{d.name} : {show_lf(c)}.")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# simply typed terms

def show_sterm(t: STerm, names: list[str] | None = None, avoid: set[str] | None = None) -> str:
    names = list(names or [])
    if avoid is None:
        avoid = _st_names(t)
    return _st(t, names, avoid)


def _st_names(t: STerm) -> set[str]:
    out = set(st_free_vars(t))

    def walk(u):
        if isinstance(u, SConst):
            out.add(u.name)
        elif isinstance(u, SApp):
            walk(u.fun), walk(u.arg)
        elif isinstance(u, SLam):
            walk(u.body)
    walk(t)
    return out


def _st(t: STerm, names, avoid) -> str:
    if isinstance(t, (SConst, SVar)):
        return t.name
    if isinstance(t, MetaVar):
        return f"?{t.name}"
    if isinstance(t, SBVar):
        return names[t.index] if t.index < len(names) else f"#{t.index}"
    if isinstance(t, SApp):
        f = _st(t.fun, names, avoid)
        if isinstance(t.fun, SLam):
            f = f"({f})"
        a = _st(t.arg, names, avoid)
        if isinstance(t.arg, (SApp, SLam)):
            a = f"({a})"
        return f"{f} {a}"
    if isinstance(t, SLam):
        x = _bind(t.binder, names, avoid)
        return f"\\{x}:{t.annot}. {_st(t.body, [x] + names, avoid)}"
    raise TypeError(f"not a simply typed term: {t!r}")


# ---------------------------------------------------------------------------
# formulas

def _formula_names(f) -> set[str]:
    out: set[str] = set()
    for t in terms_of(f):
        out |= _st_names(t)
    return out


def show_formula(f, names: list[str] | None = None, avoid: set[str] | None = None) -> str:
    names = list(names or [])
    if avoid is None:
        avoid = _formula_names(f)
    return _fm(f, names, avoid)


def _arg(t, names, avoid) -> str:
    s = _st(t, names, avoid)
    return f"({s})" if isinstance(t, (SApp, SLam)) else s


def _atom(a, names, avoid) -> str:
    if isinstance(a, Hastype):
        return f"hastype {_arg(a.term, names, avoid)} {_arg(a.type, names, avoid)}"
    if isinstance(a, Istype):
        return f"istype {_arg(a.type, names, avoid)}"
    raise TypeError(f"not an atom: {a!r}")


def _fm(f, names, avoid) -> str:
    if isinstance(f, (AtomG, AtomD)):
        return _atom(f.atom, names, avoid)
    if isinstance(f, TrueG):
        return "true"
    if isinstance(f, (ForallG, ForallD)):
        x = _bind(f.binder, names, avoid)
        return f"forall {x}:{f.type}. {_fm(f.body, [x] + names, avoid)}"
    if isinstance(f, (Implies, ImpliesD)):
        l, r = (f.hyp, f.concl) if isinstance(f, Implies) else (f.premise, f.head)
        ls = _fm(l, names, avoid)
        if isinstance(l, (Implies, ImpliesD, ForallG, ForallD)):
            ls = f"({ls})"
        return f"{ls} => {_fm(r, names, avoid)}"
    if isinstance(f, And):
        parts = []
        for g in (f.left, f.right):
            s = _fm(g, names, avoid)
            if isinstance(g, (Implies, ForallG)) or (g is f.right and isinstance(g, And)):
                s = f"({s})"
            parts.append(s)
        return " & ".join(parts)
    raise TypeError(f"not a formula: {f!r}")


def show_program(prog: HHProgram, reflected: list[tuple[str, SimpleType]] | None = None) -> str:
    lines = []
    if reflected is not None:
        lines += [f"{n} : {t}." for n, t in reflected]
    lines += [show_formula(c) + "." for c in prog.clauses]
    return "\n".join(lines) + ("\n" if lines else "")

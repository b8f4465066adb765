"""Higher-order pattern unification modulo beta-eta.

Every metavariable and every free variable carries a level. A metavariable
may be instantiated with terms mentioning a free variable only when the
variable's level is below its own; variables introduced later (and the
fresh parameters used to go under lambdas) have higher levels. Flexible
terms must apply their metavariable to distinct variables it cannot see;
anything else is reported as a non-pattern problem.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Union

from .syntax import (
    MetaVar, Name, SApp, SBVar, SimpleType, SLam, STerm, SVar, arrows,
    st_beta, st_close, st_eta_contract, st_map, st_open, st_spine,
)

LOCAL_LEVEL = 1 << 30


@dataclass(frozen=True)
class Unifier:
    subst: dict[Name, STerm]


@dataclass(frozen=True)
class Clash:
    reason: str = ""


@dataclass(frozen=True)
class NonPattern:
    reason: str = ""


UnifyResult = Union[Unifier, Clash, NonPattern]


class _Clash(Exception):
    pass


class _NonPattern(Exception):
    pass


def apply_subst(t: STerm, subst: dict[Name, STerm]) -> STerm:
    """Instantiate metavariables and beta-normalize."""
    if not subst:
        return t
    hit = []

    def leaf(v, depth):
        if isinstance(v, MetaVar) and v.name in subst:
            hit.append(v)
            return subst[v.name]
        return v
    out = st_map(t, leaf)
    return st_beta(out) if hit else out


@dataclass
class UnifyState:
    """Mutable working state; copy before branching."""

    subst: dict[Name, STerm] = field(default_factory=dict)
    meta_level: dict[Name, int] = field(default_factory=dict)
    var_level: dict[Name, int] = field(default_factory=dict)
    var_type: dict[Name, SimpleType] = field(default_factory=dict)
    next_id: int = 0

    def copy(self) -> "UnifyState":
        return UnifyState(dict(self.subst), dict(self.meta_level), dict(self.var_level),
                          dict(self.var_type), self.next_id)


def fresh_meta(state: UnifyState, ty: SimpleType, level: int, hint: str = "M") -> MetaVar:
    state.next_id += 1
    name = f"{hint}{state.next_id}"
    state.meta_level[name] = level
    return MetaVar(name, ty)


class _Unifier:
    def __init__(self, state: UnifyState):
        self.st = state
        self.locals = itertools.count()

    def norm(self, t: STerm) -> STerm:
        return apply_subst(t, self.st.subst)

    def local(self, ty: SimpleType, hint: str) -> SVar:
        name = f"{hint}%{next(self.locals)}"
        self.st.var_level[name] = LOCAL_LEVEL + len(self.st.var_level)
        self.st.var_type[name] = ty
        return SVar(name)

    def mlevel(self, m: MetaVar) -> int:
        return self.st.meta_level.get(m.name, LOCAL_LEVEL)

    def visible(self, m: MetaVar, name: Name) -> bool:
        return self.st.var_level.get(name, -1) < self.mlevel(m)

    def bind(self, m: MetaVar, t: STerm) -> None:
        t = self.norm(t)
        sub = {m.name: t}
        self.st.subst = {k: apply_subst(v, sub) for k, v in self.st.subst.items()}
        self.st.subst[m.name] = t

    # -- main loop --------------------------------------------------------

    def unify(self, a: STerm, b: STerm) -> None:
        a, b = self.norm(a), self.norm(b)
        if a == b:
            return
        if isinstance(a, SLam) and isinstance(b, SLam):
            x = self.local(a.annot, a.binder)
            return self.unify(st_open(a.body, x), st_open(b.body, x))
        if isinstance(a, SLam):
            x = self.local(a.annot, a.binder)
            return self.unify(st_open(a.body, x), SApp(b, x))
        if isinstance(b, SLam):
            x = self.local(b.annot, b.binder)
            return self.unify(SApp(a, x), st_open(b.body, x))
        ha, aa = st_spine(a)
        hb, ab = st_spine(b)
        if isinstance(ha, MetaVar) and isinstance(hb, MetaVar):
            return self.flex_flex(ha, aa, hb, ab)
        if isinstance(ha, MetaVar):
            return self.flex_rigid(ha, aa, b)
        if isinstance(hb, MetaVar):
            return self.flex_rigid(hb, ab, a)
        if ha != hb or len(aa) != len(ab):
            raise _Clash("rigid heads differ")
        for x, y in zip(aa, ab):
            self.unify(x, y)

    def pattern_args(self, m: MetaVar, args: list[STerm]) -> list[Name] | None:
        out = []
        for a in args:
            a = st_eta_contract(self.norm(a))
            if not isinstance(a, SVar) or a.name in out or self.visible(m, a.name):
                return None
            out.append(a.name)
        return out

    def abstract(self, xs: list[Name], body: STerm) -> STerm:
        for x in reversed(xs):
            body = SLam(x.split("%")[0], self.st.var_type[x], st_close(body, x))
        return body

    def flex_rigid(self, m: MetaVar, args: list[STerm], t: STerm) -> None:
        xs = self.pattern_args(m, args)
        if xs is None:
            raise _NonPattern(f"?{m.name} applied to non-pattern arguments")
        body = self.prune(t, m, set(xs), 0)
        self.bind(m, self.abstract(xs, body))

    def flex_flex(self, m: MetaVar, margs, n: MetaVar, nargs) -> None:
        if m.name == n.name:
            xs = self.pattern_args(m, margs)
            ys = self.pattern_args(n, nargs)
            if xs is None or ys is None:
                raise _NonPattern(f"?{m.name} applied to non-pattern arguments")
            if len(xs) != len(ys):
                raise _Clash("arity mismatch")
            keep = [x for x, y in zip(xs, ys) if x == y]
            h = self._restricted(m, [self.st.var_type[x] for x in keep], len(xs), self.mlevel(m))
            self.bind(m, self.abstract(xs, _apps(h, [SVar(x) for x in keep])))
            return
        if self.pattern_args(m, margs) is not None:
            return self.flex_rigid(m, margs, _apps(n, nargs))
        if self.pattern_args(n, nargs) is not None:
            return self.flex_rigid(n, nargs, _apps(m, margs))
        raise _NonPattern("flex-flex pair outside the pattern fragment")

    def _restricted(self, m: MetaVar, kept: list[SimpleType], nargs: int, level: int) -> MetaVar:
        ty = m.type
        for _ in range(nargs):
            ty = ty.cod
        return fresh_meta(self.st, arrows(kept, ty), level, "H")

    def prune(self, t: STerm, m: MetaVar, xs: set[Name], depth: int) -> STerm:
        """Copy ``t`` into the solution for ``m``, pruning other metavariables."""
        if isinstance(t, SLam):
            return SLam(t.binder, t.annot, self.prune(t.body, m, xs, depth + 1))
        head, args = st_spine(t)
        if isinstance(head, MetaVar):
            if head.name == m.name:
                raise _Clash(f"?{m.name} occurs in its own instance")
            ys = [st_eta_contract(self.norm(a)) for a in args]
            seen = []
            for y in ys:
                ok = (isinstance(y, SBVar) and y.index < depth
                      or isinstance(y, SVar) and not self.visible(head, y.name))
                if not ok or y in seen:
                    raise _NonPattern(f"?{head.name} applied to non-pattern arguments")
                seen.append(y)
            keep = [i for i, y in enumerate(ys)
                    if isinstance(y, SBVar) or y.name in xs or self.visible(m, y.name)]
            level = min(self.mlevel(head), self.mlevel(m))
            if len(keep) < len(ys) or self.mlevel(head) > self.mlevel(m):
                doms = []
                ty = head.type
                for _ in ys:
                    doms.append(ty.dom)
                    ty = ty.cod
                h = fresh_meta(self.st, arrows([doms[i] for i in keep], ty), level, "H")
                zs = [self.local(d, "z") for d in doms]
                self.bind(head, self.abstract([z.name for z in zs],
                                              _apps(h, [zs[i] for i in keep])))
                head = h
                ys = [ys[i] for i in keep]
            return _apps(head, ys)
        if isinstance(head, SVar) and head.name not in xs and not self.visible(m, head.name):
            raise _Clash(f"{head.name} escapes the scope of ?{m.name}")
        return _apps(head, [self.prune(a, m, xs, depth) for a in args])


def _apps(h: STerm, args: Iterable[STerm]) -> STerm:
    for a in args:
        h = SApp(h, a)
    return h


def unify_in(state: UnifyState, pairs: list[tuple[STerm, STerm]]) -> UnifyResult:
    """Unify ``pairs`` in order, extending ``state`` in place on success."""
    work = state.copy()
    u = _Unifier(work)
    try:
        for a, b in pairs:
            u.unify(a, b)
    except _Clash as e:
        return Clash(str(e))
    except _NonPattern as e:
        return NonPattern(str(e))
    state.subst, state.meta_level = work.subst, work.meta_level
    state.var_level, state.var_type = work.var_level, work.var_type
    state.next_id = work.next_id
    return Unifier(dict(work.subst))


def pattern_unify(a: STerm, b: STerm, env: list[tuple[Name, SimpleType]] = (),
                  meta_levels: dict[Name, int] | None = None) -> UnifyResult:
    """Most general pattern unifier of two terms.

    ``env`` lists eigenvariables oldest first. Metavariables without an
    entry in ``meta_levels`` may mention every variable of ``env``.
    """
    st = UnifyState()
    for i, (n, ty) in enumerate(env):
        st.var_level[n] = i
        st.var_type[n] = ty
    from .syntax import st_metavars
    for m in st_metavars(a) | st_metavars(b):
        st.meta_level[m.name] = (meta_levels or {}).get(m.name, len(env))
    return unify_in(st, [(st_beta(a), st_beta(b))])

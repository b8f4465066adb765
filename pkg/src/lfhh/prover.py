"""Depth-bounded uniform proof search for hereditary Harrop goals.

Right rules decompose the goal (conjunction, hypothetical, universal);
atomic goals backchain over the program in clause order with chronological
backtracking. The depth bound limits the number of nested backchain steps
along any branch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .encoding import (
    And, AtomD, AtomG, ForallD, ForallG, HHClause, HHGoal, HHProgram, Hastype,
    Implies, TrueG, atom_predicate, open_formula, terms_of,
)
from .syntax import (
    MetaVar, Name, SConst, SimpleType, SimpleTypeError, STerm, SVar, fresh_name,
    st_equal_modulo, st_free_vars, st_has_loose, st_metavars, st_typeof,
)
from .unify import Clash, NonPattern, UnifyState, apply_subst, fresh_meta, unify_in


@dataclass(frozen=True)
class ProofTrace:
    """One proof step.

    ``rule`` is one of ``true``, ``and``, ``implies``, ``forall`` (``binder``
    is the eigenvariable) or ``backchain`` (``clause_index`` into the current
    program, ``instantiation`` for the clause's universals in order).
    """

    rule: str
    children: tuple["ProofTrace", ...] = ()
    clause_index: int | None = None
    binder: Name | None = None
    instantiation: tuple[STerm, ...] = ()

    def backchains(self) -> int:
        return (self.rule == "backchain") + sum(c.backchains() for c in self.children)

    def height(self) -> int:
        h = max((c.height() for c in self.children), default=0)
        return h + (self.rule == "backchain")


@dataclass(frozen=True)
class Proved:
    trace: ProofTrace
    depth: int = 0


@dataclass(frozen=True)
class Exhausted:
    depth: int


@dataclass(frozen=True)
class FailedNoProof:
    pass


@dataclass(frozen=True)
class Incomplete:
    reason: str


SolveResult = Union[Proved, Exhausted, FailedNoProof, Incomplete]


@dataclass(frozen=True)
class _Ctx:
    program: tuple[HHClause, ...]
    eigen: tuple[tuple[Name, SimpleType], ...]
    reserved: frozenset[Name]


class _Search:
    def __init__(self):
        self.hit_depth = False
        self.nonpattern: str | None = None

    def solve(self, goal: HHGoal, ctx: _Ctx, st: UnifyState, depth: int
              ) -> Iterator[tuple[UnifyState, ProofTrace]]:
        if isinstance(goal, TrueG):
            yield st, ProofTrace("true")
        elif isinstance(goal, And):
            for st1, t1 in self.solve(goal.left, ctx, st, depth):
                for st2, t2 in self.solve(goal.right, ctx, st1, depth):
                    yield st2, ProofTrace("and", (t1, t2))
        elif isinstance(goal, Implies):
            inner = _Ctx(ctx.program + (goal.hyp,), ctx.eigen, ctx.reserved)
            for st1, t in self.solve(goal.concl, inner, st, depth):
                yield st1, ProofTrace("implies", (t,))
        elif isinstance(goal, ForallG):
            name = fresh_name(goal.binder, ctx.reserved | {n for n, _ in ctx.eigen})
            st = st.copy()
            st.var_level[name] = len(ctx.eigen)
            st.var_type[name] = goal.type
            inner = _Ctx(ctx.program, ctx.eigen + ((name, goal.type),), ctx.reserved)
            for st1, t in self.solve(open_formula(goal.body, SVar(name)), inner, st, depth):
                yield st1, ProofTrace("forall", (t,), binder=name)
        elif isinstance(goal, AtomG):
            yield from self.backchain(goal.atom, ctx, st, depth)
        else:
            raise TypeError(f"not a goal: {goal!r}")

    def backchain(self, atom, ctx: _Ctx, st: UnifyState, depth: int):
        if depth <= 0:
            self.hit_depth = True
            return
        pred = atom_predicate(atom)
        for i, clause in enumerate(ctx.program):
            c = clause
            st1 = st.copy()
            inst: list[MetaVar] = []
            premises: list[HHGoal] = []
            while not isinstance(c, AtomD):
                if isinstance(c, ForallD):
                    m = fresh_meta(st1, c.type, len(ctx.eigen), "W")
                    inst.append(m)
                    c = open_formula(c.body, m)
                else:
                    premises.append(c.premise)
                    c = c.head
            if atom_predicate(c.atom) != pred:
                continue
            res = unify_in(st1, list(zip(_atom_args(c.atom), _atom_args(atom))))
            if isinstance(res, Clash):
                continue
            if isinstance(res, NonPattern):
                self.nonpattern = self.nonpattern or res.reason
                continue
            for st2, kids in self.solve_all(premises, ctx, st1, depth - 1):
                yield st2, ProofTrace("backchain", tuple(kids), clause_index=i,
                                      instantiation=tuple(inst))

    def solve_all(self, goals: list[HHGoal], ctx, st, depth):
        if not goals:
            yield st, []
            return
        for st1, t in self.solve(goals[0], ctx, st, depth):
            for st2, rest in self.solve_all(goals[1:], ctx, st1, depth):
                yield st2, [t] + rest


def _atom_args(a) -> list[STerm]:
    return [a.term, a.type] if isinstance(a, Hastype) else [a.type]


def _resolve(t: ProofTrace, subst: dict[Name, STerm]) -> ProofTrace:
    return ProofTrace(t.rule, tuple(_resolve(c, subst) for c in t.children), t.clause_index,
                      t.binder, tuple(apply_subst(s, subst) for s in t.instantiation))


def _reserved(program: HHProgram, goal: HHGoal) -> frozenset[Name]:
    names: set[Name] = set()
    for f in list(program.clauses) + [goal]:
        for t in terms_of(f):
            names |= st_free_vars(t) | _const_names(t)
    return frozenset(names)


def _const_names(t: STerm) -> set[Name]:
    from .syntax import SApp, SLam
    if isinstance(t, SConst):
        return {t.name}
    if isinstance(t, SApp):
        return _const_names(t.fun) | _const_names(t.arg)
    if isinstance(t, SLam):
        return _const_names(t.body)
    return set()


def solve(program: HHProgram, goal: HHGoal, depth: int) -> SolveResult:
    """Search for a uniform proof of ``goal`` using at most ``depth`` nested backchains."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if any(st_metavars(t) for t in terms_of(goal)):
        raise ValueError("goal must be metavariable-free")
    search = _Search()
    ctx = _Ctx(tuple(program.clauses), (), _reserved(program, goal))
    for st, trace in search.solve(goal, ctx, UnifyState(), depth):
        return Proved(_resolve(trace, st.subst), depth)
    if search.nonpattern:
        return Incomplete(search.nonpattern)
    if search.hit_depth:
        return Exhausted(depth)
    return FailedNoProof()


def solve_iterative(program: HHProgram, goal: HHGoal, max_depth: int) -> SolveResult:
    """Iterative deepening over depths 1..max_depth."""
    result: SolveResult = Exhausted(0)
    for d in range(1, max_depth + 1):
        result = solve(program, goal, d)
        if not isinstance(result, Exhausted):
            return result
    return result


# ---------------------------------------------------------------------------
# replay

def replay_trace(program: HHProgram, goal: HHGoal, trace: ProofTrace) -> bool:
    """Re-check every step of ``trace`` without running the search or unifier."""
    try:
        return _replay(tuple(program.clauses), {}, goal, trace)
    except (SimpleTypeError, TypeError, AttributeError, IndexError, ValueError):
        return False


def _sequent_names(program, goal) -> set[Name]:
    names: set[Name] = set()
    for f in list(program) + [goal]:
        for t in terms_of(f):
            names |= st_free_vars(t)
    return names


def _replay(program: tuple[HHClause, ...], eigen: dict[Name, SimpleType],
            goal: HHGoal, tr: ProofTrace) -> bool:
    if isinstance(goal, TrueG):
        return tr.rule == "true" and not tr.children
    if isinstance(goal, And):
        return (tr.rule == "and" and len(tr.children) == 2
                and _replay(program, eigen, goal.left, tr.children[0])
                and _replay(program, eigen, goal.right, tr.children[1]))
    if isinstance(goal, Implies):
        return (tr.rule == "implies" and len(tr.children) == 1
                and _replay(program + (goal.hyp,), eigen, goal.concl, tr.children[0]))
    if isinstance(goal, ForallG):
        x = tr.binder
        if tr.rule != "forall" or len(tr.children) != 1 or not x:
            return False
        if x in eigen or x in _sequent_names(program, goal):
            return False
        return _replay(program, {**eigen, x: goal.type},
                       open_formula(goal.body, SVar(x)), tr.children[0])
    if not isinstance(goal, AtomG) or tr.rule != "backchain":
        return False
    if tr.clause_index is None or not 0 <= tr.clause_index < len(program):
        return False
    c = program[tr.clause_index]
    inst = list(tr.instantiation)
    premises = []
    while not isinstance(c, AtomD):
        if isinstance(c, ForallD):
            if not inst:
                return False
            t = inst.pop(0)
            if st_has_loose(t) or st_typeof(t, eigen) != c.type:
                return False
            c = open_formula(c.body, t)
        else:
            premises.append(c.premise)
            c = c.head
    if inst or type(c.atom) is not type(goal.atom):
        return False
    for x, y in zip(_atom_args(c.atom), _atom_args(goal.atom)):
        if not st_equal_modulo(x, y):
            return False
    if len(premises) != len(tr.children):
        return False
    return all(_replay(program, eigen, p, k) for p, k in zip(premises, tr.children))


# ---------------------------------------------------------------------------
# serialization

def trace_to_json(trace: ProofTrace) -> dict:
    from .printer import show_sterm
    return {
        "rule": trace.rule,
        "clause_index": trace.clause_index,
        "binder": trace.binder,
        "instantiation": [show_sterm(t) for t in trace.instantiation],
        "children": [trace_to_json(c) for c in trace.children],
    }


def trace_metavars(trace: ProofTrace) -> dict[Name, SimpleType]:
    out: dict[Name, SimpleType] = {}
    for t in trace.instantiation:
        out.update({m.name: m.type for m in st_metavars(t)})
    for c in trace.children:
        out.update(trace_metavars(c))
    return out


def trace_from_json(data: dict, constants: dict[Name, SimpleType],
                    metas: dict[Name, SimpleType] | None = None) -> ProofTrace:
    from .parser import parse_sterm
    eigen: set[Name] = set()

    def collect(d):
        if d.get("rule") == "forall" and d.get("binder"):
            eigen.add(d["binder"])
        for k in d.get("children", []):
            collect(k)
    collect(data)

    def build(d) -> ProofTrace:
        return ProofTrace(
            d["rule"], tuple(build(k) for k in d.get("children", [])), d.get("clause_index"),
            d.get("binder"),
            tuple(parse_sterm(s, constants, eigen, metas) for s in d.get("instantiation", [])))
    return build(data)

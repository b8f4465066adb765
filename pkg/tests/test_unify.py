from hypothesis import given, settings
from hypothesis import strategies as st

from lfhh.syntax import (
    TM, TY, Arrow, MetaVar, SApp, SBVar, SConst, SLam, SVar, arrows, st_beta, st_equal_modulo,
    st_free_vars, st_metavars, st_typeof,
)
from lfhh.unify import Clash, NonPattern, Unifier, apply_subst, pattern_unify
from strategies import ST_CONSTANTS, simple_terms

C = SConst("c", ST_CONSTANTS["c"])
Z = SConst("z", TM)
NAT = SConst("nat", TY)
NUM = SConst("num", Arrow(TM, TY))
K = SLam("x", TM, SLam("y", TM, Z))
ENV = [("e1", TM), ("e2", TM)]
FREE = dict(ENV)


class TestExamples:
    def test_paper_binding(self):
        w = MetaVar("W", arrows([TM, TM], TM))
        res = pattern_unify(SApp(C, w), SApp(C, K))
        assert isinstance(res, Unifier)
        assert res.subst["W"] == K

    def test_identical(self):
        assert pattern_unify(NAT, NAT) == Unifier({})

    def test_clash(self):
        assert isinstance(pattern_unify(NAT, SApp(NUM, Z)), Clash)

    def test_eta(self):
        f = MetaVar("F", Arrow(TM, TM))
        g = SConst("f", Arrow(TM, TM))
        res = pattern_unify(SLam("x", TM, SApp(f, SBVar(0))), g)
        assert isinstance(res, Unifier)
        assert st_equal_modulo(apply_subst(f, res.subst), g)

    def test_non_pattern(self):
        f = MetaVar("F", Arrow(TM, TM))
        assert isinstance(pattern_unify(SApp(f, Z), Z), NonPattern)

    def test_repeated_argument_is_non_pattern(self):
        f = MetaVar("F", arrows([TM, TM], TM))
        t = SLam("x", TM, SApp(SApp(f, SBVar(0)), SBVar(0)))
        assert isinstance(pattern_unify(t, SLam("x", TM, Z)), NonPattern)

    def test_occurs_check(self):
        m = MetaVar("M", TM)
        g = SConst("f", Arrow(TM, TM))
        assert isinstance(pattern_unify(m, SApp(g, m)), Clash)

    def test_eigenvariable_scope(self):
        m = MetaVar("M", TM)
        assert isinstance(pattern_unify(m, SVar("e2"), ENV, {"M": 1}), Clash)
        res = pattern_unify(m, SVar("e1"), ENV, {"M": 1})
        assert res == Unifier({"M": SVar("e1")})

    def test_projection(self):
        # F x y = y  gives  F = \x.\y. y
        f = MetaVar("F", arrows([TM, TM], TM))
        lhs = SLam("x", TM, SLam("y", TM, SApp(SApp(f, SBVar(1)), SBVar(0))))
        rhs = SLam("x", TM, SLam("y", TM, SBVar(0)))
        res = pattern_unify(lhs, rhs)
        assert apply_subst(f, res.subst) == SLam("x", TM, SLam("y", TM, SBVar(0)))

    def test_flex_flex_same_head(self):
        f = MetaVar("F", arrows([TM, TM], TM))
        a = SLam("x", TM, SLam("y", TM, SApp(SApp(f, SBVar(1)), SBVar(0))))
        b = SLam("x", TM, SLam("y", TM, SApp(SApp(f, SBVar(0)), SBVar(1))))
        res = pattern_unify(a, b)
        assert isinstance(res, Unifier)
        assert st_equal_modulo(apply_subst(a, res.subst), apply_subst(b, res.subst))

    def test_flex_flex_different_heads(self):
        f = MetaVar("F", Arrow(TM, TM))
        g = MetaVar("G", Arrow(TM, TM))
        a = SLam("x", TM, SApp(f, SBVar(0)))
        b = SLam("x", TM, SApp(g, SBVar(0)))
        res = pattern_unify(a, b)
        assert st_equal_modulo(apply_subst(a, res.subst), apply_subst(b, res.subst))


# ---------------------------------------------------------------------------
# properties

METAS = (MetaVar("M", TM), MetaVar("F", Arrow(TM, TM)), MetaVar("G", arrows([TM, TM], TM)))


def _check_unifier(a, b, res, levels=None):
    if not isinstance(res, Unifier):
        return False
    sa, sb = apply_subst(a, res.subst), apply_subst(b, res.subst)
    assert st_equal_modulo(sa, sb)
    # idempotent, and no mapped metavariable survives in the range
    for v in res.subst.values():
        assert not {m.name for m in st_metavars(v)} & set(res.subst)
    for name, level in (levels or {}).items():
        if name in res.subst:
            visible = {n for i, (n, _) in enumerate(ENV) if i < level}
            assert st_free_vars(res.subst[name]) <= visible
    return True


@settings(max_examples=1000, deadline=None)
@given(simple_terms(TM, free=FREE, metas=METAS), simple_terms(TM, free=FREE, metas=METAS),
       st.integers(0, 2))
def test_unifier_correctness(a, b, level):
    levels = {m.name: level for m in METAS}
    _check_unifier(a, b, pattern_unify(a, b, ENV, levels), levels)


def _positions(t, bound=(), path=()):
    yield path, bound, t
    if isinstance(t, SApp):
        yield from _positions(t.fun, bound, path + ("fun",))
        yield from _positions(t.arg, bound, path + ("arg",))
    elif isinstance(t, SLam):
        yield from _positions(t.body, (t.annot,) + bound, path + ("body",))


def _replace(t, path, new):
    if not path:
        return new
    step, rest = path[0], path[1:]
    if step == "fun":
        return SApp(_replace(t.fun, rest, new), t.arg)
    if step == "arg":
        return SApp(t.fun, _replace(t.arg, rest, new))
    return SLam(t.binder, t.annot, _replace(t.body, rest, new))


@st.composite
def solvable_problems(draw):
    """A ground term and a pattern obtained by abstracting one of its subterms."""
    s = st_beta(draw(simple_terms(TM, free=FREE, redexes=False, depth=4)))
    # heads of applications are excluded: P x applied to more arguments is not a pattern
    spots = [p for p in _positions(s) if not p[0] or p[0][-1] != "fun"]
    path, bound, sub = draw(st.sampled_from(spots))
    ty = st_typeof(sub, FREE, bound)
    mty = ty
    for b in bound:
        mty = Arrow(b, mty)
    m = MetaVar("P", mty)
    t = m
    for i in reversed(range(len(bound))):
        t = SApp(t, SBVar(i))
    return _replace(s, path, t), s


@settings(max_examples=1000, deadline=None)
@given(solvable_problems())
def test_solvable_patterns_are_solved(problem):
    pattern, ground = problem
    res = pattern_unify(pattern, ground, ENV)
    assert _check_unifier(pattern, ground, res)


@settings(max_examples=300, deadline=None)
@given(solvable_problems())
def test_symmetric(problem):
    pattern, ground = problem
    assert isinstance(pattern_unify(ground, pattern, ENV), Unifier)


def test_unifier_correctness_hits_every_outcome():
    # sanity check that the random pairs above are not all trivial
    seen = set()
    m, f = METAS[0], METAS[1]
    for a, b in [(m, Z), (NAT, SApp(NUM, Z)), (SApp(f, Z), Z)]:
        seen.add(type(pattern_unify(a, b)).__name__)
    assert seen == {"Unifier", "Clash", "NonPattern"}

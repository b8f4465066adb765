from hypothesis import given, settings
from hypothesis import strategies as st

from lfhh.syntax import (
    TM, App, Arrow, Const, SApp, SBVar, SConst, SLam, SVar, Var, alpha_equal, fresh_name,
    lf_free_vars,
    st_beta, st_normalize, st_typeof, subst_object,
)
from strategies import NAT, lam, num, pi, raw_objects, simple_terms

N = 1000


class TestAlphaEqual:
    def test_renaming_only(self):
        assert alpha_equal(lam("x", NAT, Var("x")), lam("y", NAT, Var("y")))

    def test_annotation_differs(self):
        a = lam("x", NAT, lam("y", num(Const("z")), Const("z")))
        b = lam("x", NAT, lam("y", num(Var("x")), Const("z")))
        assert not alpha_equal(a, b)

    def test_constants(self):
        assert alpha_equal(Const("z"), Const("z"))


class TestSubstObject:
    def test_single_occurrence(self):
        assert subst_object(num(Var("x")), "x", Const("z")) == num(Const("z"))

    def test_shadowed_binder(self):
        t = lam("x", NAT, Var("x"))
        assert subst_object(t, "x", Const("z")) == t

    def test_under_pi(self):
        t = pi("y", num(Var("x")), NAT)
        assert subst_object(t, "x", Const("z")) == pi("y", num(Const("z")), NAT)

    def test_capture_avoided(self):
        # [y:nat] x with x := y must not capture the free y
        t = lam("y", NAT, Var("x"))
        out = subst_object(t, "x", Var("y"))
        assert out == lam("q", NAT, Var("y"))
        assert lf_free_vars(out) == {"y"}


class TestFreshName:
    def test_examples(self):
        assert fresh_name("x", {"x"}) == "x1"
        assert fresh_name("x", set()) == "x"
        assert fresh_name("x", {"x", "x1"}) == "x2"

    @given(st.text("xy1", min_size=1, max_size=3), st.sets(st.text("xy12", max_size=3)))
    def test_never_collides(self, base, avoid):
        n = fresh_name(base, avoid)
        assert n not in avoid
        assert n == fresh_name(base, avoid)


class TestNormalize:
    def test_two_steps(self):
        z = SConst("z", TM)
        k = SLam("x", TM, SLam("y", TM, z))
        assert st_normalize(SApp(SApp(k, SVar("a")), SVar("b")), env={"a": TM, "b": TM}) == z

    def test_already_normal(self):
        z = SConst("z", TM)
        assert st_normalize(z) == z

    def test_identity_redex(self):
        z = SConst("z", TM)
        assert st_normalize(SApp(SLam("x", TM, SBVar(0)), z)) == z


@settings(max_examples=N, deadline=None)
@given(raw_objects(free=("a", "b", "p")), raw_objects(free=("b", "p")),
       raw_objects(free=("p",)))
def test_substitution_lemma(t, u, v):
    # t[a:=u][b:=v] = t[b:=v][a := u[b:=v]] whenever a is not free in v
    lhs = subst_object(subst_object(t, "a", u), "b", v)
    rhs = subst_object(subst_object(t, "b", v), "a", subst_object(u, "b", v))
    assert alpha_equal(lhs, rhs)


@settings(max_examples=N, deadline=None)
@given(st.sampled_from([TM, TM, TM, Arrow(TM, TM)]).flatmap(
    lambda ty: st.tuples(st.just(ty), simple_terms(ty, free={"a": TM}))))
def test_normalize_idempotent_and_typed(pair):
    ty, t = pair
    env = {"a": TM}
    assert st_typeof(t, env) == ty
    for eta in (True, False):
        n = st_normalize(t, eta_long=eta, env=env)
        assert alpha_equal(st_normalize(n, eta_long=eta, env=env), n)
        assert st_typeof(n, env) == ty
    assert st_beta(st_beta(t)) == st_beta(t)


@settings(max_examples=200, deadline=None)
@given(st.lists(raw_objects(free=("a",)), min_size=3, max_size=3))
def test_alpha_equal_is_equivalence(ts):
    a, b, c = ts
    assert alpha_equal(a, a)
    assert alpha_equal(a, b) == alpha_equal(b, a)
    if alpha_equal(a, b) and alpha_equal(b, c):
        assert alpha_equal(a, c)


def test_alpha_equal_renamed_copies():
    t = App(Const("c"), lam("x", NAT, lam("y", num(Var("x")), Var("y"))))
    u = App(Const("c"), lam("p", NAT, lam("q", num(Var("p")), Var("q"))))
    assert alpha_equal(t, u) and hash(t) == hash(u)

from pathlib import Path

import pytest
from hypothesis import given, settings

from lfhh.encoding import (
    AtomD, AtomG, ForallD, Hastype, HHProgram, IllFormedSignature, IllSortedSubject,
    Istype, check_formula_types, encode_signature, judgment_to_goal, kind_to_istype_clause,
    strip_polarity, terms_of, type_to_clause, type_to_goal,
)
from lfhh.erasure import reflected_table
from lfhh.parser import parse_clause, parse_family, parse_goal, parse_object, parse_signature
from lfhh.printer import show_formula, show_program
from lfhh.syntax import (
    TM, TY, App, Arrow, Const, LfSignature, SApp, SBVar, SConst, SLam, SVar, arrows, st_metavars,
)
from strategies import NAT, PAPER_SIG, PAPER_SIG_TEXT, num, signatures

GOLDEN = Path(__file__).parent / "golden" / "paper_hastype.hh"
CONSTS = reflected_table(PAPER_SIG)
Z = SConst("z", TM)


def goal(text, free=None):
    return parse_goal(text, CONSTS, free)


def clause(text, free=None):
    return parse_clause(text, CONSTS, free)


class TestTypeToGoal:
    def test_atomic(self):
        assert type_to_goal(NAT, Z, PAPER_SIG) == goal("hastype z nat")

    def test_c_domain(self):
        a = parse_family("{x:nat}{y:num x} nat", PAPER_SIG)
        w = SVar("w")
        expected = goal("forall x:tm. hastype x nat => forall y:tm. hastype y (num x) => "
                        "hastype (w x y) nat", {"w"})
        assert type_to_goal(a, w, PAPER_SIG) == expected

    def test_subject_normalized(self):
        redex = SApp(SLam("x", TM, SBVar(0)), Z)
        assert type_to_goal(NAT, redex, PAPER_SIG) == goal("hastype z nat")


class TestTypeToClause:
    def test_atomic(self):
        assert type_to_clause(NAT, Z, PAPER_SIG) == AtomD(Hastype(Z, SConst("nat", TY)))

    def test_c_clause(self):
        a = PAPER_SIG.lookup("c").classifier.type
        got = type_to_clause(a, SConst("c", CONSTS["c"]), PAPER_SIG)
        assert got == clause(GOLDEN.read_text().splitlines()[1])

    def test_num_index(self):
        got = type_to_clause(num(Const("z")), SVar("q"), PAPER_SIG)
        assert show_formula(got) == "hastype q (num z)"


class TestIstype:
    def test_nat(self):
        assert kind_to_istype_clause(PAPER_SIG.lookup("nat"), PAPER_SIG) == \
            AtomD(Istype(SConst("nat", TY)))

    def test_num(self):
        got = kind_to_istype_clause(PAPER_SIG.lookup("num"), PAPER_SIG)
        assert got == clause("forall x:tm. hastype x nat => istype (num x)")

    def test_object_decl_rejected(self):
        with pytest.raises(Exception):
            kind_to_istype_clause(PAPER_SIG.lookup("z"), PAPER_SIG)


class TestEncodeSignature:
    def test_golden_hastype_clauses(self):
        prog = encode_signature(PAPER_SIG)
        hastype = [c for c in prog.clauses if _head_pred(c) == "hastype"]
        golden = [clause(line) for line in GOLDEN.read_text().splitlines()]
        assert hastype == golden
        assert show_program(HHProgram(tuple(hastype))) == GOLDEN.read_text()

    def test_empty(self):
        assert encode_signature(LfSignature()) == HHProgram(())

    def test_nat_z_only(self):
        sig = parse_signature("nat : type. z : nat.")
        assert show_program(encode_signature(sig)) == "istype nat.\nhastype z nat.\n"

    def test_ill_formed(self):
        with pytest.raises(IllFormedSignature):
            encode_signature(parse_signature("z : nat."))


class TestJudgmentToGoal:
    def test_paper(self):
        m = parse_object("c ([x:nat][y:num z] z)", PAPER_SIG)
        g = judgment_to_goal(PAPER_SIG, m, NAT)
        assert show_formula(g) == "hastype (c (\\x:tm. \\y:tm. z)) nat"

    def test_z(self):
        assert judgment_to_goal(PAPER_SIG, Const("z"), NAT) == goal("hastype z nat")

    def test_z_num_z(self):
        assert judgment_to_goal(PAPER_SIG, Const("z"), num(Const("z"))) == \
            AtomG(Hastype(Z, SApp(SConst("num", Arrow(TM, TY)), Z)))

    def test_ill_sorted(self):
        with pytest.raises(IllSortedSubject):
            judgment_to_goal(PAPER_SIG, App(Const("z"), Const("z")), NAT)

    def test_pi_classifier(self):
        a = parse_family("{x:nat} nat", PAPER_SIG)
        m = parse_object("[x:nat] x", PAPER_SIG)
        assert show_formula(judgment_to_goal(PAPER_SIG, m, a)) == \
            "forall x:tm. hastype x nat => hastype x nat"


def _head_pred(c):
    while not isinstance(c, AtomD):
        c = c.body if isinstance(c, ForallD) else c.head
    return "hastype" if isinstance(c.atom, Hastype) else "istype"


@settings(max_examples=300, deadline=None)
@given(signatures())
def test_encoded_programs_are_well_typed(sig):
    prog = encode_signature(sig)
    assert len(prog) == len(sig)
    for c in prog.clauses:
        check_formula_types(c)
        assert not any(st_metavars(t) for t in terms_of(c))


@settings(max_examples=300, deadline=None)
@given(signatures())
def test_clause_goal_duality(sig):
    table = reflected_table(sig)
    for d in sig.decls:
        if d.is_family:
            continue
        a, subject = d.classifier.type, SConst(d.name, table[d.name])
        assert strip_polarity(type_to_clause(a, subject, sig)) == \
            strip_polarity(type_to_goal(a, subject, sig))


@settings(max_examples=200, deadline=None)
@given(signatures())
def test_order_stability(sig):
    full = encode_signature(sig)
    assert encode_signature(sig) == full
    for n in range(len(sig) + 1):
        assert encode_signature(sig.prefix(n)).clauses == full.clauses[:n]


def test_family_kinds_reflect_dependency_free():
    sig = parse_signature(PAPER_SIG_TEXT + "k : {x:nat}{y:num x} type.")
    c = encode_signature(sig).clauses[-1]
    assert show_formula(c) == \
        "forall x:tm. hastype x nat => forall y:tm. hastype y (num x) => istype (k x y)"
    assert reflected_table(sig)["k"] == arrows([TM, TM], TY)

import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfhh.encoding import (
    And, AtomG, Hastype, HHProgram, TrueG, encode_signature, judgment_to_goal,
)
from lfhh.erasure import reflected_table
from lfhh.kernel import Derivable, check_object
from lfhh.parser import parse_goal, parse_object, parse_program
from lfhh.printer import show_sterm
from lfhh.prover import (
    Exhausted, FailedNoProof, Incomplete, ProofTrace, Proved, replay_trace, solve,
    solve_iterative, trace_from_json, trace_metavars, trace_to_json,
)
from lfhh.syntax import EMPTY_CONTEXT, TM, MetaVar, SConst, lf_size
from strategies import NAT, PAPER_SIG, RICH_SIG, rich_judgments

PROG = encode_signature(PAPER_SIG)
CONSTS = reflected_table(PAPER_SIG)
RICH_PROG = encode_signature(RICH_SIG)
PAPER_GOAL = parse_goal("hastype (c (\\x:tm. \\y:tm. z)) nat", CONSTS)


class TestSolve:
    def test_paper_goal(self):
        res = solve(PROG, PAPER_GOAL, 5)
        assert isinstance(res, Proved)
        first = res.trace
        assert first.rule == "backchain" and first.clause_index == 3
        assert show_sterm(first.instantiation[0]) == "\\x:tm. \\y:tm. z"
        assert replay_trace(PROG, PAPER_GOAL, first)

    def test_unit_clause(self):
        res = solve(PROG, parse_goal("hastype z nat", CONSTS), 1)
        assert isinstance(res, Proved)
        assert res.trace == ProofTrace("backchain", (), 2, None, ())

    def test_rigid_clash_fails_finitely(self):
        g = parse_goal("hastype z (num z)", CONSTS)
        for d in (1, 5, 20):
            assert solve(PROG, g, d) == FailedNoProof()

    def test_depth_zero(self):
        assert solve(PROG, PAPER_GOAL, 0) == Exhausted(0)

    def test_not_enough_depth(self):
        assert solve(PROG, PAPER_GOAL, 1) == Exhausted(1)

    def test_true_and(self):
        g = And(TrueG(), parse_goal("hastype z nat", CONSTS))
        res = solve(PROG, g, 1)
        assert isinstance(res, Proved) and res.trace.rule == "and"

    def test_hypothetical(self):
        g = parse_goal("forall q:tm. hastype q (num z) => hastype q (num z)", CONSTS)
        res = solve(HHProgram(()), g, 1)
        assert isinstance(res, Proved)
        assert [t.rule for t in (res.trace, res.trace.children[0])] == ["forall", "implies"]
        assert res.trace.children[0].children[0].clause_index == 0

    def test_metavariable_sees_older_eigenvariable(self):
        # the clause's metavariable is created after y, so it may be bound to y
        prog, consts = parse_program("forall x:tm. hastype z (num x).", CONSTS)
        g = parse_goal("forall y:tm. hastype z (num y)", consts)
        assert isinstance(solve(prog, g, 2), Proved)

    def test_non_pattern_reported(self):
        prog, consts = parse_program(
            "f : tm -> tm.\nforall F:tm -> tm. hastype (F z) nat.", CONSTS)
        g = parse_goal("hastype (f z) nat", consts)
        res = solve(prog, g, 3)
        assert isinstance(res, Incomplete)

    def test_metavariable_goal_rejected(self):
        with pytest.raises(ValueError):
            solve(PROG, AtomG(Hastype(MetaVar("M", TM), SConst("nat", CONSTS["nat"]))), 2)

    def test_negative_depth(self):
        with pytest.raises(ValueError):
            solve(PROG, PAPER_GOAL, -1)


class TestIterative:
    def test_finds_minimal_depth(self):
        res = solve_iterative(PROG, PAPER_GOAL, 10)
        assert isinstance(res, Proved) and res.depth == 2

    def test_stops_on_failure(self):
        assert solve_iterative(PROG, parse_goal("hastype z (num z)", CONSTS), 10) == \
            FailedNoProof()

    def test_exhausted(self):
        m = parse_object("c ([x:nat][y:num x] x)", PAPER_SIG)
        g = judgment_to_goal(PAPER_SIG, m, NAT)
        assert isinstance(solve_iterative(PROG, g, 2), Proved)
        assert solve_iterative(PROG, g, 1) == Exhausted(1)


class TestReplay:
    def test_paper_trace(self):
        assert replay_trace(PROG, PAPER_GOAL, solve(PROG, PAPER_GOAL, 5).trace)

    def test_perturbed_clause_index(self):
        t = solve(PROG, PAPER_GOAL, 5).trace
        for i in (0, 1, 2, 7):
            assert not replay_trace(PROG, PAPER_GOAL, dataclasses.replace(t, clause_index=i))

    def test_unit_trace(self):
        g = parse_goal("hastype z nat", CONSTS)
        assert replay_trace(PROG, g, solve(PROG, g, 1).trace)

    def test_wrong_instantiation(self):
        t = solve(PROG, PAPER_GOAL, 5).trace
        bad = parse_goal("hastype (c (\\x:tm. \\y:tm. y)) nat", CONSTS).atom.term.arg
        assert not replay_trace(PROG, PAPER_GOAL, dataclasses.replace(t, instantiation=(bad,)))

    def test_reused_eigenvariable(self):
        t = solve(PROG, PAPER_GOAL, 5).trace
        inner = t.children[0]
        assert inner.rule == "forall"
        clash = dataclasses.replace(inner.children[0].children[0], binder=inner.binder)
        tampered = dataclasses.replace(
            t, children=(dataclasses.replace(
                inner, children=(dataclasses.replace(inner.children[0], children=(clash,)),)),))
        assert not replay_trace(PROG, PAPER_GOAL, tampered)

    def test_json_round_trip(self):
        t = solve(PROG, PAPER_GOAL, 5).trace
        data = trace_to_json(t)
        assert set(data) >= {"rule", "clause_index", "binder", "children"}
        back = trace_from_json(data, CONSTS, trace_metavars(t))
        assert back == t
        assert replay_trace(PROG, PAPER_GOAL, back)


def _goal(j):
    m, a = j
    return judgment_to_goal(RICH_SIG, m, a), 4 * lf_size(m)


@settings(max_examples=1000, deadline=None)
@given(rich_judgments())
def test_well_typed_judgments_prove_and_replay(j):
    m, a = j
    assert isinstance(check_object(RICH_SIG, EMPTY_CONTEXT, m, a), Derivable)
    goal, depth = _goal(j)
    res = solve_iterative(RICH_PROG, goal, depth)
    assert isinstance(res, Proved)
    assert replay_trace(RICH_PROG, goal, res.trace)


@settings(max_examples=300, deadline=None)
@given(rich_judgments(), st.integers(0, 4))
def test_monotone_in_depth(j, extra):
    goal, _ = _goal(j)
    first = solve_iterative(RICH_PROG, goal, 40)
    assert isinstance(first, Proved)
    later = solve(RICH_PROG, goal, first.depth + extra)
    assert isinstance(later, Proved)
    assert later.trace == first.trace


@settings(max_examples=300, deadline=None)
@given(rich_judgments(), st.integers(0, 50))
def test_perturbed_traces_do_not_replay(j, k):
    goal, depth = _goal(j)
    t = solve_iterative(RICH_PROG, goal, depth).trace
    steps = []

    def walk(node, path):
        if node.rule == "backchain":
            steps.append(path)
        for i, c in enumerate(node.children):
            walk(c, path + (i,))
    walk(t, ())
    path = steps[k % len(steps)]

    def bump(node, path):
        if not path:
            return dataclasses.replace(node, clause_index=node.clause_index + 1)
        kids = list(node.children)
        kids[path[0]] = bump(kids[path[0]], path[1:])
        return dataclasses.replace(node, children=tuple(kids))
    bumped = bump(t, path)
    # a bumped index either leaves the program or points at a clause with another head
    assert not replay_trace(RICH_PROG, goal, bumped) or bumped == t

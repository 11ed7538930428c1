"""Traces, path relations, closure, the global trace condition and certificates."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from cycind.logic.syntax import Var
from cycind.logic.text import parse_sequent
from cycind.proofs import build as B
from cycind.proofs.graph import assumption, to_graph
from cycind.trace.certificate import (
    CertificateError, certificate_id, certify, parse_certificate, render, validate_certificate,
)
from cycind.trace.oracle import gtc_bruteforce, gtc_walk_search, random_skeleton
from cycind.trace.relations import (
    EQ, GT, NONE, PathRelation, basic_relations, closure, compose, gtc_check, identity, loop_witness,
    path_relation, trace_pairs,
)

from conftest import CYCLIC, corpus_proof


def rel(src, tgt, rows):
    rows = [[{".": NONE, "=": EQ, ">": GT}[c] for c in r] for r in rows]
    return PathRelation(src, tgt, len(rows), len(rows[0]) if rows else 0, tuple(map(tuple, rows)))


def brute_closure(basics):
    """Every composition of a non-empty word over ``basics``, grown by length until stable."""
    out = set(basics)
    frontier = set(basics)
    while frontier:
        nxt = set()
        for r in frontier:
            for b in basics:
                c = compose(r, b)
                if c is not None and c not in out:
                    nxt.add(c)
        out |= nxt
        frontier = nxt
    return out


class TestTracePairs:
    def test_weakening_stays(self, defs):
        goal = parse_sequent("N(x), E(y), N(z) |- E(y)")
        d = B.weaken(goal, assumption(parse_sequent("N(x), E(y) |- E(y)")))
        g = to_graph(d)
        pairs = trace_pairs(g, g.root, defs)
        assert {(p.parent, p.child) for p in pairs} == {(0, 0), (1, 1)}
        assert not any(p.progressing for p in pairs)

    def test_case_progresses(self, defs):
        goal = parse_sequent("N(u) |- N(u)")
        fresh = [{}, {"x": Var("w")}]
        subs = [assumption(s) for s in B.goals(goal, "Case", defs, pos=0, fresh=fresh)]
        g = to_graph(B.mk(goal, "Case", subs, defs, pos=0, fresh=fresh))
        pairs = trace_pairs(g, g.root, defs)
        assert [(p.premise, p.parent, p.child, p.progressing) for p in pairs] == [(1, 0, 0, True)]

    def test_and_right_shares_antecedent(self, defs):
        goal = parse_sequent("N(x) |- (N(x) & N(x))")
        a, b = B.goals(goal, "AndR")
        g = to_graph(B.mk(goal, "AndR", [assumption(a), assumption(b)]))
        pairs = trace_pairs(g, g.root, defs)
        assert sorted((p.premise, p.parent, p.child) for p in pairs) == [(0, 0, 0), (1, 0, 0)]


class TestPathRelations:
    def _case_graph(self, defs):
        goal = parse_sequent("N(u) |- N(u)")
        fresh = [{}, {"x": Var("w")}]
        subs = [assumption(s) for s in B.goals(goal, "Case", defs, pos=0, fresh=fresh)]
        return to_graph(B.mk(goal, "Case", subs, defs, pos=0, fresh=fresh))

    def test_single_case_step(self, defs):
        g = self._case_graph(defs)
        step = g.nodes[g.root].premises[1]
        r = path_relation((g.root, step), g, defs)
        assert r.cells == ((GT,),)

    def test_cut_then_dropped_atom(self, defs):
        goal = parse_sequent("N(u) |- E(0)")
        left = B.mk(parse_sequent("N(u) |- E(0)"), "Intro", [], defs, pred="E", index=0, subst={})
        right = B.weaken(parse_sequent("N(u), E(0) |- E(0)"), B.axiom(parse_sequent("E(0) |- E(0)")))
        g = to_graph(B.cut(goal, parse_sequent("|- E(0)").succ, left, right))
        top = g.nodes[g.nodes[g.root].premises[1]].premises[0]
        path = (g.root, g.nodes[g.root].premises[1], top)
        r = path_relation(path, g, defs)
        # E(0) after the cut is a new atom: it is not traced from N(u)
        assert r.rows == 1 and r.cells == ((NONE,),)

    def test_identity_is_neutral(self):
        r = rel(0, 0, [">.", "=="])
        assert compose(identity(0, 2), r) == r
        assert compose(r, identity(0, 2)) == r

    def test_gt_then_eq(self):
        assert compose(rel(0, 1, [">"]), rel(1, 0, ["="])).cells == ((GT,),)

    def test_mismatched(self):
        assert compose(rel(0, 1, [">"]), rel(0, 1, ["="])) is None


class TestClosure:
    def test_empty(self):
        assert closure([]).relations == ()

    def test_self_loop_powers(self):
        r = rel(0, 0, [".>", "=."])
        powers, p = [], r
        while p not in powers:
            powers.append(p)
            p = compose(p, r)
        assert set(closure([r]).relations) == set(powers)

    def test_round_trips_in_mutual(self, defs):
        basics = basic_relations(corpus_proof("mutual"), defs)
        cl = set(closure(basics).relations)
        for a in basics:
            for b in basics:
                if a.target == b.source and b.target == a.source:
                    assert compose(a, b) in cl

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_brute_closure(self, seed):
        basics = random_skeleton(random.Random(seed), 4, 3)
        assert set(closure(basics).relations) == brute_closure(basics)


class TestTraceCondition:
    def test_progressing_loop(self):
        assert gtc_check(closure([rel(0, 0, [">"])])) is None

    def test_stay_loop_fails(self):
        r = rel(0, 0, ["="])
        assert gtc_check(closure([r])) == r

    @pytest.mark.parametrize("name", CYCLIC)
    def test_corpus_agrees_with_walks(self, name, defs):
        basics = basic_relations(corpus_proof(name), defs)
        cl = closure(basics)
        bound = 2 * len(cl.relations)
        verdict = gtc_check(cl) is None
        assert verdict
        assert gtc_walk_search(basics, bound) == verdict
        assert gtc_bruteforce(basics, min(bound, 8)) == verdict

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_skeletons_agree(self, seed):
        basics = random_skeleton(random.Random(seed), 6, 4)
        cl = closure(basics)
        verdict = gtc_check(cl) is None
        assert gtc_walk_search(basics, 2 * len(cl.relations)) == verdict
        if verdict:
            # a fully unmerged enumeration, affordable only for short walks
            assert gtc_bruteforce(basics, 6)


class TestLoopWitness:
    def test_direct(self):
        assert loop_witness(rel(0, 0, ["=.", ".>"])) == (1, 1)

    def test_permutation_needs_square(self):
        r = rel(0, 0, [".>", "=."])
        n, p = 1, r
        while not any(p.cells[q][q] == GT for q in range(p.rows)):
            p, n = compose(p, r), n + 1
        assert n == 2
        assert loop_witness(r) == (2, 0)

    def test_not_a_loop(self):
        with pytest.raises(ValueError):
            loop_witness(rel(0, 1, [">"]))


class TestCertificates:
    @pytest.mark.parametrize("name", [n for n in CYCLIC if corpus_proof(n).buds])
    def test_render_parse_validate(self, name, defs):
        c = certify(corpus_proof(name), defs)
        text = render(c)
        assert render(parse_certificate(text)) == text
        assert validate_certificate(text, certificate_id(text)) == c

    def test_tampering_detected(self, defs):
        text = render(certify(corpus_proof("even-or-odd"), defs))
        cid = certificate_id(text)
        with pytest.raises(CertificateError):
            validate_certificate(text.replace("fixpoint", "fixpoint 9 #"), cid)
        with pytest.raises(CertificateError):
            validate_certificate(text + "\n", cid)

    def test_failing_condition_has_no_certificate(self):
        from cycind.trace.certificate import build_certificate

        with pytest.raises(CertificateError):
            build_certificate([rel(0, 0, ["="])], [1])

"""Rule instances, the proof checker and proof files."""
import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from cycind.logic.syntax import Eq, Fn, Sequent, Var
from cycind.logic.text import parse_sequent
from cycind.proofs import build as B
from cycind.proofs.fileformat import parse_proof, show_proof
from cycind.proofs.graph import assumption, assumption_instances, extract_subproofs, to_graph
from cycind.proofs.kernel import check_proof

from conftest import CYCLIC, corpus_proof, nat_defs


def _seq(text):
    return parse_sequent(text)


class TestRules:
    def test_case_n_premises(self, defs):
        goal = _seq("E(u), N(u) |- O(s(u))")
        zero, step = B.goals(goal, "Case", defs, pos=1, fresh=[{}, {"x": Var("w")}])
        assert zero == _seq("E(u), u = 0 |- O(s(u))")
        assert step == _seq("E(u), u = s(w), N(w) |- O(s(u))")

    def test_case_n_checks(self, defs):
        goal = _seq("N(u) |- N(u)")
        fresh = [{}, {"x": Var("w")}]
        subs = [B.mk(g, "Assumption") for g in B.goals(goal, "Case", defs, pos=0, fresh=fresh)]
        d = B.mk(goal, "Case", subs, defs, pos=0, fresh=fresh)
        g = to_graph(d)
        assert check_proof(g, defs, "cyclic") == []
        assert len(assumption_instances(g)) == 2

    def test_wrong_premise_rejected(self, defs):
        goal = _seq("N(u) |- N(u)")
        with pytest.raises(B.BuildError):
            B.mk(goal, "Case", [B.mk(_seq("|- N(0)"), "Assumption")] * 2, defs, pos=0,
                 fresh=[{}, {"x": Var("w")}])

    def test_axiom(self, defs):
        g = to_graph(B.axiom(_seq("E(x) |- E(x)")))
        assert check_proof(g, defs, "ljid") == []


class TestChecker:
    @pytest.mark.parametrize("name", CYCLIC)
    def test_corpus_checks_cyclic(self, name, defs):
        assert check_proof(corpus_proof(name), defs, "cyclic") == []

    def test_cyclic_proof_rejected_in_ljid_mode(self, defs):
        bad = check_proof(corpus_proof("even-or-odd"), defs, "ljid")
        assert {v.tag for v in bad} >= {"Case", "Bud"}

    def test_bud_must_match_companion(self, defs):
        g = corpus_proof("even-or-odd")
        (b, c) = next(iter(g.buds.items()))
        other = next(i for i in g.nodes if i != c and g.nodes[i].seq != g.nodes[c].seq and i != b)
        h = dataclasses.replace(g, buds={b: other})
        assert check_proof(h, defs, "cyclic")

    def test_deterministic(self, defs):
        g = corpus_proof("two-loops")
        assert check_proof(g, defs, "ljid") == check_proof(g, defs, "ljid")

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from(CYCLIC), st.data())
    def test_changed_premise_is_detected(self, name, data):
        g = corpus_proof(name)
        inner = sorted(i for i, n in g.nodes.items() if i != g.root and n.rule.tag != "Bud")
        i = data.draw(st.sampled_from(inner))
        n = g.nodes[i]
        extra = Eq(Fn("0"), Var("nowhere"))
        changed = dataclasses.replace(n, seq=Sequent(n.seq.ante + (extra,), n.seq.succ))
        h = dataclasses.replace(g, nodes={**g.nodes, i: changed})
        assert check_proof(h, nat_defs(), "cyclic")


class TestSubproofs:
    def test_single_cycle(self):
        g = corpus_proof("even-or-odd")
        subs = extract_subproofs(g)
        assert list(subs) == list(g.companions)
        (sub,) = subs.values()
        assert len(sub.assumptions) == len(g.buds)
        assert not sub.buds

    def test_two_loops_are_disjoint(self):
        g = corpus_proof("two-loops")
        subs = extract_subproofs(g)
        assert len(subs) == 2
        a, b = (set(g.preorder(c)) for c in subs)
        assert not a & b
        assert all(len(s.assumptions) == 1 for s in subs.values())

    def test_no_buds(self):
        assert extract_subproofs(corpus_proof("pred")) == {}


class TestAssumptions:
    def test_empty_proof(self):
        assert assumption_instances(to_graph(B.axiom(_seq("E(x) |- E(x)")))) == []

    def test_one(self):
        s = _seq("|- E(0)")
        assert assumption_instances(to_graph(assumption(s))) == [(0, s)]

    def test_order(self):
        a, b = _seq("|- E(0)"), _seq("|- O(s(0))")
        goal = _seq("|- (E(0) & O(s(0)))")
        d = B.mk(goal, "AndR", [assumption(a), assumption(b)])
        assert [s for _, s in assumption_instances(to_graph(d))] == [a, b]


class TestFileFormat:
    @pytest.mark.parametrize("name", CYCLIC)
    def test_roundtrip(self, name):
        g = corpus_proof(name)
        text = show_proof(g)
        assert show_proof(parse_proof(text)) == text

    def test_certificate_id_with_leading_digit(self):
        text = "root 0\nnode 0: |- false ; rule Term cert=6f6e0a ; premises\n"
        g = parse_proof(text)
        assert g.nodes[0].rule["cert"] == "6f6e0a"

    def test_bud_line_required(self):
        from cycind.logic.text import ParseError

        with pytest.raises(ParseError):
            parse_proof("root 0\nnode 0: |- false ; rule Bud ; premises\n")

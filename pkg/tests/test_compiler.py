"""Case-to-induction rewriting, bud elimination, lowering and embedding."""
import time

import pytest

from cycind.compiler.buds import CompileError, base_signature, compile_proof
from cycind.compiler.case_ind import case_to_ind
from cycind.compiler.embed import EmbedError, embed_proof
from cycind.compiler.lower import lower
from cycind.logic.syntax import Var
from cycind.logic.text import parse_sequent
from cycind.proofs import build as B
from cycind.proofs.fileformat import parse_proof, show_proof
from cycind.proofs.graph import assumption, fresh_supply, from_graph, to_graph
from cycind.proofs.kernel import check_proof
from cycind.stage.staging import staged_defs
from cycind.trace.certificate import certify, render, validate_certificate
from cycind.trace.relations import basic_relations, closure, gtc_check

from conftest import CYCLIC, compiled, corpus_proof, nat_defs

TERM_FREE = [n for n in CYCLIC if not corpus_proof(n).buds]


def tags(g):
    return {n.rule.tag for n in g.nodes.values()}


def induction_preds(g):
    out = set()
    for n in g.nodes.values():
        if n.rule.tag == "Ind":
            out.add(n.seq.ante[n.rule["pos"]].pred)
    return out


class TestCaseToInd:
    def _fresh(self):
        return fresh_supply(corpus_proof("pred"))

    def test_no_case_unchanged(self, defs):
        d = B.axiom(parse_sequent("N(x) |- N(x)"))
        assert case_to_ind(d, defs, self._fresh()) is d

    def test_single_case(self, defs):
        goal = parse_sequent("N(u) |- N(u)")
        fresh = [{}, {"x": Var("w")}]
        subs = [assumption(s) for s in B.goals(goal, "Case", defs, pos=0, fresh=fresh)]
        d = case_to_ind(B.mk(goal, "Case", subs, defs, pos=0, fresh=fresh), defs, self._fresh())
        g = to_graph(d)
        assert g.conclusion == goal
        assert "Case" not in tags(g) and "Ind" in tags(g)
        ind = next(n for n in g.nodes.values() if n.rule.tag == "Ind")
        assert len(ind.premises) == 2
        assert check_proof(g, defs, "ljid") == []

    @pytest.mark.parametrize("name", TERM_FREE)
    def test_nested_cases_in_corpus(self, name):
        g = corpus_proof(name)
        out = to_graph(case_to_ind(from_graph(g), nat_defs(), fresh_supply(g)))
        assert "Case" not in tags(out)
        assert out.conclusion == g.conclusion
        assert check_proof(out, staged_defs(nat_defs()), "ljid") == []


class TestCompile:
    @pytest.mark.parametrize("name", CYCLIC)
    def test_corpus(self, name):
        g = corpus_proof(name)
        c = compiled(name)
        assert c.proof.conclusion == g.conclusion
        assert check_proof(c.proof, base_signature(nat_defs()), "ljid") == []
        assert all(ok for _, _, ok in c.entailments)
        assert len(c.entailments) == len(g.buds)

    @pytest.mark.parametrize("name", [n for n in CYCLIC if corpus_proof(n).buds])
    def test_certificate_is_reproducible(self, name):
        c = compiled(name)
        text = render(certify(corpus_proof(name), nat_defs()))
        assert c.certificate == text
        assert c.proof.certificates == {c.cid: text}
        validate_certificate(text, c.cid)

    def test_stage_predicates_removed(self):
        c = compiled("even-or-odd")
        assert "N'" in induction_preds(c.staged)
        assert "N'" not in show_proof(c.proof)
        assert induction_preds(c.proof) <= {"N", "E'", "O'"}

    def test_doubled_predicates_removed(self):
        c = compiled("stage-shift")
        assert {"E''", "O''"} <= induction_preds(c.staged)
        assert "''" not in show_proof(c.proof)

    def test_gtc_failure_rejected(self, defs):
        text = ("root 0\nnode 0: N(x) |- E(x) ; rule Wk keep=[0] succ=keep ; premises 1\n"
                "node 1: N(x) |- E(x) ; rule Bud ; premises\nbud 1 -> 0\n")
        g = parse_proof(text)
        assert check_proof(g, defs, "cyclic") == []
        with pytest.raises(CompileError):
            compile_proof(g, defs)

    def test_open_assumptions_rejected(self, defs):
        g = to_graph(assumption(parse_sequent("N(x) |- E(x)")))
        with pytest.raises(CompileError):
            compile_proof(g, defs)

    def test_output_reads_back(self):
        c = compiled("two-loops")
        text = show_proof(c.proof)
        assert show_proof(parse_proof(text)) == text

    def test_deterministic(self):
        a = compile_proof(corpus_proof("mutual"), nat_defs())
        b = compile_proof(corpus_proof("mutual"), nat_defs())
        assert show_proof(a.proof) == show_proof(b.proof)
        assert a.certificate == b.certificate

    @pytest.mark.parametrize("name", CYCLIC)
    def test_time(self, name):
        t = time.perf_counter()
        compile_proof(corpus_proof(name), nat_defs())
        assert time.perf_counter() - t < 30


class TestLower:
    def test_without_stage_symbols(self):
        base = base_signature(nat_defs())
        g = to_graph(B.axiom(parse_sequent("N(x) |- N(x)")))
        out = lower(g, staged_defs(base), base)
        assert show_proof(out) == show_proof(g)

    @pytest.mark.parametrize("name", ["even-or-odd", "pred", "stage-shift"])
    def test_conclusion_and_check(self, name):
        c = compiled(name)
        base = base_signature(nat_defs())
        out = lower(c.staged, staged_defs(base), base)
        assert out.conclusion == c.staged.conclusion
        assert check_proof(out, base, "ljid") == []


class TestEmbed:
    @pytest.mark.parametrize("name", CYCLIC)
    def test_embed_compiled(self, name):
        c = compiled(name)
        e = embed_proof(c.proof, c.defs)
        assert e.conclusion == corpus_proof(name).conclusion
        assert "Ind" not in tags(e)
        assert check_proof(e, c.defs, "cyclic") == []
        assert gtc_check(closure(basic_relations(e, c.defs))) is None

    @pytest.mark.parametrize("name", TERM_FREE)
    def test_compile_embedded(self, name):
        c = compiled(name)
        e = embed_proof(c.proof, c.defs)
        again = compile_proof(e, c.defs)
        assert again.proof.conclusion == c.proof.conclusion
        assert check_proof(again.proof, base_signature(c.defs), "ljid") == []

    def test_buds_rejected(self, defs):
        with pytest.raises(EmbedError):
            embed_proof(corpus_proof("even-or-odd"), defs)

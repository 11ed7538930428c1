"""Staged formulas, staged proofs, the stage-fact entailment check and destaging."""
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cycind.compiler.embed import embed_proof
from cycind.logic.syntax import Atom, Exists, Forall, Sequent, Var
from cycind.logic.text import parse_formula, parse_sequent
from cycind.proofs.graph import fresh_supply, to_graph
from cycind.proofs.kernel import check_proof
from cycind.stage.destage import Equivalences, destage
from cycind.stage.staging import (
    Lemmas, StageError, bullet, bullet_sequent, circ, ineq_entails, stage_proof, staged_defs, staged_sequent,
)
from cycind.trace.relations import EQ, GT, NONE, PathRelation, basic_relations, closure, gtc_check

from conftest import CYCLIC, corpus_proof, nat_defs


def sd():
    return staged_defs(nat_defs())


class TestBullet:
    def test_atom(self):
        assert bullet(parse_formula("N(x)"), sd()) == Exists("v", Atom("N'", (Var("x"), Var("v"))))

    def test_under_quantifier(self):
        f = bullet(parse_formula("forall y. (E(y) -> N(y))"), sd())
        assert isinstance(f, Forall)
        assert f == parse_formula("forall y. ((exists v. E'(y, v)) -> (exists v. N'(y, v)))")

    def test_sequent(self):
        s = parse_sequent("E(x), x = 0 |- O(s(x))")
        b = bullet_sequent(s, sd())
        assert b.ante == (bullet(s.ante[0], sd()), s.ante[1])
        assert b.succ == bullet(s.succ, sd())

    def test_avoids_argument_names(self):
        f = bullet(parse_formula("N(v)"), sd())
        assert f.var != "v"


class TestCirc:
    def test_axiom_sequent(self):
        s = staged_sequent(parse_sequent("N(x) |- N(x)"), (Var("v1"),), (), sd())
        assert s == parse_sequent("N'(x, v1) |- exists v. N'(x, v)")

    def test_no_inductive_atoms(self):
        ante = (parse_formula("x = 0"),)
        assert circ(ante, (), sd()) == ante

    def test_order(self):
        out = circ((parse_formula("E(x)"), parse_formula("O(y)")), (Var("a"), Var("b")), sd())
        assert out == (parse_formula("E'(x, a)"), parse_formula("O'(y, b)"))

    def test_too_few_stages(self):
        with pytest.raises(StageError):
            circ((parse_formula("E(x)"),), (), sd())


def facts_hold(ineq, env):
    return all(env[a] == env[b] if op == "=" else env[a] > env[b] for op, a, b in ineq)


def entails_oracle(ineq, xs, ys, rel):
    """Every assignment satisfying the facts satisfies every cell."""
    names = sorted({a for _, a, b in ineq} | {b for _, a, b in ineq} | set(xs) | set(ys))
    for vals in itertools.product(range(len(names)), repeat=len(names)):
        env = dict(zip(names, vals))
        if not facts_hold(ineq, env):
            continue
        for q2 in range(rel.rows):
            for q1 in range(rel.cols):
                c = rel.cells[q2][q1]
                if c == GT and not env[ys[q1]] < env[xs[q2]]:
                    return False
                if c == EQ and env[ys[q1]] != env[xs[q2]]:
                    return False
    return True


VARS = ["a", "b", "c", "d"]


class TestIneqEntails:
    def test_missing_constraint(self):
        r = PathRelation(0, 0, 1, 1, ((GT,),))
        assert not ineq_entails((), ("a",), ("b",), r)

    def test_chain(self):
        r = PathRelation(0, 0, 1, 1, ((GT,),))
        assert ineq_entails((("=", "a", "c"), (">", "c", "b")), ("a",), ("b",), r)

    def test_unsatisfiable_entails_everything(self):
        r = PathRelation(0, 0, 1, 1, ((GT,),))
        assert ineq_entails(((">", "a", "c"), (">", "c", "a")), ("a",), ("b",), r)

    @settings(max_examples=300, deadline=None)
    @given(
        st.lists(st.tuples(st.sampled_from("=>"), st.sampled_from(VARS), st.sampled_from(VARS)), max_size=5),
        st.integers(1, 2), st.integers(1, 2), st.data(),
    )
    def test_against_assignments(self, ineq, rows, cols, data):
        xs = VARS[:rows]
        ys = VARS[rows:rows + cols]
        cells = tuple(tuple(data.draw(st.sampled_from((NONE, EQ, GT))) for _ in range(cols)) for _ in range(rows))
        r = PathRelation(0, 0, rows, cols, cells)
        assert ineq_entails(tuple(ineq), xs, ys, r) == entails_oracle(ineq, xs, ys, r)


class TestStaging:
    def test_case_n_facts(self):
        g = corpus_proof("even-or-odd")
        sp = stage_proof(g, nat_defs(), start=g.companions[0])
        (sa,) = sp.assumptions
        (v,) = sp.vec
        (w,) = sa.vec
        # stage of the companion equals the unfolded stage, which is above the bud's stage
        (eq, gt) = sa.ineq
        assert eq[0] == "=" and eq[1] == v.name
        assert gt == (">", eq[2], w.name)

    @pytest.mark.parametrize("name", CYCLIC)
    def test_staged_proof_checks(self, name):
        g = corpus_proof(name)
        sp = stage_proof(g, nat_defs())
        out = to_graph(sp.proof)
        assert check_proof(out, sp.defs, "cyclic") == []
        assert out.conclusion == staged_sequent(g.conclusion, sp.vec, (), sp.defs)

    @pytest.mark.parametrize("cyclic", [True, False])
    def test_stage_numbers_are_numbers(self, cyclic):
        s = sd()
        lem = Lemmas(s, fresh_supply(corpus_proof("pred")))
        atom = parse_formula("E'(x, v)")
        d = lem.stage_is_number(Sequent((atom,), parse_formula("N(v)")), atom, cyclic=cyclic)
        g = to_graph(d)
        assert check_proof(g, s, "cyclic" if cyclic else "ljid") == []
        if cyclic:
            assert gtc_check(closure(basic_relations(g, s))) is None


def destaged(name):
    g = corpus_proof(name)
    fresh = fresh_supply(g)
    s = sd()
    lem = Lemmas(s, fresh)
    sp = stage_proof(g, nat_defs(), fresh=fresh, sd=s, lemmas=lem)
    d = destage(sp.proof, g.conclusion, sp.vec, Equivalences(s, lem, fresh))
    return g, to_graph(d), fresh


class TestDestage:
    @pytest.mark.parametrize("name", CYCLIC)
    def test_roundtrip(self, name):
        g, d, fresh = destaged(name)
        assert d.conclusion == g.conclusion
        # the equivalence lemmas use induction, so read the result back as a cyclic proof
        e = embed_proof(d, sd(), fresh)
        assert e.conclusion == g.conclusion
        assert check_proof(e, sd(), "cyclic") == []
        assert gtc_check(closure(basic_relations(e, sd()))) is None
        assert len(e.assumptions) == len(g.buds)

    @pytest.mark.parametrize("pred", ["N", "E", "O"])
    def test_equivalences(self, pred):
        s = sd()
        fresh = fresh_supply(corpus_proof("pred"))
        eqv = Equivalences(s, Lemmas(s, fresh), fresh)
        atom = Atom(pred, (Var("t"),))
        fwd = eqv.forward(Sequent((atom,), bullet(atom, s)), atom)
        back = eqv.backward(Sequent((bullet(atom, s),), atom), atom)
        for d in (fwd, back):
            assert check_proof(to_graph(d), s, "ljid") == []

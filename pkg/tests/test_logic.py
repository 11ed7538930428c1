"""Syntax, substitution, parsing and definition sets."""
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cycind.logic.arith import concat, encode, length, proj
from cycind.logic.defs import parse_defs, show_defs
from cycind.logic.syntax import (
    And, Atom, Bot, Eq, Exists, FreshSupply, Fn, Forall, Imp, Not, Or, Sequent, Var, alpha_eq,
    free_vars, plus, substitute, succ,
)
from cycind.logic.text import ParseError, canonical, parse, parse_sequent, show, show_sequent

from conftest import CORPUS, corpus_proof, nat_defs

ZERO = Fn("0")
NAMES = ["x", "y", "z"]

terms = st.recursive(
    st.sampled_from([Var(n) for n in NAMES] + [ZERO]),
    lambda t: st.one_of(st.builds(succ, t), st.builds(plus, t, t)),
    max_leaves=4,
)


def _formulas():
    atoms = st.one_of(
        st.builds(lambda t: Atom("E", (t,)), terms),
        st.builds(lambda t: Atom("O", (t,)), terms),
        st.builds(Eq, terms, terms),
        st.builds(lambda a, b: Atom("<", (a, b)), terms, terms),
        st.just(Bot()),
    )

    def grow(f):
        return st.one_of(
            st.builds(And, f, f), st.builds(Or, f, f), st.builds(Imp, f, f), st.builds(Not, f),
            st.builds(Forall, st.sampled_from(NAMES), f), st.builds(Exists, st.sampled_from(NAMES), f),
        )

    return st.recursive(atoms, grow, max_leaves=6)


formulas = _formulas()

# A three-element model: s and + saturate at 2.
DOM = (0, 1, 2)


def ev_term(t, env):
    if isinstance(t, Var):
        return env[t.name]
    if t.name == "0":
        return 0
    if t.name == "s":
        return min(ev_term(t.args[0], env) + 1, 2)
    return min(ev_term(t.args[0], env) + ev_term(t.args[1], env), 2)


def ev(f, env):
    if isinstance(f, Atom):
        vals = [ev_term(a, env) for a in f.args]
        if f.pred == "<":
            return vals[0] < vals[1]
        return (vals[0] % 2 == 0) == (f.pred == "E")
    if isinstance(f, Eq):
        return ev_term(f.lhs, env) == ev_term(f.rhs, env)
    if isinstance(f, Bot):
        return False
    if isinstance(f, And):
        return ev(f.left, env) and ev(f.right, env)
    if isinstance(f, Or):
        return ev(f.left, env) or ev(f.right, env)
    if isinstance(f, Imp):
        return not ev(f.left, env) or ev(f.right, env)
    if isinstance(f, Not):
        return not ev(f.body, env)
    q = all if isinstance(f, Forall) else any
    return q(ev(f.body, {**env, f.var: d}) for d in DOM)


class TestParsing:
    def test_atom(self):
        assert parse("N(s(0))") == Atom("N", (Fn("s", (ZERO,)),))

    def test_unclosed_atom_offset(self):
        with pytest.raises(ParseError) as e:
            parse("P(x")
        assert e.value.offset == 4

    def test_sequent(self):
        s = parse("E(x), O(y) |- E((x + y))")
        assert isinstance(s, Sequent) and len(s.ante) == 2

    @pytest.mark.parametrize("name", sorted(p.stem for p in CORPUS.glob("*.cp")))
    def test_corpus_sequents_are_canonical(self, name):
        g = corpus_proof(name)
        for n in g.nodes.values():
            text = show_sequent(n.seq)
            assert canonical(text) == text
            assert parse_sequent(text) == n.seq

    @given(formulas)
    def test_print_parse_roundtrip(self, f):
        assert alpha_eq(parse(show(f)), f)
        assert show(parse(show(f))) == show(f)


class TestSubstitution:
    def test_capture_is_avoided(self):
        f = Forall("y", Eq(Var("x"), Var("y")))
        g = substitute(f, {"x": Var("y")})
        assert g.var != "y"
        assert free_vars(g) == {"y"}

    def test_bound_variable_untouched(self):
        f = Forall("x", Atom("E", (Var("x"),)))
        assert substitute(f, {"x": ZERO}) == f

    @settings(max_examples=300)
    @given(formulas, st.sampled_from(NAMES), terms)
    def test_substitution_lemma(self, f, x, t):
        # f[t/x] under env agrees with f under env[x := value of t]
        g = substitute(f, {x: t})
        for vals in itertools.product(DOM, repeat=len(NAMES)):
            env = dict(zip(NAMES, vals))
            assert ev(g, env) == ev(f, {**env, x: ev_term(t, env)})

    @given(formulas)
    def test_alpha_eq_is_reflexive_under_renaming(self, f):
        fresh = FreshSupply()
        g = substitute(f, {n: Var(n) for n in NAMES})
        assert alpha_eq(f, g)
        assert not free_vars(f) & {fresh("v")}


class TestSequenceCodes:
    def test_length(self):
        assert length(encode([5, 7])) == 2

    def test_proj(self):
        assert proj(encode([5, 7]), 1) == 7

    def test_concat_empty(self):
        assert concat(encode([]), encode([3])) == encode([3])

    def test_proj_out_of_range(self):
        with pytest.raises(IndexError):
            proj(encode([1]), 1)


class TestDefinitions:
    def test_roundtrip(self):
        d = nat_defs()
        assert show_defs(parse_defs(show_defs(d))) == show_defs(d)

    def test_blocks(self):
        d = nat_defs()
        assert set(d.block("E")) == {"E", "O"}
        assert d.is_inductive("N")

    def test_unknown_line(self):
        with pytest.raises(ParseError):
            parse_defs("signature\nend\nfrobnicate\n")

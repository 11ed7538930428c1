"""Finite-model laboratory: relations, sequence sets, Kleene-Brouwer relations,
Erdos trees and the disjunctive well-foundedness chain."""
import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cycind.lab.core import (
    KBMain, LabError, System, disjointify, ds, dt, et, et2, et2_extensions, ext_relation, insert,
    is_wellfounded, kb1, kb_relation, left_relation, monoseq, ms_r, power, pr_check, product, restrict,
)
from cycind.lab.oracle import acyclic
from cycind.lab.sweeps import kb_sweep, pr_sweep
from cycind.lab.systems import (
    all_systems, parse_system, parse_tree, random_lifted_tree, random_relation, random_system, show_system,
    show_tree, strict_orders,
)


def chain_oracle(universe, rel):
    """Acyclic iff no descending chain has more than |U| elements (depth-first)."""
    succ = {}
    for a, b in rel:
        succ.setdefault(a, []).append(b)
    n = len(set(universe))

    def longest(a, depth):
        if depth > n:
            return True
        return any(longest(b, depth + 1) for b in succ.get(a, ()))

    return not any(longest(a, 1) for a in universe)


def kb_oracle(x, y, sibling):
    """Prefix clause or first difference ordered by ``sibling(parent, a, b)``."""
    if len(y) > len(x) and y[:len(x)] == x:
        return True
    for i in range(1, min(len(x), len(y))):
        if x[:i] == y[:i] and sibling(x[i - 1], x[i], y[i]):
            return True
    return False


def seeds():
    return st.integers(0, 2**32 - 1)


# The three-element system used throughout: R1 = {3>2, 3>1}, R2 = {2>1}.
S3 = System.make([1, 2, 3], [{(3, 2), (3, 1)}, {(2, 1)}])


class TestRelations:
    def test_chain_is_wellfounded(self):
        assert is_wellfounded([0, 1, 2], {(2, 1), (1, 0)})

    def test_loop(self):
        assert not is_wellfounded([0], {(0, 0)})

    @settings(max_examples=300)
    @given(seeds())
    def test_matches_chain_search(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 5)
        r = random_relation(rng, n, rng.random() * 0.5)
        assert is_wellfounded(range(n), r) == chain_oracle(range(n), r) == acyclic(range(n), r)

    def test_power_one(self):
        r = frozenset({(2, 1), (1, 0)})
        assert power(r, 1) == r

    def test_product_of_chains(self):
        u, r = product([((0, 1), {(1, 0)}), ((0, 1), {(1, 0)})])
        assert len(u) == 4
        assert chain_oracle(u, r)

    def test_ext_on_two(self):
        assert ext_relation([(), ("a",)]) == {((), ("a",))}

    @settings(max_examples=150)
    @given(seeds(), st.integers(1, 4))
    def test_power_preserves_acyclicity(self, seed, n):
        rng = random.Random(seed)
        k = rng.randint(1, 5)
        r = random_relation(rng, k, 0.3)
        assert chain_oracle(range(k), power(r, n)) == chain_oracle(range(k), r)

    @settings(max_examples=150)
    @given(seeds())
    def test_restriction_preserves_acyclicity(self, seed):
        rng = random.Random(seed)
        k = rng.randint(1, 5)
        r = random_relation(rng, k, 0.3)
        sub = [a for a in range(k) if rng.random() < 0.5]
        if chain_oracle(range(k), r):
            assert chain_oracle(sub, restrict(r, sub))

    @settings(max_examples=100)
    @given(seeds())
    def test_product_acyclic(self, seed):
        rng = random.Random(seed)
        parts = []
        for _ in range(2):
            k = rng.randint(1, 3)
            parts.append((range(k), frozenset(random_relation(rng, k, 0.4))))
        u, r = product(parts)
        assert chain_oracle(u, r) == all(chain_oracle(a, b) for a, b in parts)

    @settings(max_examples=150)
    @given(seeds())
    def test_ds_ext_matches_relation(self, seed):
        rng = random.Random(seed)
        k = rng.randint(1, 4)
        r = random_relation(rng, k, 0.3)
        seqs = ds(range(k), r, bound=k + 1)
        # a cycle shows up as a decreasing sequence longer than the universe
        assert (max(map(len, seqs)) <= k) == chain_oracle(range(k), r)

    def test_cyclic_enumeration_refused(self):
        with pytest.raises(LabError):
            ds([0, 1], {(0, 1), (1, 0)})


class TestSequences:
    def test_dt_chain(self):
        assert (3, 2, 1) in dt([1, 2, 3], {(3, 2), (2, 1), (3, 1)})

    def test_dt_needs_transitivity(self):
        assert (3, 2, 1) not in dt([1, 2, 3], {(3, 2), (2, 1)})

    def test_monoseq_rejects_color_change(self):
        s = System.make(["a", "b", "c"], [{("a", "b"), ("b", "c")}, {("a", "c")}])
        assert not monoseq(s, ("a", "b", "c"))

    def test_monoseq_accepts(self):
        # 3 reaches 2 and 1 in color 1; 2 reaches 1 in color 2
        assert monoseq(S3, (3, 2, 1))
        assert not monoseq(S3, (3, 2, 4))

    @settings(max_examples=80, deadline=None)
    @given(seeds())
    def test_ms_r_matches_filter(self, seed):
        s = disjointify(random_system(random.Random(seed), 5, 3))
        for r in s.universe:
            want = {x for x in dt(s.universe, s.union) if x and x[0] == r and monoseq(s, x)}
            assert set(ms_r(s, r)) == want


class TestKleeneBrouwer:
    def test_example(self):
        tree = [(0,), (0, 1), (0, 2)]
        rel = kb_relation(tree, {0: {(1, 2)}})
        want = {(x, y) for x in tree for y in tree if kb_oracle(x, y, lambda u, a, b: (u, a, b) == (0, 1, 2))}
        assert rel == want == {((0,), (0, 1)), ((0,), (0, 2)), ((0, 1), (0, 2))}

    def test_singleton(self):
        assert kb_relation([(0,)], {}) == frozenset()

    def test_prefix_only(self):
        tree = [(0,), (0, 1), (0, 2), (0, 1, 3)]
        assert kb_relation(tree, {}) == {(x, y) for x in tree for y in tree if len(y) > len(x) and y[:len(x)] == x}

    @settings(max_examples=200, deadline=None)
    @given(seeds())
    def test_random_trees(self, seed):
        tree, rels = random_lifted_tree(random.Random(seed), 25)
        rel = kb_relation(tree, rels)
        want = {(x, y) for x in tree for y in tree if kb_oracle(x, y, lambda u, a, b: (a, b) in rels.get(u, ()))}
        assert rel == want
        assert chain_oracle(tree, rel)
        assert all(a != b for a, b in rel)

    def test_one_color_left_empty(self):
        s = System.make([1, 2, 3], [{(3, 2), (3, 1), (2, 1)}])
        assert all(left_relation(s, u) == frozenset() for u in s.universe)
        seqs = ms_r(s, 3)
        assert kb1(s, 3) == {(x, y) for x in seqs for y in seqs if len(y) > len(x) and y[:len(x)] == x}

    def test_left_relation_by_definition(self):
        d = disjointify(S3)
        # 3 reaches 2 and 1 in color 1 only: nothing to compare
        assert left_relation(d, 3) == frozenset()
        s = System.make([1, 2, 3], [{(3, 2)}, {(3, 1), (2, 1)}])
        assert left_relation(s, 3) == {(2, 1)}

    @settings(max_examples=40, deadline=None)
    @given(seeds())
    def test_kb_main_acyclic(self, seed):
        s = disjointify(random_system(random.Random(seed), 4, 3))
        for r in s.universe:
            main = KBMain(s, r)
            carrier = main.carrier(3000)
            assert chain_oracle(carrier, main.pairs(carrier))


class TestErdosTrees:
    def test_insert_base(self):
        s = System.make([2, 3], [{(3, 2)}])
        assert insert(s, 2, {(3,)}, (3,)) == {(3,), (3, 2)}

    def test_insert_step(self):
        assert insert(S3, 1, {(3,), (3, 2)}, (3,)) == {(3,), (3, 2), (3, 2, 1)}

    def test_et(self):
        assert et(S3, (3, 2, 1)) == {(3,), (3, 2), (3, 2, 1)}

    def test_et2_order(self):
        assert et2(S3, (3, 2, 1)) == ((3,), (3, 2), (3, 2, 1))

    def test_empty_sequence(self):
        with pytest.raises(LabError):
            et(S3, ())

    @settings(max_examples=60, deadline=None)
    @given(seeds())
    def test_extension_goes_down(self, seed):
        s = disjointify(random_system(random.Random(seed), 5, 3))

        def left(u, a, b):
            ca, cb = s.color(u, a), s.color(u, b)
            return ca is not None and cb is not None and ca < cb

        for x, y, ok in et2_extensions(s):
            ex, ey = et2(s, x), et2(s, y)
            assert ok
            assert kb_oracle(ex, ey, lambda _, a, b: kb_oracle(a, b, left))


class TestDisjointify:
    def test_unchanged(self):
        assert disjointify(S3) == S3

    def test_overlap_removed(self):
        s = System.make([0, 1], [{(1, 0)}, {(1, 0)}])
        assert disjointify(s).colors == (frozenset({(1, 0)}), frozenset())

    @settings(max_examples=200)
    @given(seeds())
    def test_union_kept(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 5)
        cols = [random_relation(rng, n, 0.3) for _ in range(rng.randint(1, 3))]
        s = System.make(range(n), cols)
        d = disjointify(s)
        assert d.union == s.union
        assert all(not (a & b) for a, b in itertools.combinations(d.colors, 2))


class TestChain:
    def test_one_color(self):
        s = System.make([0, 1, 2], [{(2, 1), (1, 0), (2, 0)}])
        assert pr_check(s).ok

    def test_three_element_system(self):
        v = pr_check(S3)
        assert v.ok
        lemmas = [name for name, _ in v.steps]
        assert lemmas == ["colors well-founded", "Trans", "disjointify", "DT per color", "Left", "ET", "DS"]
        assert acyclic(S3.universe, S3.union)

    def test_cyclic_color_refused(self):
        v = pr_check(System.make([0, 1], [{(0, 1), (1, 0)}]))
        assert not v.ok and v.failure.startswith("precondition")

    def test_intransitive_union_refused(self):
        v = pr_check(System.make([0, 1, 2], [{(2, 1)}, {(1, 0)}]))
        assert not v.ok and "transitive" in v.failure

    def test_exhaustive_small(self):
        for n, k, s in all_systems(3, 2):
            v = pr_check(s)
            assert v.ok == acyclic(s.universe, s.union) == True  # noqa: E712

    def test_strict_order_counts(self):
        # labelled posets on 0..3 elements
        assert [len(strict_orders(n)) for n in range(4)] == [1, 1, 3, 19]

    def test_sweep_is_reproducible(self):
        a = pr_sweep(2, 2, seed=5, samples=30)
        assert a == pr_sweep(2, 2, seed=5, samples=30)
        assert sum(g["disagreements"] + g["lemma_failures"] for g in a) == 0

    def test_kb_sweep(self):
        out = kb_sweep(seed=2, samples=50)
        assert out["trees"] == 50 and out["cyclic"] == out["reflexive"] == out["disagreements"] == 0


class TestFormats:
    def test_system_roundtrip(self):
        assert parse_system(show_system(S3)) == S3

    def test_tree_roundtrip(self):
        tree, rels = random_lifted_tree(random.Random(1), 10)
        t2, r2 = parse_tree(show_tree(tree, rels))
        assert sorted(t2) == sorted(tree)
        assert {u: set(r) for u, r in r2.items()} == {u: set(r) for u, r in rels.items() if r}

    @pytest.mark.parametrize("text", ["colors 2\n", "universe 0 1\nR0 0 1\n", "universe 0\nR1 0\n",
                                      "universe a\n", "universe 0 1\ncolors 1\nR2 0 1\n"])
    def test_bad_system(self, text):
        with pytest.raises(LabError):
            parse_system(text)

    def test_pair_outside_universe(self):
        with pytest.raises(LabError):
            parse_system("universe 0\nR1 0 5\n")

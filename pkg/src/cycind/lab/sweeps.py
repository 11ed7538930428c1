"""Seeded sweeps over colored systems and lifted trees."""
from __future__ import annotations

import random

from .core import is_wellfounded, kb_relation, pr_check
from .oracle import acyclic
from .systems import all_systems, random_lifted_tree, random_system


def _record(part, n, k):
    return {"part": part, "u": n, "k": k, "systems": 0, "verdict_ok": 0, "disagreements": 0,
            "lemma_failures": 0, "et_failures": 0, "extensions": 0}


def pr_sweep(max_u=4, max_k=2, seed=0, samples=10000, rand_u=6, rand_k=3, on_disagreement=None):
    """Exhaustive systems up to ``max_u``/``max_k`` and ``samples`` random ones.

    Returns one summary record per (part, |U|, k) in a fixed order.
    """
    groups = {}

    def run(part, n, k, system):
        g = groups.setdefault((part, n, k), _record(part, n, k))
        v = pr_check(system)
        oracle = acyclic(system.universe, system.union)
        g["systems"] += 1
        g["verdict_ok"] += v.ok
        g["extensions"] += v.extensions
        if not v.ok and not v.failure.startswith("precondition"):
            g["lemma_failures"] += 1
            g["et_failures"] += v.failure == "ET"
        if v.ok != oracle:
            g["disagreements"] += 1
            if on_disagreement is not None:
                on_disagreement(system, v)

    for n, k, s in all_systems(max_u, max_k):
        run("exhaustive", n, k, s)
    rng = random.Random(seed)
    for _ in range(samples):
        s = random_system(rng, rand_u, rand_k)
        run("random", len(s.universe), s.k, s)
    return [groups[key] for key in sorted(groups, key=lambda t: (t[0] != "exhaustive", t[1], t[2]))]


def kb_sweep(seed=0, samples=1000, max_nodes=25, labels=6):
    """Kleene-Brouwer relations of random lifted trees: acyclic and irreflexive."""
    rng = random.Random(seed)
    out = {"trees": 0, "max_nodes": 0, "pairs": 0, "cyclic": 0, "reflexive": 0, "disagreements": 0}
    for _ in range(samples):
        tree, rels = random_lifted_tree(rng, max_nodes, labels)
        rel = kb_relation(tree, rels)
        ok = is_wellfounded(tree, rel)
        out["trees"] += 1
        out["max_nodes"] = max(out["max_nodes"], len(tree))
        out["pairs"] += len(rel)
        out["cyclic"] += not ok
        out["reflexive"] += any(a == b for a, b in rel)
        out["disagreements"] += ok != acyclic(tree, rel)
    return out

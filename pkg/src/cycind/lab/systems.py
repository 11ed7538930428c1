"""Enumerating and sampling colored systems and lifted trees, and their text formats.

System files have one pair per line::

    universe 0 1 2 3
    colors 2
    R1 3 2
    R2 2 1

``colors`` is optional (the largest color used otherwise).  Tree files have
one sequence per line and optional sibling relations ``rel u a b`` meaning
``a >_u b``::

    seq 0
    seq 0 1
    rel 0 1 2
"""
from __future__ import annotations

import itertools

from .core import LabError, System, transitive_closure


def strict_orders(n) -> list:
    """Every strict partial order on ``range(n)``, as sorted pair tuples."""
    if n > 5:
        raise LabError("exhaustive enumeration is limited to five elements")
    pairs = [(a, b) for a in range(n) for b in range(n) if a < b]
    out = []
    # orient each comparable pair either way, or leave it out; keep transitive results
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        rel = set()
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                rel.add((a, b))
            elif c == 2:
                rel.add((b, a))
        if all((a, d) in rel for a, b in rel for c, d in rel if b == c):
            out.append(tuple(sorted(rel)))
    return out


def colorings(order, k):
    """Each pair of ``order`` gets a non-empty set of the ``k`` colors."""
    subsets = [s for m in range(1, k + 1) for s in itertools.combinations(range(k), m)]
    for choice in itertools.product(subsets, repeat=len(order)):
        cols = [set() for _ in range(k)]
        for p, s in zip(order, choice):
            for c in s:
                cols[c].add(p)
        yield cols


def all_systems(max_u, max_k):
    """``(n, k, system)`` for every system with acyclic colors and transitive union."""
    for n in range(1, max_u + 1):
        orders = strict_orders(n)
        for k in range(1, max_k + 1):
            for order in orders:
                for cols in colorings(order, k):
                    yield n, k, System.make(range(n), cols)


def random_order(rng, n, density=None) -> frozenset:
    perm = list(range(n))
    rng.shuffle(perm)
    p = rng.random() if density is None else density
    rel = {(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p}
    return transitive_closure(rel)


def random_system(rng, max_u=6, max_k=3) -> System:
    n = rng.randint(1, max_u)
    k = rng.randint(1, max_k)
    order = sorted(random_order(rng, n))
    cols = [set() for _ in range(k)]
    for p in order:
        for c in rng.sample(range(k), rng.randint(1, k)):
            cols[c].add(p)
    return System.make(range(n), cols)


def random_relation(rng, n, p=0.3) -> frozenset:
    """Any relation on ``range(n)``, loops included."""
    return frozenset((a, b) for a in range(n) for b in range(n) if rng.random() < p)


def random_lifted_tree(rng, max_nodes=25, labels=6) -> tuple:
    """``(tree, sibling relations)``: a lifted tree rooted at ``<0>`` over ``range(labels)``
    and an acyclic relation per label."""
    size = rng.randint(1, max_nodes)
    tree = [(0,)]
    have = {(0,)}
    tries = 0
    while len(tree) < size and tries < 20 * max_nodes:
        tries += 1
        parent = rng.choice(tree)
        child = parent + (rng.randrange(labels),)
        if child not in have:
            have.add(child)
            tree.append(child)
    rels = {u: random_order(rng, labels) for u in range(labels)}
    return tuple(sorted(tree)), rels


# -- text formats ---------------------------------------------------------------------


def _ints(words, line_no):
    try:
        return [int(w) for w in words]
    except ValueError:
        raise LabError(f"line {line_no}: expected integers") from None


def parse_system(text: str) -> System:
    universe = None
    k = None
    pairs = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "universe":
            universe = _ints(rest, no)
        elif head == "colors":
            if len(rest) != 1 or _ints(rest, no)[0] < 1:
                raise LabError(f"line {no}: colors takes one positive number")
            k = int(rest[0])
        elif head.startswith("R") and head[1:].isdigit():
            if len(rest) != 2:
                raise LabError(f"line {no}: a pair line is 'R<i> x y'")
            c = int(head[1:])
            if c < 1:
                raise LabError(f"line {no}: colors count from 1")
            a, b = _ints(rest, no)
            pairs.append((c, a, b))
        else:
            raise LabError(f"line {no}: unknown line {head!r}")
    if universe is None:
        raise LabError("missing universe line")
    top = max((c for c, _, _ in pairs), default=1)
    k = k or top
    if top > k:
        raise LabError(f"color {top} used but only {k} declared")
    cols = [set() for _ in range(k)]
    for c, a, b in pairs:
        cols[c - 1].add((a, b))
    return System.make(universe, cols)


def show_system(s: System) -> str:
    lines = ["universe " + " ".join(map(str, s.universe)), f"colors {s.k}"]
    for i, r in enumerate(s.colors, 1):
        lines += [f"R{i} {a} {b}" for a, b in sorted(r)]
    return "\n".join(lines) + "\n"


def parse_tree(text: str) -> tuple:
    tree = []
    rels = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "seq":
            if not rest:
                raise LabError(f"line {no}: lifted trees have no empty sequence")
            tree.append(tuple(_ints(rest, no)))
        elif head == "rel":
            if len(rest) != 3:
                raise LabError(f"line {no}: a relation line is 'rel u a b'")
            u, a, b = _ints(rest, no)
            rels.setdefault(u, set()).add((a, b))
        else:
            raise LabError(f"line {no}: unknown line {head!r}")
    return tuple(tree), {u: frozenset(r) for u, r in rels.items()}


def show_tree(tree, rels) -> str:
    lines = ["seq " + " ".join(map(str, x)) for x in sorted(tree)]
    for u in sorted(rels):
        lines += [f"rel {u} {a} {b}" for a, b in sorted(rels[u])]
    return "\n".join(lines) + "\n"

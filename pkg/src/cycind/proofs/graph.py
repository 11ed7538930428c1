"""Derivation graphs and the mutable builder used by transformations."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..logic.syntax import Sequent
from .rules import Rule, make_rule


@dataclass(frozen=True)
class Node:
    id: int
    seq: Sequent
    rule: Rule
    premises: tuple = ()


@dataclass
class ProofGraph:
    """Nodes keyed by id; ``buds`` maps bud ids to companion ids.

    Treated as immutable once built.  ``certificates`` maps certificate ids
    to their text.
    """

    nodes: dict
    root: int
    buds: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)

    @property
    def conclusion(self) -> Sequent:
        return self.nodes[self.root].seq

    @property
    def assumptions(self) -> tuple:
        return tuple(i for i in self.preorder() if self.nodes[i].rule.tag == "Assumption")

    @property
    def companions(self) -> tuple:
        return tuple(sorted(set(self.buds.values())))

    def preorder(self, start=None) -> list:
        """Node ids reachable from ``start`` along premises, first-visit order."""
        start = self.root if start is None else start
        seen = set()
        out = []
        stack = [start]
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            out.append(i)
            stack.extend(p for p in reversed(self.nodes[i].premises) if p not in seen)
        return out

    def postorder(self, start=None) -> list:
        """Reachable ids with every premise listed before its conclusion."""
        start = self.root if start is None else start
        done, out = set(), []
        stack = [(start, False)]
        while stack:
            i, expanded = stack.pop()
            if i in done:
                continue
            if expanded:
                done.add(i)
                out.append(i)
                continue
            stack.append((i, True))
            stack.extend((p, False) for p in reversed(self.nodes[i].premises) if p not in done)
        return out

    def leaves_in_order(self, start=None) -> list:
        """Leaf occurrences left to right (a shared leaf may repeat)."""
        out = []
        stack = [self.root if start is None else start]
        while stack:
            i = stack.pop()
            prem = self.nodes[i].premises
            if not prem:
                out.append(i)
            stack.extend(reversed(prem))
        return out


class D:
    """Builder node.  Sharing a ``D`` object yields a shared graph node."""

    __slots__ = ("seq", "rule", "prems", "target")

    def __init__(self, seq: Sequent, rule: Rule, prems=(), target=None):
        self.seq = seq
        self.rule = rule
        self.prems = tuple(prems)
        self.target = target

    def __repr__(self):
        return f"D({self.rule.tag}, {len(self.prems)} premises)"


def leaf(seq, tag, **data) -> D:
    return D(seq, make_rule(tag, **data))


def node(seq, tag, prems, **data) -> D:
    return D(seq, make_rule(tag, **data), prems)


def assumption(seq) -> D:
    return D(seq, make_rule("Assumption"))


def to_graph(root: D, certificates=None) -> ProofGraph:
    """Number builder nodes in preorder; shared objects become shared nodes."""
    ids = {}
    order = []
    stack = [root]
    while stack:
        d = stack.pop()
        if id(d) in ids:
            continue
        ids[id(d)] = len(order)
        order.append(d)
        stack.extend(p for p in reversed(d.prems) if id(p) not in ids)
    nodes = {}
    buds = {}
    for d in order:
        i = ids[id(d)]
        nodes[i] = Node(i, d.seq, d.rule, tuple(ids[id(p)] for p in d.prems))
        if d.rule.tag == "Bud":
            if d.target is None or id(d.target) not in ids:
                raise ValueError("bud without a companion inside the derivation")
            buds[i] = ids[id(d.target)]
    return ProofGraph(nodes, 0, buds, dict(certificates or {}))


def from_graph(g: ProofGraph, start=None) -> D:
    made = {}
    for i in g.postorder(start):
        n = g.nodes[i]
        made[i] = D(n.seq, n.rule, tuple(made[p] for p in n.premises))
    for b, c in g.buds.items():
        if b in made:
            made[b].target = made.get(c)
    return made[g.root if start is None else start]


def assumption_instances(g: ProofGraph) -> list:
    """Open assumptions as (leaf id, sequent) in left-to-right leaf order."""
    return [(i, g.nodes[i].seq) for i in g.preorder() if g.nodes[i].rule.tag == "Assumption"]


def extract_subproofs(g: ProofGraph) -> dict:
    """Companion id -> bud-free subproof rooted there, buds turned into assumptions."""
    out = {}
    for c in g.companions:
        made = {}
        for i in g.postorder(c):
            n = g.nodes[i]
            rule = make_rule("Assumption") if n.rule.tag == "Bud" else n.rule
            made[i] = D(n.seq, rule, tuple(made[p] for p in n.premises))
        out[c] = to_graph(made[c], g.certificates)
    return out


def subproof_map(g: ProofGraph, start) -> dict:
    """For the subproof at ``start``: new id -> original id (same numbering as extract_subproofs)."""
    pre = g.preorder(start)
    # to_graph numbers in preorder over the same premise lists, so ids line up
    return {k: i for k, i in enumerate(pre)}


def fresh_supply(g: ProofGraph):
    """A fresh-name supply past every reserved name already used in ``g``."""
    import re

    from ..logic.syntax import FreshSupply
    from .fileformat import show_proof

    return FreshSupply().avoid(re.findall(r"\$[A-Za-z_]*\d+", show_proof(g)))

"""Traces, path relations, their composition closure and the global trace condition.

A path relation is a matrix indexed by the inductive atoms of the bottom
sequent (rows) and of the top sequent (columns) of a path.  A cell holds
``GT`` when some trace between the two atoms passes a progress point, ``EQ``
when a trace exists but none progresses, and ``NONE`` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..logic.syntax import Atom
from ..proofs.rules import position_maps

NONE, EQ, GT = 0, 1, 2
CELL_CHAR = {NONE: ".", EQ: "=", GT: ">"}
CHAR_CELL = {v: k for k, v in CELL_CHAR.items()}


@dataclass(frozen=True, order=True)
class PathRelation:
    source: int
    target: int
    rows: int
    cols: int
    cells: tuple  # rows x cols

    def __post_init__(self):
        if len(self.cells) != self.rows or any(len(r) != self.cols for r in self.cells):
            raise ValueError("matrix shape does not match the declared widths")

    def __getitem__(self, qq):
        return self.cells[qq[0]][qq[1]]

    def text(self) -> str:
        body = " ".join("".join(CELL_CHAR[c] for c in row) or "_" for row in self.cells)
        return f"{self.source} -> {self.target} {self.rows}x{self.cols} [{body}]"

    @property
    def is_loop(self):
        return self.source == self.target


@dataclass(frozen=True)
class TracePair:
    premise: int
    parent: int  # position among the inductive atoms of the conclusion
    child: int  # position among the inductive atoms of the premise
    progressing: bool


def identity(source: int, width: int) -> PathRelation:
    cells = tuple(tuple(EQ if a == b else NONE for b in range(width)) for a in range(width))
    return PathRelation(source, source, width, width, cells)


def compose_cells(m1, m2, inner: int, cols: int) -> tuple:
    out = []
    for row in m1:
        new = [NONE] * cols
        for b in range(inner):
            x = row[b]
            if x == NONE:
                continue
            for c, y in enumerate(m2[b]):
                if y != NONE:
                    v = GT if (x == GT or y == GT) else EQ
                    if v > new[c]:
                        new[c] = v
        out.append(tuple(new))
    return tuple(out)


def compose(r1: PathRelation, r2: PathRelation) -> Optional[PathRelation]:
    """``r1`` followed by ``r2``; ``None`` when the companions do not match."""
    if r1.target != r2.source or r1.cols != r2.rows:
        return None
    return PathRelation(r1.source, r2.target, r1.rows, r2.cols, compose_cells(r1.cells, r2.cells, r1.cols, r2.cols))


# -- traces through rule instances --------------------------------------------


def inductive_atoms(ante, defs) -> list:
    return [i for i, f in enumerate(ante) if isinstance(f, Atom) and defs.is_inductive(f.pred)]


def width(seq, defs) -> int:
    return len(inductive_atoms(seq.ante, defs))


def trace_pairs(g, node_id, defs) -> list:
    n = g.nodes[node_id]
    prem = [g.nodes[p].seq for p in n.premises]
    maps = position_maps(n.seq, n.rule, prem, defs)
    rank_c = {pos: q for q, pos in enumerate(inductive_atoms(n.seq.ante, defs))}
    out = []
    for k, (pm, ps) in enumerate(zip(maps, prem)):
        rank_p = {pos: q for q, pos in enumerate(inductive_atoms(ps.ante, defs))}
        for c, p, prog in pm:
            if c in rank_c and p in rank_p:
                out.append(TracePair(k, rank_c[c], rank_p[p], prog))
    return out


def step_cells(g, node_id, defs) -> list:
    """Per premise, the one-step matrix (conclusion atoms x premise atoms)."""
    n = g.nodes[node_id]
    rows = width(n.seq, defs)
    out = []
    pairs = trace_pairs(g, node_id, defs)
    for k, p in enumerate(n.premises):
        cols = width(g.nodes[p].seq, defs)
        m = [[NONE] * cols for _ in range(rows)]
        for t in pairs:
            if t.premise == k:
                v = GT if t.progressing else EQ
                if v > m[t.parent][t.child]:
                    m[t.parent][t.child] = v
        out.append(tuple(tuple(r) for r in m))
    return out


def path_relation(path, g, defs, source=0, target=0) -> PathRelation:
    """Relation along ``path`` (node ids, bottom first, each a premise of the previous)."""
    if not path:
        raise ValueError("empty path")
    w0 = width(g.nodes[path[0]].seq, defs)
    cells = identity(source, w0).cells
    for a, b in zip(path, path[1:]):
        prem = g.nodes[a].premises
        if b not in prem:
            raise ValueError(f"node {b} is not a premise of node {a}")
        step = step_cells(g, a, defs)[prem.index(b)]
        cells = compose_cells(cells, step, len(step), width(g.nodes[b].seq, defs))
    return PathRelation(source, target, w0, width(g.nodes[path[-1]].seq, defs), cells)


# -- companions and basic relations ---------------------------------------------


@dataclass(frozen=True)
class BasicPath:
    companion: int  # companion node id
    bud: int  # bud node id
    path: tuple  # node ids from companion to bud
    relation: PathRelation


def companion_index(g) -> dict:
    return {c: k for k, c in enumerate(g.companions)}


def basic_paths(g, defs, start=None, index=None, source=None) -> list:
    """All paths from ``start`` (default: every companion) to the buds above it."""
    index = companion_index(g) if index is None else index
    starts = list(g.companions) if start is None else [start]
    steps = {}
    out = []
    for c in starts:
        src = index.get(c, -1) if source is None else source
        w0 = width(g.nodes[c].seq, defs)
        stack = [((c,), identity(src, w0).cells)]
        while stack:
            path, cells = stack.pop()
            i = path[-1]
            if g.nodes[i].rule.tag == "Bud":
                tgt = index[g.buds[i]]
                rel = PathRelation(src, tgt, w0, width(g.nodes[i].seq, defs), cells)
                out.append(BasicPath(c, i, path, rel))
                continue
            prem = g.nodes[i].premises
            if not prem:
                continue
            if i not in steps:
                steps[i] = step_cells(g, i, defs)
            for k in reversed(range(len(prem))):
                p = prem[k]
                step = steps[i][k]
                stack.append((path + (p,), compose_cells(cells, step, len(step), width(g.nodes[p].seq, defs))))
    return out


def basic_relations(g, defs) -> list:
    return sorted({b.relation for b in basic_paths(g, defs)})


# -- closure and the trace condition ------------------------------------------


@dataclass(frozen=True)
class ClosureSet:
    relations: tuple  # canonical order
    generation: int  # least n with C_{n+1} = C_n


def closure(basics) -> ClosureSet:
    basics = sorted(set(basics))
    current = set(basics)
    n = 1
    while True:
        new = set(current)
        for r in current:
            for b in basics:
                c = compose(r, b)
                if c is not None:
                    new.add(c)
        if new == current:
            return ClosureSet(tuple(sorted(current)), n)
        current = new
        n += 1


def is_idempotent(r: PathRelation) -> bool:
    return r.is_loop and compose(r, r) == r


def gtc_check(cl: ClosureSet) -> Optional[PathRelation]:
    """``None`` when every idempotent loop progresses on its diagonal, else a counterexample."""
    for r in cl.relations:
        if is_idempotent(r) and not any(r.cells[q][q] == GT for q in range(r.rows)):
            return r
    return None


def loop_witness(r: PathRelation):
    """Least ``(n, q)`` with ``GT`` at ``(q, q)`` of the n-th power of ``r``, or ``None``."""
    if not r.is_loop:
        raise ValueError("witnesses are defined for loops only")
    seen = set()
    p, n = r, 1
    while p not in seen:
        for q in range(p.rows):
            if p.cells[q][q] == GT:
                return n, q
        seen.add(p)
        p = compose(p, r)
        n += 1
    return None


def max_width(g, defs) -> int:
    return max((width(n.seq, defs) for n in g.nodes.values()), default=0)

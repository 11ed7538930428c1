"""Brute-force reference for the global trace condition.

Closed walks over the basic relations are enumerated up to a length bound.
For each walk ``w`` the periodic path ``w w w ...`` is checked directly: its
traces are paths in the graph whose vertices are (step mod |w|, position)
and whose edges come from the individual basic relations, so an infinitely
progressing trace exists iff some progressing edge of that graph lies on a
cycle.  No composition of relations is used.
"""
from __future__ import annotations

import random

from .relations import EQ, GT, NONE, PathRelation


def _progressing_cycle(walk) -> bool:
    L = len(walk)
    succ = {}
    progress = []
    for t, r in enumerate(walk):
        nxt = (t + 1) % L
        for a in range(r.rows):
            for b in range(r.cols):
                if r.cells[a][b] != NONE:
                    succ.setdefault((t, a), []).append((nxt, b))
                    if r.cells[a][b] == GT:
                        progress.append(((t, a), (nxt, b)))
    for v, w in progress:
        seen, todo = {w}, [w]
        while todo:
            u = todo.pop()
            if u == v:
                return True
            for x in succ.get(u, ()):
                if x not in seen:
                    seen.add(x)
                    todo.append(x)
    return False


def closed_walks(basics, bound):
    """Closed walks of length <= bound, each listed once up to rotation."""
    edges = sorted(set(basics))
    out_edges = {}
    for k, e in enumerate(edges):
        out_edges.setdefault(e.source, []).append(k)
    for first, e in enumerate(edges):
        stack = [(e.target, (first,))]
        while stack:
            at, walk = stack.pop()
            if at == e.source:
                yield [edges[k] for k in walk]
            if len(walk) >= bound:
                continue
            for k in out_edges.get(at, ()):
                if k >= first:
                    stack.append((edges[k].target, walk + (k,)))


def gtc_bruteforce(basics, bound) -> bool:
    """Check every closed walk of length <= bound, one walk at a time."""
    for walk in closed_walks(basics, bound):
        if not _progressing_cycle(walk):
            return False
    return True


def _summary_cycle(triples) -> bool:
    succ = {}
    for a, b, _ in triples:
        succ.setdefault(a, set()).add(b)
    for a, b, prog in triples:
        if not prog:
            continue
        seen, todo = {b}, [b]
        while todo:
            u = todo.pop()
            if u == a:
                return True
            for x in succ.get(u, ()):
                if x not in seen:
                    seen.add(x)
                    todo.append(x)
    return False


def gtc_walk_search(basics, bound) -> bool:
    """Walk enumeration with walks merged when they connect positions alike.

    A walk is summarised by the triples (start position, end position,
    progressed) realised by its traces; both flags are kept per pair.  The
    verdict for a closed walk and the summaries of its extensions depend only
    on the summary, so merging loses nothing.
    """
    edges = sorted(set(basics))
    out_edges = {}
    for e in edges:
        out_edges.setdefault(e.source, []).append(e)
    frontier = set()
    for e in edges:
        triples = frozenset(
            (a, b, e.cells[a][b] == GT) for a in range(e.rows) for b in range(e.cols) if e.cells[a][b] != NONE
        )
        frontier.add((e.source, e.target, triples))
    seen = set(frontier)
    for _ in range(bound):
        for start, at, triples in frontier:
            if start == at and not _summary_cycle(triples):
                return False
        nxt = set()
        for start, at, triples in frontier:
            for e in out_edges.get(at, ()):
                new = frozenset(
                    (a, c, prog or e.cells[b][c] == GT)
                    for a, b, prog in triples for c in range(e.cols) if e.cells[b][c] != NONE
                )
                state = (start, e.target, new)
                if state not in seen:
                    seen.add(state)
                    nxt.add(state)
        if not nxt:
            break
        frontier = nxt
    return True


def random_skeleton(rng: random.Random, max_companions=6, max_positions=4, max_edges=None) -> list:
    """Random basic relations over at most ``max_companions`` companions."""
    k = rng.randint(1, max_companions)
    widths = [rng.randint(0, max_positions) for _ in range(k)]
    max_edges = max_edges or k + 2
    out = set()
    for _ in range(rng.randint(1, max_edges)):
        a, b = rng.randrange(k), rng.randrange(k)
        cells = tuple(
            tuple(rng.choice((NONE, NONE, EQ, EQ, GT)) for _ in range(widths[b]))
            for _ in range(widths[a])
        )
        out.add(PathRelation(a, b, widths[a], widths[b], cells))
    return sorted(out)

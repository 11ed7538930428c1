"""Termination certificates and the termination principle they license.

A certificate records the basic path relations of a cyclic proof, their
composition closure and the data that makes the union of the closure a
well-founded relation on companion-tagged stage tuples: a loop witness for
every relation from a companion to itself, the order used to make the
relations disjoint, and a transitivity attestation (the closure is closed
under pairwise composition).  Everything is recomputed on validation.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from ..logic.syntax import (
    Atom, Eq, Forall, Imp, Var, alpha_eq, conj, disj, free_vars, instantiate, lt,
    numeral, primed, seq_len, seq_proj,
)
from .relations import CHAR_CELL, EQ, GT, PathRelation, closure, compose, gtc_check, loop_witness

FORMAT = "cycind-certificate 1"


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class Certificate:
    positions: int
    widths: tuple  # per companion index
    nodes: tuple  # companion node ids, for reference
    basics: tuple
    relations: tuple
    generation: int
    witnesses: tuple  # per closure relation: (n, q) or (1, None)
    order: tuple
    pairs: int

    @property
    def id(self) -> str:
        return certificate_id(render(self))


def certificate_id(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def build_certificate(basics, widths, nodes=(), positions=None) -> Certificate:
    cl = closure(basics)
    bad = gtc_check(cl)
    if bad is not None:
        raise CertificateError(f"global trace condition fails at {bad.text()}")
    witnesses = []
    for r in cl.relations:
        if r.is_loop:
            w = loop_witness(r)
            if w is None:
                raise CertificateError(f"no loop witness for {r.text()}")
            witnesses.append(w)
        else:
            witnesses.append((1, None))
    rels = cl.relations
    pairs = sum(1 for a in rels for b in rels if a.target == b.source)
    return Certificate(
        positions if positions is not None else max(widths, default=0),
        tuple(widths), tuple(nodes), tuple(sorted(set(basics))), rels, cl.generation,
        tuple(witnesses), tuple(range(len(rels))), pairs,
    )


def render(c: Certificate) -> str:
    out = [FORMAT, f"positions {c.positions}", f"companions {len(c.widths)}"]
    for k, w in enumerate(c.widths):
        node = c.nodes[k] if k < len(c.nodes) else "-"
        out.append(f"companion {k} node {node} width {w}")
    out.append(f"basics {len(c.basics)}")
    out += [f"rel {r.text()}" for r in c.basics]
    out.append(f"fixpoint {c.generation}")
    out.append(f"closure {len(c.relations)}")
    out += [f"rel {r.text()}" for r in c.relations]
    for k, (n, q) in enumerate(c.witnesses):
        out.append(f"witness {k} {n} {'-' if q is None else q}")
    out.append("disjoint " + " ".join(map(str, c.order)))
    out.append(f"transitive closed {c.pairs}")
    return "\n".join(out) + "\n"


def _parse_rel(text: str) -> PathRelation:
    try:
        head, body = text.split("[", 1)
        src, _, tgt, shape = head.split()
        rows, cols = map(int, shape.split("x"))
        body = body.rstrip("]").split()
        cells = tuple(() if r == "_" else tuple(CHAR_CELL[ch] for ch in r) for r in body) if rows else ()
        return PathRelation(int(src), int(tgt), rows, cols, cells)
    except (ValueError, KeyError) as e:
        raise CertificateError(f"malformed relation {text!r}") from e


def parse_certificate(text: str) -> Certificate:
    lines = text.strip("\n").split("\n")
    if not lines or lines[0] != FORMAT:
        raise CertificateError("unknown certificate format")
    it = iter(lines[1:])

    def field(name):
        line = next(it, "")
        parts = line.split()
        if not parts or parts[0] != name:
            raise CertificateError(f"expected {name!r}, found {line!r}")
        return parts[1:]

    try:
        positions = int(field("positions")[0])
        k = int(field("companions")[0])
        widths, nodes = [], []
        for j in range(k):
            parts = field("companion")
            if int(parts[0]) != j:
                raise CertificateError("companions out of order")
            nodes.append(int(parts[2]) if parts[2] != "-" else -1)
            widths.append(int(parts[4]))
        nb = int(field("basics")[0])
        basics = [_parse_rel(" ".join(field("rel"))) for _ in range(nb)]
        generation = int(field("fixpoint")[0])
        nc = int(field("closure")[0])
        rels = [_parse_rel(" ".join(field("rel"))) for _ in range(nc)]
        witnesses = []
        for j in range(nc):
            parts = field("witness")
            if int(parts[0]) != j:
                raise CertificateError("witnesses out of order")
            witnesses.append((int(parts[1]), None if parts[2] == "-" else int(parts[2])))
        order = tuple(int(x) for x in field("disjoint"))
        parts = field("transitive")
        if parts[0] != "closed":
            raise CertificateError("missing transitivity attestation")
        pairs = int(parts[1])
    except (IndexError, ValueError) as e:
        raise CertificateError(f"malformed certificate: {e}") from None
    if next(it, None) is not None:
        raise CertificateError("trailing lines in certificate")
    return Certificate(positions, tuple(widths), tuple(nodes), tuple(basics), tuple(rels),
                       generation, tuple(witnesses), order, pairs)


def validate_certificate(text: str, cid=None) -> Certificate:
    """Parse and re-check every side condition; raises CertificateError."""
    if cid is not None and certificate_id(text) != cid:
        raise CertificateError("certificate id does not match its content")
    c = parse_certificate(text)
    if render(c) != text:
        raise CertificateError("certificate text is not in canonical layout")
    for r in c.basics + c.relations:
        if not (0 <= r.source < len(c.widths) and 0 <= r.target < len(c.widths)):
            raise CertificateError(f"relation {r.text()} mentions an unknown companion")
        if r.rows != c.widths[r.source] or r.cols != c.widths[r.target]:
            raise CertificateError(f"relation {r.text()} has the wrong widths")
    if max(c.widths, default=0) > c.positions:
        raise CertificateError("a companion is wider than the recorded position bound")
    cl = closure(c.basics)
    if cl.relations != c.relations or cl.generation != c.generation:
        raise CertificateError("recorded closure differs from the recomputed one")
    if gtc_check(cl) is not None:
        raise CertificateError("global trace condition fails")
    for r, (n, q) in zip(c.relations, c.witnesses):
        if r.is_loop:
            p = r
            for _ in range(n - 1):
                p = compose(p, r)
            if q is None or p.cells[q][q] != GT:
                raise CertificateError(f"witness ({n}, {q}) does not progress for {r.text()}")
        elif (n, q) != (1, None):
            raise CertificateError("relations between distinct companions take the trivial witness")
    if sorted(c.order) != list(range(len(c.relations))):
        raise CertificateError("disjointification order is not a permutation")
    pairs = 0
    members = set(c.relations)
    for a in c.relations:
        for b in c.relations:
            ab = compose(a, b)
            if ab is not None:
                pairs += 1
                if ab not in members:
                    raise CertificateError("closure is not closed under composition")
    if pairs != c.pairs:
        raise CertificateError("transitivity attestation counts the wrong number of pairs")
    return c


# -- formulas ------------------------------------------------------------------


def _n(t):
    return Atom("N", (t,))


def relation_disjunct(c: Certificate, r: PathRelation, x0, x, y0, y):
    parts = [
        Eq(x0, numeral(r.source)), Eq(y0, numeral(r.target)),
        Eq(seq_len(x), numeral(r.rows)), Eq(seq_len(y), numeral(r.cols)),
    ]
    for q2 in range(r.rows):
        for q1 in range(r.cols):
            v = r.cells[q2][q1]
            if v == GT:
                parts.append(lt(seq_proj(y, numeral(q1)), seq_proj(x, numeral(q2))))
            elif v == EQ:
                parts.append(Eq(seq_proj(x, numeral(q2)), seq_proj(y, numeral(q1))))
    parts += [_n(seq_proj(y, numeral(q))) for q in range(r.cols)]
    return conj(parts)


def relation_formula(c: Certificate, x0, x, y0, y):
    """``R(x0, x, y0, y)``: the union of the closure, one disjunct per relation."""
    from ..logic.syntax import BOT

    if not c.relations:
        return BOT
    return disj([relation_disjunct(c, r, x0, x, y0, y) for r in c.relations])


def termination_formula(c: Certificate, params, body):
    """Induction along the certified relation for ``G = lambda params. body``."""
    avoid = set(free_vars(body)) - set(params)
    names = []
    for hint in ("x0", "x", "y0", "y"):
        n = primed(hint, avoid | set(names))
        names.append(n)
    x0, x, y0, y = (Var(n) for n in names)

    def g(a, b):
        return instantiate(params, body, (a, b))

    h = Forall(y0.name, Forall(y.name, Imp(relation_formula(c, x0, x, y0, y), g(y0, y))))
    prem = Forall(x0.name, Forall(x.name, Imp(h, g(x0, x))))
    return Imp(prem, Forall(x0.name, Forall(x.name, g(x0, x))))


def check_termination_formula(c: Certificate, f):
    """Raise unless ``f`` is the certified termination principle for some G."""
    try:
        concl = f.right
        e, inner = concl.var, concl.body
        h, body = inner.var, inner.body
    except AttributeError:
        raise CertificateError("termination leaf does not have the induction shape") from None
    want = termination_formula(c, (e, h), body)
    if not alpha_eq(want, f):
        raise CertificateError("termination leaf formula does not match the certified relation")


def certify(g, defs) -> Certificate:
    """Certificate for the cyclic proof ``g``; raises CertificateError if the trace condition fails."""
    from .relations import basic_relations, max_width, width

    widths = [width(g.nodes[c].seq, defs) for c in g.companions]
    return build_certificate(basic_relations(g, defs), widths, g.companions, max_width(g, defs))

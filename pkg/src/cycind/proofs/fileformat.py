"""Text format for proof graphs.

::

    root 0
    node 0: N(x) |- (E(x) | O(x)) ; rule Case pos=0 fresh=[{}, {x := $x1}] ; premises 1 2
    bud 7 -> 0
    assume 9
    certificate 3fa2...
    ...
    end certificate
"""
from __future__ import annotations

from ..logic.text import ParseError, Parser, show, show_sequent, show_term
from .graph import Node, ProofGraph
from .rules import Rule, RuleError, TAGS, make_rule

INT_KEYS = ("pos", "index", "k", "id")
NAME_KEYS = ("var", "succ", "pred", "dir", "cert")


def _show_subst(pairs) -> str:
    return "{" + ", ".join(f"{k} := {show_term(t)}" for k, t in pairs) + "}"


def show_value(key, v) -> str:
    if key in INT_KEYS or key in NAME_KEYS:
        return str(v)
    if key == "term":
        return "{" + show_term(v) + "}"
    if key == "formula":
        return "{" + show(v) + "}"
    if key == "keep":
        return "[" + ", ".join(map(str, v)) + "]"
    if key == "subst":
        return _show_subst(v)
    if key == "fresh":
        return "[" + ", ".join(_show_subst(s) for s in v) + "]"
    if key == "forms":
        return "{" + "; ".join(f"{p}({', '.join(ps)}) := {show(f)}" for p, ps, f in v) + "}"
    raise RuleError(f"unknown rule key {key}")


def show_rule(rule: Rule) -> str:
    parts = [rule.tag] + [f"{k}={show_value(k, v)}" for k, v in rule.data]
    return " ".join(parts)


def show_proof(g: ProofGraph) -> str:
    out = [f"root {g.root}"]
    for i in sorted(g.nodes):
        n = g.nodes[i]
        prem = " ".join(map(str, n.premises))
        out.append(f"node {i}: {show_sequent(n.seq)} ; rule {show_rule(n.rule)} ; premises {prem}".rstrip())
    for b in sorted(g.buds):
        out.append(f"bud {b} -> {g.buds[b]}")
    for a in sorted(g.assumptions):
        out.append(f"assume {a}")
    for cid in sorted(g.certificates):
        out.append(f"certificate {cid}")
        out.extend(g.certificates[cid].rstrip("\n").split("\n"))
        out.append("end certificate")
    return "\n".join(out) + "\n"


# -- parsing -----------------------------------------------------------------


def _subst(p: Parser):
    p.expect("{")
    out = []
    while not p.at("}"):
        name = p.ident()
        p.expect(":=")
        out.append((name, p.term()))
        if not p.at("}"):
            p.expect(",")
    p.expect("}")
    return out


def _hex(p: Parser) -> str:
    """A certificate id: the tokenizer splits ``6f6e...`` into number and name pieces."""
    kind, val, at = p.next()
    if kind not in ("num", "id"):
        p.fail(f"expected certificate id, found {val!r}")
    out = val
    while p.peek()[0] in ("num", "id") and p.peek()[2] == at + len(out):
        out += p.next()[1]
    return out


def _value(p: Parser, key):
    if key == "cert":
        return _hex(p)
    if key in INT_KEYS:
        return p.integer()
    if key in NAME_KEYS:
        return p.ident()
    if key in ("term", "formula"):
        p.expect("{")
        v = p.term() if key == "term" else p.formula()
        p.expect("}")
        return v
    if key == "keep":
        p.expect("[")
        out = []
        while not p.at("]"):
            out.append(p.integer())
            if not p.at("]"):
                p.expect(",")
        p.expect("]")
        return out
    if key == "subst":
        return dict(_subst(p))
    if key == "fresh":
        p.expect("[")
        out = []
        while not p.at("]"):
            out.append(dict(_subst(p)))
            if not p.at("]"):
                p.expect(",")
        p.expect("]")
        return out
    if key == "forms":
        p.expect("{")
        out = []
        while not p.at("}"):
            pred = p.ident()
            p.expect("(")
            params = []
            while not p.at(")"):
                params.append(p.ident())
                if not p.at(")"):
                    p.expect(",")
            p.expect(")")
            p.expect(":=")
            out.append((pred, tuple(params), p.formula()))
            if not p.at("}"):
                p.expect(";")
        p.expect("}")
        return tuple(out)
    p.fail(f"unknown rule key {key!r}")


def parse_rule(p: Parser) -> Rule:
    tag = p.ident()
    if tag not in TAGS:
        p.fail(f"unknown rule tag {tag!r}")
    data = {}
    while p.peek()[0] == "id":
        key = p.ident()
        p.expect("=")
        data[key] = _value(p, key)
    return make_rule(tag, **data)


def parse_node_line(line: str, functions=None) -> Node:
    p = Parser(line, functions)
    if p.ident() != "node":
        p.fail("expected 'node'")
    i = p.integer()
    p.expect(":")
    seq = p.sequent(stop=(";",))
    p.expect(";")
    if p.ident() != "rule":
        p.fail("expected 'rule'")
    rule = parse_rule(p)
    p.expect(";")
    if p.ident() != "premises":
        p.fail("expected 'premises'")
    prem = []
    while p.peek()[0] == "num":
        prem.append(p.integer())
    p.done()
    return Node(i, seq, rule, tuple(prem))


def parse_proof(text: str, functions=None) -> ProofGraph:
    nodes, buds, assumed, certs = {}, {}, set(), {}
    root = None
    lines = text.split("\n")
    k = 0
    while k < len(lines):
        raw = lines[k]
        lineno = k + 1
        k += 1
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            word = line.split(None, 1)[0]
            if word == "certificate":
                cid = line.split(None, 1)[1].strip() if len(line.split()) > 1 else ""
                body = []
                while k < len(lines) and lines[k].strip() != "end certificate":
                    body.append(lines[k])
                    k += 1
                if k >= len(lines):
                    raise ParseError("unterminated certificate block", raw, 0)
                k += 1
                certs[cid] = "\n".join(body) + "\n"
            elif word == "node":
                n = parse_node_line(line, functions)
                if n.id in nodes:
                    raise ParseError(f"duplicate node {n.id}", line, 0)
                nodes[n.id] = n
            else:
                p = Parser(line, functions)
                p.ident()
                if word == "root":
                    root = p.integer()
                elif word == "bud":
                    b = p.integer()
                    p.expect("->")
                    buds[b] = p.integer()
                elif word == "assume":
                    assumed.add(p.integer())
                else:
                    p.fail(f"unknown directive {word!r}")
                p.done()
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e.msg}", raw, (e.offset or 1) - 1) from None
        except RuleError as e:
            raise ParseError(f"line {lineno}: {e}", raw, 0) from None
    if root is None:
        raise ParseError("missing 'root' line", text, 0)
    for i, n in nodes.items():
        for q in n.premises:
            if q not in nodes:
                raise ParseError(f"node {i} refers to unknown premise {q}", text, 0)
        if (n.rule.tag == "Bud") != (i in buds):
            raise ParseError(f"node {i}: bud rule and bud line disagree", text, 0)
        if (n.rule.tag == "Assumption") != (i in assumed):
            raise ParseError(f"node {i}: assumption rule and assume line disagree", text, 0)
    for b, c in buds.items():
        if c not in nodes:
            raise ParseError(f"bud {b} refers to unknown companion {c}", text, 0)
    if root not in nodes:
        raise ParseError(f"root {root} is not a node", text, 0)
    return ProofGraph(nodes, root, buds, certs)


def load_proof(path, defs=None) -> ProofGraph:
    with open(path) as fh:
        return parse_proof(fh.read(), _constants(defs))


def _constants(defs):
    if defs is None:
        return None
    return {name for name, ar in defs.functions if ar == 0}


def save_proof(g: ProofGraph, path):
    with open(path, "w") as fh:
        fh.write(show_proof(g))

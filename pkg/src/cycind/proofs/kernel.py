"""Proof checking: local rule correctness, modes, bud links and termination leaves."""
from __future__ import annotations

from dataclasses import dataclass

from ..logic.syntax import ArityError, sequent_eq
from ..logic.text import show_sequent
from .graph import ProofGraph
from .rules import RuleError, check_instance

MODES = ("ljid", "cljid-local")
MODE_ALIASES = {"ljid": "ljid", "cyclic": "cljid-local", "cljid-local": "cljid-local", "cljid": "cljid-local"}


@dataclass(frozen=True)
class Violation:
    node: int
    tag: str
    message: str

    def __str__(self):
        return f"node {self.node} ({self.tag}): {self.message}"


class ProofError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:3])
        more = f" (+{len(self.violations) - 3} more)" if len(self.violations) > 3 else ""
        super().__init__(head + more)


def check_rule(node_id: int, g: ProofGraph, defs, mode="cljid-local", _certs=None):
    """Return ``None`` if the node is a correct rule instance, else a Violation."""
    mode = MODE_ALIASES[mode]
    n = g.nodes[node_id]
    tag = n.rule.tag
    try:
        for f in n.seq.ante + ((n.seq.succ,) if n.seq.succ is not None else ()):
            defs.check_formula(f)
        if mode == "ljid" and tag in ("Case", "Bud"):
            raise RuleError(f"{tag} is not a rule of the induction system")
        if mode == "cljid-local" and tag == "Ind":
            raise RuleError("Ind is not a rule of the cyclic system")
        if tag == "Bud":
            c = g.buds.get(node_id)
            if c is None:
                raise RuleError("bud without companion")
            comp = g.nodes[c]
            if not comp.premises:
                raise RuleError(f"companion {c} is a leaf")
            if not sequent_eq(comp.seq, n.seq):
                raise RuleError(f"bud sequent differs from companion {c}: {show_sequent(comp.seq)}")
        if tag == "Term":
            _check_term(n, g, _certs if _certs is not None else {})
        check_instance(n.seq, n.rule, [g.nodes[p].seq for p in n.premises], defs)
    except (RuleError, ArityError, KeyError, TypeError) as e:
        msg = str(e) if not isinstance(e, KeyError) else f"missing rule data {e}"
        return Violation(node_id, tag, msg)
    return None


def _check_term(n, g, cache):
    from ..trace.certificate import CertificateError, check_termination_formula, validate_certificate

    cid = n.rule.get("cert")
    text = g.certificates.get(cid)
    if text is None:
        raise RuleError(f"no certificate {cid} attached")
    if cid not in cache:
        try:
            cache[cid] = validate_certificate(text, cid)
        except CertificateError as e:
            cache[cid] = e
    cert = cache[cid]
    if isinstance(cert, Exception):
        raise RuleError(f"certificate {cid} invalid: {cert}")
    try:
        check_termination_formula(cert, n.seq.succ)
    except CertificateError as e:
        raise RuleError(str(e)) from None


def _cycles(g: ProofGraph):
    """Nodes on a premise cycle (bud links ignored)."""
    state = {}
    bad = []
    for start in sorted(g.nodes):
        if start in state:
            continue
        stack = [(start, iter(g.nodes[start].premises))]
        state[start] = 1
        while stack:
            i, it = stack[-1]
            for p in it:
                s = state.get(p)
                if s is None:
                    state[p] = 1
                    stack.append((p, iter(g.nodes[p].premises)))
                    break
                if s == 1:
                    bad.append(p)
            else:
                state[i] = 2
                stack.pop()
    return bad


def check_proof(g: ProofGraph, defs, mode="cljid-local") -> list:
    """All violations of ``g`` in ``mode`` (empty list when the proof is correct)."""
    mode = MODE_ALIASES[mode]
    out = []
    for c in _cycles(g):
        out.append(Violation(c, g.nodes[c].rule.tag, "premise graph has a cycle"))
    if mode == "ljid" and g.buds:
        out.append(Violation(min(g.buds), "Bud", "bud links are not allowed in the induction system"))
    certs = {}
    for i in sorted(g.nodes):
        v = check_rule(i, g, defs, mode, certs)
        if v is not None:
            out.append(v)
    return out


def require_valid(g: ProofGraph, defs, mode):
    errs = check_proof(g, defs, mode)
    if errs:
        raise ProofError(errs)
    return g

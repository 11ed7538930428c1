"""From an induction proof to a cyclic one.

An induction on ``P_j u`` with formulas ``F_k`` becomes, for each predicate
``P_k`` of the block, a companion ``rest, P_k z |- F_k z`` (fresh ``z``)
proved by case distinction on ``P_k z``.  In each case the induction
hypotheses ``F_i t_i`` are obtained by substitution instances of the
companions for ``P_i``, so every cycle passes a case distinction on the
traced atom.
"""
from __future__ import annotations

from ..logic.syntax import Atom, Sequent, Var, instantiate, subst_sequent
from ..proofs import build as B
from ..proofs.graph import D, from_graph, to_graph
from ..proofs.kernel import check_proof
from ..proofs.rules import forms_map, make_rule, subst_map


class EmbedError(ValueError):
    pass


def embed_proof(g, defs, fresh=None, check=True):
    """Cyclic proof of the conclusion of the induction proof ``g``."""
    from ..proofs.graph import fresh_supply

    fresh = fresh or fresh_supply(g)
    if g.buds:
        raise EmbedError("input already has buds")
    memo = {}
    root = from_graph(g)
    order = []
    stack = [(root, False)]
    seen = set()
    while stack:
        d, done = stack.pop()
        if done:
            order.append(d)
            continue
        if id(d) in seen:
            continue
        seen.add(id(d))
        stack.append((d, True))
        stack.extend((p, False) for p in d.prems)
    for d in order:
        prems = [memo[id(p)] for p in d.prems]
        if d.rule.tag == "Ind":
            memo[id(d)] = _Induction(d, prems, defs, fresh).run()
        elif all(a is b for a, b in zip(prems, d.prems)):
            memo[id(d)] = d
        else:
            memo[id(d)] = D(d.seq, d.rule, prems)
    out = to_graph(memo[id(root)], g.certificates)
    if check:
        bad = check_proof(out, defs, "cljid-local")
        if bad:
            raise EmbedError(f"embedded proof does not check: {bad[0]}")
    return out


class _Induction:
    def __init__(self, d, minors, defs, fresh):
        self.d = d
        self.minors = minors
        self.defs = defs
        self.fresh = fresh
        self.pos = d.rule["pos"]
        self.principal = d.seq.ante[self.pos]
        self.rest = d.seq.ante[:self.pos] + d.seq.ante[self.pos + 1:]
        self.forms = forms_map(d.rule["forms"])
        self.renamings = [subst_map(s) for s in d.rule["fresh"]]
        self.block = defs.block(self.principal.pred)
        self.params = {q: tuple(Var(fresh("z")) for _ in range(defs.pred[q].arity)) for q in self.block}
        self.built = {}
        self.started = set()
        self.buds = []

    def companion_seq(self, q) -> Sequent:
        zs = self.params[q]
        ps, body = self.forms[q]
        ante = self.rest[:self.pos] + (Atom(q, zs),) + self.rest[self.pos:]
        return Sequent(ante, instantiate(ps, body, zs))

    def run(self) -> D:
        q = self.principal.pred
        comp = self.companion(q)
        for bud, k in self.buds:
            bud.target = self.built[k]
        theta = {z.name: t for z, t in zip(self.params[q], self.principal.args)}
        concl = subst_sequent(comp.seq, theta)
        return B.weaken(self.d.seq, B.subst(concl, theta, comp))

    def companion(self, q) -> D:
        """The companion for ``q`` the first time it is needed, a bud after that."""
        seq = self.companion_seq(q)
        if q in self.started:
            bud = D(seq, make_rule("Bud"))
            self.buds.append((bud, q))
            return bud
        self.started.add(q)
        offset = 0
        for k in self.block:
            if k == q:
                break
            offset += len(self.defs.productions_of(k))
        prods = self.defs.productions_of(q)
        fresh = [self.renamings[offset + i] for i in range(len(prods))]
        cases = B.goals(seq, "Case", self.defs, pos=self.pos, fresh=fresh)
        subs = [self.case(g, q, i, offset + i) for i, g in enumerate(cases)]
        d = B.mk(seq, "Case", subs, self.defs, pos=self.pos, fresh=fresh)
        self.built[q] = d
        return d

    def case(self, goal, q, i, k) -> D:
        """Close a case premise: rewrite the equations, cut the hypotheses, then the minor proof."""
        steps = []
        for e in range(len(self.params[q])):
            steps.append((goal, self.pos + e))
            (goal,) = B.goals(goal, "EqL", pos=self.pos + e, dir="lr")
        minor = self.minors[k]
        _, prems = self.defs.productions_of(q)[i].rename(self.renamings[k])
        hyps = [a for a in prems if isinstance(a, Atom) and a.pred in self.forms]

        def cuts(m, g):
            if m == len(hyps):
                return B.weaken(g, minor)
            a = hyps[m]
            ps, body = self.forms[a.pred]
            f = instantiate(ps, body, a.args)
            comp = self.companion(a.pred)
            theta = {z.name: t for z, t in zip(self.params[a.pred], a.args)}
            inst = B.subst(subst_sequent(comp.seq, theta), theta, comp)
            return B.cut_with(g, f, inst, lambda g2: cuts(m + 1, g2))

        d = cuts(0, goal)
        for g, at in reversed(steps):
            d = B.mk(g, "EqL", [d], pos=at, dir="lr")
        return d

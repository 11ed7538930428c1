"""Bud elimination: from a cyclic proof to an induction proof.

Every companion ``j`` gets a staged, case-free subproof whose open leaves are
the buds above it.  The statement of all companions is packed into one
formula ``G x0 x`` (``x0`` selects the companion, ``x`` codes its stage
variables) and proved by well-founded induction along the certified path
relation: the induction hypothesis ``H x0 x`` yields ``G`` at every smaller
pair, and each bud is smaller than its companion because its stage variables
were produced by case distinctions along the path.  The induction principle
itself is a ``Term`` leaf licensed by the certificate.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..logic.syntax import (
    Atom, Bot, Eq, Forall, Imp, Sequent, Var, conj, implies_chain, numeral, seq_code, sequent_vars,
)
from ..proofs import build as B
from ..proofs.graph import D, to_graph
from ..proofs.kernel import check_proof
from ..stage.destage import Equivalences, destage
from ..stage.staging import Lemmas, ineq_entails, stage_proof, staged_defs, staged_sequent
from ..trace.certificate import certify, render, termination_formula
from ..trace.relations import path_relation
from .case_ind import case_to_ind

POS_RULES = ("Axiom", "BotL", "AndL", "OrL", "ImpL", "NotL", "AllL", "ExL", "EqL", "Ind", "Case")


class CompileError(ValueError):
    pass


def base_signature(defs):
    """``defs`` with a stage predicate for every inductive predicate except ``N``."""
    user = [n for n, p in defs.pred.items() if p.is_inductive and n != "N" and p.base is None]
    return staged_defs(defs, include=user)


def with_prefix(d: D, prefix, leaf, defs) -> D:
    """Put ``prefix`` in front of every antecedent above ``d``.

    Subderivations without open assumptions are reused under one ``Wk``;
    ``leaf(goal, d)`` proves the prefixed form of each assumption leaf.
    """
    n = len(prefix)
    has = {}
    made = {}

    def open_(d):
        k = id(d)
        if k not in has:
            has[k] = d.rule.tag == "Assumption" or any(open_(p) for p in d.prems)
        return has[k]

    def go(d):
        k = id(d)
        if k in made:
            return made[k]
        seq = Sequent(tuple(prefix) + d.seq.ante, d.seq.succ)
        if not open_(d):
            out = B.mk(seq, "Wk", [d], keep=list(range(n, n + len(d.seq.ante))), succ="keep")
        elif d.rule.tag == "Assumption":
            out = leaf(seq, d)
        else:
            data = dict(d.rule.data)
            if d.rule.tag in POS_RULES:
                data["pos"] = data["pos"] + n
            if d.rule.tag == "Wk":
                data["keep"] = list(range(n)) + [i + n for i in data["keep"]]
            if d.rule.tag in ("AllR", "ExL") and data["var"] in sequent_vars(Sequent(tuple(prefix))):
                raise CompileError(f"eigenvariable {data['var']} occurs in the induction hypothesis")
            try:
                out = B.mk(seq, d.rule.tag, [go(p) for p in d.prems], defs, **data)
            except B.BuildError as e:
                raise CompileError(f"cannot thread the induction hypothesis through {d.rule.tag}: {e}") from None
        made[k] = out
        return out

    return go(d)


@dataclass
class Compiled:
    proof: object  # ProofGraph over ``defs``
    certificate: str
    cid: str
    entailments: list = field(default_factory=list)  # (companion, bud, ok)
    defs: object = None
    staged: object = None  # the proof before N' and P'' were removed


class _Eliminator:
    def __init__(self, g, defs, fresh):
        self.g = g
        self.defs = defs
        self.fresh = fresh
        self.base = base_signature(defs)
        self.sd = staged_defs(self.base)
        self.lemmas = Lemmas(self.sd, fresh)
        self.cert = certify(g, defs)
        self.text = render(self.cert)
        self.cid = self.cert.id
        self.comps = g.companions
        self.index = {c: k for k, c in enumerate(self.comps)}
        self.staged = [stage_proof(g, defs, start=c, fresh=fresh, sd=self.sd, lemmas=self.lemmas)
                       for c in self.comps]
        self.leaves = {}
        self.entailments = []
        for j, sp in enumerate(self.staged):
            for sa in sp.assumptions:
                k = self.index[g.buds[sa.node]]
                rel = path_relation(sa.path, g, defs, source=j, target=k)
                ok = ineq_entails(sa.ineq, sp.vec, sa.vec, rel)
                self.entailments.append((self.comps[j], sa.node, ok))
                if not ok:
                    raise CompileError(f"stage facts do not entail the path relation to bud {sa.node}")
                self.leaves[id(sa.leaf)] = (sa, k, self.cert.relations.index(rel))
        self.x0 = Var(fresh("x"))
        self.x = Var(fresh("x"))
        self.params = []
        parts = []
        for j, c in enumerate(self.comps):
            vec = self.staged[j].vec
            seq = g.nodes[c].seq
            zs = tuple(v.name for v in vec) + tuple(sorted(sequent_vars(seq)))
            self.params.append(zs)
            st = staged_sequent(seq, vec, (), self.sd)
            body = implies_chain((Eq(self.x, seq_code(vec)),) + st.ante, st.succ if st.succ is not None else Bot())
            for z in reversed(zs):
                body = Forall(z, body)
            parts.append(Imp(Eq(self.x0, numeral(j)), body))
        self.gbody = conj(parts)
        self.tf = termination_formula(self.cert, (self.x0.name, self.x.name), self.gbody)
        self.all_g = self.tf.right
        self.main = None

    # -- the induction along the certified relation
    def principle(self) -> D:
        """``|- forall x0 x. G x0 x``."""
        if self.main is not None:
            return self.main
        top = Sequent((), self.all_g)
        leaf = B.mk(Sequent((), self.tf), "Term", cert=self.cid)

        def use(g2):
            left, right = B.goals(g2, "ImpL", pos=0)
            return B.mk(g2, "ImpL", [self.step(left), B.mk(right, "Axiom", pos=0)], pos=0)

        self.main = B.cut_with(top, self.tf, leaf, use)
        return self.main

    def step(self, goal) -> D:
        """``|- forall x0 x. (H x0 x -> G x0 x)``."""
        (g1,) = B.goals(goal, "AllR", var=self.x0.name)
        (g2,) = B.goals(g1, "AllR", var=self.x.name)
        (g3,) = B.goals(g2, "ImpR")
        body = self.split(g3, 0)
        return B.mk(goal, "AllR", [B.mk(g1, "AllR", [B.mk(g2, "ImpR", [body])], var=self.x.name)],
                    var=self.x0.name)

    def split(self, goal, j) -> D:
        if j == len(self.comps) - 1:
            return self.branch(goal, j)
        a, b = B.goals(goal, "AndR")
        return B.mk(goal, "AndR", [self.branch(a, j), self.split(b, j + 1)])

    def branch(self, goal, j) -> D:
        """``H x0 x |- x0 = j -> G_j x``."""
        (g,) = B.goals(goal, "ImpR")
        chain = []
        cur = g
        for z in self.params[j]:
            (nxt,) = B.goals(cur, "AllR", var=z)
            chain.append(("AllR", cur, {"var": z}))
            cur = nxt
        while isinstance(cur.succ, Imp):
            (nxt,) = B.goals(cur, "ImpR")
            chain.append(("ImpR", cur, {}))
            cur = nxt
        # cur: H x0 x, x0 = j, x = <v>, A1..An |- D
        (e1,) = B.goals(cur, "EqL", pos=1, dir="lr")
        (e2,) = B.goals(e1, "EqL", pos=2, dir="lr")
        h = e2.ante[0]
        inner = self.inner(j, h)
        proof = B.mk(cur, "EqL", [B.mk(e1, "EqL", [B.weaken(e2, inner)], pos=2, dir="lr")], pos=1, dir="lr")
        for tag, s, data in reversed(chain):
            proof = B.mk(s, tag, [proof], **data)
        return B.mk(goal, "ImpR", [proof])

    def inner(self, j, h) -> D:
        """``H j <v>, (J_j)^o |- D_j`` from the case-free staged subproof."""
        sp = self.staged[j]
        converted = case_to_ind(sp.proof, self.sd, self.fresh)

        def leaf(goal, d):
            sa, k, m = self.leaves[id(d)]
            return self.descend(goal, j, sa, k, m)

        return with_prefix(converted, (h,), leaf, self.sd)

    # -- buds
    def descend(self, goal, j, sa, k, m) -> D:
        """``H j <v>, (J_i)^o, Ineq |- D_i``: the bud is below its companion."""
        atoms = [f for f in goal.ante if isinstance(f, Atom) and f.pred in self.sd.pred
                 and self.sd.pred[f.pred].base is not None and f.args and f.args[-1] in sa.vec]
        typed = []
        for w in sa.vec:
            a = next(f for f in atoms if f.args[-1] == w)
            typed.append((a, Atom("N", (w,))))

        def cut_n(q, g):
            if q == len(typed):
                return self.apply_h(g, sa, k, m)
            a, nw = typed[q]
            lemma = self.lemmas.stage_is_number(Sequent((a,), nw), a, cyclic=False)
            return B.cut_with(g, nw, lemma, lambda g2: cut_n(q + 1, g2))

        return cut_n(0, goal)

    def apply_h(self, goal, sa, k, m) -> D:
        y = seq_code(sa.vec)
        (g1,) = B.goals(goal, "AllL", pos=0, term=numeral(k))
        (g2,) = B.goals(g1, "AllL", pos=0, term=y)
        left, right = B.goals(g2, "ImpL", pos=0)
        rel = self.relation(left, m, len(self.cert.relations))
        use = self.use_g(right, 0, k, sa.vec)
        imp = B.mk(g2, "ImpL", [rel, use], pos=0)
        return B.mk(goal, "AllL", [B.mk(g1, "AllL", [imp], pos=0, term=y)], pos=0, term=numeral(k))

    def relation(self, goal, m, n) -> D:
        if n == 1:
            return B.close_arith(goal, self.sd, self.fresh)
        if m == 0:
            (p,) = B.goals(goal, "OrRl")
            return B.mk(goal, "OrRl", [B.close_arith(p, self.sd, self.fresh)])
        (p,) = B.goals(goal, "OrRr")
        return B.mk(goal, "OrRr", [self.relation(p, m - 1, n - 1)])

    def use_g(self, goal, pos, k, vec) -> D:
        """``goal`` holds ``G k <vec>`` at ``pos`` and the staged companion ``k`` with ``vec``."""
        last = len(self.comps) - 1

        def pick(g, p, i):
            if i == last:
                return open_(g, p)
            (g2,) = B.goals(g, "AndL", pos=p)
            nxt = open_(g2, p) if i == k else pick(g2, p + 1, i + 1)
            return B.mk(g, "AndL", [nxt], pos=p)

        terms = {}
        for z, w in zip(self.params[k], vec):
            terms[z] = w

        def open_(g, p):
            left, right = B.goals(g, "ImpL", pos=p)
            return B.mk(g, "ImpL", [B.mk(left, "EqR"), inst(right, p, 0)], pos=p)

        def inst(g, p, q):
            zs = self.params[k]
            if q == len(zs):
                return chain(g, p)
            t = terms.get(zs[q], Var(zs[q]))
            (g2,) = B.goals(g, "AllL", pos=p, term=t)
            return B.mk(g, "AllL", [inst(g2, p, q + 1)], pos=p, term=t)

        def chain(g, p):
            f = g.ante[p]
            if isinstance(f, Imp):
                left, right = B.goals(g, "ImpL", pos=p)
                first = B.mk(left, "EqR") if isinstance(left.succ, Eq) and left.succ.lhs == left.succ.rhs \
                    else B.axiom(left)
                return B.mk(g, "ImpL", [first, chain(right, p)], pos=p)
            if isinstance(f, Bot):
                return B.mk(g, "BotL", pos=p)
            return B.mk(g, "Axiom", pos=p)

        return pick(goal, pos, 0)

    def close(self, goal, k, vec) -> D:
        """Any staged instance of companion ``k`` from the main principle."""

        def use(g2):
            p = len(g2.ante) - 1
            y = seq_code(vec)
            (g3,) = B.goals(g2, "AllL", pos=p, term=numeral(k))
            (g4,) = B.goals(g3, "AllL", pos=p, term=y)
            return B.mk(g2, "AllL", [B.mk(g3, "AllL", [self.use_g(g4, p, k, vec)], pos=p, term=y)],
                        pos=p, term=numeral(k))

        return B.cut_with(goal, self.all_g, self.principle(), use)

    # -- the whole proof
    def run(self) -> D:
        g = self.g
        if g.root in self.index:
            k = self.index[g.root]
            vec = self.staged[k].vec
            staged = self.close(staged_sequent(g.conclusion, vec, (), self.sd), k, vec)
        else:
            sp = stage_proof(g, self.defs, fresh=self.fresh, sd=self.sd, lemmas=self.lemmas)
            vec = sp.vec
            converted = case_to_ind(sp.proof, self.sd, self.fresh)
            targets = {id(sa.leaf): sa for sa in sp.assumptions}
            made = {}

            def graft(d):
                key = id(d)
                if key in made:
                    return made[key]
                if key in targets:
                    sa = targets[key]
                    out = self.close(d.seq, self.index[g.buds[sa.node]], sa.vec)
                else:
                    prems = [graft(p) for p in d.prems]
                    out = d if all(a is b for a, b in zip(prems, d.prems)) else D(d.seq, d.rule, prems)
                made[key] = out
                return out

            staged = graft(converted)
        eqv = Equivalences(self.sd, self.lemmas, self.fresh)
        return destage(staged, g.conclusion, vec, eqv)


def compile_proof(g, defs, fresh=None, check=True, lower=True) -> Compiled:
    """Induction proof of the conclusion of the cyclic proof ``g``.

    Bud elimination works over the staged signature; with ``lower`` the
    auxiliary stage predicates are then removed and the result lives over
    ``base_signature(defs)``.
    """
    from ..proofs.graph import fresh_supply
    from ..trace.certificate import CertificateError

    bad = check_proof(g, defs, "cljid-local")
    if bad:
        raise CompileError(f"input is not a cyclic proof: {bad[0]}")
    if g.assumptions:
        raise CompileError("input has open assumptions")
    fresh = fresh or fresh_supply(g)
    try:
        el = _Eliminator(g, defs, fresh)
    except CertificateError as e:
        raise CompileError(str(e)) from None
    root = el.run()
    out = to_graph(root, {el.cid: el.text})
    if check:
        bad = check_proof(out, el.sd, "ljid")
        if bad:
            raise CompileError(f"compiled proof does not check: {bad[0]}")
    if not lower:
        return Compiled(out, el.text, el.cid, el.entailments, el.sd, out)
    from .lower import UnsupportedNode, lower as lower_proof

    base = base_signature(defs)
    try:
        low = lower_proof(out, el.sd, base, fresh, check=check)
    except UnsupportedNode as e:
        raise CompileError(str(e)) from None
    return Compiled(low, el.text, el.cid, el.entailments, base, out)

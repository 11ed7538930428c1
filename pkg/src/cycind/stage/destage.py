"""From a proof of the staged sequent back to the original sequent.

``P t`` and ``exists v. P'(t, v)`` are interderivable in the induction
system: left to right by induction on ``P`` (the stage of a conclusion is one
more than the sum of the stages of its premises), right to left by
induction on ``P'``.  These two lemmas are lifted through the connectives and
used to cut the staged antecedent in and the staged succedent out.
"""
from __future__ import annotations

from ..logic.syntax import And, Atom, Exists, Forall, Imp, Not, Or, Sequent, Var, substitute
from ..proofs import build as B
from ..proofs.graph import D
from .staging import _base_inductive, bullet, intro_stage, stage_of, stage_variables


class Equivalences:
    """``P z |- exists v. P'(z, v)`` and back, one generic proof per predicate."""

    def __init__(self, sd, lemmas, fresh):
        self.sd = sd
        self.lemmas = lemmas
        self.fresh = fresh
        self.cache = {}

    def _get(self, key, build):
        if key not in self.cache:
            self.cache[key] = build()
        return self.cache[key]

    def forward(self, goal: Sequent, atom: Atom) -> D:
        """``goal`` contains ``atom`` and has succedent ``bullet(atom)``."""
        lemma, names = self._get(("lr", atom.pred), lambda: self._lr(atom.pred))
        return self._use(goal, lemma, names, atom.args)

    def backward(self, goal: Sequent, atom: Atom) -> D:
        """``goal`` contains ``bullet(atom)`` and has succedent ``atom``."""
        lemma, names = self._get(("rl", atom.pred), lambda: self._rl(atom.pred))
        return self._use(goal, lemma, names, atom.args)

    def _use(self, goal, lemma, names, args):
        theta = dict(zip(names, args))
        concl = Sequent(tuple(substitute(f, theta) for f in lemma.seq.ante), substitute(lemma.seq.succ, theta))
        return B.weaken(goal, B.subst(concl, theta, lemma))

    def _params(self, pred):
        return tuple(self.fresh("z") for _ in range(self.sd.pred[pred].arity))

    def _lr(self, pred):
        sd = self.sd
        names = self._params(pred)
        atom = Atom(pred, tuple(Var(n) for n in names))
        root = Sequent((atom,), bullet(atom, sd))
        block = sd.block(pred)
        forms = []
        for q in block:
            ps = self._params(q)
            forms.append((q, ps, bullet(Atom(q, tuple(Var(p) for p in ps)), sd)))
        fresh = [{x: Var(self.fresh("y")) for x in prod.variables} for q in block for prod in sd.productions_of(q)]
        minors = B.goals(root, "Ind", sd, pos=0, forms=forms, fresh=fresh)
        subs = []
        k = 0
        for q in block:
            for idx, prod in enumerate(sd.productions_of(q)):
                subs.append(self._lr_minor(minors[k], q, idx, fresh[k], block))
                k += 1
        return B.mk(root, "Ind", subs, sd, pos=0, forms=forms, fresh=fresh), names

    def _lr_minor(self, goal, q, idx, rho, block):
        sd = self.sd
        prod = sd.productions_of(q)[idx]
        _, items = prod.rename(rho)
        inductive = [k for k, a in enumerate(items) if _base_inductive(sd, a)]
        stages = []

        def step(m, g):
            if m == len(inductive):
                return intro_stage(g, sd, q, idx, rho, stages, lambda gk, k: B.axiom(gk))
            k = inductive[m]
            a = items[k]
            if a.pred in block:
                return opened(k, m, g)
            f = bullet(a, sd)
            return B.cut_with(g, f, self.forward(Sequent((a,), f), a),
                              lambda g2: opened(len(g2.ante) - 1, m, g2))

        def opened(at, m, g):
            w = Var(self.fresh("v"))
            stages.append(w)
            (g2,) = B.goals(g, "ExL", pos=at, var=w.name)
            staged = g2.ante[at]
            nw = Atom("N", (w,))
            body = B.cut_with(g2, nw, self.lemmas.stage_is_number(Sequent((staged,), nw), staged, cyclic=False),
                              lambda g3: step(m + 1, g3))
            return B.mk(g, "ExL", [body], pos=at, var=w.name)

        return step(0, goal)

    def _rl(self, pred):
        sd = self.sd
        names = self._params(pred)
        atom = Atom(pred, tuple(Var(n) for n in names))
        root = Sequent((bullet(atom, sd),), atom)
        w = self.fresh("v")
        (g,) = B.goals(root, "ExL", pos=0, var=w)
        spred = stage_of(sd, pred)
        block = sd.block(spred)
        forms = []
        for q in block:
            ps = self._params(q)
            base = sd.pred[q].base
            forms.append((q, ps, Atom(base, tuple(Var(p) for p in ps[:-1]))))
        fresh = [{x: Var(self.fresh("y")) for x in prod.variables} for q in block for prod in sd.productions_of(q)]
        minors = B.goals(g, "Ind", sd, pos=0, forms=forms, fresh=fresh)
        subs = []
        k = 0
        for q in block:
            base = sd.pred[q].base
            for idx, prod in enumerate(sd.productions_of(base)):
                subs.append(self._rl_minor(minors[k], base, idx, fresh[k], block))
                k += 1
        ind = B.mk(g, "Ind", subs, sd, pos=0, forms=forms, fresh=fresh)
        return B.mk(root, "ExL", [ind], pos=0, var=w), names

    def _rl_minor(self, goal, base, idx, rho, block):
        sd = self.sd
        prod = sd.productions_of(base)[idx]
        keep = {x: rho[x] for x in prod.variables}
        _, items = prod.rename(keep)
        v, vs = stage_variables(sd, base, idx)
        stage_vars = iter(rho[n] for n in vs)

        def premise(g, a):
            if not _base_inductive(sd, a):
                return B.axiom(g)
            w = next(stage_vars)
            spred = stage_of(sd, a.pred)
            if spred in block:
                return B.axiom(g)
            f = bullet(a, sd)
            (left,) = B.goals(Sequent(g.ante, f), "ExR", term=w)
            proof = B.mk(Sequent(g.ante, f), "ExR", [B.axiom(left)], term=w)
            return B.cut_with(g, f, proof, lambda g2: self.backward(g2, a))

        item_goals = B.goals(goal, "Intro", sd, pred=base, index=idx, subst=keep)
        leaves = [premise(gk, a) for gk, a in zip(item_goals, items)]
        return B.mk(goal, "Intro", leaves, sd, pred=base, index=idx, subst=keep)


# -- lifting through connectives ---------------------------------------------------


def to_bullet(f, eqv: Equivalences) -> D:
    """``f |- bullet(f)``."""
    sd = eqv.sd
    g = bullet(f, sd)
    seq = Sequent((f,), g)
    if g == f:
        return B.mk(seq, "Axiom", pos=0)
    if isinstance(f, Atom):
        return eqv.forward(seq, f)
    return _lift(seq, f, g, eqv, to_bullet, from_bullet)


def from_bullet(f, eqv: Equivalences) -> D:
    """``bullet(f) |- f``."""
    sd = eqv.sd
    g = bullet(f, sd)
    seq = Sequent((g,), f)
    if g == f:
        return B.mk(seq, "Axiom", pos=0)
    if isinstance(f, Atom):
        return eqv.backward(seq, f)
    return _lift(seq, g, f, eqv, from_bullet, to_bullet)


def _lift(seq, src, dst, eqv, same, other) -> D:
    """``src |- dst`` for a compound formula and its staged image (either way round).

    ``same`` proves the components in the same direction, ``other`` in the
    opposite one (needed left of an implication or under a negation).
    """
    orig = src if same is to_bullet else dst

    def w(goal, d):
        return B.weaken(goal, d)

    if isinstance(src, And):
        (g,) = B.goals(seq, "AndL", pos=0)
        a, b = B.goals(g, "AndR")
        return B.mk(seq, "AndL", [B.mk(g, "AndR", [w(a, same(orig.left, eqv)), w(b, same(orig.right, eqv))])], pos=0)
    if isinstance(src, Or):
        ga, gb = B.goals(seq, "OrL", pos=0)
        (pa,) = B.goals(ga, "OrRl")
        (pb,) = B.goals(gb, "OrRr")
        return B.mk(seq, "OrL", [B.mk(ga, "OrRl", [w(pa, same(orig.left, eqv))]),
                                 B.mk(gb, "OrRr", [w(pb, same(orig.right, eqv))])], pos=0)
    if isinstance(src, Imp):
        (g,) = B.goals(seq, "ImpR")

        def use(g2):
            left, right = B.goals(g2, "ImpL", pos=0)
            return B.mk(g2, "ImpL", [B.mk(left, "Axiom", pos=len(left.ante) - 1),
                                     w(right, same(orig.right, eqv))], pos=0)

        return B.mk(seq, "ImpR", [B.cut_with(g, src.left, other(orig.left, eqv), use)])
    if isinstance(src, Not):
        (g,) = B.goals(seq, "NotR")

        def use(g2):
            (p,) = B.goals(g2, "NotL", pos=0)
            return B.mk(g2, "NotL", [B.mk(p, "Axiom", pos=len(p.ante) - 1)], pos=0)

        return B.mk(seq, "NotR", [B.cut_with(g, src.body, other(orig.body, eqv), use)])
    if isinstance(src, Forall):
        x = src.var
        (g,) = B.goals(seq, "AllR", var=x)
        (h,) = B.goals(g, "AllL", pos=0, term=Var(x))
        return B.mk(seq, "AllR", [B.mk(g, "AllL", [w(h, same(orig.body, eqv))], pos=0, term=Var(x))], var=x)
    if isinstance(src, Exists):
        x = src.var
        (g,) = B.goals(seq, "ExL", pos=0, var=x)
        (h,) = B.goals(g, "ExR", term=Var(x))
        return B.mk(seq, "ExL", [B.mk(g, "ExR", [w(h, same(orig.body, eqv))], term=Var(x))], pos=0, var=x)
    raise ValueError(f"cannot lift through {type(src).__name__}")


# -- destaging ---------------------------------------------------------------------


def destage(proof: D, seq: Sequent, vec, eqv: Equivalences) -> D:
    """A proof of ``seq`` from a proof of its staged form with stage variables ``vec``."""
    sd = eqv.sd
    n = len(seq.ante)

    def cut_in(k, goal):
        if k == n:
            return open_stages(0, 0, goal)
        f = seq.ante[k]
        return B.cut_with(goal, bullet(f, sd), to_bullet(f, eqv), lambda g: cut_in(k + 1, g))

    def open_stages(k, r, goal):
        while k < n and not _base_inductive(sd, seq.ante[k]):
            k += 1
        if k == n:
            return cut_out(goal)
        at = n + k
        (g,) = B.goals(goal, "ExL", pos=at, var=vec[r].name)
        return B.mk(goal, "ExL", [open_stages(k + 1, r + 1, g)], pos=at, var=vec[r].name)

    def cut_out(goal):
        if seq.succ is None:
            return B.weaken(goal, proof)
        f = bullet(seq.succ, sd)
        if f == seq.succ:
            return B.weaken(goal, proof)
        return B.cut_with(goal, f, proof, lambda g: B.weaken(g, from_bullet(seq.succ, eqv)))

    return cut_in(0, seq)

"""Removing the auxiliary stage predicates ``N'`` and ``P''`` from an induction proof.

``N'(a, b)`` is read as ``N a & N b & a <= b`` and ``P''(xs, y, z)`` as
``P'(xs, y) & N z & y < z``.  Under this reading every rule instance stays
a rule instance except introductions and inductions on the removed
predicates; those are rebuilt from the translated premises, an induction on
``N'`` becoming one on ``N`` and an induction on ``P''`` one on ``P'``.
"""
from __future__ import annotations

from ..logic.syntax import (
    And, Atom, Bot, Eq, Exists, Fn, Forall, Imp, Not, Or, Sequent, Var, alpha_eq, conj, free_vars,
    instantiate, le, lt, primed, subst_sequent, succ,
)
from ..proofs import build as B
from ..proofs.graph import D, from_graph, to_graph
from ..proofs.kernel import check_proof
from ..proofs.rules import forms_map, make_rule, subst_map
from ..stage.staging import Lemmas


class UnsupportedNode(ValueError):
    pass


class Lowering:
    def __init__(self, sd, base, fresh):
        self.sd = sd
        self.base = base
        self.fresh = fresh
        self.n_stage = None
        self.doubled = {}  # P'' -> P'
        for name, p in sd.pred.items():
            if name in base.pred:
                continue
            if p.base == "N":
                self.n_stage = name
            elif p.base is not None and p.base in base.pred and base.pred[p.base].base is not None:
                self.doubled[name] = p.base
            else:
                raise UnsupportedNode(f"no translation for predicate {name}")
        self.lemmas = Lemmas(base, fresh)
        self._tilde = {}

    # -- formulas
    def lowered(self, pred) -> bool:
        return pred == self.n_stage or pred in self.doubled

    def tilde(self, f):
        hit = self._tilde.get(id(f))
        if hit is not None and hit[0] is f:
            return hit[1]
        out = self._tilde_of(f)
        self._tilde[id(f)] = (f, out)
        return out

    def _tilde_of(self, f):
        if f is None or isinstance(f, (Eq, Bot)):
            return f
        if isinstance(f, Atom):
            if f.pred == self.n_stage:
                a, b = f.args
                return conj([Atom("N", (a,)), Atom("N", (b,)), le(a, b)])
            if f.pred in self.doubled:
                *xs, y, z = f.args
                return conj([Atom(self.doubled[f.pred], tuple(xs) + (y,)), Atom("N", (z,)), lt(y, z)])
            return f
        if isinstance(f, (And, Or, Imp)):
            return type(f)(self.tilde(f.left), self.tilde(f.right))
        if isinstance(f, Not):
            return Not(self.tilde(f.body))
        if isinstance(f, (Forall, Exists)):
            return type(f)(f.var, self.tilde(f.body))
        raise TypeError(f"not a formula: {f!r}")

    def seq(self, s: Sequent) -> Sequent:
        return Sequent(tuple(self.tilde(f) for f in s.ante), self.tilde(s.succ))

    # -- proofs
    def run(self, root: D) -> D:
        made = {}
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
            made[id(d)] = self.node(d, [made[id(p)] for p in d.prems])
        return made[id(root)]

    def node(self, d: D, prems) -> D:
        tag = d.rule.tag
        seq = self.seq(d.seq)
        if tag == "Intro" and self.lowered(d.rule["pred"]):
            return self.intro(seq, d, prems)
        if tag in ("Ind", "Case"):
            principal = d.seq.ante[d.rule["pos"]]
            if self.lowered(principal.pred):
                if tag == "Case":
                    raise UnsupportedNode(f"case distinction on {principal.pred}")
                if principal.pred == self.n_stage:
                    return self.ind_n(seq, d, prems)
                return self.ind_doubled(seq, d, prems)
        data = dict(d.rule.data)
        if "formula" not in data and "forms" not in data:
            return D(seq, d.rule, prems)
        if "formula" in data:
            data["formula"] = self.tilde(data["formula"])
        if "forms" in data:
            data["forms"] = [(q, ps, self.tilde(body)) for q, (ps, body) in forms_map(data["forms"]).items()]
        return D(seq, make_rule(tag, **data), prems)

    # introductions: cut the translated premises and rebuild
    def intro(self, seq, d, prems) -> D:
        pred = d.rule["pred"]
        start = len(seq.ante)

        def cuts(k, goal):
            if k == len(prems):
                return self.finish_intro(goal, start, pred, d)
            return B.cut_with(goal, prems[k].seq.succ, prems[k], lambda g: cuts(k + 1, g))

        return cuts(0, seq)

    def finish_intro(self, goal, start, pred, d) -> D:
        if pred == self.n_stage:
            return B.arith(goal, self.base)
        goal, wrap = self.open_ands(goal, start)
        left, right = B.goals(goal, "AndR")
        base = self.doubled[pred]
        idx = d.rule["index"]
        theta = subst_map(d.rule.get("subst"))
        prod = self.base.productions_of(base)[idx]
        keep = {x: theta[x] for x in prod.variables}
        item_goals = B.goals(left, "Intro", self.base, pred=base, index=idx, subst=keep)
        intro = B.mk(left, "Intro", [B.axiom(g) for g in item_goals], self.base, pred=base, index=idx, subst=keep)
        return wrap(B.mk(goal, "AndR", [intro, self._arith(right)]))

    def open_ands(self, goal, start):
        """Split every conjunction from position ``start`` on; returns the goal and a wrapper."""
        steps = []
        while True:
            k = next((i for i in range(start, len(goal.ante)) if isinstance(goal.ante[i], And)), None)
            if k is None:
                break
            steps.append((goal, k))
            (goal,) = B.goals(goal, "AndL", pos=k)

        def wrap(d):
            for g, k in reversed(steps):
                d = B.mk(g, "AndL", [d], pos=k)
            return d

        return goal, wrap

    def _use_bound(self, goal, p, c, hyps):
        """``goal`` has ``forall z. N z -> h(z) -> F(z)`` at ``p``; instantiate with ``c``, close the
        two hypotheses by ``hyps`` and finish by an axiom on ``F(c)``."""
        (g1,) = B.goals(goal, "AllL", pos=p, term=c)
        l1, r1 = B.goals(g1, "ImpL", pos=p)
        l2, r2 = B.goals(r1, "ImpL", pos=p)
        inner = B.mk(r1, "ImpL", [hyps[1](l2), B.mk(r2, "Axiom", pos=p)], pos=p)
        return B.mk(goal, "AllL", [B.mk(g1, "ImpL", [hyps[0](l1), inner], pos=p)], pos=p, term=c)

    def _close(self, g):
        try:
            return B.axiom(g)
        except B.BuildError:
            return self._arith(g)

    def _arith(self, g):
        """Arith, first adding ``N v`` for the stage ``v`` of each stage atom when needed."""
        try:
            return B.arith(g, self.base)
        except B.BuildError:
            pass
        atoms = []
        for f in g.ante:
            if isinstance(f, Atom) and f.pred in self.base.pred and self.base.pred[f.pred].base is not None:
                n = Atom("N", (f.args[-1],))
                if n not in g.ante and n not in [Atom("N", (a.args[-1],)) for a in atoms]:
                    atoms.append(f)
        if not atoms:
            return B.arith(g, self.base)

        def cuts(k, goal):
            if k == len(atoms):
                return B.arith(goal, self.base)
            a = atoms[k]
            n = Atom("N", (a.args[-1],))
            lemma = self.lemmas.stage_is_number(Sequent(goal.ante, n), a, cyclic=False)
            return B.cut_with(goal, n, lemma, lambda g2: cuts(k + 1, g2))

        return cuts(0, g)

    def _main(self, seq, p, cut_formula, ind_proof, ind_ante, c):
        """Open the translated principal at ``p`` (three conjuncts), cut the strengthened
        induction formula and instantiate it at ``c``."""
        (g1,) = B.goals(seq, "AndL", pos=p)
        (g2,) = B.goals(g1, "AndL", pos=p + 1)

        def use(g3):
            last = len(g3.ante) - 1
            (g4,) = B.goals(g3, "AndL", pos=last)
            body = self._use_bound(g4, last + 1, c, (self._close, self._close))
            return B.mk(g3, "AndL", [body], pos=last)

        inner = B.cut_with(g2, cut_formula, ind_proof, use)
        return B.mk(seq, "AndL", [B.mk(g1, "AndL", [inner], pos=p + 1)], pos=p)

    # induction on N' becomes induction on N
    def ind_n(self, seq, d, prems) -> D:
        p = d.rule["pos"]
        a, b = d.seq.ante[p].args
        (ps, body) = forms_map(d.rule["forms"])[self.n_stage]
        body = self.tilde(body)
        avoid = set(free_vars(body)) | set(ps)
        zc, zz = primed("c", avoid), primed("z", avoid)
        cv, zv = Var(zc), Var(zz)

        def ftil(x, y):
            return instantiate(ps, body, (x, y))

        fprime_body = And(Atom("N", (cv,)), Forall(zz, Imp(Atom("N", (zv,)), Imp(le(cv, zv), ftil(cv, zv)))))

        def fprime(t):
            return instantiate((zc,), fprime_body, (t,))

        rho0, rho1 = (subst_map(s) for s in d.rule["fresh"])
        prods = self.sd.productions_of(self.n_stage)
        v0 = rho0[prods[0].args[1].name]
        x1 = rho1[prods[1].args[0].args[0].name]
        v1 = rho1[prods[1].args[1].name]
        w1 = rho1[next(q.args[1].name for q in prods[1].premises if isinstance(q, Atom) and q.pred == self.n_stage)]
        rest = d.seq.ante[:p] + d.seq.ante[p + 1:]
        rest = tuple(self.tilde(f) for f in rest)
        ind_ante = rest[:p] + (Atom("N", (a,)),) + rest[p:]
        root = Sequent(ind_ante, fprime(a))
        forms = [("N", (zc,), fprime_body)]
        fresh = [{}, {"x": x1}]
        m0, m1 = B.goals(root, "Ind", self.base, pos=p, forms=forms, fresh=fresh)
        pm0, pm1 = prems

        # zero: F'(0) from the translated first minor premise
        l0, r0 = B.goals(m0, "AndR")
        (s0,) = B.goals(r0, "AllR", var=v0.name)
        (s1,) = B.goals(s0, "ImpR")
        (s2,) = B.goals(s1, "ImpR")
        zero = B.mk(m0, "AndR", [B.arith(l0, self.base), B.mk(r0, "AllR", [B.mk(s0, "ImpR", [
            B.mk(s1, "ImpR", [B.weaken(s2, pm0)])])], var=v0.name)])

        # successor: F'(x) |- F'(s x), taking the smaller stage to be x itself
        r = len(m1.ante) - 1
        (t0,) = B.goals(m1, "AndL", pos=r)
        lft, rgt = B.goals(t0, "AndR")
        (t1,) = B.goals(rgt, "AllR", var=v1.name)
        (t2,) = B.goals(t1, "ImpR")
        (t3,) = B.goals(t2, "ImpR")
        theta = {w1.name: x1}
        inst = B.subst(subst_sequent(pm1.seq, theta), theta, pm1)
        ih = r + 1

        def hyp_ih(g):
            return self._use_bound(g, ih, x1, (B.axiom, self._close))

        def after_lt(g):
            return B.cut_with(g, ftil(x1, x1), hyp_ih(Sequent(g.ante, ftil(x1, x1))), lambda g2: B.weaken(g2, inst))

        body = B.cut_with(t3, lt(x1, v1), B.arith(Sequent(t3.ante, lt(x1, v1)), self.base), after_lt)
        step = B.mk(m1, "AndL", [B.mk(t0, "AndR", [B.arith(lft, self.base), B.mk(rgt, "AllR", [
            B.mk(t1, "ImpR", [B.mk(t2, "ImpR", [body])])], var=v1.name)])], pos=r)
        ind = B.mk(root, "Ind", [zero, step], self.base, pos=p, forms=forms, fresh=fresh)
        return self._main(seq, p, fprime(a), ind, ind_ante, b)

    # induction on P'' becomes induction on P'
    def ind_doubled(self, seq, d, prems) -> D:
        p = d.rule["pos"]
        principal = d.seq.ante[p]
        *xs, b, c = principal.args
        block2 = self.sd.block(principal.pred)
        forms2 = forms_map(d.rule["forms"])
        fresh2 = [subst_map(s) for s in d.rule["fresh"]]
        avoid = set()
        for ps, body in forms2.values():
            avoid |= set(free_vars(self.tilde(body))) | set(ps)
        zz = primed("z", avoid)
        zv = Var(zz)
        fprimes = {}
        for q in block2:
            ps, body = forms2[q]
            body = self.tilde(body)
            *pxs, py, pz = ps
            inner = instantiate((pz,), body, (zv,))
            fprimes[self.doubled[q]] = (tuple(pxs) + (py,), And(Atom("N", (Var(py),)), Forall(
                zz, Imp(Atom("N", (zv,)), Imp(lt(Var(py), zv), inner)))))

        def fprime(q, args):
            ps, body = fprimes[q]
            return instantiate(ps, body, args)

        base_pred = self.doubled[principal.pred]
        rest = tuple(self.tilde(f) for f in d.seq.ante[:p] + d.seq.ante[p + 1:])
        patom = Atom(base_pred, tuple(xs) + (b,))
        ind_ante = rest[:p] + (patom,) + rest[p:]
        root = Sequent(ind_ante, fprime(base_pred, tuple(xs) + (b,)))
        forms = [(q, ps, body) for q, (ps, body) in fprimes.items()]
        block1 = self.base.block(base_pred)
        if [self.doubled[q] for q in block2] != list(block1):
            raise UnsupportedNode("stage blocks do not line up")
        fresh = []
        k = 0
        jobs = []
        for q in block1:
            for idx, prod in enumerate(self.base.productions_of(q)):
                rho2 = fresh2[k]
                rho = {x: rho2[x] for x in prod.variables}
                fresh.append(rho)
                jobs.append((q, idx, prod, rho, rho2, prems[k]))
                k += 1
        minors = B.goals(root, "Ind", self.base, pos=p, forms=forms, fresh=fresh)
        subs = [self.minor_doubled(m, len(rest), *job) for m, job in zip(minors, jobs)]
        ind = B.mk(root, "Ind", subs, self.base, pos=p, forms=forms, fresh=fresh)
        return self._main(seq, p, fprime(base_pred, tuple(xs) + (b,)), ind, ind_ante, c)

    def minor_doubled(self, goal, nrest, q, idx, prod, rho, rho2, pm) -> D:
        """``rest, items' |- F'(t, v)`` from the translated minor premise ``pm`` of the
        induction on ``q''``: the outer stage ``w`` becomes the bound ``z``, each ``w_i``
        becomes ``s v_i`` and ``w0`` becomes ``v``."""
        prod2 = self.sd.productions_of(self.sd.stage_map[q])[idx]
        v = prod.args[-1].name
        w = prod2.args[-1].name
        theta = {}
        for a in prod2.premises:
            if isinstance(a, Atom) and a.pred in self.doubled:
                vi, wi = a.args[-2], a.args[-1]
                theta[rho2[wi.name].name] = succ(rho2[vi.name])
            elif isinstance(a, Atom) and a.pred == self.n_stage:
                theta[rho2[a.args[1].name].name] = rho2[v]
        wv = rho2[w]
        left, right = B.goals(goal, "AndR")
        (g1,) = B.goals(right, "AllR", var=wv.name)
        (g2,) = B.goals(g1, "ImpR")
        (g3,) = B.goals(g2, "ImpR")
        inst = B.subst(subst_sequent(pm.seq, theta), theta, pm)
        # expose N v_i and the bounds of the induction hypotheses
        g4, wrap = self.open_ands(g3, nrest)
        hyps = {}
        for i, f in enumerate(g4.ante[nrest:], nrest):
            if isinstance(f, Forall):
                hyps[i] = f
        typed = []
        for f in g4.ante[nrest:]:
            if isinstance(f, Atom) and f.pred in self.base.pred and self.base.pred[f.pred].base is not None:
                typed.append(f)
        needed = inst.seq.ante[nrest:]

        def prove(g, f):
            for i, h in hyps.items():
                try:
                    return self._use_bound(g, i, _bound_term(h, f), (self._close, self._close))
                except (B.BuildError, _NoMatch):
                    continue
            if isinstance(f, And):
                a, bb = B.goals(g, "AndR")
                return B.mk(g, "AndR", [prove(a, f.left), prove(bb, f.right)])
            return self._close(g)

        def n_cuts(k, g):
            if k == len(typed):
                return item_cuts(0, g)
            a = typed[k]
            nw = Atom("N", (a.args[-1],))
            lemma = self.lemmas.stage_is_number(Sequent((a,), nw), a, cyclic=False)
            return B.cut_with(g, nw, lemma, lambda g2: n_cuts(k + 1, g2))

        def item_cuts(k, g):
            if k == len(needed):
                return B.weaken(g, inst)
            f = needed[k]
            return B.cut_with(g, f, prove(Sequent(g.ante, f), f), lambda g2: item_cuts(k + 1, g2))

        body = wrap(n_cuts(0, g4))
        return B.mk(goal, "AndR", [B.axiom(left), B.mk(right, "AllR", [B.mk(g1, "ImpR", [
            B.mk(g2, "ImpR", [body])])], var=wv.name)])


class _NoMatch(Exception):
    pass


def _bound_term(h, f):
    """The term ``t`` with ``h = forall z. N z -> _ -> F(z)`` and ``F(t) = f``."""
    body = h.body.right.right
    if h.var not in free_vars(body):
        # any stage above the lower bound will do
        return succ(h.body.right.left.args[0])
    cand = _match(h.var, body, f)
    if cand is None or not alpha_eq(instantiate((h.var,), body, (cand,)), f):
        raise _NoMatch
    return cand


def _match(var, pat, f):
    """First term bound to ``var`` when matching ``pat`` against ``f`` structurally."""
    def terms(a, b):
        if isinstance(a, Var) and a.name == var:
            return b
        if isinstance(a, Fn) and isinstance(b, Fn) and a.name == b.name and len(a.args) == len(b.args):
            for x, y in zip(a.args, b.args):
                r = terms(x, y)
                if r is not None:
                    return r
        return None

    def forms(a, b):
        if type(a) is not type(b):
            return None
        if isinstance(a, Atom):
            if a.pred != b.pred or len(a.args) != len(b.args):
                return None
            for x, y in zip(a.args, b.args):
                r = terms(x, y)
                if r is not None:
                    return r
            return None
        if isinstance(a, Eq):
            return terms(a.lhs, b.lhs) or terms(a.rhs, b.rhs)
        if isinstance(a, (And, Or, Imp)):
            return forms(a.left, b.left) or forms(a.right, b.right)
        if isinstance(a, Not):
            return forms(a.body, b.body)
        if isinstance(a, (Forall, Exists)):
            return forms(a.body, b.body)
        return None

    return forms(pat, f)


def lower(g, sd, base, fresh=None, check=True):
    """Translate the induction proof ``g`` over ``sd`` into one over ``base``."""
    from ..proofs.graph import fresh_supply

    fresh = fresh or fresh_supply(g)
    lw = Lowering(sd, base, fresh)
    out = to_graph(lw.run(from_graph(g)), g.certificates)
    if check:
        bad = check_proof(out, base, "ljid")
        if bad:
            raise UnsupportedNode(f"lowered proof does not check: {bad[0]}")
    return out

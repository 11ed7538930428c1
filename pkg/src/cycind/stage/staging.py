"""Stage-number transformation of bud-free cyclic proofs.

Every inductive predicate ``P`` gets a stage predicate ``P'`` with one extra
argument, the stage at which ``P`` was derived.  A formula is staged by
replacing inductive atoms ``P t`` with ``exists v. P'(t, v)`` (``bullet``);
top-level antecedent atoms instead receive explicit stage variables
(``circ``).  ``stage_proof`` rebuilds a proof of ``G |- D`` as a proof of the
staged sequent and records, for every open assumption, the order facts
between stage variables collected along the way.

A staged sequent is ``circ(G, vec) ++ E |- bullet(D)`` where ``E`` holds the
extra facts introduced by case distinctions: ``u = v'``, ``v_i < v'`` and
``N v'``.
"""
from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field

from ..logic.defs import STAGE, PredicateSymbol
from ..logic.syntax import (
    And, Atom, Bot, Eq, Exists, Forall, Imp, Not, Or, Sequent, Var, free_vars, lt, numeral,
    plus, primed, succ, term_vars,
)
from ..proofs import build as B
from ..proofs.graph import D, make_rule
from ..proofs.rules import position_maps, premises, subst_map
from ..trace.relations import EQ, GT, NONE, inductive_atoms

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

APPEND_RULES = ("ImpR", "NotR")


class StageError(ValueError):
    pass


# -- staged signature ----------------------------------------------------------


def staged_defs(defs, include=None):
    """``defs`` with a stage predicate for every inductive predicate that lacks one.

    Stage predicates are themselves inductive, so a declared ``P'`` gets a
    ``P''``.  ``include`` limits which predicates get new symbols.
    """
    taken = set(defs.pred)
    new = []
    have = dict(defs.stage_map)
    for name, p in defs.pred.items():
        if not p.is_inductive or name in have:
            continue
        if include is not None and name not in include:
            continue
        s = primed(name + "'", taken)
        taken.add(s)
        new.append(PredicateSymbol(s, p.arity + 1, STAGE, name))
    if not new:
        return defs
    return defs.extend(predicates=new).validate()


def stage_of(sd, pred: str) -> str:
    try:
        return sd.stage_map[pred]
    except KeyError:
        raise StageError(f"no stage predicate for {pred}") from None


def stage_variables(sd, pred, index):
    """Names ``(v, (v1, ..., vm))`` used by the staged production."""
    prod = sd.productions_of(stage_of(sd, pred))[index]
    v = prod.premises[-1].args[0].name
    vs = tuple(a.args[0].name for a in prod.premises if isinstance(a, Atom) and a.pred == "<"
               and a.args[1] == Var(v))
    return v, vs


def _base_inductive(sd, f) -> bool:
    return isinstance(f, Atom) and sd.is_inductive(f.pred) and f.pred in sd.stage_map


def bullet(f, sd):
    """Replace every inductive atom ``P t`` by ``exists v. P'(t, v)``."""
    if isinstance(f, Atom):
        if not _base_inductive(sd, f):
            return f
        avoid = set()
        for a in f.args:
            avoid |= term_vars(a)
        v = primed("v", avoid)
        return Exists(v, Atom(stage_of(sd, f.pred), f.args + (Var(v),)))
    if isinstance(f, (Eq, Bot)) or f is None:
        return f
    if isinstance(f, (And, Or, Imp)):
        return type(f)(bullet(f.left, sd), bullet(f.right, sd))
    if isinstance(f, Not):
        return Not(bullet(f.body, sd))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, bullet(f.body, sd))
    raise StageError(f"cannot stage {f!r}")


def bullet_sequent(s: Sequent, sd) -> Sequent:
    return Sequent(tuple(bullet(f, sd) for f in s.ante), bullet(s.succ, sd))


def circ(ante, vec, sd) -> tuple:
    """Top-level inductive atoms take the stage variables of ``vec`` in order."""
    out = []
    k = 0
    for f in ante:
        if _base_inductive(sd, f):
            if k >= len(vec):
                raise StageError("not enough stage variables")
            out.append(Atom(stage_of(sd, f.pred), f.args + (vec[k],)))
            k += 1
        else:
            out.append(bullet(f, sd))
    return tuple(out)


def staged_sequent(s: Sequent, vec, extras, sd) -> Sequent:
    return Sequent(circ(s.ante, vec, sd) + tuple(extras), bullet(s.succ, sd))


# -- stage numbers are numbers ---------------------------------------------------


class Lemmas:
    """Memoised generic lemmas, instantiated by ``Subst``."""

    def __init__(self, sd, fresh):
        self.sd = sd
        self.fresh = fresh
        self.cache = {}

    def _params(self, pred):
        arity = self.sd.pred[pred].arity
        return tuple(self.fresh("z") for _ in range(arity - 1)) + (self.fresh("v"),)

    def instance(self, goal: Sequent, key, build, args) -> D:
        if key not in self.cache:
            self.cache[key] = build()
        lemma, names = self.cache[key]
        theta = dict(zip(names, args))
        concl = Sequent(tuple(_inst(f, theta) for f in lemma.seq.ante), _inst(lemma.seq.succ, theta))
        return B.weaken(goal, B.subst(concl, theta, lemma))

    def stage_is_number(self, goal: Sequent, atom: Atom, cyclic=True) -> D:
        """``goal`` contains ``P'(t, w)`` and has succedent ``N w``."""
        key = ("N-case" if cyclic else "N-ind", atom.pred)
        build = (lambda: self._n_case(atom.pred)) if cyclic else (lambda: self._n_ind(atom.pred))
        return self.instance(goal, key, build, atom.args)

    def _n_case(self, pred):
        """``P'(z, v) |- N v`` by a case distinction on ``P'``."""
        sd = self.sd
        names = self._params(pred)
        zs = tuple(Var(n) for n in names)
        v = zs[-1]
        root = Sequent((Atom(pred, zs),), Atom("N", (v,)))
        fresh = [{x: Var(self.fresh("y")) for x in prod.variables} for prod in sd.productions_of(pred)]
        prems = B.goals(root, "Case", sd, pos=0, fresh=fresh)
        subs = []
        for p in prems:
            k = len(zs) - 1
            (q,) = B.goals(p, "EqL", pos=k, dir="lr")
            subs.append(B.mk(p, "EqL", [B.axiom(q)], pos=k, dir="lr"))
        return B.mk(root, "Case", subs, sd, pos=0, fresh=fresh), names

    def _n_ind(self, pred):
        """``P'(z, v) |- N v`` by induction on ``P'``."""
        sd = self.sd
        names = self._params(pred)
        zs = tuple(Var(n) for n in names)
        root = Sequent((Atom(pred, zs),), Atom("N", (zs[-1],)))
        forms = []
        for q in sd.block(pred):
            ps = tuple(self.fresh("z") for _ in range(sd.pred[q].arity))
            forms.append((q, ps, Atom("N", (Var(ps[-1]),))))
        fresh = [{x: Var(self.fresh("y")) for x in prod.variables}
                 for q in sd.block(pred) for prod in sd.productions_of(q)]
        prems = B.goals(root, "Ind", sd, pos=0, forms=forms, fresh=fresh)
        return B.mk(root, "Ind", [B.axiom(p) for p in prems], sd, pos=0, forms=forms, fresh=fresh), names


def _inst(f, theta):
    from ..logic.syntax import substitute

    return None if f is None else substitute(f, theta)


def intro_stage(goal: Sequent, sd, pred, idx, rho, stages, ordinary) -> D:
    """``goal`` has succedent ``exists v. P'(t, v)`` and the antecedent holds
    ``P_i'(t_i, w_i)`` and ``N w_i`` for the inductive premises of production
    ``idx``; ``ordinary(goal, k)`` proves the k-th ordinary premise."""
    prod = sd.productions_of(pred)[idx]
    _, items = prod.rename(rho)
    t0 = succ(numeral(0))
    if stages:
        acc = stages[-1]
        for w in reversed(stages[:-1]):
            acc = plus(w, acc)
        t0 = succ(acc)
    (g2,) = B.goals(goal, "ExR", term=t0)
    v, vs = stage_variables(sd, pred, idx)
    theta = dict(rho)
    theta[v] = t0
    for name, w in zip(vs, stages):
        theta[name] = w
    spred = stage_of(sd, pred)
    item_goals = B.goals(g2, "Intro", sd, pred=spred, index=idx, subst=theta)
    leaves = []
    j = 0
    for k, a in enumerate(items):
        if _base_inductive(sd, a):
            leaves.append(B.arith(item_goals[j], sd))
            leaves.append(B.axiom(item_goals[j + 1]))
            j += 2
        else:
            leaves.append(ordinary(item_goals[j], k))
            j += 1
    leaves.append(B.arith(item_goals[j], sd))
    intro = B.mk(g2, "Intro", leaves, sd, pred=spred, index=idx, subst=theta)
    return B.mk(goal, "ExR", [intro], term=t0)


# -- inequalities -----------------------------------------------------------------


def ineq_entails(ineq, x, y, rel) -> bool:
    """Do the facts ``ineq`` force ``x ~> y`` in the sense of ``rel``?

    ``ineq`` holds triples ``('=', a, b)`` and ``('>', a, b)`` over variable
    names.  A cell ``GT`` at ``(q2, q1)`` needs ``y[q1] < x[q2]``, a cell
    ``EQ`` needs ``x[q2] = y[q1]``.  Every fact is a difference constraint
    with weight 0 or -1, so entailment is reachability in the constraint
    graph (an unsatisfiable set entails everything).
    """
    adj = {}
    for op, a, b in ineq:
        if op == "=":
            adj.setdefault(a, []).append((b, False))
            adj.setdefault(b, []).append((a, False))
        elif op == ">":
            adj.setdefault(a, []).append((b, True))
        else:
            raise ValueError(f"unknown constraint {op!r}")

    def reach(src):
        seen = {(src, False)}
        todo = deque(seen)
        while todo:
            node, strict = todo.popleft()
            for nxt, s in adj.get(node, ()):
                state = (nxt, strict or s)
                if state not in seen:
                    seen.add(state)
                    todo.append(state)
        return seen

    for a in adj:
        if (a, True) in reach(a):
            return True
    xs = [getattr(t, "name", t) for t in x]
    ys = [getattr(t, "name", t) for t in y]
    if len(xs) != rel.rows or len(ys) != rel.cols:
        return False
    cache = {}
    for q2 in range(rel.rows):
        for q1 in range(rel.cols):
            cell = rel.cells[q2][q1]
            if cell == NONE:
                continue
            r = cache.get(xs[q2])
            if r is None:
                r = cache[xs[q2]] = reach(xs[q2])
            if cell == GT and (ys[q1], True) not in r:
                return False
            if cell == EQ and (ys[q1], False) not in r:
                return False
    return True


# -- the transformation -------------------------------------------------------------


@dataclass(frozen=True)
class StagedAssumption:
    node: int  # original assumption (or bud) node id
    path: tuple  # original node ids from the start node to the assumption
    vec: tuple  # stage variables of the assumption's inductive atoms
    ineq: tuple  # ('=' | '>', a, b) over variable names
    seq: Sequent  # staged sequent of the leaf
    leaf: D = field(default=None, compare=False, repr=False)


@dataclass
class StagedProof:
    proof: D
    vec: tuple
    assumptions: list
    defs: object


class _Stager:
    def __init__(self, g, defs, sd, fresh, lemmas):
        self.g = g
        self.defs = defs
        self.sd = sd
        self.fresh = fresh
        self.lemmas = lemmas
        self.out = []

    def var(self):
        return Var(self.fresh("v"))

    def run(self, i, vec, extras, path, ineq) -> D:
        n = self.g.nodes[i]
        path = path + (i,)
        tag = n.rule.tag
        seq = staged_sequent(n.seq, vec, extras, self.sd)
        if tag in ("Assumption", "Bud"):
            leaf = D(seq, make_rule("Assumption"))
            self.out.append(StagedAssumption(i, path, tuple(vec), tuple(ineq), seq, leaf))
            return leaf
        if tag == "Axiom":
            pos = n.rule["pos"]
            if _base_inductive(self.sd, n.seq.ante[pos]):
                stage = seq.ante[pos].args[-1]
                (p,) = B.goals(seq, "ExR", term=stage)
                return B.mk(seq, "ExR", [B.mk(p, "Axiom", pos=pos)], term=stage)
            return B.mk(seq, "Axiom", pos=pos)
        if tag in ("HA", "Arith"):
            return B.close_arith(seq, self.sd, self.fresh)
        if tag in ("BotL", "EqR"):
            return B.mk(seq, tag, **dict(n.rule.data))
        if tag in ("Term", "Ind"):
            raise StageError(f"node {i}: {tag} cannot be staged")
        if tag == "Subst":
            (p,) = n.premises
            theta = n.rule["subst"]
            return B.mk(seq, "Subst", [self.run(p, vec, extras, path, ineq)], subst=dict(theta))
        if tag == "Intro":
            return self.intro(n, seq, vec, extras, path, ineq)
        if tag == "Case":
            return self.case(n, seq, vec, extras, path, ineq)
        return self.generic(n, seq, vec, extras, path, ineq)

    # rules that commute with staging
    def generic(self, n, seq, vec, extras, path, ineq):
        g, sd = self.g, self.sd
        data = dict(n.rule.data)
        width = len(n.seq.ante)
        if n.rule.tag == "Wk":
            data["keep"] = list(data["keep"]) + [width + j for j in range(len(extras))]
        if "formula" in data:
            data["formula"] = bullet(data["formula"], sd)
        rule = make_rule(n.rule.tag, **data)
        want = premises(seq, rule, sd)
        prem_seqs = [g.nodes[p].seq for p in n.premises]
        maps = position_maps(n.seq, n.rule, prem_seqs, self.defs)
        rank = {pos: k for k, pos in enumerate(inductive_atoms(n.seq.ante, self.defs))}
        subs = []
        for k, (p, orig) in enumerate(zip(n.premises, prem_seqs)):
            inherited = {pp: vec[rank[c]] for c, pp, _ in maps[k] if c in rank}
            appended = n.rule.tag in APPEND_RULES or (n.rule.tag == "Cut" and k == 1)
            goal = want[k]
            opened = []
            pvec = []
            for j in inductive_atoms(orig.ante, self.defs):
                if j in inherited:
                    pvec.append(inherited[j])
                    continue
                at = len(goal.ante) - 1 if appended and j == len(orig.ante) - 1 else j
                w = self.var()
                opened.append((at, w))
                pvec.append(w)
            body = self.run(p, pvec, extras, path, ineq)
            subs.append(self._open(goal, opened, body))
        return D(seq, rule, subs)

    def _open(self, goal, opened, body):
        if not opened:
            return B.weaken(goal, body)
        (at, w), rest = opened[0], opened[1:]
        (p,) = B.goals(goal, "ExL", pos=at, var=w.name)
        return B.mk(goal, "ExL", [self._open(p, rest, body)], pos=at, var=w.name)

    # introduction rules: rebuild with the stage s(w1 + ... + wm)
    def intro(self, n, seq, vec, extras, path, ineq):
        sd = self.sd
        pred, idx = n.rule["pred"], n.rule["index"]
        rho = subst_map(n.rule.get("subst"))
        prod = self.defs.productions_of(pred)[idx]
        _, items = prod.rename(rho)
        subs = [self.run(p, vec, extras, path, ineq) for p in n.premises]
        inductive = [k for k, a in enumerate(items) if _base_inductive(sd, a)]
        stages = []

        def step(m, goal):
            if m == len(inductive):
                return finish(goal)
            k = inductive[m]
            f = bullet(items[k], sd)

            def after_cut(g2):
                w = self.var()
                stages.append(w)
                (g3,) = B.goals(g2, "ExL", pos=len(g2.ante) - 1, var=w.name)
                atom = g3.ante[-1]
                nw = Atom("N", (w,))
                body = B.cut_with(g3, nw, self.lemmas.stage_is_number(Sequent((atom,), nw), atom),
                                  lambda g4: step(m + 1, g4))
                return B.mk(g2, "ExL", [body], pos=len(g2.ante) - 1, var=w.name)

            return B.cut_with(goal, f, subs[k], after_cut)

        def finish(goal):
            def ordinary(g, k):
                return B.weaken(g, subs[k])

            return intro_stage(goal, sd, pred, idx, rho, stages, ordinary)

        return step(0, seq)

    # case distinctions: distinguish on the stage predicate, keep the new facts
    def case(self, n, seq, vec, extras, path, ineq):
        sd, g = self.sd, self.g
        pos = n.rule["pos"]
        principal = n.seq.ante[pos]
        rank = inductive_atoms(n.seq.ante, self.defs).index(pos)
        vhat = vec[rank]
        fresh_orig = [subst_map(s) for s in n.rule["fresh"]]
        fresh = []
        for k, rho in enumerate(fresh_orig):
            v, vs = stage_variables(sd, principal.pred, k)
            r = dict(rho)
            r[v] = self.var()
            for name in vs:
                r[name] = self.var()
            fresh.append(r)
        want = B.goals(seq, "Case", sd, pos=pos, fresh=fresh)
        prem_seqs = [g.nodes[p].seq for p in n.premises]
        subs = []
        for k, (p, orig) in enumerate(zip(n.premises, prem_seqs)):
            v, vs = stage_variables(sd, principal.pred, k)
            vnew = fresh[k][v]
            stage_vars = [fresh[k][name] for name in vs]
            new_facts = (Eq(vhat, vnew),) + tuple(lt(w, vnew) for w in stage_vars) + (Atom("N", (vnew,)),)
            pvec = list(vec[:rank]) + stage_vars + list(vec[rank + 1:])
            pextras = tuple(extras) + new_facts
            pineq = tuple(ineq) + (("=", vhat.name, vnew.name),) + tuple((">", vnew.name, w.name) for w in stage_vars)
            body = self.run(p, pvec, pextras, path, pineq)
            subs.append(B.weaken(want[k], body))
        return B.mk(seq, "Case", subs, sd, pos=pos, fresh=fresh)


def stage_proof(g, defs, start=None, fresh=None, sd=None, lemmas=None) -> StagedProof:
    """Stage the bud-free proof rooted at ``start`` (buds are read as assumptions)."""
    from ..logic.syntax import FreshSupply

    sd = sd or staged_defs(defs)
    if fresh is None:
        fresh = FreshSupply()
        for node in g.nodes.values():
            for f in node.seq.ante + ((node.seq.succ,) if node.seq.succ is not None else ()):
                fresh.avoid(free_vars(f))
    lemmas = lemmas or Lemmas(sd, fresh)
    start = g.root if start is None else start
    stager = _Stager(g, defs, sd, fresh, lemmas)
    root = g.nodes[start].seq
    vec = tuple(Var(fresh("v")) for _ in inductive_atoms(root.ante, defs))
    proof = stager.run(start, vec, (), (), ())
    return StagedProof(proof, vec, stager.out, sd)

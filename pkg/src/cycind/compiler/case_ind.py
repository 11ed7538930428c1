"""Replace case distinctions by induction.

A case distinction on ``P u`` with side formulas ``G`` and goal ``C`` becomes
induction on ``P`` with the formula ``F z = P z & (u = z -> G -> C)``; the
left conjunct rebuilds ``P`` at each production, the right conjunct carries
the original premise.  Other predicates of the mutual block use themselves
as induction formula.
"""
from __future__ import annotations

from ..logic.syntax import BOT, And, Atom, Bot, Eq, Sequent, Var, implies_chain, instantiate
from ..proofs import build as B
from ..proofs.graph import D
from ..proofs.rules import subst_map


def case_to_ind(root: D, defs, fresh) -> D:
    memo = {}

    def conv(d):
        key = id(d)
        if key in memo:
            return memo[key]
        prems = [conv(p) for p in d.prems]
        if d.rule.tag == "Case":
            out = _case_scheme(d, prems, defs, fresh)
        elif all(a is b for a, b in zip(prems, d.prems)):
            out = d
        else:
            out = D(d.seq, d.rule, prems, d.target)
        memo[key] = out
        return out

    # deep proofs: convert leaves first so the recursion stays shallow
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
        conv(d)
    return conv(root)


def _case_scheme(d: D, prems, defs, fresh) -> D:
    seq = d.seq
    pos = d.rule["pos"]
    principal = seq.ante[pos]
    pred = principal.pred
    side = seq.ante[:pos] + seq.ante[pos + 1:]
    goal = seq.succ if seq.succ is not None else BOT
    zs = tuple(Var(fresh("z")) for _ in principal.args)
    hyps = [Eq(u, z) for u, z in zip(principal.args, zs)] + list(side)
    body = And(Atom(pred, zs), implies_chain(hyps, goal))
    forms = []
    for q in defs.block(pred):
        if q == pred:
            forms.append((q, tuple(z.name for z in zs), body))
        else:
            ps = tuple(fresh("z") for _ in range(defs.pred[q].arity))
            forms.append((q, ps, Atom(q, tuple(Var(p) for p in ps))))
    case_fresh = [subst_map(s) for s in d.rule["fresh"]]
    ind_fresh = []
    for q in defs.block(pred):
        for k, prod in enumerate(defs.productions_of(q)):
            if q == pred:
                ind_fresh.append(case_fresh[k])
            else:
                ind_fresh.append({x: Var(fresh("y")) for x in prod.variables})
    ind_concl = Sequent((principal,), instantiate(tuple(z.name for z in zs), body, principal.args))
    minors = B.goals(ind_concl, "Ind", defs, pos=0, forms=forms, fresh=ind_fresh)
    subs = []
    k = 0
    for q in defs.block(pred):
        for j, prod in enumerate(defs.productions_of(q)):
            rho = ind_fresh[k]
            minor = minors[k]
            k += 1
            intro = _rebuild(minor, q, j, rho, prod, pred, defs)
            if q != pred:
                subs.append(intro)
                continue
            subs.append(B.mk(minor, "AndR", [intro, _carry(minor, prod, rho, pred, len(hyps), prems[j], defs)]))
    ind = B.mk(ind_concl, "Ind", subs, defs, pos=0, forms=forms, fresh=ind_fresh)
    f_u = ind_concl.succ

    def use(g2):
        (g3,) = B.goals(g2, "AndL", pos=len(g2.ante) - 1)
        return B.mk(g2, "AndL", [_discharge(g3, len(hyps))], pos=len(g2.ante) - 1)

    return B.cut_with(seq, f_u, ind, use)


def _rebuild(minor, q, j, rho, prod, pred, defs) -> D:
    """``items' |- Q(t)`` (or its left conjunct) by the production itself."""
    target = minor.succ.left if q == pred else minor.succ
    seq = Sequent(minor.ante, target)
    item_goals = B.goals(seq, "Intro", defs, pred=q, index=j, subst=rho)
    leaves = []
    for k, g in enumerate(item_goals):
        f = minor.ante[k]
        if isinstance(f, And) and isinstance(g.succ, Atom) and g.succ.pred == pred:
            (g2,) = B.goals(g, "AndL", pos=k)
            leaves.append(B.mk(g, "AndL", [B.mk(g2, "Axiom", pos=k)], pos=k))
        else:
            leaves.append(B.mk(g, "Axiom", pos=k))
    return B.mk(seq, "Intro", leaves, defs, pred=q, index=j, subst=rho)


def _carry(minor, prod, rho, pred, nhyps, premise: D, defs) -> D:
    """``items' |- (u = t -> G -> C)`` from the original case premise."""

    def intro(s, n):
        if n == 0:
            return opened(s, len(prod.premises))
        (p,) = B.goals(s, "ImpR")
        return B.mk(s, "ImpR", [intro(p, n - 1)])

    def opened(s, below):
        # split the induction hypotheses so the plain atoms are available
        for k in reversed(range(below)):
            f = s.ante[k]
            if isinstance(f, And) and isinstance(f.left, Atom) and f.left.pred == pred:
                (p,) = B.goals(s, "AndL", pos=k)
                return B.mk(s, "AndL", [opened(p, k)], pos=k)
        return B.weaken(s, premise)

    return intro(Sequent(minor.ante, minor.succ.right), nhyps)


def _discharge(seq, n) -> D:
    """Use the chain of ``n`` hypotheses (last in the antecedent) to close ``seq``."""
    last = len(seq.ante) - 1
    if n == 0:
        if isinstance(seq.ante[last], Bot):
            return B.mk(seq, "BotL", pos=last)
        return B.mk(seq, "Axiom", pos=last)
    left, right = B.goals(seq, "ImpL", pos=last)
    h = left.succ
    if isinstance(h, Eq) and h.lhs == h.rhs:
        proof_left = B.mk(left, "EqR")
    else:
        proof_left = B.axiom(left)
    return B.mk(seq, "ImpL", [proof_left, _discharge(right, n - 1)], pos=last)

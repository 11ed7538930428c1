"""Small tactics for assembling derivations bottom-up.

Every constructor re-derives the premises its rule dictates and compares
them with the supplied subderivations, so a transformation that goes wrong
fails where it happens rather than later in the kernel.
"""
from __future__ import annotations

from ..logic.syntax import (
    And, Atom, Exists, Imp, Not, Sequent, Var, alpha_eq, alpha_key, sequent_eq,
)
from ..logic.text import show_sequent
from .graph import D
from .rules import RuleError, check_instance, make_rule, premises


class BuildError(RuleError):
    pass


def mk(seq: Sequent, tag: str, prems=(), defs=None, **data) -> D:
    rule = make_rule(tag, **data)
    prems = tuple(prems)
    try:
        check_instance(seq, rule, [p.seq for p in prems], defs)
    except RuleError as e:
        raise BuildError(f"{tag} at {show_sequent(seq)}: {e}") from None
    return D(seq, rule, prems)


def goals(seq: Sequent, tag: str, defs=None, **data) -> list:
    """Premise sequents of a rule application (not for Subst)."""
    return premises(seq, make_rule(tag, **data), defs)


def find(ante, f, start=0) -> int:
    k = alpha_key(f)
    for i in range(start, len(ante)):
        g = ante[i]
        if g is f or g == f or alpha_key(g) == k:
            return i
    raise BuildError("formula not in antecedent")


def weaken(seq: Sequent, d: D) -> D:
    """Wk from ``seq`` down to the conclusion of ``d`` (exchange and contraction included)."""
    target = d.seq
    if sequent_eq(seq, target):
        return d
    index = {}
    for i, f in enumerate(seq.ante):
        index.setdefault(alpha_key(f), i)
    keep = []
    for f in target.ante:
        i = index.get(alpha_key(f))
        if i is None:
            raise BuildError(f"cannot weaken {show_sequent(seq)} to {show_sequent(target)}")
        keep.append(i)
    if target.succ is None:
        mode = "keep" if seq.succ is None else "drop"
    elif seq.succ is not None and alpha_eq(seq.succ, target.succ):
        mode = "keep"
    else:
        raise BuildError(f"succedents differ: {show_sequent(seq)} / {show_sequent(target)}")
    return mk(seq, "Wk", [d], keep=keep, succ=mode)


def permute(seq: Sequent, order) -> Sequent:
    return Sequent(tuple(seq.ante[i] for i in order), seq.succ)


def axiom(seq: Sequent) -> D:
    return mk(seq, "Axiom", pos=find(seq.ante, seq.succ))


def arith(seq: Sequent, defs) -> D:
    return mk(seq, "Arith", defs=defs)


def cut(seq: Sequent, formula, left: D, right: D) -> D:
    return mk(seq, "Cut", [left, right], formula=formula)


def cut_with(seq: Sequent, formula, left, cont) -> D:
    """Cut ``formula``; ``left`` proves it from ``seq.ante``, ``cont`` gets the extended goal."""
    g1, g2 = goals(seq, "Cut", formula=formula)
    return cut(seq, formula, weaken(g1, left), cont(g2))


def subst(seq: Sequent, theta: dict, d: D) -> D:
    return mk(seq, "Subst", [d], subst=theta)


def is_stage_n(f, n_stage) -> bool:
    return isinstance(f, Atom) and f.pred == n_stage


def close_arith(seq: Sequent, defs, fresh) -> D:
    """Decompose connectives the decision procedure does not read, then an Arith leaf.

    Goals ``exists v. N'(t, v)`` are met with ``t`` itself; antecedent
    existentials and conjunctions are opened.
    """
    g = seq.succ
    if isinstance(g, Imp):
        (p,) = goals(seq, "ImpR")
        return mk(seq, "ImpR", [close_arith(p, defs, fresh)])
    if isinstance(g, Not):
        (p,) = goals(seq, "NotR")
        return mk(seq, "NotR", [close_arith(p, defs, fresh)])
    if isinstance(g, And):
        a, b = goals(seq, "AndR")
        return mk(seq, "AndR", [close_arith(a, defs, fresh), close_arith(b, defs, fresh)])
    if isinstance(g, Exists) and is_stage_n(g.body, defs.n_stage) and g.body.args[1] == Var(g.var):
        t = g.body.args[0]
        (p,) = goals(seq, "ExR", term=t)
        return mk(seq, "ExR", [close_arith(p, defs, fresh)], term=t)
    for i, f in enumerate(seq.ante):
        if isinstance(f, And):
            (p,) = goals(seq, "AndL", pos=i)
            return mk(seq, "AndL", [close_arith(p, defs, fresh)], pos=i)
        if isinstance(f, Exists) and is_stage_n(f.body, defs.n_stage):
            y = fresh("w")
            (p,) = goals(seq, "ExL", pos=i, var=y)
            return mk(seq, "ExL", [close_arith(p, defs, fresh)], pos=i, var=y)
    return mk(seq, "Arith", defs=defs)

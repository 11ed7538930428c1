"""Rule instances: premise regeneration, leaf conditions and position maps.

Antecedents are ordered.  Left rules replace their principal formula in
place; ``ImpR``, ``NotR`` and the right premise of ``Cut`` append the new
formula at the end.  ``Wk`` maps premise positions to conclusion positions
and so also covers exchange and contraction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..logic.arith import HA_AXIOMS
from ..logic.syntax import (
    And, Atom, Bot, Eq, Exists, Forall, Imp, Not, Or, Sequent, Var, alpha_eq, free_vars, instantiate, replace_term, sequent_eq, sequent_vars, subst_sequent,
    substitute, unfold,
)
from ..logic.text import show_sequent
from .decide import arith_valid

LEAF_TAGS = ("Axiom", "BotL", "EqR", "HA", "Arith", "Term", "Assumption", "Bud")
TAGS = (
    "Axiom", "BotL", "AndL", "AndR", "OrL", "OrRl", "OrRr", "ImpL", "ImpR", "NotL", "NotR",
    "AllL", "AllR", "ExL", "ExR", "EqL", "EqR", "Cut", "Wk", "Subst", "Intro", "Case", "Ind",
    "HA", "Arith", "Term", "Assumption", "Bud",
)


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    tag: str
    data: tuple = ()

    def get(self, key, default=None):
        for k, v in self.data:
            if k == key:
                return v
        return default

    def __getitem__(self, key):
        for k, v in self.data:
            if k == key:
                return v
        raise KeyError(key)


def _freeze(v):
    if isinstance(v, dict):
        return tuple(sorted((k, _freeze(x)) for k, x in v.items()))
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v


def make_rule(tag: str, **data) -> Rule:
    if tag not in TAGS:
        raise RuleError(f"unknown rule tag {tag}")
    return Rule(tag, tuple(sorted((k, _freeze(v)) for k, v in data.items())))


def subst_map(pairs) -> dict:
    return dict(pairs or ())


def forms_map(forms) -> dict:
    """``forms`` data: tuple of (pred, params, formula)."""
    return {p: (tuple(params), body) for p, params, body in forms}


# -- helpers ------------------------------------------------------------------


def _principal(seq, pos):
    if not isinstance(pos, int) or not 0 <= pos < len(seq.ante):
        raise RuleError(f"principal position {pos} out of range")
    return unfold(seq.ante[pos])


def _replace(ante, pos, items):
    return tuple(ante[:pos]) + tuple(items) + tuple(ante[pos + 1:])


def _drop(ante, pos):
    return tuple(ante[:pos]) + tuple(ante[pos + 1:])


def _succ(seq):
    return None if seq.succ is None else unfold(seq.succ)


def _need(cond, msg):
    if not cond:
        raise RuleError(msg)


def _fresh_renaming(sigma, prod, avoid, what):
    rho = subst_map(sigma)
    names = []
    for v in prod.variables:
        t = rho.get(v)
        _need(isinstance(t, Var), f"{what}: production variable {v} needs a fresh variable")
        names.append(t.name)
    _need(len(set(names)) == len(names), f"{what}: renaming is not injective")
    clash = set(names) & avoid
    _need(not clash, f"{what}: variables {sorted(clash)} are not fresh")
    extra = set(rho) - set(prod.variables)
    _need(not extra, f"{what}: renaming mentions non-production variables {sorted(extra)}")
    return rho


def premises(seq: Sequent, rule: Rule, defs) -> Optional[list]:
    """Premises dictated by ``rule`` for conclusion ``seq``.

    Returns ``None`` for ``Subst``, whose premise is checked forwards.
    Raises :class:`RuleError` when the rule does not apply.
    """
    tag = rule.tag
    ante, succ = seq.ante, seq.succ
    if tag == "Axiom":
        pos = rule["pos"]
        _need(0 <= pos < len(ante) and succ is not None and alpha_eq(ante[pos], succ),
              "axiom formula does not match the succedent")
        return []
    if tag == "BotL":
        _need(isinstance(_principal(seq, rule["pos"]), Bot), "principal is not false")
        return []
    if tag == "EqR":
        g = _succ(seq)
        _need(isinstance(g, Eq) and alpha_eq(Eq(g.lhs, g.lhs), Eq(g.lhs, g.rhs)), "succedent is not t = t")
        return []
    if tag == "HA":
        k = rule["index"]
        _need(1 <= k <= len(HA_AXIOMS), f"no arithmetic axiom {k}")
        want = substitute(HA_AXIOMS[k - 1], subst_map(rule.get("subst")))
        _need(succ is not None and alpha_eq(want, succ), "succedent is not the axiom instance")
        return []
    if tag == "Arith":
        _need(arith_valid(seq, defs.n_stage), "arithmetic decision procedure fails")
        return []
    if tag in ("Term", "Assumption", "Bud"):
        return []
    if tag == "AndL":
        p = _principal(seq, rule["pos"])
        _need(isinstance(p, And), "principal is not a conjunction")
        return [Sequent(_replace(ante, rule["pos"], (p.left, p.right)), succ)]
    if tag == "AndR":
        g = _succ(seq)
        _need(isinstance(g, And), "succedent is not a conjunction")
        return [Sequent(ante, g.left), Sequent(ante, g.right)]
    if tag == "OrL":
        p = _principal(seq, rule["pos"])
        _need(isinstance(p, Or), "principal is not a disjunction")
        return [Sequent(_replace(ante, rule["pos"], (p.left,)), succ),
                Sequent(_replace(ante, rule["pos"], (p.right,)), succ)]
    if tag in ("OrRl", "OrRr"):
        g = _succ(seq)
        _need(isinstance(g, Or), "succedent is not a disjunction")
        return [Sequent(ante, g.left if tag == "OrRl" else g.right)]
    if tag == "ImpL":
        p = _principal(seq, rule["pos"])
        _need(isinstance(p, Imp), "principal is not an implication")
        return [Sequent(_drop(ante, rule["pos"]), p.left),
                Sequent(_replace(ante, rule["pos"], (p.right,)), succ)]
    if tag == "ImpR":
        g = _succ(seq)
        _need(isinstance(g, Imp), "succedent is not an implication")
        return [Sequent(ante + (g.left,), g.right)]
    if tag == "NotL":
        p = _principal(seq, rule["pos"])
        _need(isinstance(p, Not), "principal is not a negation")
        return [Sequent(_drop(ante, rule["pos"]), p.body)]
    if tag == "NotR":
        g = _succ(seq)
        _need(isinstance(g, Not), "succedent is not a negation")
        return [Sequent(ante + (g.body,), None)]
    if tag == "AllL":
        p = _principal(seq, rule["pos"])
        _need(isinstance(p, Forall), "principal is not universal")
        return [Sequent(_replace(ante, rule["pos"], (instantiate((p.var,), p.body, (rule["term"],)),)), succ)]
    if tag == "ExR":
        g = _succ(seq)
        _need(isinstance(g, Exists), "succedent is not existential")
        return [Sequent(ante, instantiate((g.var,), g.body, (rule["term"],)))]
    if tag == "AllR":
        g = _succ(seq)
        _need(isinstance(g, Forall), "succedent is not universal")
        y = rule["var"]
        _need(y not in sequent_vars(seq), f"eigenvariable {y} occurs free in the conclusion")
        return [Sequent(ante, instantiate((g.var,), g.body, (Var(y),)))]
    if tag == "ExL":
        p = _principal(seq, rule["pos"])
        _need(isinstance(p, Exists), "principal is not existential")
        y = rule["var"]
        _need(y not in sequent_vars(seq), f"eigenvariable {y} occurs free in the conclusion")
        return [Sequent(_replace(ante, rule["pos"], (instantiate((p.var,), p.body, (Var(y),)),)), succ)]
    if tag == "EqL":
        pos = rule["pos"]
        p = _principal(seq, pos)
        _need(isinstance(p, Eq), "principal is not an equation")
        old, new = (p.lhs, p.rhs) if rule.get("dir", "lr") == "lr" else (p.rhs, p.lhs)
        out = tuple(f if i == pos else replace_term(f, old, new) for i, f in enumerate(ante))
        return [Sequent(out, None if succ is None else replace_term(succ, old, new))]
    if tag == "Cut":
        c = rule["formula"]
        return [Sequent(ante, c), Sequent(ante + (c,), succ)]
    if tag == "Wk":
        keep = rule["keep"]
        _need(all(isinstance(k, int) and 0 <= k < len(ante) for k in keep), "weakening index out of range")
        mode = rule.get("succ", "keep")
        _need(mode in ("keep", "drop"), "weakening succedent mode must be keep or drop")
        return [Sequent(tuple(ante[k] for k in keep), succ if mode == "keep" else None)]
    if tag == "Subst":
        return None
    if tag == "Intro":
        pred = rule["pred"]
        prods = defs.productions_of(pred)
        k = rule["index"]
        _need(0 <= k < len(prods), f"{pred} has no production {k}")
        rho = subst_map(rule.get("subst"))
        args, prems = prods[k].rename(rho)
        _need(succ is not None and alpha_eq(Atom(pred, args), succ), "succedent is not the production conclusion")
        return [Sequent(ante, p) for p in prems]
    if tag == "Case":
        pos = rule["pos"]
        p = seq.ante[pos] if 0 <= pos < len(ante) else None
        _need(isinstance(p, Atom) and defs.is_inductive(p.pred), "principal is not an inductive atom")
        prods = defs.productions_of(p.pred)
        fresh = rule["fresh"]
        _need(len(fresh) == len(prods), "one renaming per production expected")
        avoid = set(sequent_vars(seq))
        out = []
        for prod, sigma in zip(prods, fresh):
            rho = _fresh_renaming(sigma, prod, avoid, "Case")
            args, prems = prod.rename(rho)
            eqs = tuple(Eq(u, t) for u, t in zip(p.args, args))
            out.append(Sequent(_replace(ante, pos, eqs + prems), succ))
        return out
    if tag == "Ind":
        pos = rule["pos"]
        p = seq.ante[pos] if 0 <= pos < len(ante) else None
        _need(isinstance(p, Atom) and defs.is_inductive(p.pred), "principal is not an inductive atom")
        block = defs.block(p.pred)
        forms = forms_map(rule["forms"])
        _need(set(forms) == set(block), f"induction formulas needed exactly for {', '.join(block)}")
        for q, (params, _) in forms.items():
            _need(len(params) == defs.pred[q].arity, f"induction formula for {q} has wrong arity")
        params, body = forms[p.pred]
        _need(succ is not None and alpha_eq(instantiate(params, body, p.args), succ),
              "succedent is not the induction formula at the principal")
        rest = _drop(ante, pos)
        avoid = set(sequent_vars(seq))
        for params, body in forms.values():
            avoid |= free_vars(body) - set(params)
        fresh = rule["fresh"]
        prods = [(q, prod) for q in block for prod in defs.productions_of(q)]
        _need(len(fresh) == len(prods), "one renaming per block production expected")
        out = []
        for (q, prod), sigma in zip(prods, fresh):
            rho = _fresh_renaming(sigma, prod, avoid, "Ind")
            args, prems = prod.rename(rho)
            items = []
            for a in prems:
                if isinstance(a, Atom) and a.pred in forms:
                    fp, fb = forms[a.pred]
                    items.append(instantiate(fp, fb, a.args))
                else:
                    items.append(a)
            fp, fb = forms[q]
            out.append(Sequent(rest + tuple(items), instantiate(fp, fb, args)))
        return out
    raise RuleError(f"unknown rule tag {tag}")


def check_subst(concl: Sequent, premise: Sequent, rule: Rule):
    theta = subst_map(rule.get("subst"))
    _need(sequent_eq(subst_sequent(premise, theta), concl), "conclusion is not the substituted premise")


def check_instance(seq: Sequent, rule: Rule, prem_seqs, defs):
    """Raise RuleError unless ``prem_seqs`` are the premises dictated by ``rule``."""
    if rule.tag == "Subst":
        _need(len(prem_seqs) == 1, "Subst has exactly one premise")
        check_subst(seq, prem_seqs[0], rule)
        return
    want = premises(seq, rule, defs)
    _need(len(want) == len(prem_seqs), f"expected {len(want)} premises, found {len(prem_seqs)}")
    for i, (w, got) in enumerate(zip(want, prem_seqs)):
        if not sequent_eq(w, got):
            raise RuleError(f"premise {i} should be {show_sequent(w)} but is {show_sequent(got)}")


# -- position maps ----------------------------------------------------------


def position_maps(seq: Sequent, rule: Rule, prem_seqs, defs) -> list:
    """For each premise, a list of (conclusion pos, premise pos, progressing)."""
    tag = rule.tag
    n = len(seq.ante)
    ident = [(i, i, False) for i in range(n)]
    if tag in LEAF_TAGS:
        return []
    if tag in ("AndR", "OrRl", "OrRr", "ImpR", "NotR", "AllR", "ExR", "EqL", "Subst", "Intro"):
        return [list(ident) for _ in prem_seqs]
    if tag == "Cut":
        return [list(ident), list(ident)]
    if tag == "Wk":
        return [[(k, i, False) for i, k in enumerate(rule["keep"])]]

    def shifted(pos, width, principal_to=()):
        out = [(i, i, False) for i in range(pos)]
        out += [(i, i + width - 1, False) for i in range(pos + 1, n)]
        out += [(pos, q, True) for q in principal_to]
        return out

    def dropped(pos):
        return [(i, i if i < pos else i - 1, False) for i in range(n) if i != pos]

    pos = rule.get("pos")
    if tag in ("AndL",):
        return [shifted(pos, 2)]
    if tag in ("OrL",):
        return [shifted(pos, 1), shifted(pos, 1)]
    if tag in ("AllL", "ExL"):
        return [shifted(pos, 1)]
    if tag == "ImpL":
        return [dropped(pos), shifted(pos, 1)]
    if tag == "NotL":
        return [dropped(pos)]
    if tag == "Ind":
        return [[(i, j, False) for i, j, _ in dropped(pos)] for _ in prem_seqs]
    if tag == "Case":
        principal = seq.ante[pos]
        out = []
        for prod, prem in zip(defs.productions_of(principal.pred), prem_seqs):
            width = len(prem.ante) - n + 1
            neq = len(principal.args)
            targets = [
                pos + neq + k for k, a in enumerate(prod.premises)
                if isinstance(a, Atom) and defs.is_inductive(a.pred)
            ]
            out.append(shifted(pos, width, targets))
        return out
    raise RuleError(f"unknown rule tag {tag}")


def inductive_positions(ante, defs) -> list:
    return [i for i, f in enumerate(ante) if isinstance(f, Atom) and defs.is_inductive(f.pred)]

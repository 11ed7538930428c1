"""Decision procedure behind ``Arith`` leaves.

Quantifier-free facts over ``=``, ``<``, ``<=`` and ``N`` are normalised to
polynomials whose monomials are treated as opaque unknowns.  Only unknowns
known to be natural numbers take part in the linear reasoning, which is
Fourier-Motzkin elimination over the integers (constraints are tightened by
their gcd).  Stage atoms of ``N`` are read through ``N'(a, b) <-> N a & N b
& a <= b``.  Sequence codes given by hypotheses ``x = seq(...)`` are
evaluated.
"""
from __future__ import annotations

from fractions import Fraction
from math import floor, gcd

from ..logic.syntax import (
    And, Atom, Bot, Eq, Exists, Fn, Not, Or, Var, numeral, numeral_value, subst_term, term_vars,
)
from ..logic.text import show_term

MAX_CONSTRAINTS = 4000


def _order_atom(f):
    """Recognise the expanded forms of ``<`` and ``<=``."""
    if isinstance(f, Atom) and f.pred in ("<", "<="):
        return f.pred, f.args[0], f.args[1]
    if isinstance(f, Exists) and isinstance(f.body, Eq):
        lhs, rhs = f.body.lhs, f.body.rhs
        if (isinstance(lhs, Fn) and lhs.name == "+" and isinstance(lhs.args[1], Fn)
                and lhs.args[1].name == "s" and lhs.args[1].args[0] == Var(f.var)
                and f.var not in term_vars(lhs.args[0]) and f.var not in term_vars(rhs)):
            return "<", lhs.args[0], rhs
    if isinstance(f, Or) and isinstance(f.left, Eq):
        inner = _order_atom(f.right)
        if inner and inner[0] == "<" and (inner[1], inner[2]) == (f.left.lhs, f.left.rhs):
            return "<=", inner[1], inner[2]
    return None


def _eval_codes(t):
    if isinstance(t, Var) or not t.args:
        return t
    args = tuple(_eval_codes(a) for a in t.args)
    if t.name == "len" and isinstance(args[0], Fn) and args[0].name == "seq":
        return numeral(len(args[0].args))
    if t.name == "proj" and isinstance(args[0], Fn) and args[0].name == "seq":
        k = numeral_value(args[1])
        if k is not None and k < len(args[0].args):
            return args[0].args[k]
    if t.name == "cat" and all(isinstance(a, Fn) and a.name == "seq" for a in args):
        return Fn("seq", args[0].args + args[1].args)
    return Fn(t.name, args)


def _padd(p, q, k=1):
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, 0) + k * c
        if out[m] == 0:
            del out[m]
    return out


def _pmul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(sorted(m1 + m2))
            out[m] = out.get(m, 0) + c1 * c2
            if out[m] == 0:
                del out[m]
    return out


class Context:
    def __init__(self, hyps, n_stage=None):
        self.n_stage = n_stage
        self.atoms = {}
        self.codes = {}
        self.absurd = False
        facts = []
        stack = list(hyps)
        while stack:
            f = stack.pop()
            if isinstance(f, And):
                stack += [f.left, f.right]
            elif isinstance(f, Bot):
                self.absurd = True
            else:
                facts.append(f)
        for f in facts:
            if isinstance(f, Eq):
                for a, b in ((f.lhs, f.rhs), (f.rhs, f.lhs)):
                    if isinstance(a, Var) and isinstance(b, Fn) and b.name == "seq":
                        self.codes.setdefault(a.name, b)
        self.eqs, self.order, self.nterms, self.diseqs, self.others = [], [], [], [], []
        for f in facts:
            o = _order_atom(f)
            if o:
                self.order.append((o[0], self.poly(o[1]), self.poly(o[2])))
            elif isinstance(f, Eq):
                self.eqs.append((self.poly(f.lhs), self.poly(f.rhs)))
            elif isinstance(f, Atom) and f.pred == "N":
                self.nterms.append(self.poly(f.args[0]))
            elif isinstance(f, Atom) and f.pred == n_stage and n_stage:
                a, b = self.poly(f.args[0]), self.poly(f.args[1])
                self.nterms += [a, b]
                self.order.append(("<=", a, b))
            elif isinstance(f, Not) and isinstance(f.body, Eq):
                self.diseqs.append((self.poly(f.body.lhs), self.poly(f.body.rhs)))
            else:
                self.others.append(f)
        self._type()
        self.constraints = self._constraints()

    # -- normal forms
    def norm(self, t):
        if self.codes:
            t = subst_term(t, self.codes)
        return _eval_codes(t)

    def poly(self, t):
        return self._poly(self.norm(t))

    def _poly(self, t):
        if isinstance(t, Fn):
            if t.name == "0":
                return {}
            if t.name == "s":
                return _padd(self._poly(t.args[0]), {(): 1})
            if t.name == "+":
                return _padd(self._poly(t.args[0]), self._poly(t.args[1]))
            if t.name == "*":
                return _pmul(self._poly(t.args[0]), self._poly(t.args[1]))
        key = show_term(t)
        self.atoms[key] = t
        return {(key,): 1}

    # -- typing
    def _type(self):
        typed = set()
        for p in self.nterms:
            if len(p) == 1:
                (m, c), = p.items()
                if len(m) == 1 and c == 1:
                    typed.add(m[0])
        changed = True
        while changed:
            changed = False
            for a, b in self.eqs:
                for x, y in ((a, b), (b, a)):
                    if len(x) == 1:
                        (m, c), = x.items()
                        if len(m) == 1 and c == 1 and m[0] not in typed and self._natural(y, typed):
                            typed.add(m[0])
                            changed = True
        self.typed = typed

    @staticmethod
    def _natural(p, typed):
        return all(c > 0 and all(a in typed for a in m) for m, c in p.items())

    def typed_poly(self, p):
        return all(all(a in self.typed for a in m) for m in p if m)

    def _constraints(self):
        out = []
        for a, b in self.eqs:
            d = _padd(a, b, -1)
            if self.typed_poly(d):
                out += [_row(d, 0), _row(_neg(d), 0)]
        for op, a, b in self.order:
            d = _padd(a, b, -1)
            if self.typed_poly(d):
                out.append(_row(d, -1 if op == "<" else 0))
        return out

    def monomials(self, rows):
        ms = set()
        for coef, _ in rows:
            ms |= set(coef)
        return ms

    def infeasible(self, extra=()):
        rows = self.constraints + list(extra)
        for m in self.monomials(rows):
            rows.append(({m: -1}, 0))
        return _fm_infeasible(rows)

    # -- goals
    def proves_eq(self, a, b):
        if a == b:
            return True
        for x, y in self.eqs:
            if (x, y) in ((a, b), (b, a)):
                return True
        d = _padd(a, b, -1)
        if not self.typed_poly(d):
            return False
        return self.infeasible([_row(d, -1)]) and self.infeasible([_row(_neg(d), -1)])

    def proves_order(self, op, a, b):
        if op == "<=" and a == b:
            return True
        d = _padd(b, a, -1)  # negation: b - a <= -1 (for <=) or b - a <= 0 (for <)
        if not self.typed_poly(d):
            return False
        return self.infeasible([_row(d, 0 if op == "<" else -1)])

    def proves_nat(self, p):
        if p in self.nterms:
            return True
        return all(c > 0 and all(x in self.typed for x in m) for m, c in p.items())

    def contradictory(self):
        if self.absurd:
            return True
        for a, b in self.diseqs:
            if self.proves_eq(a, b):
                return True
        return self.infeasible()

    def proves(self, goal) -> bool:
        goals = []
        stack = [goal]
        while stack:
            g = stack.pop()
            if isinstance(g, And):
                stack += [g.left, g.right]
            else:
                goals.append(g)
        return all(self._goal(g) for g in goals)

    def _goal(self, g):
        if g is None or isinstance(g, Bot):
            return self.contradictory()
        o = _order_atom(g)
        if o:
            return self.proves_order(o[0], self.poly(o[1]), self.poly(o[2])) or self.contradictory()
        if isinstance(g, Eq):
            return self.proves_eq(self.poly(g.lhs), self.poly(g.rhs)) or self.contradictory()
        if isinstance(g, Atom) and g.pred == "N":
            return self.proves_nat(self.poly(g.args[0])) or self.contradictory()
        if isinstance(g, Atom) and self.n_stage and g.pred == self.n_stage:
            a, b = self.poly(g.args[0]), self.poly(g.args[1])
            ok = self.proves_nat(a) and self.proves_nat(b) and self.proves_order("<=", a, b)
            return ok or self.contradictory()
        if isinstance(g, Not) and isinstance(g.body, Eq):
            a, b = self.poly(g.body.lhs), self.poly(g.body.rhs)
            d = _padd(a, b, -1)
            if self.typed_poly(d) and self.infeasible([_row(d, 0), _row(_neg(d), 0)]):
                return True
            return self.contradictory()
        return self.contradictory()


def _neg(p):
    return {m: -c for m, c in p.items()}


def _row(diff, bound):
    """``diff <= bound`` with the constant part moved to the right."""
    coef = {m: c for m, c in diff.items() if m}
    const = diff.get((), 0)
    return _tighten(coef, Fraction(bound - const))


def _tighten(coef, const):
    if not coef:
        return coef, const
    den = 1
    for c in list(coef.values()) + [const]:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    coef = {m: int(Fraction(c) * den) for m, c in coef.items()}
    g = 0
    for c in coef.values():
        g = gcd(g, abs(c))
    const = Fraction(const) * den
    if g > 1:
        coef = {m: c // g for m, c in coef.items()}
        const = Fraction(floor(const / g))
    else:
        const = Fraction(floor(const))
    return coef, const


def _fm_infeasible(rows) -> bool:
    rows = list({(tuple(sorted(c.items())), k) for c, k in rows})
    rows = [(dict(c), k) for c, k in rows]
    while True:
        live = []
        for c, k in rows:
            if not c:
                if k < 0:
                    return True
            else:
                live.append((c, k))
        if not live:
            return False
        counts = {}
        for c, _ in live:
            for m, v in c.items():
                pos, neg = counts.get(m, (0, 0))
                counts[m] = (pos + (v > 0), neg + (v < 0))
        var = min(sorted(counts), key=lambda m: counts[m][0] * counts[m][1] - sum(counts[m]))
        pos = [(c, k) for c, k in live if c.get(var, 0) > 0]
        neg = [(c, k) for c, k in live if c.get(var, 0) < 0]
        keep = [(c, k) for c, k in live if c.get(var, 0) == 0]
        if len(pos) * len(neg) + len(keep) > MAX_CONSTRAINTS:
            return False
        for cp, kp in pos:
            for cn, kn in neg:
                a, b = cp[var], -cn[var]
                coef = {}
                for m in set(cp) | set(cn):
                    v = cp.get(m, 0) * b + cn.get(m, 0) * a
                    if v:
                        coef[m] = v
                keep.append(_tighten(coef, kp * b + kn * a))
        seen = set()
        rows = []
        for c, k in keep:
            key = (tuple(sorted(c.items())), k)
            if key not in seen:
                seen.add(key)
                rows.append((c, k))


def arith_valid(sequent, n_stage=None) -> bool:
    ctx = Context(sequent.ante, n_stage)
    return ctx.proves(sequent.succ)

"""Terms, formulas and sequents.

All values are frozen dataclasses.  Comparison up to renaming of bound
variables goes through :func:`alpha_key`, which also sees through the
order notations ``a < b`` and ``a <= b``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

# Arithmetic and sequence-coding symbols with fixed arity.  ``seq`` is the
# variadic sequence code constructor.
BUILTIN_ARITY = {"0": 0, "s": 1, "+": 2, "*": 2, "len": 1, "proj": 2, "cat": 2}
ORDER_PREDICATES = ("<", "<=")


class ArityError(ValueError):
    pass


def _memo_hash(cls):
    """Cache the field hash on the instance; formulas are deep and hashed often."""
    names = tuple(f.name for f in fields(cls))

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((cls.__name__,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_hash", h)
        return h

    cls.__hash__ = __hash__
    return cls


@_memo_hash
@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return self.name


@_memo_hash
@dataclass(frozen=True)
class Fn:
    name: str
    args: tuple = ()

    def __post_init__(self):
        want = BUILTIN_ARITY.get(self.name)
        if want is not None and want != len(self.args):
            raise ArityError(f"{self.name} expects {want} arguments, got {len(self.args)}")


Term = Union[Var, Fn]

ZERO = Fn("0")


def succ(t: Term) -> Fn:
    return Fn("s", (t,))


def plus(a: Term, b: Term) -> Fn:
    return Fn("+", (a, b))


def times(a: Term, b: Term) -> Fn:
    return Fn("*", (a, b))


def numeral(n: int) -> Term:
    t: Term = ZERO
    for _ in range(n):
        t = succ(t)
    return t


def numeral_value(t: Term) -> Optional[int]:
    n = 0
    while isinstance(t, Fn) and t.name == "s":
        t = t.args[0]
        n += 1
    if isinstance(t, Fn) and t.name == "0":
        return n
    return None


def seq_code(items: Iterable[Term]) -> Fn:
    return Fn("seq", tuple(items))


def seq_len(t: Term) -> Fn:
    return Fn("len", (t,))


def seq_proj(t: Term, i: Term) -> Fn:
    return Fn("proj", (t, i))


# -- formulas -----------------------------------------------------------


@_memo_hash
@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()


@_memo_hash
@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@_memo_hash
@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@_memo_hash
@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@_memo_hash
@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@_memo_hash
@dataclass(frozen=True)
class Not:
    body: "Formula"


@_memo_hash
@dataclass(frozen=True)
class Bot:
    pass


@_memo_hash
@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@_memo_hash
@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Eq, And, Or, Imp, Not, Bot, Forall, Exists]
BINARY = (And, Or, Imp)
QUANTIFIERS = (Forall, Exists)
BOT = Bot()


def lt(a: Term, b: Term) -> Atom:
    return Atom("<", (a, b))


def le(a: Term, b: Term) -> Atom:
    return Atom("<=", (a, b))


def conj(fs) -> Formula:
    """Right-nested conjunction; the empty conjunction is ``0 = 0``."""
    fs = list(fs)
    if not fs:
        return Eq(ZERO, ZERO)
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return BOT
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def implies_chain(hyps, goal: Formula) -> Formula:
    out = goal
    for h in reversed(list(hyps)):
        out = Imp(h, out)
    return out


@_memo_hash
@dataclass(frozen=True)
class Sequent:
    ante: tuple = ()
    succ: Optional[Formula] = None

    def with_ante(self, ante) -> "Sequent":
        return Sequent(tuple(ante), self.succ)


# -- free variables -----------------------------------------------------


@lru_cache(maxsize=None)
def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    out = frozenset()
    for a in t.args:
        out |= term_vars(a)
    return out


@lru_cache(maxsize=None)
def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        out = frozenset()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Eq):
        return term_vars(f.lhs) | term_vars(f.rhs)
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, Bot):
        return frozenset()
    return free_vars(f.body) - {f.var}


def sequent_vars(s: Sequent) -> frozenset:
    out = frozenset()
    for f in s.ante:
        out |= free_vars(f)
    if s.succ is not None:
        out |= free_vars(s.succ)
    return out


def all_names(f: Formula) -> set:
    """Every variable name occurring in ``f``, free or bound."""
    names = set(free_vars(f))
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, QUANTIFIERS):
            names.add(g.var)
            stack.append(g.body)
        elif isinstance(g, BINARY):
            stack += [g.left, g.right]
        elif isinstance(g, Not):
            stack.append(g.body)
    return names


def primed(name: str, avoid) -> str:
    while name in avoid:
        name += "'"
    return name


# -- substitution -------------------------------------------------------


def subst_term(t: Term, sigma: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return Fn(t.name, tuple(subst_term(a, sigma) for a in t.args))


def substitute(f: Formula, sigma: Mapping[str, Term]) -> Formula:
    """Capture-avoiding simultaneous substitution."""
    sigma = {k: v for k, v in sigma.items() if not (isinstance(v, Var) and v.name == k)}
    if not sigma:
        return f
    return _subst(f, sigma)


def _subst(f, sigma):
    fv = free_vars(f)
    sigma = {k: v for k, v in sigma.items() if k in fv}
    if not sigma:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, sigma) for a in f.args))
    if isinstance(f, Eq):
        return Eq(subst_term(f.lhs, sigma), subst_term(f.rhs, sigma))
    if isinstance(f, BINARY):
        return type(f)(_subst(f.left, sigma), _subst(f.right, sigma))
    if isinstance(f, Not):
        return Not(_subst(f.body, sigma))
    # quantifier
    inner = dict(sigma)
    inner.pop(f.var, None)
    range_vars = set()
    for t in inner.values():
        range_vars |= term_vars(t)
    var, body = f.var, f.body
    if var in range_vars:
        fresh = primed(var, range_vars | free_vars(body) | set(inner))
        body = _subst(body, {var: Var(fresh)})
        var = fresh
    return type(f)(var, _subst(body, inner))


def instantiate(params, body: Formula, args) -> Formula:
    return substitute(body, dict(zip(params, args)))


def subst_sequent(s: Sequent, sigma) -> Sequent:
    return Sequent(
        tuple(substitute(f, sigma) for f in s.ante),
        None if s.succ is None else substitute(s.succ, sigma),
    )


def replace_term(f: Formula, old: Term, new: Term) -> Formula:
    """Replace free occurrences of the term ``old`` by ``new``."""
    old_vars = term_vars(old)
    new_vars = term_vars(new)

    def rt(t):
        if t == old:
            return new
        if isinstance(t, Fn) and t.args:
            return Fn(t.name, tuple(rt(a) for a in t.args))
        return t

    def go(g):
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(rt(a) for a in g.args))
        if isinstance(g, Eq):
            return Eq(rt(g.lhs), rt(g.rhs))
        if isinstance(g, BINARY):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, Bot):
            return g
        if g.var in old_vars:
            return g
        var, body = g.var, g.body
        if var in new_vars:
            fresh = primed(var, new_vars | old_vars | all_names(body))
            body = substitute(body, {var: Var(fresh)})
            var = fresh
        return type(g)(var, go(body))

    return go(f)


# -- order notation -----------------------------------------------------


def unfold(f: Formula) -> Formula:
    """Expand a top-level order atom into its defining formula."""
    if isinstance(f, Atom) and f.pred in ORDER_PREDICATES:
        a, b = f.args
        z = primed("z", term_vars(a) | term_vars(b))
        strict = Exists(z, Eq(plus(a, succ(Var(z))), b))
        if f.pred == "<":
            return strict
        return Or(Eq(a, b), strict)
    return f


# -- alpha keys ---------------------------------------------------------


def _tkey(t, env):
    if isinstance(t, Var):
        i = env.get(t.name)
        return ("v", t.name) if i is None else ("b", i)
    if not t.args:
        return t.name
    return (t.name,) + tuple(_tkey(a, env) for a in t.args)


def _fkey(f, env, depth):
    if isinstance(f, Atom):
        if f.pred in ORDER_PREDICATES:
            a, b = (_tkey(x, env) for x in f.args)
            strict = ("ex", ("=", ("+", a, ("s", ("b", depth))), b))
            return strict if f.pred == "<" else ("or", ("=", a, b), strict)
        return ("atom", f.pred) + tuple(_tkey(a, env) for a in f.args)
    if isinstance(f, Eq):
        return ("=", _tkey(f.lhs, env), _tkey(f.rhs, env))
    if isinstance(f, And):
        return ("and", _fkey(f.left, env, depth), _fkey(f.right, env, depth))
    if isinstance(f, Or):
        return ("or", _fkey(f.left, env, depth), _fkey(f.right, env, depth))
    if isinstance(f, Imp):
        return ("imp", _fkey(f.left, env, depth), _fkey(f.right, env, depth))
    if isinstance(f, Not):
        return ("not", _fkey(f.body, env, depth))
    if isinstance(f, Bot):
        return ("bot",)
    inner = dict(env)
    inner[f.var] = depth
    tag = "all" if isinstance(f, Forall) else "ex"
    return (tag, _fkey(f.body, inner, depth + 1))


@lru_cache(maxsize=200_000)
def alpha_key(f: Formula):
    return _fkey(f, {}, 0)


def alpha_eq(f: Formula, g: Formula) -> bool:
    return f is g or f == g or alpha_key(f) == alpha_key(g)


def sequent_key(s: Sequent):
    return (
        tuple(alpha_key(f) for f in s.ante),
        None if s.succ is None else alpha_key(s.succ),
    )


def sequent_eq(a: Sequent, b: Sequent) -> bool:
    return a == b or sequent_key(a) == sequent_key(b)


# -- fresh names --------------------------------------------------------

_RESERVED = re.compile(r"^\$[A-Za-z_]*(\d+)$")


class FreshSupply:
    """Monotone supply of reserved variable names ``$<hint><k>``."""

    def __init__(self, start: int = 0):
        self.counter = start

    def __call__(self, hint: str = "v") -> str:
        self.counter += 1
        return f"${hint}{self.counter}"

    def var(self, hint: str = "v") -> Var:
        return Var(self(hint))

    def avoid(self, names) -> "FreshSupply":
        for n in names:
            m = _RESERVED.match(n)
            if m:
                self.counter = max(self.counter, int(m.group(1)))
        return self


def is_reserved(name: str) -> bool:
    return name.startswith("$")

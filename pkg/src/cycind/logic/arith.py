"""Heyting-arithmetic axioms, order notation and sequence coding."""
from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    And, Atom, Eq, Imp, Not, Sequent, Var, ZERO, plus, succ, times, unfold,
)

_x, _y = Var("x"), Var("y")


def _n(t):
    return Atom("N", (t,))


HA_AXIOMS = (
    Imp(_n(_x), Not(Eq(succ(_x), ZERO))),
    Imp(And(_n(_x), _n(_y)), Imp(Eq(succ(_x), succ(_y)), Eq(_x, _y))),
    Imp(_n(_x), Eq(plus(_x, ZERO), _x)),
    Imp(And(_n(_x), _n(_y)), Eq(plus(_x, succ(_y)), succ(plus(_x, _y)))),
    Imp(_n(_x), Eq(times(_x, ZERO), ZERO)),
    Imp(And(_n(_x), _n(_y)), Eq(times(_x, succ(_y)), plus(times(_x, _y), _x))),
)


def ha_axioms() -> list:
    """The arithmetic axiom schemata as sequents over variables x, y."""
    return [Sequent((), a) for a in HA_AXIOMS]


def expand_order(f):
    """``a < b`` to ``exists z. a + s(z) = b``; ``a <= b`` to ``a = b | a < b``."""
    return unfold(f)


@dataclass(frozen=True)
class SeqCode:
    items: tuple = ()

    def __len__(self):
        return len(self.items)


def encode(values) -> SeqCode:
    return SeqCode(tuple(values))


def length(code: SeqCode) -> int:
    return len(code.items)


def proj(code: SeqCode, i: int):
    if not 0 <= i < len(code.items):
        raise IndexError(f"projection {i} out of range for a code of length {len(code.items)}")
    return code.items[i]


def concat(a: SeqCode, b: SeqCode) -> SeqCode:
    return SeqCode(a.items + b.items)

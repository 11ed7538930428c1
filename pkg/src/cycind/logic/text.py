"""Concrete syntax for terms, formulas and sequents.

Binary connectives are always parenthesised when printed, quantifier
operands of a binary connective too, so printing is unambiguous.  Closed
numerals print as decimal digits.
"""
from __future__ import annotations

import re

from .syntax import (
    BINARY, BOT, ORDER_PREDICATES, And, Atom, Bot, Eq, Exists, Fn, Forall, Imp, Not,
    Or, Sequent, Var, numeral, numeral_value,
)


class ParseError(SyntaxError):
    """Syntax error; ``offset`` is the 1-based column, like SyntaxError."""

    def __init__(self, msg, text, index):
        super().__init__(f"{msg} at offset {index + 1}")
        self.msg = msg
        self.text = text
        self.offset = index + 1


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_$][A-Za-z0-9_'$]*)|"
    r"(?P<sym>\|-|->|<=|=>|<-|:=|!=|[()\[\]{},.&|=<+*:;~/]))"
)


def tokenize(text: str):
    toks = []
    i = 0
    n = len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        if text[i] == "#":
            break
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", text, i)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        i = m.end()
    toks.append(("eof", "", n))
    return toks


RELOPS = ("=", "<", "<=", "!=")


class Parser:
    def __init__(self, text: str, functions=None):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        # names of declared 0-ary function symbols (constants)
        self.constants = set(functions or ())

    # -- token helpers
    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value):
        return self.peek()[1] == value and self.peek()[0] != "eof"

    def next(self):
        tok = self.toks[self.i]
        self.i = min(self.i + 1, len(self.toks) - 1)
        return tok

    def fail(self, msg):
        raise ParseError(msg, self.text, self.peek()[2])

    def expect(self, value):
        if not self.at(value):
            found = self.peek()[1] or "end of input"
            self.fail(f"expected {value!r}, found {found!r}")
        return self.next()

    def ident(self):
        kind, val, _ = self.peek()
        if kind != "id":
            self.fail(f"expected identifier, found {val or 'end of input'!r}")
        self.next()
        return val

    def integer(self):
        kind, val, _ = self.peek()
        if kind != "num":
            self.fail(f"expected number, found {val or 'end of input'!r}")
        self.next()
        return int(val)

    def done(self):
        if self.peek()[0] != "eof":
            self.fail(f"unexpected {self.peek()[1]!r}")

    # -- terms
    def term(self):
        t = self.product()
        while self.at("+"):
            self.next()
            t = Fn("+", (t, self.product()))
        return t

    def product(self):
        t = self.base()
        while self.at("*"):
            self.next()
            t = Fn("*", (t, self.base()))
        return t

    def base(self):
        kind, val, _ = self.peek()
        if kind == "num":
            self.next()
            return numeral(int(val))
        if val == "(" and kind == "sym":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        if kind == "id":
            self.next()
            if self.at("("):
                self.next()
                args = []
                if not self.at(")"):
                    args.append(self.term())
                    while self.at(","):
                        self.next()
                        args.append(self.term())
                self.expect(")")
                return Fn(val, tuple(args))
            if val in self.constants:
                return Fn(val)
            return Var(val)
        self.fail(f"expected term, found {val or 'end of input'!r}")

    # -- formulas
    def formula(self):
        left = self.disjunction()
        if self.at("->"):
            self.next()
            return Imp(left, self.formula())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.at("|"):
            self.next()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.at("&"):
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "id" and val in ("forall", "exists"):
            self.next()
            var = self.ident()
            self.expect(".")
            body = self.formula()
            return Forall(var, body) if val == "forall" else Exists(var, body)
        if (kind == "id" and val == "not") or val == "~":
            self.next()
            return Not(self.unary())
        return self.atomic()

    def atomic(self):
        kind, val, _ = self.peek()
        if kind == "id" and val == "false":
            self.next()
            return BOT
        save = self.i
        try:
            lhs = self.term()
            if self.peek()[1] in RELOPS and self.peek()[0] == "sym":
                op = self.next()[1]
                rhs = self.term()
                if op == "=":
                    return Eq(lhs, rhs)
                if op == "!=":
                    return Not(Eq(lhs, rhs))
                return Atom(op, (lhs, rhs))
        except ParseError:
            pass
        self.i = save
        if self.at("("):
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "id":
            self.next()
            args = []
            if self.at("("):
                self.next()
                if not self.at(")"):
                    args.append(self.term())
                    while self.at(","):
                        self.next()
                        args.append(self.term())
                self.expect(")")
            return Atom(val, tuple(args))
        self.fail(f"expected formula, found {val or 'end of input'!r}")

    def sequent(self, stop=()):
        ante = []
        if not self.at("|-"):
            ante.append(self.formula())
            while self.at(","):
                self.next()
                ante.append(self.formula())
        self.expect("|-")
        succ = None
        if self.peek()[0] != "eof" and self.peek()[1] not in stop:
            succ = self.formula()
        return Sequent(tuple(ante), succ)


def parse_term(text: str, functions=None):
    p = Parser(text, functions)
    t = p.term()
    p.done()
    return t


def parse_formula(text: str, functions=None):
    p = Parser(text, functions)
    f = p.formula()
    p.done()
    return f


def parse_sequent(text: str, functions=None):
    p = Parser(text, functions)
    s = p.sequent()
    p.done()
    return s


def parse(text: str, functions=None):
    """Parse a sequent if the text contains a turnstile, else a formula."""
    if "|-" in text:
        return parse_sequent(text, functions)
    return parse_formula(text, functions)


# -- printing -------------------------------------------------------------


def show_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    n = numeral_value(t)
    if n is not None:
        return str(n)
    if t.name in ("+", "*"):
        return f"({show_term(t.args[0])} {t.name} {show_term(t.args[1])})"
    if not t.args:
        return t.name
    return f"{t.name}({', '.join(show_term(a) for a in t.args)})"


_SYMBOL = {And: "&", Or: "|", Imp: "->"}


def _operand(f) -> str:
    s = show(f)
    if isinstance(f, (Forall, Exists)):
        return f"({s})"
    return s


def show(f) -> str:
    if isinstance(f, Sequent):
        return show_sequent(f)
    if isinstance(f, (Var, Fn)):
        return show_term(f)
    if isinstance(f, Atom):
        if f.pred in ORDER_PREDICATES:
            return f"{show_term(f.args[0])} {f.pred} {show_term(f.args[1])}"
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(show_term(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{show_term(f.lhs)} = {show_term(f.rhs)}"
    if isinstance(f, BINARY):
        return f"({_operand(f.left)} {_SYMBOL[type(f)]} {_operand(f.right)})"
    if isinstance(f, Not):
        return f"not {_operand(f.body)}"
    if isinstance(f, Bot):
        return "false"
    q = "forall" if isinstance(f, Forall) else "exists"
    return f"{q} {f.var}. {show(f.body)}"


def show_sequent(s: Sequent) -> str:
    left = ", ".join(show(f) for f in s.ante)
    right = "" if s.succ is None else show(s.succ)
    return f"{left} |- {right}".strip() if left or right else "|-"


def canonical(text: str, functions=None) -> str:
    return show(parse(text, functions))

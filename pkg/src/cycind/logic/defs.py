"""Signatures and inductive definition sets."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .syntax import (
    BUILTIN_ARITY, ORDER_PREDICATES, ArityError, Atom, Formula, Var, ZERO, free_vars,
    lt, primed, subst_term, substitute, succ, term_vars,
)
from .text import ParseError, Parser, show

ORDINARY, INDUCTIVE, STAGE = "ordinary", "inductive", "stage"
ARITHMETIC_FUNCTIONS = ("0", "s", "+", "*", "seq", "len", "proj", "cat")


@dataclass(frozen=True)
class PredicateSymbol:
    name: str
    arity: int
    kind: str = ORDINARY
    base: Optional[str] = None

    def __post_init__(self):
        if self.kind not in (ORDINARY, INDUCTIVE, STAGE):
            raise ValueError(f"unknown predicate kind {self.kind}")
        if (self.kind == STAGE) != (self.base is not None):
            raise ValueError("a stage symbol needs exactly one base predicate")

    @property
    def is_inductive(self):
        return self.kind != ORDINARY


@dataclass(frozen=True)
class Production:
    """``pred(args) <= premises``; premises are atoms or order atoms."""

    pred: str
    args: tuple
    premises: tuple = ()

    @property
    def conclusion(self) -> Atom:
        return Atom(self.pred, self.args)

    @cached_property
    def variables(self) -> tuple:
        names = set()
        for t in self.args:
            names |= term_vars(t)
        for p in self.premises:
            names |= free_vars(p)
        return tuple(sorted(names))

    def rename(self, sigma) -> tuple:
        """Instantiated (conclusion args, premises) under ``sigma``."""
        args = tuple(subst_term(t, sigma) for t in self.args)
        prems = tuple(substitute(p, sigma) for p in self.premises)
        return args, prems


N_PRODUCTIONS = (
    Production("N", (ZERO,), ()),
    Production("N", (succ(Var("x")),), (Atom("N", (Var("x"),)),)),
)


def stage_production(prod: Production, stage_of) -> Production:
    """Stage-number image of a production.

    Each inductive premise ``P_i t`` becomes ``v_i < v, P_i'(t, v_i)``; a
    trailing ``N v`` is added and the conclusion gets the stage ``v``.
    """
    taken = set(prod.variables)
    v = primed("v", taken)
    taken.add(v)
    prems = []
    k = 0
    for p in prod.premises:
        name = stage_of(p.pred) if isinstance(p, Atom) else None
        if name is None:
            prems.append(p)
            continue
        k += 1
        vk = primed(f"v{k}", taken)
        taken.add(vk)
        prems.append(lt(Var(vk), Var(v)))
        prems.append(Atom(name, p.args + (Var(vk),)))
    prems.append(Atom("N", (Var(v),)))
    return Production(stage_of(prod.pred), prod.args + (Var(v),), tuple(prems))


@dataclass(frozen=True)
class DefinitionSet:
    functions: tuple = ()  # (name, arity) pairs, user declared
    predicates: tuple = ()  # PredicateSymbol values in declaration order
    productions: tuple = ()  # Production values for non-stage inductive predicates
    arithmetic: bool = False

    @cached_property
    def function_arity(self) -> dict:
        out = dict(self.functions)
        if self.arithmetic:
            out.update(BUILTIN_ARITY)
        return out

    @cached_property
    def pred(self) -> dict:
        out = {}
        if self.arithmetic:
            out["N"] = PredicateSymbol("N", 1, INDUCTIVE)
        for p in self.predicates:
            out[p.name] = p
        return out

    @cached_property
    def stage_map(self) -> dict:
        """Base inductive predicate -> its declared stage predicate."""
        return {p.base: p.name for p in self.pred.values() if p.kind == STAGE}

    @cached_property
    def rules(self) -> dict:
        out = {name: [] for name, p in self.pred.items() if p.is_inductive}
        if self.arithmetic:
            out["N"] = list(N_PRODUCTIONS)
        for prod in self.productions:
            out[prod.pred].append(prod)
        # stage predicates: images of their base productions, resolved in
        # declaration order so stages of stages see their base's rules
        pending = [p for p in self.pred.values() if p.kind == STAGE]
        while pending:
            progress = False
            for p in list(pending):
                if out.get(p.base) is not None and all(
                    self._stage_name(a.pred) is not None
                    for r in out[p.base] for a in r.premises
                    if isinstance(a, Atom) and self.is_inductive(a.pred)
                ):
                    out[p.name] = [stage_production(r, self._stage_name) for r in out[p.base]]
                    pending.remove(p)
                    progress = True
            if not progress:
                missing = ", ".join(p.name for p in pending)
                raise ValueError(f"stage predicates {missing} lack stage symbols for their premises")
        return {k: tuple(v) for k, v in out.items()}

    def _stage_name(self, name):
        return self.stage_map.get(name)

    def is_inductive(self, name: str) -> bool:
        p = self.pred.get(name)
        return p is not None and p.is_inductive

    def productions_of(self, name: str) -> tuple:
        return self.rules[name]

    @cached_property
    def blocks(self) -> dict:
        """Mutual-dependency block of each inductive predicate."""
        names = [n for n in self.pred if self.is_inductive(n)]
        reach = {n: {n} for n in names}
        for n in names:
            for r in self.rules[n]:
                for a in r.premises:
                    if isinstance(a, Atom) and self.is_inductive(a.pred):
                        reach[n].add(a.pred)
        changed = True
        while changed:
            changed = False
            for n in names:
                new = set(reach[n])
                for m in reach[n]:
                    new |= reach[m]
                if new != reach[n]:
                    reach[n] = new
                    changed = True
        order = {n: i for i, n in enumerate(names)}
        return {
            n: tuple(sorted((m for m in names if m in reach[n] and n in reach[m]), key=order.get))
            for n in names
        }

    def block(self, name: str) -> tuple:
        return self.blocks[name]

    @cached_property
    def n_stage(self) -> Optional[str]:
        return self.stage_map.get("N") if self.arithmetic else None

    # -- validation
    def check_term(self, t):
        if isinstance(t, Var):
            return
        if t.name != "seq":
            want = self.function_arity.get(t.name)
            if want is None:
                raise ArityError(f"undeclared function symbol {t.name}")
            if want != len(t.args):
                raise ArityError(f"{t.name} expects {want} arguments, got {len(t.args)}")
        elif not self.arithmetic:
            raise ArityError("sequence codes need the arithmetic signature")
        for a in t.args:
            self.check_term(a)

    @cached_property
    def _checked(self) -> dict:
        return {}  # id -> formula; holding the formula keeps the id valid

    def check_formula(self, f: Formula):
        if self._checked.get(id(f)) is f:
            return
        self._check_formula(f)
        self._checked[id(f)] = f

    def _check_formula(self, f: Formula):
        stack = [f]
        while stack:
            g = stack.pop()
            if isinstance(g, Atom):
                if g.pred in ORDER_PREDICATES:
                    want = 2
                else:
                    p = self.pred.get(g.pred)
                    if p is None:
                        raise ArityError(f"undeclared predicate {g.pred}")
                    want = p.arity
                if len(g.args) != want:
                    raise ArityError(f"{g.pred} expects {want} arguments, got {len(g.args)}")
                for a in g.args:
                    self.check_term(a)
            elif hasattr(g, "lhs"):
                self.check_term(g.lhs)
                self.check_term(g.rhs)
            elif hasattr(g, "left"):
                stack += [g.left, g.right]
            elif hasattr(g, "body"):
                stack.append(g.body)

    def atom(self, pred: str, *args) -> Atom:
        a = Atom(pred, tuple(args))
        self.check_formula(a)
        return a

    def validate(self):
        for name, prods in self.rules.items():
            if not prods:
                raise ValueError(f"inductive predicate {name} has no productions")
            for r in prods:
                self.check_formula(r.conclusion)
                for a in r.premises:
                    self.check_formula(a)
        for p in self.pred.values():
            if p.kind == STAGE:
                base = self.pred.get(p.base)
                if base is None or not base.is_inductive:
                    raise ValueError(f"stage predicate {p.name} has no inductive base")
                if p.arity != base.arity + 1:
                    raise ArityError(f"stage predicate {p.name} must have arity {base.arity + 1}")
        return self

    # -- extension
    def extend(self, predicates=(), functions=()) -> "DefinitionSet":
        have = set(self.pred)
        preds = self.predicates + tuple(p for p in predicates if p.name not in have)
        return DefinitionSet(self.functions + tuple(functions), preds, self.productions, self.arithmetic)

    def restrict(self, drop) -> "DefinitionSet":
        preds = tuple(p for p in self.predicates if p.name not in drop)
        return DefinitionSet(self.functions, preds, self.productions, self.arithmetic)


# -- text format ------------------------------------------------------------


def parse_defs(text: str) -> DefinitionSet:
    functions, predicates, productions = [], [], []
    arithmetic = False
    lines = text.splitlines()
    in_sig = False
    constants = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line == "signature":
                in_sig = True
                continue
            if line == "end":
                in_sig = False
                continue
            p = Parser(line, constants)
            word = p.ident()
            if in_sig:
                if word == "arithmetic":
                    arithmetic = True
                elif word == "function":
                    name = p.ident()
                    p.expect("/")
                    ar = p.integer()
                    functions.append((name, ar))
                    if ar == 0:
                        constants.add(name)
                elif word == "predicate":
                    name = p.ident()
                    p.expect("/")
                    ar = p.integer()
                    kind = p.ident()
                    base = p.ident() if kind == STAGE else None
                    predicates.append(PredicateSymbol(name, ar, kind, base))
                else:
                    p.fail(f"unknown declaration {word!r}")
                p.done()
            elif word == "production":
                pred = p.ident()
                p.expect("<-")
                prems = []
                if not p.at("=>"):
                    prems.append(p.formula())
                    while p.at(","):
                        p.next()
                        prems.append(p.formula())
                p.expect("=>")
                concl = p.formula()
                p.done()
                if not isinstance(concl, Atom) or concl.pred != pred:
                    raise ParseError(f"conclusion must be an atom of {pred}", line, 0)
                productions.append(Production(pred, concl.args, tuple(prems)))
            else:
                p.fail(f"unknown directive {word!r}")
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e.msg}", text, e.offset - 1) from None
    return DefinitionSet(tuple(functions), tuple(predicates), tuple(productions), arithmetic).validate()


def show_defs(defs: DefinitionSet) -> str:
    out = ["signature"]
    if defs.arithmetic:
        out.append("  arithmetic")
    for name, ar in defs.functions:
        out.append(f"  function {name}/{ar}")
    for p in defs.predicates:
        tail = f" {p.base}" if p.kind == STAGE else ""
        out.append(f"  predicate {p.name}/{p.arity} {p.kind}{tail}")
    out.append("end")
    for r in defs.productions:
        prems = ", ".join(show(a) for a in r.premises)
        out.append(f"production {r.pred} <- {prems} => {show(r.conclusion)}".replace("<-  =>", "<- =>"))
    return "\n".join(out) + "\n"


def load_defs(path) -> DefinitionSet:
    with open(path) as fh:
        return parse_defs(fh.read())

"""Finite models of well-founded relations and the Kleene-Brouwer constructions.

On a finite universe a relation has the induction principle exactly when its
digraph has no cycle, so every construction below is a plain set computation
and every lemma about them becomes a checkable property.

Relations are sets of pairs ``(x, y)`` read as ``x > y``.  Sequences are
tuples.  A colored system is a universe with relations ``R_1 .. R_k``.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass


class LabError(ValueError):
    """A precondition of a construction does not hold."""


class LemmaViolation(AssertionError):
    def __init__(self, lemma, detail):
        self.lemma = lemma
        self.detail = detail
        super().__init__(f"{lemma}: {detail}")


@dataclass(frozen=True)
class System:
    universe: tuple
    colors: tuple  # frozensets of pairs, one per color

    def __post_init__(self):
        if not self.colors:
            raise LabError("a system needs at least one color")
        u = set(self.universe)
        for i, r in enumerate(self.colors):
            for a, b in r:
                if a not in u or b not in u:
                    raise LabError(f"pair ({a}, {b}) of color {i + 1} leaves the universe")

    @classmethod
    def make(cls, universe, colors):
        return cls(tuple(sorted(set(universe))), tuple(frozenset(map(tuple, r)) for r in colors))

    @property
    def k(self):
        return len(self.colors)

    @functools.cached_property
    def union(self) -> frozenset:
        return frozenset().union(*self.colors)

    def color_of(self, a, b):
        """1-based colors of the edge ``a > b`` (several before disjointification)."""
        return tuple(i + 1 for i, r in enumerate(self.colors) if (a, b) in r)

    @functools.cached_property
    def _color(self) -> dict:
        out = {}
        for i, r in enumerate(self.colors):
            for p in r:
                out.setdefault(p, i + 1)
        return out

    def color(self, a, b):
        """The least color of ``a > b``, or ``None``."""
        return self._color.get((a, b))


# -- relations -------------------------------------------------------------------


def successors(rel) -> dict:
    out = {}
    for a, b in rel:
        out.setdefault(a, set()).add(b)
    return out


def is_wellfounded(universe, rel) -> bool:
    """No cycle in the digraph of ``rel`` restricted to ``universe``."""
    u = set(universe)
    succ = successors((a, b) for a, b in rel if a in u and b in u)
    state = {}
    for start in sorted(u):
        if state.get(start):
            continue
        state[start] = 1
        stack = [(start, iter(sorted(succ.get(start, ()))))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
                continue
            s = state.get(nxt)
            if s == 1:
                return False
            if s is None:
                state[nxt] = 1
                stack.append((nxt, iter(sorted(succ.get(nxt, ())))))
    return True


def compose(r1, r2) -> frozenset:
    s2 = successors(r2)
    return frozenset((a, c) for a, b in r1 for c in s2.get(b, ()))


def power(rel, n) -> frozenset:
    if n < 1:
        raise LabError("powers start at 1")
    out = frozenset(rel)
    for _ in range(n - 1):
        out = compose(out, rel)
    return out


def product(systems) -> tuple:
    """``(universe, relation)`` of the product of ``(U_i, >_i)``: one coordinate steps, the rest stay."""
    systems = list(systems)
    universe = tuple(itertools.product(*(sorted(u) for u, _ in systems)))
    succ = [successors(r) for _, r in systems]
    rel = set()
    for x in universe:
        for i, s in enumerate(succ):
            for b in s.get(x[i], ()):
                rel.add((x, x[:i] + (b,) + x[i + 1:]))
    return universe, frozenset(rel)


def restrict(rel, subset) -> frozenset:
    v = set(subset)
    return frozenset((a, b) for a, b in rel if a in v and b in v)


def ext_relation(seqs) -> frozenset:
    """``x >ext y`` iff ``y = x * <u>``, both in ``seqs``."""
    s = set(seqs)
    return frozenset((y[:-1], y) for y in s if y and y[:-1] in s)


def is_transitive(rel) -> bool:
    return compose(rel, rel) <= set(rel)


def transitive_closure(rel) -> frozenset:
    out = set(rel)
    while True:
        new = compose(out, out) - out
        if not new:
            return frozenset(out)
        out |= new


# -- sequence sets ------------------------------------------------------------------


def _extend(universe, rel, ok, bound=None, start=()):
    """All sequences grown from ``start`` one element at a time while ``ok(seq, v)``
    holds.  Without ``bound`` the relation must be well-founded; with it growth
    stops at that length."""
    if bound is None and not is_wellfounded(universe, rel):
        raise LabError("relation has a cycle: the sequence set is infinite")
    out = [start]
    frontier = [start]
    while frontier and (bound is None or len(frontier[0]) < bound):
        nxt = []
        for x in frontier:
            for v in universe:
                if ok(x, v):
                    nxt.append(x + (v,))
        out.extend(nxt)
        frontier = nxt
    return out


def ds(universe, rel, bound=None) -> list:
    """Decreasing sequences, the empty one included."""
    r = set(rel)
    return _extend(sorted(universe), r, lambda x, v: not x or (x[-1], v) in r, bound)


def dt(universe, rel, bound=None) -> list:
    """Decreasing transitive sequences: every earlier element is above every later one."""
    r = set(rel)
    return _extend(sorted(universe), r, lambda x, v: all((a, v) in r for a in x), bound)


def below(seqs, sigma) -> list:
    """``T_sigma``: the members of ``seqs`` extending ``sigma``."""
    n = len(sigma)
    return [x for x in seqs if x[:n] == sigma]


def monoseq(system: System, x) -> bool:
    """Decreasing transitive in the union, and each element reaches all later ones
    in the color it uses for its successor."""
    u = system.union
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            if (x[i], x[j]) not in u:
                return False
    for i in range(n - 1):
        for j in range(i + 1, n):
            for r in system.colors:
                if (x[i], x[i + 1]) in r and (x[i], x[j]) not in r:
                    return False
    return True


def ms(system: System) -> list:
    return [x for x in dt(system.universe, system.union) if monoseq(system, x)]


def ms_r(system: System, r, bound=None) -> list:
    """Monotonically colored sequences starting with ``r``, grown directly."""
    return _extend(system.universe, system.union, lambda x, v: monoseq(system, x + (v,)), bound, (r,))


def is_lifted_tree(seqs) -> bool:
    """``<r> * T'`` for a non-empty prefix-closed ``T'``."""
    s = set(seqs)
    if not s or () in s:
        return False
    roots = {x[0] for x in s}
    if len(roots) != 1:
        return False
    return all(len(x) == 1 or x[:-1] in s for x in s)


# -- Kleene-Brouwer relations ----------------------------------------------------------


def _lookup(rels):
    if callable(rels):
        return rels
    return lambda u: rels.get(u, ())


def kb_holds(x, y, rels) -> bool:
    """``x >KB y`` for sequences ``x``, ``y`` and sibling relations ``rels`` (u -> pairs)."""
    if len(y) > len(x) and y[:len(x)] == x:
        return True
    get = _lookup(rels)
    for i in range(1, min(len(x), len(y))):
        if x[i - 1] != y[i - 1]:
            break
        if (x[i], y[i]) in get(x[i - 1]):
            return True
    return False


def kb_relation(tree, rels) -> frozenset:
    t = list(tree)
    get = _lookup(rels)
    return frozenset((x, y) for x in t for y in t if kb_holds(x, y, get))


def left_relation(system: System, u) -> frozenset:
    """``u1 >_{u,Left} u2``: ``u`` reaches ``u1`` in an earlier color than ``u2``."""
    out = set()
    for j, rj in enumerate(system.colors):
        for l in range(j + 1, system.k):
            rl = system.colors[l]
            for a, u1 in rj:
                if a != u:
                    continue
                for b, u2 in rl:
                    if b == u:
                        out.add((u1, u2))
    return frozenset(out)


def right_relation(system: System, u) -> frozenset:
    return frozenset((b, a) for a, b in left_relation(system, u))


def check_disjoint(system: System):
    for i, j in itertools.combinations(range(system.k), 2):
        both = system.colors[i] & system.colors[j]
        if both:
            a, b = min(both)
            raise LabError(f"colors {i + 1} and {j + 1} share the pair ({a}, {b})")


class _Indexed:
    """Memoised ``u -> >_{u,Left}`` or ``>_{u,Right}``."""

    def __init__(self, system, side):
        self.system = system
        self.side = side
        self.cache = {}

    def __call__(self, u):
        if u not in self.cache:
            f = left_relation if self.side == "left" else right_relation
            self.cache[u] = f(self.system, u)
        return self.cache[u]


def kb1(system: System, r) -> frozenset:
    check_disjoint(system)
    return kb_relation(ms_r(system, r), _Indexed(system, "left"))


def kb2(system: System, r) -> frozenset:
    check_disjoint(system)
    return kb_relation(ms_r(system, r), _Indexed(system, "right"))


class KBMain:
    """``>_{KB,r}``: the Kleene-Brouwer relation on KB2-decreasing sequences of
    ``MS_<r>`` starting with ``<r>``, siblings compared by ``>_{KB1,r}``.

    The carrier set grows quickly, so membership and the relation are
    available pointwise; ``pairs`` and ``carrier`` enumerate them when asked.
    """

    def __init__(self, system: System, r, bound=None):
        check_disjoint(system)
        self.system = system
        self.r = r
        self.left = _Indexed(system, "left")
        self.right = _Indexed(system, "right")
        self.ms = ms_r(system, r, bound)
        self._ms_set = set(self.ms)

    def kb1(self, a, b) -> bool:
        return kb_holds(a, b, self.left)

    def kb2(self, a, b) -> bool:
        return kb_holds(a, b, self.right)

    def member(self, xs) -> bool:
        return (bool(xs) and xs[0] == (self.r,) and all(x in self._ms_set for x in xs)
                and all(self.kb2(a, b) for a, b in zip(xs, xs[1:])))

    def holds(self, xs, ys) -> bool:
        if len(ys) > len(xs) and ys[:len(xs)] == xs:
            return True
        for i in range(1, min(len(xs), len(ys))):
            if xs[i - 1] != ys[i - 1]:
                break
            if self.kb1(xs[i], ys[i]):
                return True
        return False

    def carrier(self, limit=None) -> list:
        """Members, by depth; raises LabError past ``limit`` elements."""
        root = ((self.r,),)
        out = [root]
        frontier = [root]
        while frontier:
            nxt = []
            for xs in frontier:
                for m in self.ms:
                    if self.kb2(xs[-1], m):
                        nxt.append(xs + (m,))
            out.extend(nxt)
            if limit is not None and len(out) > limit:
                raise LabError(f"more than {limit} sequences")
            frontier = nxt
        return out

    def pairs(self, elems) -> frozenset:
        e = list(elems)
        return frozenset((a, b) for a in e for b in e if self.holds(a, b))


def kb_main(system: System, r, bound=None) -> KBMain:
    return KBMain(system, r, bound)


# -- Erdos trees ---------------------------------------------------------------------


def insert(system: System, u, tree, sigma) -> frozenset:
    """Descend from ``sigma`` along the least child reached in the color of
    ``last(sigma) > u``; add ``u`` below the node where no such child exists."""
    t = set(tree)
    if sigma not in t:
        raise LabError("the starting node is not in the tree")
    un = system.union
    for rho in t:
        for v in rho:
            if (v, u) not in un:
                raise LabError(f"{v} is not above {u}")
    while True:
        c = system.color(sigma[-1], u)
        if c is None:
            break
        rc = system.colors[c - 1]
        kids = sorted(y[-1] for y in t if len(y) == len(sigma) + 1 and y[:-1] == sigma and (sigma[-1], y[-1]) in rc)
        if not kids:
            break
        sigma = sigma + (kids[0],)
    return frozenset(t | {sigma + (u,)})


def check_insert(system: System, u, tree, sigma, result):
    """The new element is a leaf below ``sigma``, monotonically colored and maximal."""
    new = set(result) - set(tree)
    if len(result) != len(tree) + 1 or len(new) != 1:
        raise LemmaViolation("insert (1)", f"size {len(tree)} -> {len(result)}")
    (leaf,) = new
    rho = leaf[:-1]
    if leaf[-1] != u or rho not in tree or rho[:len(sigma)] != sigma:
        raise LemmaViolation("insert (1)", f"{leaf} is not a child of a node below {sigma}")
    if not monoseq(system, leaf):
        raise LemmaViolation("insert (1)", f"{leaf} is not monotonically colored")
    if any(len(y) > len(leaf) and y[:len(leaf)] == leaf for y in result):
        raise LemmaViolation("insert (1)", f"{leaf} is not maximal")
    return leaf


def et(system: System, x, checked=False):
    """Erdos tree of a non-empty decreasing transitive sequence.  With ``checked``
    every insertion is verified and the result is returned with the new leaves."""
    if not x:
        raise LabError("the empty sequence has no tree")
    t = frozenset({(x[0],)})
    leaves = [(x[0],)]
    for u in x[1:]:
        t2 = insert(system, u, t, (x[0],))
        if checked:
            leaves.append(check_insert(system, u, t, (x[0],), t2))
        t = t2
    return (t, leaves) if checked else t


def check_erdos(system: System, x, tree):
    """Same elements as ``x``, monotonically colored members, distinct child colors."""
    if {v for rho in tree for v in rho} != set(x):
        raise LemmaViolation("Erdos tree", "elements differ from the sequence")
    for rho in tree:
        if not monoseq(system, rho):
            raise LemmaViolation("Erdos tree", f"{rho} is not monotonically colored")
    seen = {}
    for rho in tree:
        if len(rho) < 2:
            continue
        key = (rho[:-1], system.color(rho[-2], rho[-1]))
        if key in seen and seen[key] != rho[-1]:
            raise LemmaViolation("insert (2)", f"two children of {rho[:-1]} share color {key[1]}")
        seen[key] = rho[-1]


def et2(system: System, x, tree=None) -> tuple:
    """The nodes of ``et(x)`` in strictly KB2-decreasing order."""
    t = et(system, x) if tree is None else tree
    right = _Indexed(system, "right")

    def cmp(a, b):
        ab, ba = kb_holds(a, b, right), kb_holds(b, a, right)
        if ab == ba:
            raise LemmaViolation("insert (2)", f"KB2 does not order {a} and {b}")
        return -1 if ab else 1

    out = tuple(sorted(t, key=functools.cmp_to_key(cmp)))
    for a, b in zip(out, out[1:]):
        if not kb_holds(a, b, right):
            raise LemmaViolation("ET2", f"{a} is not KB2-above {b}")
    return out


# -- disjointification and the Podelski-Rybalchenko chain --------------------------------


def disjointify(system: System) -> System:
    """Remove from each color the pairs of all earlier colors."""
    seen = set()
    out = []
    for r in system.colors:
        r2 = frozenset(r - seen)
        out.append(r2)
        seen |= r
    return System(system.universe, tuple(out))


@dataclass
class Verdict:
    ok: bool  # the union is well-founded
    steps: list  # (lemma, detail) in the order checked
    failure: str = ""  # lemma name of the first failed assertion or precondition
    extensions: int = 0  # one-step extensions checked for ET2 monotonicity

    def as_dict(self):
        return {"ok": self.ok, "failure": self.failure, "extensions": self.extensions,
                "steps": [list(s) for s in self.steps]}


def pr_check(system: System, kb_limit=2000) -> Verdict:
    """Run the construction behind the Podelski-Rybalchenko theorem on a finite
    system, asserting each lemma's conclusion on the way.

    The verdict is read off the constructions (every decreasing transitive
    sequence is injectively mapped into a well-founded Kleene-Brouwer
    relation), not from a cycle search on the union.
    """
    steps = []
    u = system.universe
    bound = len(u) + 1
    try:
        for i, r in enumerate(system.colors):
            if not is_wellfounded(u, r):
                return Verdict(False, steps, f"precondition: color {i + 1} has a cycle")
        steps.append(("colors well-founded", f"{system.k} colors"))
        if not is_transitive(system.union):
            return Verdict(False, steps, "precondition: union not transitive")
        steps.append(("Trans", f"{len(system.union)} pairs"))

        d = disjointify(system)
        check_disjoint(d)
        if d.union != system.union:
            raise LemmaViolation("disjointify", "union changed")
        for r, r0 in zip(d.colors, system.colors):
            if not r <= r0:
                raise LemmaViolation("disjointify", "a color grew")
        steps.append(("disjointify", "/".join(str(len(r)) for r in d.colors)))

        for i, r in enumerate(d.colors):
            seqs = dt(u, r, bound)
            if any(len(x) == bound for x in seqs):
                raise LemmaViolation("DT", f"color {i + 1} has a decreasing sequence repeating an element")
            if not is_wellfounded(seqs, ext_relation(seqs)):
                raise LemmaViolation("DT", f"ext on DT of color {i + 1} has a cycle")
        steps.append(("DT per color", "ext well-founded"))

        left = _Indexed(d, "left")
        for v in u:
            if not is_wellfounded(u, left(v)):
                raise LemmaViolation("Left", f">_{{{v},Left}} has a cycle")
        steps.append(("Left", "well-founded for every u"))

        union_dt = dt(u, d.union, bound)
        if any(len(x) == bound for x in union_dt):
            raise LemmaViolation("DT", "a decreasing transitive sequence repeats an element")
        total_ext = 0
        for r in u:
            ms = ms_r(d, r, bound)
            if any(len(x) == bound for x in ms):
                raise LemmaViolation("MS", f"MS_<{r}> repeats an element")
            if not is_lifted_tree(ms):
                raise LemmaViolation("MS", f"MS_<{r}> is not a lifted tree")
            for x in ms:
                if not monoseq(d, x):
                    raise LemmaViolation("MS", f"{x} fails Monoseq")
            if not is_wellfounded(ms, ext_relation(ms)):
                raise LemmaViolation("MS", "ext on MS has a cycle")
            k1 = kb_relation(ms, left)
            k2 = kb_relation(ms, _Indexed(d, "right"))
            for name, rel in (("KB1", k1), ("KB2", k2)):
                if not is_wellfounded(ms, rel):
                    raise LemmaViolation("KB", f"{name} on MS_<{r}> has a cycle")
                if any(a == b for a, b in rel):
                    raise LemmaViolation("ind-ne", f"{name} is reflexive")
            main = KBMain(d, r, bound)
            dtr = [x for x in union_dt if x and x[0] == r]
            image = {}
            for x in dtr:
                tree, _ = et(d, x, checked=True)
                check_erdos(d, x, tree)
                seq = et2(d, x, tree)
                if not main.member(seq):
                    raise LemmaViolation("ind-universe", f"ET2{x} is not in the KB carrier")
                image[x] = seq
            if len(set(image.values())) != len(image):
                raise LemmaViolation("ET-ind", "ET2 is not injective")
            for x in dtr:
                for v in u:
                    y = x + (v,)
                    if y in image:
                        total_ext += 1
                        if not main.holds(image[x], image[y]):
                            raise LemmaViolation("ET", f"ET2{x} is not KB-above ET2{y}")
            img = list(image.values())
            if not is_wellfounded(img, main.pairs(img)):
                raise LemmaViolation("KB", f">_{{KB,{r}}} has a cycle on the ET2 image")
            try:
                carrier = main.carrier(kb_limit)
            except LabError:
                carrier = None
            if carrier is not None and not is_wellfounded(carrier, main.pairs(carrier)):
                raise LemmaViolation("KB", f">_{{KB,{r}}} has a cycle")
        steps.append(("ET", f"{total_ext} one-step extensions"))
        extensions = total_ext
        if set(union_dt) != set(ds(u, d.union, bound)):
            raise LemmaViolation("Trans", "DT and DS differ")
        steps.append(("DS", f"{len(union_dt)} sequences"))
    except LemmaViolation as e:
        steps.append((e.lemma, e.detail))
        return Verdict(False, steps, e.lemma)
    return Verdict(True, steps, extensions=extensions)


def et2_extensions(system: System):
    """``(x, y, ok)`` for every one-step extension ``y = x*<u>`` of non-empty
    decreasing transitive sequences, ``ok`` whether ET2 goes KB-down."""
    d = disjointify(system)
    union_dt = [x for x in dt(d.universe, d.union) if x]
    have = set(union_dt)
    mains = {}
    images = {x: et2(d, x) for x in union_dt}
    for x in union_dt:
        r = x[0]
        if r not in mains:
            mains[r] = KBMain(d, r)
        for v in d.universe:
            y = x + (v,)
            if y in have:
                yield x, y, mains[r].holds(images[x], images[y])

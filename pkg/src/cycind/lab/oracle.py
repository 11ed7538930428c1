"""Brute-force references for the lab: cycles by counting walks, not by search."""
from __future__ import annotations


def has_long_walk(universe, rel) -> bool:
    """A walk with ``|U|`` steps exists, so some element repeats on it."""
    u = set(universe)
    live = set(u)
    for _ in range(len(u)):
        live = {a for a, b in rel if a in u and b in live}
        if not live:
            return False
    return True


def acyclic(universe, rel) -> bool:
    return not has_long_walk(universe, rel)

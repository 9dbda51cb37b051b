"""Derived structures: products, diagonals, links, constants and walk forests."""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product as cartesian

from .structures import (CapExceeded, RelStructure, Signature, StructureError, Walk,
                         element_token, induced_substructure)

DEFAULT_FOREST_CAP = 10**6


def product(H1: RelStructure, H2: RelStructure) -> RelStructure:
    """Categorical product; elements are pairs ``(a, b)`` in lexicographic order."""
    if H1.signature != H2.signature:
        raise StructureError("product needs structures over the same signature")
    universe = [(a, b) for a in H1.universe for b in H2.universe]
    rels = {}
    for name in H1.signature.names:
        rels[name] = [tuple(zip(s, t)) for s in H1.relations[name] for t in H2.relations[name]]
    return RelStructure(H1.signature, universe, rels)


def square(H: RelStructure) -> RelStructure:
    return product(H, H)


def diagonal(H: RelStructure) -> RelStructure:
    """The substructure of the square induced on the pairs ``(a, a)``."""
    return induced_substructure(square(H), [(a, a) for a in H.universe])


def project(pair_elem, coord: int):
    return pair_elem[coord]


def link(length: int, signature) -> RelStructure:
    """The ``length``-link: points ``0..length`` with every tuple over ``{i, i+1}``."""
    if length < 1:
        raise StructureError("link length must be >= 1")
    sig = Signature.of(signature)
    rels = {}
    for name, k in sig:
        ts = set()
        for i in range(length):
            ts.update(cartesian((i, i + 1), repeat=k))
        rels[name] = ts
    return RelStructure(sig, range(length + 1), rels)


def constant_symbol(e) -> str:
    return "const_" + re.sub(r"[^A-Za-z0-9_]", "_", element_token(e))


def add_constants(H: RelStructure) -> RelStructure:
    """Add a unary singleton relation ``const_<a> = {(a,)}`` for every element."""
    names = [constant_symbol(a) for a in H.universe]
    taken = set(H.signature.names)
    if len(set(names)) != len(names) or taken & set(names):
        raise StructureError("constant symbol names collide after mangling")
    sig = Signature(H.signature.symbols + tuple((n, 1) for n in names))
    rels = dict(H.relations)
    rels.update({n: [(a,)] for n, a in zip(names, H.universe)})
    return RelStructure(sig, H.universe, rels)


@dataclass(frozen=True)
class WalkForest:
    """All walks of length at most ``depth`` as a structure, plus the label map."""

    base: RelStructure
    structure: RelStructure
    depth: int

    @property
    def labels(self) -> dict:
        return {w: w.end for w in self.structure.universe}

    @property
    def roots(self) -> list:
        return [w for w in self.structure.universe if len(w) == 0]

    def level(self, n: int) -> list:
        return [w for w in self.structure.universe if len(w) == n]


def walk_forest(H: RelStructure, depth: int, cap: int = DEFAULT_FOREST_CAP) -> WalkForest:
    """Truncated forest of walks.

    Elements are :class:`Walk` objects ordered by length, then by discovery
    (which follows the canonical orders of ``H``).  For every walk ``w`` of
    length below ``depth`` ending at ``a``, every tuple ``t`` of a relation and
    every position ``i`` with ``t[i] = a``, the forest contains the tuple that
    has ``w`` at position ``i`` and the one-step extensions of ``w`` through
    ``(i, t, j)`` at every other position ``j``.
    """
    if depth < 0:
        raise StructureError("depth must be >= 0")
    occurrences = {a: [] for a in H.universe}
    for name in H.signature.names:
        for ti, t in enumerate(H.relations[name]):
            for i, a in enumerate(t):
                occurrences[a].append((name, ti, i))
    level = [Walk(a) for a in H.universe]
    universe = list(level)
    rels = {name: [] for name in H.signature.names}
    for _ in range(depth):
        nxt = []
        for w in level:
            for name, ti, i in occurrences[w.end]:
                t = H.relations[name][ti]
                members = []
                for j, b in enumerate(t):
                    if j == i:
                        members.append(w)
                    else:
                        child = w.extend(i + 1, name, ti, j + 1, b)
                        members.append(child)
                        nxt.append(child)
                rels[name].append(tuple(members))
        universe.extend(nxt)
        if len(universe) > cap:
            raise CapExceeded(f"walk forest exceeds {cap} elements", len(universe))
        level = nxt
    return WalkForest(H, RelStructure(H.signature, universe, rels), depth)

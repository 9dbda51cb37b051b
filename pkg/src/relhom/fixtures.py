"""Canonical small structures, exhaustive small families and seeded random structures."""
from __future__ import annotations

import random
from itertools import product as cartesian

from .structures import RelStructure, Signature, canonical_form, parse_structure

FIXTURE_TEXT = {
    "sft3": """signature R1/2 R2/2
universe a b c
rel R1 = (a,a) (a,b) (b,a) (b,b) (b,c) (c,b)
rel R2 = (a,a) (a,b) (b,a) (b,b) (b,c) (c,a)
""",
    "edge": """signature R/2
universe 0 1
rel R = (0,1)
""",
    "tri": """signature R1/2 R2/2 R3/2
universe 0 1 2
rel R1 = (0,0) (0,1) (1,0)
rel R2 = (1,1) (1,2) (2,1)
rel R3 = (2,2) (2,0) (0,2)
""",
    "c3": """signature E/2
universe 0 1 2
rel E = (0,1) (1,2) (2,0)
""",
    "k2": """signature E/2
universe 0 1
rel E = (0,1) (1,0)
""",
    "pt1": """signature E/2
universe e
rel E = (e,e)
""",
}


def fixture(name: str) -> RelStructure:
    return parse_structure(FIXTURE_TEXT[name.lower()])


def all_fixtures() -> dict:
    return {name: fixture(name) for name in FIXTURE_TEXT}


def digraph(universe, edges, name: str = "E") -> RelStructure:
    return RelStructure(Signature(((name, 2),)), [str(u) for u in universe],
                        {name: [(str(a), str(b)) for a, b in edges]})


def path_structure(length: int, name: str = "R1", signature=None) -> RelStructure:
    """Directed path ``p0 -> p1 -> ... -> p_length`` in relation ``name``."""
    sig = Signature.of(signature) if signature is not None else Signature(((name, 2),))
    universe = [f"p{i}" for i in range(length + 1)]
    rels = {n: [] for n in sig.names}
    rels[name] = [(universe[i], universe[i + 1]) for i in range(length)]
    return RelStructure(sig, universe, rels)


def structures_up_to_iso(n: int, signature="E/2") -> list[RelStructure]:
    """Every structure on ``n`` elements over ``signature`` (binary symbols), one per isomorphism class."""
    sig = Signature.of(signature)
    universe = [str(i) for i in range(n)]
    pairs = [(a, b) for a in universe for b in universe]
    seen, out = set(), []
    for bits in cartesian((0, 1), repeat=len(pairs) * len(sig)):
        rels = {}
        for s, (name, k) in enumerate(sig):
            if k != 2:
                raise ValueError("only binary symbols are enumerated")
            chunk = bits[s * len(pairs):(s + 1) * len(pairs)]
            rels[name] = [p for p, b in zip(pairs, chunk) if b]
        H = RelStructure(sig, universe, rels)
        key = canonical_form(H)
        if key not in seen:
            seen.add(key)
            out.append(H)
    return out


def small_binary_structures(max_size: int = 3) -> list[RelStructure]:
    out = []
    for n in range(1, max_size + 1):
        out.extend(structures_up_to_iso(n))
    return out


def random_structure(rng: random.Random, max_size: int = 3, max_symbols: int = 2,
                     density: float | None = None) -> RelStructure:
    n = rng.randint(1, max_size)
    k = rng.randint(1, max_symbols)
    sig = Signature(tuple((f"R{i + 1}", 2) for i in range(k)))
    universe = [str(i) for i in range(n)]
    p = rng.uniform(0.2, 0.8) if density is None else density
    rels = {name: [(a, b) for a in universe for b in universe if rng.random() < p] for name in sig.names}
    return RelStructure(sig, universe, rels)

"""Cores, critical obstructions and finite-duality checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian

from .constructions import add_constants, constant_symbol
from .dismantling import decide_main
from .homomorphisms import Homomorphism, extend_partial, mixed_extension
from .structures import (CapExceeded, RelStructure, StructureError, canonical_form, induced_substructure,
                         is_connected, is_forest)

DEFAULT_MAX_SIZE = 6
GENERATION_CAP = 200_000
CORE_CAP = 10**7


def maps_to(G: RelStructure, H: RelStructure) -> bool:
    if G.signature != H.signature:
        raise StructureError("structures must share a signature")
    return mixed_extension(G, H, {}) is not None


def non_injective_endomorphism(H: RelStructure) -> Homomorphism | None:
    """An endomorphism missing some element of ``H``, if one exists."""
    for c in H.universe:
        rest = [a for a in H.universe if a != c]
        h = mixed_extension(H, H, {}, {x: rest for x in H.universe})
        if h is not None:
            return h
    return None


def is_core(H: RelStructure) -> bool:
    """Every endomorphism is injective.

    An endomorphism of a finite structure is injective iff it is onto, so it is
    enough to look for one avoiding each element in turn.
    """
    if len(H) ** len(H) > CORE_CAP:
        raise CapExceeded(f"|H|^|H| exceeds {CORE_CAP}")
    return non_injective_endomorphism(H) is None


def delete_tuple(O: RelStructure, name: str, t: tuple) -> RelStructure:
    rels = dict(O.relations)
    rels[name] = [s for s in rels[name] if s != t]
    return RelStructure(O.signature, O.universe, rels)


def is_critical_obstruction(O: RelStructure, H: RelStructure) -> bool:
    """``O`` does not map to ``H`` but every one-step deletion does."""
    if maps_to(O, H):
        return False
    for name, t in O.items():
        if not maps_to(delete_tuple(O, name, t), H):
            return False
    for x in O.universe if len(O) > 1 else ():
        # the empty structure maps anywhere
        if not maps_to(induced_substructure(O, [y for y in O.universe if y != x]), H):
            return False
    return True


@dataclass
class ObstructionReport:
    H: RelStructure
    max_size: int
    trees_only: bool
    found: list = field(default_factory=list)
    exhausted: bool = False
    generated: int = 0


def _extensions(S: RelStructure, max_size: int, trees_only: bool):
    """Structures obtained by adding one tuple that touches ``S`` (possibly with fresh elements)."""
    n = len(S)
    for name, k in S.signature:
        if trees_only:
            if n + k - 1 > max_size:
                continue
            fresh = tuple(range(n, n + k - 1))
            for pos in range(k):
                for a in S.universe:
                    t = fresh[:pos] + (a,) + fresh[pos:]
                    yield _add(S, name, t, n + k - 1)
            continue
        slots = list(S.universe) + list(range(n, n + k))
        for t in cartesian(slots, repeat=k):
            new = [x for x in t if isinstance(x, int) and x >= n]
            if len(new) == k:
                continue
            seen_fresh = sorted(set(new))
            if seen_fresh != list(range(n, n + len(seen_fresh))):
                continue
            # fresh elements appear in increasing order of first occurrence
            order = [x for i, x in enumerate(t) if x in seen_fresh and x not in t[:i]]
            if order != seen_fresh:
                continue
            if n + len(seen_fresh) > max_size or t in S.rel_sets[name]:
                continue
            yield _add(S, name, t, n + len(seen_fresh))


def _add(S: RelStructure, name: str, t: tuple, size: int) -> RelStructure:
    rels = dict(S.relations)
    rels[name] = list(rels[name]) + [t]
    return RelStructure(S.signature, range(size), rels)


def _seeds(H: RelStructure, max_size: int, trees_only: bool):
    for name, k in H.signature:
        if trees_only:
            if k <= max_size:
                yield RelStructure(H.signature, range(k), {name: [tuple(range(k))]})
            continue
        # one tuple, elements named by first occurrence
        for t in cartesian(range(k), repeat=k):
            used = []
            for x in t:
                if x not in used:
                    used.append(x)
            if used == list(range(len(used))) and len(used) <= max_size:
                yield RelStructure(H.signature, range(len(used)), {name: [t]})


def enumerate_critical_obstructions(H: RelStructure, max_size: int = DEFAULT_MAX_SIZE,
                                    trees_only: bool = False, cap: int = GENERATION_CAP) -> ObstructionReport:
    """Critical obstructions with at most ``max_size`` elements, one per isomorphism class.

    Generation adds one tuple at a time and only grows structures that still
    map to ``H``: ordering the tuples of a connected critical obstruction so
    that each prefix stays connected makes every prefix a proper substructure,
    which maps, so every such obstruction is reached.
    """
    rep = ObstructionReport(H, max_size, trees_only)
    seen = set()
    stack = []
    for S in _seeds(H, max_size, trees_only):
        key = canonical_form(S)
        if key not in seen:
            seen.add(key)
            stack.append(S)
    while stack:
        S = stack.pop()
        rep.generated += 1
        if not maps_to(S, H):
            if is_critical_obstruction(S, H):
                rep.found.append(S)
            continue
        for T in _extensions(S, max_size, trees_only):
            key = canonical_form(T)
            if key in seen:
                continue
            seen.add(key)
            if len(seen) > cap:
                rep.found.sort(key=_order_key)
                return rep
            stack.append(T)
    rep.found.sort(key=_order_key)
    rep.exhausted = True
    if trees_only:
        assert all(is_forest(O) and is_connected(O) for O in rep.found)
    return rep


def _order_key(O: RelStructure):
    return (len(O), O.n_tuples, repr(canonical_form(O)))


def finite_duality_via_A1c(H: RelStructure) -> bool:
    """Does the square of the core ``H`` dismantle to its full diagonal?"""
    if not is_core(H):
        raise StructureError("H is not a core")
    rep = decide_main(H, H.universe)
    return rep.holds and len(rep.phase1) == 0


def constant_expansion(G: RelStructure, H: RelStructure, p) -> RelStructure:
    """``G`` with a unary relation per element ``a`` of ``H`` holding the preimage of ``a`` under ``p``."""
    mapping = p.mapping if hasattr(p, "mapping") and not isinstance(p, dict) else dict(p)
    Hc = add_constants(H)
    rels = dict(G.relations)
    for a in H.universe:
        rels[constant_symbol(a)] = [(x,) for x in G.universe if x in mapping and mapping[x] == a]
    return RelStructure(Hc.signature, G.universe, rels)


def extension_via_obstructions(G: RelStructure, H: RelStructure, p, obs: ObstructionReport) -> bool:
    """Does ``p`` extend to a homomorphism?  Decided by the obstruction list, checked against search.

    The list must be exhausted and cover structures as large as ``G``: a
    failing instance contains a critical obstruction no larger than itself.
    """
    if not obs.exhausted:
        raise StructureError("obstruction list is not exhausted")
    Hc = add_constants(H)
    if obs.H != Hc:
        raise StructureError("obstructions must be computed for H with constants")
    if obs.max_size < len(G):
        raise StructureError(f"obstructions only cover {obs.max_size} elements, G has {len(G)}")
    Gc = constant_expansion(G, H, p)
    answer = not any(maps_to(O, Gc) for O in obs.found)
    mapping = p.mapping if hasattr(p, "mapping") and not isinstance(p, dict) else dict(p)
    if answer != (extend_partial(G, H, mapping) is not None):
        raise AssertionError("obstruction answer disagrees with direct search")
    return answer

"""Domination, folds, greedy dismantling and the square-dismantling decision procedure."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from .constructions import square
from .structures import RelStructure, StructureError, induced_substructure


@dataclass(frozen=True)
class FoldRecord:
    removed: object
    dominator: object

    def __iter__(self):
        return iter((self.removed, self.dominator))

    def __repr__(self):
        return f"{self.removed!r}->{self.dominator!r}"


@dataclass
class DismantleSequence:
    start: RelStructure
    folds: list = field(default_factory=list)

    def __len__(self):
        return len(self.folds)

    def pairs(self) -> list:
        return [(f.removed, f.dominator) for f in self.folds]

    def replay(self) -> list[RelStructure]:
        """The chain of induced substructures, checking every fold on the way."""
        chain = [self.start]
        cur = self.start
        for rec in self.folds:
            cur, _ = fold(cur, rec.removed, rec.dominator)
            chain.append(cur)
        return chain


@dataclass
class Retraction:
    domain: RelStructure
    image: RelStructure
    mapping: dict

    def __call__(self, x):
        return self.mapping[x]


@dataclass
class DecisionReport:
    holds: bool
    J: frozenset
    phase1: DismantleSequence
    I: RelStructure
    phase2: DismantleSequence
    K: RelStructure
    square_seq: DismantleSequence | None = None
    retractions: list | None = None
    gap: int | None = None

    @property
    def length(self):
        return None if self.square_seq is None else len(self.square_seq)

    def __bool__(self):
        return self.holds


def dominates(H: RelStructure, b, a) -> bool:
    """Does ``b`` dominate ``a``: replacing one occurrence of ``a`` by ``b`` in any tuple stays in the relation?"""
    ia, ib = H.index(a), H.index(b)
    return _dominates_idx(H, ib, ia)


def _dominates_idx(H: RelStructure, ib: int, ia: int) -> bool:
    if ia == ib:
        return True
    sets = H.index_sets
    tuples = H.index_tuples
    for name, ti, pos in H.incidence[ia]:
        t = tuples[name][ti]
        if t[:pos] + (ib,) + t[pos + 1:] not in sets[name]:
            return False
    return True


def dominators(H: RelStructure, a) -> list:
    ia = H.index(a)
    return [H.universe[ib] for ib in range(len(H)) if ib != ia and _dominates_idx(H, ib, ia)]


def dominated_elements(H: RelStructure, J: Iterable = ()) -> list:
    """``(a, least dominator)`` for every dominated ``a`` outside ``J``, in canonical order."""
    J = H.check_elements(J)
    out = []
    for a in H.universe:
        if a not in J:
            ds = dominators(H, a)
            if ds:
                out.append((a, ds[0]))
    return out


def fold(H: RelStructure, a, b) -> tuple[RelStructure, FoldRecord]:
    if a == b:
        raise StructureError("cannot fold an element onto itself")
    if not dominates(H, b, a):
        raise StructureError(f"{b!r} does not dominate {a!r}")
    return induced_substructure(H, [x for x in H.universe if x != a]), FoldRecord(a, b)


def greedy_dismantle(H: RelStructure, J: Iterable = (), rng: random.Random | None = None):
    """Fold dominated elements outside ``J`` until none is left.

    By default ties are broken toward the end of the canonical order: the
    greatest dominated element is folded onto its greatest dominator.  With
    ``rng`` both choices are random (used to probe confluence).
    """
    J = H.check_elements(J)
    seq = DismantleSequence(H)
    cur = H
    while True:
        if rng is None:
            cands = dominated_elements(cur, J)
            if not cands:
                break
            a = cands[-1][0]
            b = dominators(cur, a)[-1]
        else:
            cands = [(a, dominators(cur, a)) for a in cur.universe if a not in J]
            cands = [(a, ds) for a, ds in cands if ds]
            if not cands:
                break
            a, ds = rng.choice(cands)
            b = rng.choice(ds)
        cur, rec = fold(cur, a, b)
        seq.folds.append(rec)
    return cur, seq


def is_dismantlable(H: RelStructure) -> bool:
    I, _ = greedy_dismantle(H)
    return len(I) == 1


def _check_square(Q: RelStructure):
    firsts = []
    for e in Q.universe:
        if not (isinstance(e, tuple) and len(e) == 2):
            raise StructureError("expected a square: elements must be pairs")
        if e[0] not in firsts:
            firsts.append(e[0])
    expected = [(x, y) for x in firsts for y in firsts]
    if list(Q.universe) != expected:
        raise StructureError("expected a square: universe is not A x A in lexicographic order")
    for name, ts in Q.rel_sets.items():
        for t in ts:
            if tuple((y, x) for x, y in t) not in ts:
                raise StructureError("expected a square: relations are not swap-symmetric")


def symmetric_pair_dismantle(Q: RelStructure):
    """Fold off-diagonal pairs of a square, each followed by its mirror when possible.

    The least dominated off-diagonal pair goes first, onto its least
    dominator.  Diagonal elements are never folded.
    """
    _check_square(Q)
    seq = DismantleSequence(Q)
    cur = Q
    while True:
        pick = None
        for e in cur.universe:
            if e[0] == e[1]:
                continue
            ds = dominators(cur, e)
            if ds:
                pick = (e, ds[0])
                break
        if pick is None:
            break
        (a, b), dom = pick
        cur, rec = fold(cur, (a, b), dom)
        seq.folds.append(rec)
        mirror = (b, a)
        ds = dominators(cur, mirror)
        if ds:
            cur, rec = fold(cur, mirror, ds[0])
            seq.folds.append(rec)
    return cur, seq


def build_square_sequence(H: RelStructure, phase1: DismantleSequence, phase2: DismantleSequence):
    """Lift the phase-1 folds to the square, then replay the phase-2 folds.

    Returns the dismantling sequence of the square down to the diagonal of the
    phase-1 result and the prefix compositions ``r_0, ..., r_l`` of its folds.
    """
    if phase1.start != H:
        raise StructureError("phase-1 sequence does not start at H")
    Q = square(H)
    seq = DismantleSequence(Q)
    cur = Q
    present = list(H.universe)
    for rec in phase1.folds:
        a, b = rec.removed, rec.dominator
        present.remove(a)
        lifted = [((x, a), (x, b)) for x in present] + [((a, x), (b, x)) for x in present]
        lifted.sort(key=lambda p: cur.index(p[0]))
        lifted.append(((a, a), (b, b)))
        for u, v in lifted:
            cur, r = fold(cur, u, v)
            seq.folds.append(r)
    if cur != phase2.start:
        raise StructureError("lifted phase 1 does not reach the square of the phase-1 result")
    for rec in phase2.folds:
        if rec.removed[0] == rec.removed[1]:
            raise StructureError("phase 2 folded a diagonal element")
        cur, r = fold(cur, rec.removed, rec.dominator)
        seq.folds.append(r)
    for r in seq.folds:
        u, v = r.removed, r.dominator
        if u[0] == u[1] and v[0] != v[1]:
            raise AssertionError("diagonal element folded onto a non-diagonal one")
    rets = [Retraction(Q, Q, {x: x for x in Q.universe})]
    chain = seq.replay()
    mapping = dict(rets[0].mapping)
    for i, r in enumerate(seq.folds, 1):
        mapping = {x: (r.dominator if y == r.removed else y) for x, y in mapping.items()}
        rets.append(Retraction(Q, chain[i], mapping))
    for ret in rets:
        for a in H.universe:
            img = ret.mapping[(a, a)]
            if img[0] != img[1]:
                raise AssertionError("retraction sends a diagonal element off the diagonal")
    return seq, rets


def decide_main(H: RelStructure, J: Iterable = ()) -> DecisionReport:
    """Two-phase procedure: does ``H`` dismantle to some ``I ⊇ J`` whose square dismantles to its diagonal?"""
    J = H.check_elements(J)
    I, phase1 = greedy_dismantle(H, J)
    K, phase2 = symmetric_pair_dismantle(square(I))
    holds = all(e[0] == e[1] for e in K.universe)
    report = DecisionReport(holds, J, phase1, I, phase2, K)
    if holds:
        seq, rets = build_square_sequence(H, phase1, phase2)
        report.square_seq, report.retractions = seq, rets
        report.gap = 2 * len(seq)
    return report

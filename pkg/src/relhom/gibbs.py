"""Finite-volume Gibbs specifications with exact rational arithmetic."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .constructions import square, walk_forest
from .dismantling import greedy_dismantle, symmetric_pair_dismantle
from .homomorphisms import DEFAULT_CAP, Homomorphism, hom_array
from .structures import (INFINITY, RelStructure, StructureError, boundary, components,
                         distances_from, induced_substructure)


class EmptySupport(StructureError):
    """No homomorphism extends the boundary condition (the partition function is 0)."""


def weight_function(H: RelStructure, lam: Mapping | None = None) -> dict:
    """Validated weights; uniform 1 when ``lam`` is omitted."""
    if lam is None:
        return {a: Fraction(1) for a in H.universe}
    out = {}
    for a in H.universe:
        if a not in lam:
            raise StructureError(f"no weight for {a!r}")
        w = Fraction(lam[a])
        if w <= 0:
            raise StructureError(f"weight of {a!r} must be positive")
        out[a] = w
    extra = set(lam) - set(H.universe)
    if extra:
        raise StructureError(f"weights for unknown elements {sorted(map(str, extra))}")
    return out


@dataclass
class GibbsSpecification:
    G: RelStructure
    H: RelStructure
    lam: dict = None

    def __post_init__(self):
        if self.G.signature != self.H.signature:
            raise StructureError("G and H must share a signature")
        self.lam = weight_function(self.H, self.lam)


def _interior_rows(spec: GibbsSpecification, V, phi: Homomorphism, local: bool, cap: int):
    """Rows of the admissible assignments on ``V`` (columns in canonical order of ``V``)."""
    G = spec.G
    V = G.check_elements(V)
    if not V:
        # a single term: phi itself
        return [], np.zeros((1, 0), dtype=np.int64)
    if local:
        region = V | boundary(G, V)
        Gr = induced_substructure(G, region)
    else:
        Gr = G
    pinned = {x: phi(x) for x in Gr.universe if x not in V}
    rows = hom_array(Gr, spec.H, pinned=pinned, cap=cap)
    cols = [Gr.index(v) for v in G.sort_elements(V)]
    return G.sort_elements(V), rows[:, cols]


def _weights(spec: GibbsSpecification, rows: np.ndarray) -> list[Fraction]:
    lam = [spec.lam[a] for a in spec.H.universe]
    out = []
    for r in rows.tolist():
        w = Fraction(1)
        for v in r:
            w *= lam[v]
        out.append(w)
    return out


def partition_function(spec: GibbsSpecification, V: Iterable, phi: Homomorphism,
                       local: bool = True, cap: int = DEFAULT_CAP) -> Fraction:
    """Weighted count of assignments on ``V`` compatible with ``phi`` outside ``V``.

    ``local=True`` only looks at ``V`` and its boundary; ``local=False``
    solves on the whole of ``G`` (used as an independent route in tests).
    """
    _, rows = _interior_rows(spec, V, phi, local, cap)
    if not len(rows):
        raise EmptySupport("no admissible assignment: Z = 0")
    return sum(_weights(spec, rows), Fraction(0))


def conditional_marginal(spec: GibbsSpecification, V: Iterable, phi: Homomorphism, x,
                         local: bool = True, cap: int = DEFAULT_CAP) -> dict:
    """Exact distribution of the value at ``x`` given ``phi`` outside ``V``."""
    order, rows = _interior_rows(spec, V, phi, local, cap)
    if x not in order:
        raise StructureError(f"{x!r} is not in V")
    if not len(rows):
        raise EmptySupport("no admissible assignment: Z = 0")
    ws = _weights(spec, rows)
    Z = sum(ws, Fraction(0))
    col = rows[:, order.index(x)].tolist()
    out = {a: Fraction(0) for a in spec.H.universe}
    for v, w in zip(col, ws):
        out[spec.H.universe[v]] += w
    return {a: p / Z for a, p in out.items()}


# ---------------------------------------------------------------------------
# spatial mixing reports

@dataclass
class SpatialMixingReport:
    J: frozenset
    pairs_tested: int
    buckets: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    C: float | None = None
    alpha: float | None = None
    violation: bool = False

    def summary(self) -> dict:
        return {
            "J": sorted(map(str, self.J)),
            "pairs_tested": self.pairs_tested,
            "buckets": {str(d): str(v) for d, v in sorted(self.buckets.items())},
            "C": self.C,
            "alpha": self.alpha,
            "violation": self.violation,
        }


def disagreement_boundary(G: RelStructure, V, phi1: Homomorphism, phi2: Homomorphism, J) -> frozenset:
    """Boundary elements of ``V`` whose pair of values is not a diagonal pair over ``J``."""
    return frozenset(x for x in boundary(G, V) if not (phi1(x) == phi2(x) and phi1(x) in J))


def _fit(buckets: dict):
    pts = [(d, float(v)) for d, v in sorted(buckets.items()) if d != INFINITY and v > 0]
    if not pts:
        return 0.0, None
    if len(pts) == 1:
        return pts[0][1], None
    ds = np.array([p[0] for p in pts], dtype=float)
    ys = np.log([p[1] for p in pts])
    slope, icpt = np.polyfit(ds, ys, 1)
    return float(math.exp(icpt)), float(-slope)


def jsm_report(spec: GibbsSpecification, J: Iterable, V_family: Iterable, cap: int = DEFAULT_CAP) -> SpatialMixingReport:
    """Largest marginal differences bucketed by distance to the disagreement boundary.

    Every pair of distinct boundary conditions on each ``V`` is compared at
    every site of ``V`` and every value.  A violation is flagged when the
    largest gap at the greatest finite distance is positive and no smaller
    than the one just before it.
    """
    G, H = spec.G, spec.H
    J = H.check_elements(J)
    homs = hom_array(G, H, cap=cap)
    rep = SpatialMixingReport(J, 0)
    for V in V_family:
        V = G.check_elements(V)
        bd = G.sort_elements(boundary(G, V))
        cols = [G.index(b) for b in bd]
        if len(homs):
            _, first = np.unique(homs[:, cols], axis=0, return_index=True)
        else:
            first = []
        conds = [Homomorphism.from_indices(G, H, homs[i]) for i in sorted(first)]
        marg = {}
        for k, phi in enumerate(conds):
            marg[k] = {x: conditional_marginal(spec, V, phi, x, cap=cap) for x in G.sort_elements(V)}
        for i in range(len(conds)):
            for j in range(i + 1, len(conds)):
                rep.pairs_tested += 1
                D = disagreement_boundary(G, V, conds[i], conds[j], J)
                dist = distances_from(G, D)
                for x in G.sort_elements(V):
                    d = dist[x]
                    for a in H.universe:
                        gap = abs(marg[i][x][a] - marg[j][x][a])
                        if d not in rep.buckets or gap > rep.buckets[d]:
                            rep.buckets[d] = gap
                            rep.witnesses[d] = (V, conds[i], conds[j], x, a)
    rep.C, rep.alpha = _fit(rep.buckets)
    finite = sorted(d for d in rep.buckets if d != INFINITY)
    if len(finite) >= 2:
        last, prev = rep.buckets[finite[-1]], rep.buckets[finite[-2]]
        rep.violation = last > 0 and last >= prev
    return rep


# ---------------------------------------------------------------------------
# boundary influence from a stiff non-diagonal pair

@dataclass
class InfluenceWitness:
    root: object
    pair: tuple
    V: frozenset
    marginals: tuple

    def __repr__(self):
        return f"InfluenceWitness(root={self.root!r}, pair={self.pair!r}, |V|={len(self.V)})"


def boundary_influence(H: RelStructure, J: Iterable, depth: int, lam: Mapping | None = None,
                       cap: int = DEFAULT_CAP) -> tuple[Fraction, InfluenceWitness]:
    """Marginal gap at the root of a forest tree over a stiff non-diagonal pair.

    The square of the ``J``-stiff part of ``H`` is dismantled symmetrically;
    the least surviving non-diagonal pair is the root.  Walks of length below
    ``depth`` whose label is not a diagonal pair over ``J`` are free, all other
    walks are clamped to the first (resp. second) coordinate of their label.
    """
    J = H.check_elements(J)
    I, _ = greedy_dismantle(H, J)
    K, _ = symmetric_pair_dismantle(square(I))
    off = [e for e in K.universe if e[0] != e[1]]
    if not off:
        raise StructureError("no witness exists: the square dismantles to its diagonal")
    pair = off[0]
    forest = walk_forest(K, depth, cap=cap)
    T = forest.structure
    root = next(w for w in forest.roots if w.end == pair)
    tree = next(c for c in components(T) if root in c)
    Tc = induced_substructure(T, tree)
    labels = forest.labels
    V = frozenset(w for w in Tc.universe if len(w) < depth and not (labels[w][0] == labels[w][1] and labels[w][0] in J))
    spec = GibbsSpecification(Tc, H, lam)
    margs = []
    for c in (0, 1):
        phi = Homomorphism(Tc, H, {w: labels[w][c] for w in Tc.universe})
        margs.append(conditional_marginal(spec, V, phi, root, cap=cap))
    gap = max(abs(margs[0][a] - margs[1][a]) for a in H.universe)
    if gap < Fraction(1, len(H)):
        raise AssertionError(f"boundary influence {gap} is below 1/|H|")
    return gap, InfluenceWitness(root, pair, V, tuple(margs))


def hardcore_critical_activity(degree: int) -> Fraction:
    """``(d-1)^d / (d-2)^d``: the activity threshold used for the hardcore model."""
    if not isinstance(degree, int) or degree < 3:
        raise ValueError("degree must be an integer >= 3")
    return Fraction((degree - 1) ** degree, (degree - 2) ** degree)

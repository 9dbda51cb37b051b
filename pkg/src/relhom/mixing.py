"""Mixing of homomorphisms: brute-force checks and the constructive witnesses.

A ``(V, W)``-mixing query asks for one homomorphism that copies ``phi`` on
``V`` and ``psi`` on ``W`` and keeps every coordinate where both endpoints
take the same value of ``J``.  Enlarging ``W`` only adds constraints, so for a
given ``V`` and distance ``g`` the hardest choice is the set of every element
at distance at least ``g`` from ``V``.  The gap searches use exactly that set,
which makes them exact over all ``W`` for the sets ``V`` they try.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from .constructions import square, walk_forest
from .dismantling import DecisionReport
from .homgraphs import JWalk, Verdict
from .homomorphisms import DEFAULT_CAP, Homomorphism, hom_array, mixed_extension
from .structures import INFINITY, RelStructure, StructureError, components, distances_from, induced_substructure

SUBSET_LIMIT = 12


@dataclass
class MixingQuery:
    G: RelStructure
    H: RelStructure
    V: frozenset
    W: frozenset
    J: frozenset
    phi: Homomorphism
    psi: Homomorphism
    S: frozenset = frozenset()

    def __post_init__(self):
        for name in ("V", "W", "S"):
            setattr(self, name, self.G.check_elements(getattr(self, name)))
        self.J = self.H.check_elements(self.J)
        for h in (self.phi, self.psi):
            if h.source != self.G or h.target != self.H:
                raise StructureError("query homomorphisms must map G to H")

    def pins(self) -> dict | None:
        """Forced values of a mixing witness, or ``None`` if they conflict."""
        pins = {x: self.phi(x) for x in self.G.universe
                if self.phi(x) == self.psi(x) and self.phi(x) in self.J}
        for x in self.V | self.S:
            if pins.setdefault(x, self.phi(x)) != self.phi(x):
                return None
        for x in self.W:
            if pins.setdefault(x, self.psi(x)) != self.psi(x):
                return None
        return pins

    def accepts(self, gamma: Homomorphism) -> bool:
        """Independent check of a candidate witness."""
        pins = self.pins()
        return pins is not None and all(gamma(x) == v for x, v in pins.items())

    def distance(self):
        if not self.V or not self.W:
            return INFINITY
        d = distances_from(self.G, self.V)
        return min(d[w] for w in self.W)


@dataclass
class GapReport:
    property: str
    gap: int | None
    counterexample: MixingQuery | None = None
    distance: object = None
    notes: dict = field(default_factory=dict)


def vw_mixing(q: MixingQuery) -> Homomorphism | None:
    """Least mixing witness for the query, or ``None``."""
    pins = q.pins()
    if pins is None:
        return None
    gamma = mixed_extension(q.G, q.H, pins)
    if gamma is not None and not q.accepts(gamma):
        raise AssertionError("mixing witness failed validation")
    return gamma


# ---------------------------------------------------------------------------
# exhaustive gap checks over a hom array

def _pack(bits: np.ndarray) -> np.ndarray:
    """Boolean matrix -> rows of uint64 words."""
    n = bits.shape[1]
    words = max(1, (n + 63) // 64)
    out = np.zeros((bits.shape[0], words), dtype=np.uint64)
    for x in range(n):
        out[:, x // 64] |= bits[:, x].astype(np.uint64) << np.uint64(x % 64)
    return out


def _row_codes(rows: np.ndarray, cols: list[int]) -> np.ndarray:
    if not cols:
        return np.zeros(len(rows), dtype=np.int64)
    _, inv = np.unique(rows[:, cols], axis=0, return_inverse=True)
    return inv.reshape(-1)


def _superset_closure(masks: np.ndarray, nbits: int) -> np.ndarray:
    """Table over all ``nbits``-bit masks: does some given mask lie inside it?"""
    table = np.zeros(1 << nbits, dtype=bool)
    table[masks] = True
    for b in range(nbits):
        view = table.reshape(-1, 2, 1 << b)
        view[:, 1, :] |= view[:, 0, :]
    return table


def _first_failure(rows: np.ndarray, V: list[int], W: list[int], in_j: np.ndarray):
    """Least pair of rows ``(i, j)`` with no mixing witness for ``(V, W)``, or ``None``.

    A candidate ``gamma`` works for ``(phi, psi)`` iff it copies ``phi`` on
    ``V``, ``psi`` on ``W``, and every coordinate outside ``W`` where it differs
    from ``phi`` is one where ``psi`` differs from ``phi`` too (or where the
    value of ``phi`` is outside ``J``).  When ``psi`` already copies ``phi`` on
    ``V`` it is its own witness.
    """
    N, n = rows.shape
    outside_w = np.ones(n, dtype=bool)
    outside_w[W] = False
    wkey = _row_codes(rows, W)
    vkey = _row_codes(rows, V)
    for i in range(N):
        f = rows[i]
        same_v = vkey == vkey[i]
        todo = np.nonzero(~same_v)[0]
        if not len(todo):
            continue
        gam = np.nonzero(same_v)[0]
        cols = np.nonzero(outside_w & in_j[i])[0]
        differs = rows[:, cols] != f[cols]
        small = len(cols) <= 20
        if small:
            weights = (1 << np.arange(len(cols), dtype=np.int64))
            gbits = differs[gam].astype(np.int64) @ weights
            pbits = differs[todo].astype(np.int64) @ weights
        else:
            gbits = _pack(differs[gam])
            pbits = _pack(differs[todo])
        gk, pk = wkey[gam], wkey[todo]
        failing = []
        for k in np.unique(pk):
            sel = np.nonzero(pk == k)[0]
            cand = gbits[gk == k]
            if not len(cand):
                failing.append(int(todo[sel[0]]))
                continue
            if small:
                ok = _superset_closure(np.unique(cand), len(cols))[pbits[sel]]
            else:
                cand = np.unique(cand, axis=0)
                ok = np.zeros(len(sel), dtype=bool)
                step = max(1, (1 << 21) // max(1, len(cand) * cand.shape[1]))
                for lo in range(0, len(sel), step):
                    blk = pbits[sel[lo:lo + step]]
                    ok[lo:lo + step] = ((cand[None, :, :] & ~blk[:, None, :]) == 0).all(axis=2).any(axis=1)
            if not ok.all():
                failing.append(int(todo[sel[np.argmin(ok)]]))
        if failing:
            return i, min(failing)
    return None


class _Instance:
    def __init__(self, G: RelStructure, H: RelStructure, J, cap: int):
        self.G, self.H = G, H
        self.J = H.check_elements(J)
        self.rows = hom_array(G, H, cap=cap)
        j_idx = [H.index(a) for a in self.J]
        self.in_j = np.isin(self.rows, j_idx)
        n = len(G)
        self.dist = np.array([[distances_from(G, [x])[y] for y in G.universe] for x in G.universe], dtype=float)
        self.n = n

    def family(self) -> list[tuple[int, ...]]:
        """Sets V to try: singletons, spheres, and every subset of a small source."""
        n = self.n
        fam = {(i,) for i in range(n)}
        for c in range(n):
            for r in set(self.dist[c][np.isfinite(self.dist[c])].astype(int).tolist()):
                fam.add(tuple(np.nonzero(self.dist[c] == r)[0].tolist()))
        if n <= SUBSET_LIMIT:
            for k in range(2, n + 1):
                fam.update(combinations(range(n), k))
        return sorted(fam, key=lambda v: (len(v), v))

    def far(self, V, g) -> list[int]:
        d = self.dist[list(V)].min(axis=0)
        return np.nonzero(d >= g)[0].tolist()

    def fails_at(self, g: int):
        """Least failing (V, W, i, j) at distance >= g, or ``None``.

        Each tried ``V`` is paired with its far set ``W`` and then grown to the
        far set of ``W``: the pair stays at distance >= g, a failure is still a
        genuine counterexample, and success covers the smaller ``V`` too.
        """
        best = None
        seen = set()
        for V in self.family():
            W = self.far(V, g)
            if not W:
                continue
            V = tuple(self.far(W, g))
            if (V, tuple(W)) in seen:
                continue
            seen.add((V, tuple(W)))
            bad = _first_failure(self.rows, list(V), W, self.in_j)
            if bad is not None:
                d = self.dist[list(V)][:, W].min()
                if best is None or d < best[0]:
                    best = (d, V, W, bad)
        return best

    def query(self, hit) -> MixingQuery:
        d, V, W, (i, j) = hit
        G, H = self.G, self.H
        return MixingQuery(G, H, frozenset(G.universe[v] for v in V), frozenset(G.universe[w] for w in W),
                           self.J, Homomorphism.from_indices(G, H, self.rows[i]),
                           Homomorphism.from_indices(G, H, self.rows[j]))


def gap_search(G: RelStructure, H: RelStructure, J: Iterable = (), g_max: int = 4,
               cap: int = DEFAULT_CAP) -> GapReport:
    """Least gap ``g <= g_max`` with no failing query, else ``gap=None``.

    A counterexample is attached whenever some query fails: at ``gap - 1`` when
    a gap was found, at ``g_max`` otherwise; ``distance`` is its actual
    distance.
    """
    inst = _Instance(G, H, J, cap)
    prop = "strong-irreducibility" if not inst.J else "strong-J-irreducibility"
    last = None
    for g in range(g_max + 1):
        hit = inst.fails_at(g)
        if hit is None:
            rep = GapReport(prop, g)
            if last is not None:
                rep.counterexample, rep.distance = inst.query(last), _dist_value(last[0])
            return rep
        last = hit
    return GapReport(prop, None, inst.query(last), _dist_value(last[0]))


def _dist_value(d):
    return INFINITY if d == np.inf else int(d)


def tssm_check(G: RelStructure, H: RelStructure, g: int, cap: int = DEFAULT_CAP) -> Verdict:
    """Topological strong spatial mixing with gap ``g``, via strong H-irreducibility."""
    inst = _Instance(G, H, H.universe, cap)
    hit = inst.fails_at(g)
    if hit is None:
        return Verdict(True)
    return Verdict(False, inst.query(hit))


# ---------------------------------------------------------------------------
# constructive side

def _pair_map(phi: Homomorphism, psi: Homomorphism) -> dict:
    return {x: (phi(x), psi(x)) for x in phi.source.universe}


def omega(Phi: Homomorphism, X: Iterable, rets: list) -> Homomorphism:
    """Push ``Phi`` toward the diagonal: retraction index ``l - dist(x, X)`` near ``X``."""
    G = Phi.source
    X = G.check_elements(X)
    ell = len(rets) - 1
    d = distances_from(G, X)
    mapping = {}
    for x in G.universe:
        mapping[x] = rets[ell - d[x]](Phi(x)) if d[x] <= ell else Phi(x)
    return Homomorphism(G, Phi.target, mapping)


def _require_holds(report: DecisionReport):
    if not report.holds or report.retractions is None:
        raise StructureError("the decision report does not hold")


def mix_constructive(G: RelStructure, H: RelStructure, J: Iterable, V: Iterable, W: Iterable,
                     phi: Homomorphism, psi: Homomorphism, report: DecisionReport) -> Homomorphism:
    _require_holds(report)
    J = H.check_elements(J)
    if not J <= report.J:
        raise StructureError("J is larger than the one the report was built for")
    V, W = G.check_elements(V), G.check_elements(W)
    rets = report.retractions
    ell = len(rets) - 1
    if V and W:
        dv = distances_from(G, V)
        if min(dv[w] for w in W) < report.gap:
            raise StructureError(f"dist(V, W) is below the gap {report.gap}")
    near = distances_from(G, V | W)
    X = [x for x in G.universe if near[x] >= ell]
    Q = square(H)
    Phi = Homomorphism(G, Q, _pair_map(phi, psi))
    om = omega(Phi, X, rets)
    dV = distances_from(G, V)
    h = Homomorphism(G, H, {x: om(x)[0] if dV[x] < ell else om(x)[1] for x in G.universe})
    q = MixingQuery(G, H, V, W, J, phi, psi)
    if not q.accepts(h):
        raise AssertionError("constructed mixing witness failed validation")
    return h


def _omega_walk(G: RelStructure, Phi: dict, i: int, Y: frozenset, rets: list, folds: list, dcache: dict) -> list[dict]:
    """Maps ``Phi = omega_0 ... omega_{i,Y}``, one coordinate changed per step."""
    if i == 0 or not Y:
        return [dict(Phi)]
    if Y not in dcache:
        dcache[Y] = distances_from(G, Y)
    closure = frozenset(x for x, dx in dcache[Y].items() if dx <= 1)
    walk = _omega_walk(G, Phi, i - 1, closure, rets, folds, dcache)
    cur = dict(walk[-1])
    rec = folds[i - 1]
    for x in G.sort_elements(Y):
        if cur[x] == rec.removed:
            cur[x] = rec.dominator
            walk.append(dict(cur))
    return walk


def connect_constructive(G: RelStructure, H: RelStructure, J: Iterable, phi: Homomorphism,
                         psi: Homomorphism, report: DecisionReport) -> JWalk:
    """Walk from ``phi`` to ``psi`` in ``C_1(G, H)`` built by retracting the pair map."""
    _require_holds(report)
    J = H.check_elements(J)
    if not J <= report.J:
        raise StructureError("J is larger than the one the report was built for")
    folds = report.square_seq.folds
    ell = len(folds)
    D = frozenset(x for x in G.universe if phi(x) != psi(x))
    steps = _omega_walk(G, _pair_map(phi, psi), ell, D, report.retractions, folds, {})
    Q = square(H)
    for s in steps:
        Homomorphism(G, Q, s)
    if any(a != b for a, b in steps[-1].values()):
        raise AssertionError("retracted pair map is not diagonal")
    maps = [{x: v[0] for x, v in s.items()} for s in steps]
    maps += [{x: v[1] for x, v in s.items()} for s in reversed(steps)]
    homs = []
    for m in maps:
        if not homs or homs[-1].mapping != m:
            homs.append(Homomorphism(G, H, m))
    walk = JWalk(homs, J, "c1")
    if not walk.validate(1):
        raise AssertionError("constructed walk failed validation")
    return walk


def check_C2(H: RelStructure, J: Iterable, g: int, depth: int, cap: int = DEFAULT_CAP) -> Verdict:
    """Singleton-to-far mixing on the walk forest of the square, both ways.

    Each root's tree is checked on its own (mixing splits over components).
    Fails with the first root where a witness is missing in either direction.
    """
    if depth <= g:
        raise StructureError("depth must exceed g")
    J = H.check_elements(J)
    forest = walk_forest(square(H), depth, cap=cap)
    T = forest.structure
    labels = forest.labels
    for comp in components(T):
        Tc = induced_substructure(T, comp)
        root = next(w for w in Tc.universe if len(w) == 0)
        phi = Homomorphism(Tc, H, {w: labels[w][0] for w in Tc.universe})
        psi = Homomorphism(Tc, H, {w: labels[w][1] for w in Tc.universe})
        far = frozenset(w for w in Tc.universe if len(w) >= g)
        for a, b in ((phi, psi), (psi, phi)):
            q = MixingQuery(Tc, H, frozenset([root]), far, J, a, b)
            if vw_mixing(q) is None:
                return Verdict(False, root, {"query": q})
    return Verdict(True)

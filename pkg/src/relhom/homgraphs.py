"""Graphs on homomorphism sets: Hamming adjacency C_n and link adjacency L.

Homomorphisms are handled as rows of target indices (see :func:`hom_array`).
Walk searches only ever visit homomorphisms that keep fixed the coordinates on
which both endpoints agree with a value of ``J``; every walk must keep those
coordinates fixed, so this restriction loses nothing.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .constructions import link, product, square
from .homomorphisms import DEFAULT_CAP, Homomorphism, hom_array
from .structures import CapExceeded, RelStructure, StructureError, components, induced_substructure

HOMGRAPH_CAP = 10**5


@dataclass
class JWalk:
    homs: list
    J: frozenset
    view: str = "c1"

    def __len__(self):
        return len(self.homs) - 1

    def validate(self, n: int = 1) -> bool:
        """Independent re-check of adjacency and J-preservation."""
        if not self.homs:
            return False
        first, last = self.homs[0], self.homs[-1]
        G = first.source
        fixed = [x for x in G.universe if first(x) == last(x) and first(x) in self.J]
        for h in self.homs:
            if any(h(x) != first(x) for x in fixed):
                return False
        adj = (lambda a, b: cn_adjacent(a, b, n)) if self.view.startswith("c") else l_adjacent
        return all(adj(a, b) for a, b in zip(self.homs, self.homs[1:]))


@dataclass
class Verdict:
    """Boolean answer with an optional witness (walk, pair, counterexample...)."""

    holds: bool
    witness: object = None
    notes: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def cn_adjacent(phi: Homomorphism, psi: Homomorphism, n: int = 1) -> bool:
    return sum(phi(x) != psi(x) for x in phi.source.universe) <= n


def l_adjacent(phi: Homomorphism, psi: Homomorphism) -> bool:
    """Every tuple stays in the relation under every per-position choice of phi or psi."""
    G, H = phi.source, phi.target
    for name, t in G.items():
        for choice in cartesian((phi, psi), repeat=len(t)):
            if tuple(f(x) for f, x in zip(choice, t)) not in H.rel_sets[name]:
                return False
    return True


# ---------------------------------------------------------------------------
# array-level helpers

def _codes(rows: np.ndarray, m: int) -> np.ndarray:
    if rows.shape[1] * np.log2(max(m, 2)) >= 62:
        raise CapExceeded("homomorphism codes do not fit in 64 bits")
    w = (m ** np.arange(rows.shape[1], dtype=np.int64))
    return rows.astype(np.int64) @ w


def c1_components(rows: np.ndarray, m: int, coords: Iterable[int] | None = None):
    """Component labels of the graph joining rows that differ in one coordinate of ``coords``."""
    N, n = rows.shape
    if N == 0:
        return 0, np.zeros(0, dtype=np.int64)
    codes = _codes(rows, m)
    w = m ** np.arange(n, dtype=np.int64)
    src, dst = [], []
    for x in (range(n) if coords is None else coords):
        key = codes - rows[:, x].astype(np.int64) * w[x]
        order = np.argsort(key, kind="stable")
        same = key[order[1:]] == key[order[:-1]]
        src.append(order[:-1][same])
        dst.append(order[1:][same])
    src = np.concatenate(src) if src else np.zeros(0, dtype=np.int64)
    dst = np.concatenate(dst) if dst else np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(N, N))
    return connected_components(graph, directed=False)


class HomSpace:
    """``Hom(G, H)`` (optionally with pinned coordinates) with adjacency queries."""

    def __init__(self, G: RelStructure, H: RelStructure, pinned=None, cap: int = HOMGRAPH_CAP):
        self.G, self.H = G, H
        self.rows = hom_array(G, H, pinned=pinned, cap=cap)
        self.m = len(H)
        self.codes = _codes(self.rows, self.m) if len(self.rows) else np.zeros(0, dtype=np.int64)
        self._order = np.argsort(self.codes, kind="stable")
        self._sorted = self.codes[self._order]
        self._mix = None

    def __len__(self):
        return len(self.rows)

    def hom(self, i: int) -> Homomorphism:
        return Homomorphism.from_indices(self.G, self.H, self.rows[i])

    def find(self, h) -> int | None:
        row = np.array([self.H.index(h(x)) for x in self.G.universe], dtype=np.int64)
        code = int(row @ (self.m ** np.arange(len(row), dtype=np.int64)))
        i = int(np.searchsorted(self._sorted, code))
        if i < len(self._sorted) and self._sorted[i] == code:
            return int(self._order[i])
        return None

    def hamming_neighbours(self, i: int, n: int = 1) -> np.ndarray:
        d = (self.rows != self.rows[i]).sum(axis=1)
        return np.nonzero((d <= n) & (d > 0))[0]

    def _mix_tables(self):
        """Per relation: tuples of G as index columns plus the membership table of H."""
        if self._mix is None:
            self._mix = []
            for name in self.G.signature.names:
                ts = np.array(self.G.index_tuples[name], dtype=np.int64)
                if not len(ts):
                    continue
                k = ts.shape[1]
                hs = np.array(self.H.index_tuples[name], dtype=np.int64).reshape(-1, k)
                w = self.m ** np.arange(k, dtype=np.int64)
                tab = np.zeros(self.m ** k, dtype=bool)
                if len(hs):
                    tab[hs @ w] = True
                self._mix.append((ts, w, tab))
        return self._mix

    def unary_profile(self, i: int):
        """For arities <= 2: allowed values per coordinate for an L-neighbour of row ``i``."""
        f = self.rows[i].astype(np.int64)
        allowed = np.ones((self.G.__len__(), self.m), dtype=bool)
        vals = np.arange(self.m, dtype=np.int64)
        for ts, w, tab in self._mix_tables():
            k = ts.shape[1]
            if k == 1:
                continue
            for pos in range(k):
                other = 1 - pos
                codes = vals[None, :] * w[pos] + (f[ts[:, other]] * w[other])[:, None]
                ok = tab[codes]  # (s, m)
                for x in np.unique(ts[:, pos]):
                    allowed[x] &= ok[ts[:, pos] == x].all(axis=0)
        return allowed

    def l_neighbours(self, i: int) -> np.ndarray:
        """Indices of rows joined to row ``i`` in the link graph."""
        f = self.rows[i].astype(np.int64)
        ok = np.ones(len(self.rows), dtype=bool)
        rows = self.rows.astype(np.int64)
        for ts, w, tab in self._mix_tables():
            k = ts.shape[1]
            for mask in range(1, 2 ** k - 1):
                codes = np.zeros((len(rows), len(ts)), dtype=np.int64)
                for pos in range(k):
                    if mask >> pos & 1:
                        codes += rows[:, ts[:, pos]] * w[pos]
                    else:
                        codes += (f[ts[:, pos]] * w[pos])[None, :]
                ok &= tab[codes].all(axis=1)
        ok[i] = False
        return np.nonzero(ok)[0]

    def bfs(self, start: int, goal: int | None, view: str = "c1", n: int = 1):
        """Breadth-first search; returns (parents, found)."""
        parent = {start: -1}
        queue = deque([start])
        binary = view == "l" and all(ts.shape[1] <= 2 for ts, _, _ in self._mix_tables())
        expanded_profiles = set()
        rows = self.rows
        while queue:
            i = queue.popleft()
            if i == goal:
                return parent, True
            if view == "l":
                if binary:
                    prof = self.unary_profile(i)
                    key = prof.tobytes()
                    if key in expanded_profiles:
                        continue
                    expanded_profiles.add(key)
                    nb = np.nonzero(prof[np.arange(rows.shape[1]), rows].all(axis=1))[0]
                else:
                    nb = self.l_neighbours(i)
            else:
                nb = self.hamming_neighbours(i, n)
            for j in nb.tolist():
                if j not in parent:
                    parent[j] = i
                    queue.append(j)
        return parent, goal is not None and goal in parent

    def component_of(self, start: int, view: str = "c1", n: int = 1) -> set:
        parent, _ = self.bfs(start, None, view, n)
        return set(parent)

    def path(self, parent: dict, goal: int) -> list[int]:
        out = [goal]
        while parent[out[-1]] != -1:
            out.append(parent[out[-1]])
        return out[::-1]


def _view(view: str) -> tuple[str, int]:
    view = view.lower()
    if view == "l":
        return "l", 0
    if view in ("c", "c1"):
        return "c1", 1
    if view.startswith("c") and view[1:].isdigit():
        return "c", int(view[1:])
    raise ValueError(f"unknown view {view!r}")


def j_connected(G: RelStructure, H: RelStructure, J: Iterable, view: str, phi: Homomorphism,
                psi: Homomorphism, n: int | None = None, cap: int = HOMGRAPH_CAP) -> JWalk | None:
    """Shortest J-walk from ``phi`` to ``psi`` in the chosen view, or ``None``."""
    J = frozenset(J)
    kind, default_n = _view(view)
    n = default_n if n is None else n
    pinned = {x: phi(x) for x in G.universe if phi(x) == psi(x) and phi(x) in J}
    space = HomSpace(G, H, pinned, cap)
    s, t = space.find(phi), space.find(psi)
    if s is None or t is None:
        raise StructureError("endpoints are not homomorphisms")
    parent, found = space.bfs(s, t, "l" if kind == "l" else "c", n)
    if not found:
        return None
    walk = JWalk([space.hom(i) for i in space.path(parent, t)], J, "l" if kind == "l" else f"c{n}")
    if not walk.validate(n):
        raise AssertionError("J-walk failed independent validation")
    return walk


def hom_components(G: RelStructure, H: RelStructure, cap: int = HOMGRAPH_CAP) -> list[list[Homomorphism]]:
    """Components of ``C_1(G, H)``, each sorted, ordered by their least member."""
    rows = hom_array(G, H, cap=cap)
    k, labels = c1_components(rows, len(H))
    groups = {}
    for i, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(i)
    return [[Homomorphism.from_indices(G, H, rows[i]) for i in idx]
            for idx in sorted(groups.values(), key=min)]


def projections(H: RelStructure) -> tuple[Homomorphism, Homomorphism]:
    Q = square(H)
    return (Homomorphism(Q, H, {p: p[0] for p in Q.universe}),
            Homomorphism(Q, H, {p: p[1] for p in Q.universe}))


def check_B5(H: RelStructure, J: Iterable = (), cap: int = DEFAULT_CAP) -> Verdict:
    """Are the two projections of the square J-connected in the link graph?"""
    J = H.check_elements(J)
    pi1, pi2 = projections(H)
    walk = j_connected(pi1.source, H, J, "l", pi1, pi2, cap=cap)
    return Verdict(walk is not None, walk)


# ---------------------------------------------------------------------------
# all-pairs J-connectivity in C_1

def universal_element(H: RelStructure):
    """An element that may replace any set of positions of any tuple, or ``None``."""
    for u in H.universe:
        if all(tuple(u if bit else x for bit, x in zip(mask, t)) in H.rel_sets[name]
               for name, t in H.items() for mask in cartesian((0, 1), repeat=len(t))):
            return u
    return None


def universal_walk(phi: Homomorphism, psi: Homomorphism, u, J) -> JWalk:
    """Walk through the map that is ``u`` wherever the endpoints may move."""
    G = phi.source
    fixed = {x for x in G.universe if phi(x) == psi(x) and phi(x) in J}
    free = [x for x in G.universe if x not in fixed]
    cur = dict(phi.mapping)
    homs = [phi]
    for x in free:
        if cur[x] != u:
            cur[x] = u
            homs.append(Homomorphism(G, phi.target, cur))
    for x in free:
        if cur[x] != psi(x):
            cur[x] = psi(x)
            homs.append(Homomorphism(G, phi.target, cur))
    return JWalk(homs, frozenset(J))


def _connected_subsets(nodes: list, adj: dict) -> list[frozenset]:
    """Every nonempty subset of ``nodes`` inducing a connected subgraph, smallest first."""
    seen = set()
    layer = {frozenset([v]) for v in nodes}
    while layer:
        seen |= layer
        nxt = set()
        for S in layer:
            for v in S:
                for w in adj[v]:
                    if w not in S:
                        T = S | {w}
                        if T not in seen:
                            nxt.add(T)
        layer = nxt
    return sorted(seen, key=lambda S: (len(S), sorted(S)))


def _allowed_values(Gi: RelStructure, H: RelStructure, rows: np.ndarray, x: int) -> np.ndarray:
    """Bitmask per row of the values ``x`` may take with every other coordinate kept."""
    m = len(H)
    rows = rows.astype(np.int64)
    out = np.zeros(len(rows), dtype=np.int64)
    tuples = {}
    for name, ti, _ in Gi.incidence[x]:
        tuples.setdefault(name, set()).add(ti)
    for v in range(m):
        ok = np.ones(len(rows), dtype=bool)
        for name, tis in tuples.items():
            ts = np.array([Gi.index_tuples[name][ti] for ti in sorted(tis)], dtype=np.int64)
            k = ts.shape[1]
            w = m ** np.arange(k, dtype=np.int64)
            tab = np.zeros(m ** k, dtype=bool)
            hs = np.array(H.index_tuples[name], dtype=np.int64).reshape(-1, k)
            if len(hs):
                tab[hs @ w] = True
            vals = rows[:, ts]  # (N, s, k)
            vals = np.where(ts[None, :, :] == x, v, vals)
            ok &= tab[vals @ w].all(axis=1)
        out |= ok.astype(np.int64) << v
    return out


def _value_components(present: int, edges: int, m: int) -> list[int]:
    """Connected components (as value bitmasks) of a graph on at most ``m`` values."""
    comps = []
    left = present
    while left:
        v = (left & -left).bit_length() - 1
        comp, frontier = 1 << v, [v]
        while frontier:
            a = frontier.pop()
            nb = (edges >> (m * a)) & ((1 << m) - 1) & present
            new = nb & ~comp
            comp |= new
            frontier.extend(b for b in range(m) if new >> b & 1)
        comps.append(comp)
        left &= ~comp
    return comps


def _class_failure(Gi: RelStructure, H: RelStructure, rows: np.ndarray, J_idx: np.ndarray,
                   free: list[int], allowed_cache: dict):
    """A pair of rows in one pinned class but different components, or ``None``.

    Classes pin everything outside ``free`` to values in ``J``; only the
    boundary of ``free`` matters for which assignments of ``free`` extend.
    With ``J`` the whole of ``H`` the caller guarantees that pinning any one
    more coordinate leaves connected classes, so a class is connected iff the
    values taken at a single free coordinate are linked by single moves.
    """
    m = len(H)
    n = len(Gi)
    free_set = set(free)
    bd = sorted({b for x in free for b in Gi.neighbours[x]} - free_set)
    w = m ** np.arange(len(bd), dtype=np.int64)
    key = rows[:, bd].astype(np.int64) @ w if bd else np.zeros(len(rows), dtype=np.int64)
    if len(J_idx) == m and m * m < 63:
        x = free[0]
        if x not in allowed_cache:
            allowed_cache[x] = _allowed_values(Gi, H, rows, x)
        order = np.argsort(key, kind="stable")
        ks = key[order]
        if not len(ks):
            return None
        starts = np.flatnonzero(np.r_[True, ks[1:] != ks[:-1]])
        val = rows[order, x].astype(np.int64)
        present = np.bitwise_or.reduceat(np.left_shift(1, val), starts)
        edges = np.bitwise_or.reduceat(np.left_shift(allowed_cache[x][order], m * val), starts)
        combos, first = np.unique(np.stack([present, edges], axis=1), axis=0, return_index=True)
        for (p, e), c in sorted(zip(combos.tolist(), first.tolist()), key=lambda t: t[1]):
            comps = _value_components(p, e, m)
            if len(comps) > 1:
                lo = starts[c]
                hi = starts[c + 1] if c + 1 < len(starts) else len(order)
                cls = order[lo:hi]
                v = rows[cls, x].astype(np.int64)
                a = cls[np.nonzero((comps[0] >> v) & 1)[0][0]]
                b = cls[np.nonzero((comps[1] >> v) & 1)[0][0]]
                return int(min(a, b)), int(max(a, b))
        return None
    pinned = [y for y in range(n) if y not in free_set]
    in_j = np.isin(rows, J_idx)
    eligible = in_j[:, pinned].all(axis=1) if pinned else np.ones(len(rows), dtype=bool)
    member = np.isin(key, np.unique(key[eligible]))
    # general J: components of each class through moves on the free coordinates
    idx = np.nonzero(member)[0]
    cols = bd + sorted(free)
    sub, first = np.unique(rows[idx][:, cols], axis=0, return_index=True)
    k = len(bd)
    _, labels = c1_components(sub, m, range(k, len(cols)))
    ckey = sub[:, :k].astype(np.int64) @ w if k else np.zeros(len(sub), dtype=np.int64)
    pairs = np.unique(np.stack([ckey, labels]), axis=1)
    if pairs.shape[1] == len(np.unique(ckey)):
        return None
    kk, counts = np.unique(pairs[0], return_counts=True)
    bad = kk[counts > 1][0]
    members = np.nonzero(ckey == bad)[0]
    a = members[0]
    b = next(j for j in members if labels[j] != labels[a])
    return int(idx[first[a]]), int(idx[first[b]])


def check_B3(H: RelStructure, J: Iterable = (), cap: int = DEFAULT_CAP) -> Verdict:
    """Is ``C_1(L x H², H)`` J-connected (every pair joined by a J-walk)?

    Two homomorphisms are J-connected iff they lie in one component of their
    class: the homomorphisms that keep every coordinate where both take the
    same value of ``J``.  So the property says every such class is connected.

    Reductions, all exact:

    * the source splits into components and the property holds iff it holds
      on each; single elements are trivially fine;
    * a universal element of ``H`` (one that may replace any positions of any
      tuple) gives an explicit walk for every pair;
    * with ``J`` empty there is a single class per component;
    * otherwise take a disconnected class with the most pinned coordinates.
      Its components use disjoint values at every free coordinate (pinning a
      shared value would give a connected class meeting both).  The points
      ``(0, q)`` and ``(1, q)`` of the source are twins, so if just one of them
      were free it could always move to the other's pinned value, a shared
      value.  The free set is thus a union of twin pairs over a connected set
      of the square, and these are scanned smallest first.
    """
    J = H.check_elements(J)
    G = product(link(1, H.signature), square(H))
    u = universal_element(H)
    notes = {"components": 0, "universal": u, "free_sets": 0}
    J_idx = np.array(sorted(H.index(a) for a in J), dtype=np.int64)
    for comp in components(G):
        notes["components"] += 1
        if len(comp) == 1 or u is not None:
            continue
        Gi = induced_substructure(G, comp)
        rows = hom_array(Gi, H, cap=cap)

        def witness(pair):
            return Verdict(False, tuple(Homomorphism.from_indices(Gi, H, rows[i]) for i in pair), notes)

        if not J:
            k, labels = c1_components(rows, len(H))
            if k > 1:
                return witness((0, int(np.nonzero(labels != labels[0])[0][0])))
            continue
        qs = sorted({x[1] for x in Gi.universe}, key=lambda q: Gi.index((0, q)))
        adj = {q: {Gi.universe[b][1] for b in Gi.neighbours[Gi.index((0, q))]} - {q} for q in qs}
        looped = {q for q in qs if Gi.index((1, q)) in Gi.neighbours[Gi.index((0, q))]}
        cache = {}
        for FQ in _connected_subsets(qs, adj):
            if len(FQ) == 1 and not FQ & looped:
                continue
            notes["free_sets"] += 1
            free = sorted(Gi.index((i, q)) for q in FQ for i in (0, 1))
            bad = _class_failure(Gi, H, rows, J_idx, free, cache)
            if bad is not None:
                return witness(bad)
    return Verdict(True, None, notes)


def link_walk_correspondence(G: RelStructure, H: RelStructure, length: int, cap: int = HOMGRAPH_CAP) -> Verdict:
    """Compare ``|Hom(L_length x G, H)|`` with the number of length-``length`` walks in ``L(G, H)``."""
    if length < 1:
        raise ValueError("length must be >= 1")
    space = HomSpace(G, H, cap=cap)
    N = len(space)
    adj = np.zeros((N, N), dtype=object)
    for i in range(N):
        adj[i, i] = 1
        for j in space.l_neighbours(i).tolist():
            adj[i, j] = 1
    vec = np.ones(N, dtype=object)
    for _ in range(length):
        vec = adj.dot(vec)
    walks = int(vec.sum()) if N else 0
    lhs = len(hom_array(product(link(length, G.signature), G), H, cap=cap * max(1, N) + 1))
    return Verdict(lhs == walks, None, {"homs": lhs, "walks": walks})

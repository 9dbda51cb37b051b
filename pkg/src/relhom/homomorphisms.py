"""Homomorphism search: enumeration, partial extension and label rigidity.

Enumeration explores the canonical search tree level by level with numpy:
all partial assignments of the first ``k`` variables are extended by every
value of variable ``k+1`` and rows violating a tuple whose members are all
assigned are dropped.  This is backtracking with forward pruning evaluated in
breadth-first order, so the output is the same set in the same
lexicographic order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .constructions import walk_forest
from .dismantling import dominated_elements
from .structures import CapExceeded, RelStructure, StructureError

DEFAULT_CAP = 10**6
WORK_FACTOR = 8
TABLE_LIMIT = 1 << 24


class Homomorphism:
    """A validated total map ``source -> target``."""

    __slots__ = ("source", "target", "mapping", "_key")

    def __init__(self, source: RelStructure, target: RelStructure, mapping: Mapping, check: bool = True):
        self.source, self.target = source, target
        self.mapping = dict(mapping)
        if check:
            bad = violated_tuple(source, target, self.mapping)
            if bad is not None:
                raise StructureError(f"not a homomorphism: {bad[0]}{bad[1]!r} is not preserved")
        self._key = None

    @classmethod
    def from_indices(cls, source, target, row) -> "Homomorphism":
        tu = target.universe
        return cls(source, target, {x: tu[int(v)] for x, v in zip(source.universe, row)}, check=False)

    def __call__(self, x):
        return self.mapping[x]

    def __getitem__(self, x):
        return self.mapping[x]

    def values(self) -> tuple:
        return tuple(self.mapping[x] for x in self.source.universe)

    def indices(self) -> tuple:
        return tuple(self.target.index(self.mapping[x]) for x in self.source.universe)

    def key(self) -> tuple:
        if self._key is None:
            self._key = self.indices()
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return self.mapping == other.mapping

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        from .structures import element_token
        body = ", ".join(f"{element_token(x)}->{element_token(self.mapping[x])}" for x in self.source.universe)
        return f"Hom({body})"

    def restrict(self, S: Iterable) -> dict:
        return {x: self.mapping[x] for x in S}

    def compose(self, after: "Homomorphism") -> "Homomorphism":
        """``after ∘ self``."""
        return Homomorphism(self.source, after.target, {x: after(self(x)) for x in self.source.universe})


def violated_tuple(G: RelStructure, H: RelStructure, mapping: Mapping, partial: bool = False):
    """First tuple of ``G`` whose image is not in ``H``; ``None`` when the map is valid.

    With ``partial`` only tuples lying entirely inside the mapped set are checked.
    """
    if G.signature != H.signature:
        raise StructureError("signature mismatch")
    for x in G.universe:
        if x not in mapping:
            if not partial:
                raise StructureError(f"map undefined on {x!r}")
        elif mapping[x] not in H:
            raise StructureError(f"image {mapping[x]!r} not in target")
    for name, t in G.items():
        if partial and not all(x in mapping for x in t):
            continue
        if tuple(mapping[x] for x in t) not in H.rel_sets[name]:
            return name, t
    return None


def is_homomorphism(G: RelStructure, H: RelStructure, mapping: Mapping) -> bool:
    try:
        return violated_tuple(G, H, mapping) is None
    except StructureError:
        return False


@dataclass(frozen=True)
class PartialMap:
    """Assignments on a subset of the source that violate no tuple inside that subset."""

    source: RelStructure
    target: RelStructure
    assignments: tuple

    @classmethod
    def of(cls, source, target, mapping: Mapping) -> "PartialMap":
        mapping = dict(mapping)
        source.check_elements(mapping)
        bad = violated_tuple(source, target, mapping, partial=True)
        if bad is not None:
            raise StructureError(f"partial map violates {bad[0]}{bad[1]!r}")
        return cls(source, target, tuple((x, mapping[x]) for x in source.sort_elements(mapping)))

    @property
    def mapping(self) -> dict:
        return dict(self.assignments)

    @property
    def domain(self) -> frozenset:
        return frozenset(x for x, _ in self.assignments)


# ---------------------------------------------------------------------------
# compiled constraint problems

class Problem:
    """Index-level view of ``Hom(G, H)`` with optional per-variable domains."""

    def __init__(self, G: RelStructure, H: RelStructure, domains=None):
        if G.signature != H.signature:
            raise StructureError("signature mismatch between source and target")
        self.G, self.H = G, H
        self.n, self.m = len(G), len(H)
        self.constraints = []
        for name in G.signature.names:
            for t in G.index_tuples[name]:
                self.constraints.append((name, t))
        self.tables = {}
        self.domains = [list(range(self.m)) for _ in range(self.n)]
        if domains:
            for x, vals in domains.items():
                self.domains[x] = sorted(set(vals))

    def table(self, name):
        """Membership table of ``R(H)`` indexed by mixed-radix codes, or a sorted code array."""
        if name not in self.tables:
            k = self.H.signature.arity(name)
            ts = np.array(self.H.index_tuples[name], dtype=np.int64).reshape(-1, k)
            weights = self.m ** np.arange(k, dtype=np.int64)
            codes = ts @ weights if len(ts) else np.zeros(0, dtype=np.int64)
            if self.m ** k <= TABLE_LIMIT:
                tab = np.zeros(self.m ** k, dtype=bool)
                tab[codes] = True
                self.tables[name] = ("dense", tab, weights)
            else:
                self.tables[name] = ("sparse", np.unique(codes), weights)
        return self.tables[name]

    def check_rows(self, rows: np.ndarray, name, scopes: np.ndarray) -> np.ndarray:
        """Boolean mask of rows satisfying every scope (columns of ``rows``) of relation ``name``."""
        kind, tab, weights = self.table(name)
        chunk = max(1, (1 << 22) // max(1, scopes.size))
        out = np.empty(len(rows), dtype=bool)
        for lo in range(0, len(rows), chunk):
            codes = rows[lo:lo + chunk][:, scopes].astype(np.int64) @ weights  # (chunk, s)
            if kind == "dense":
                ok = tab[codes]
            elif len(tab):
                pos = np.minimum(np.searchsorted(tab, codes), len(tab) - 1)
                ok = tab[pos] == codes
            else:
                ok = np.zeros(codes.shape, dtype=bool)
            out[lo:lo + chunk] = ok.all(axis=1)
        return out

    def search_order(self) -> list:
        """Connectivity-greedy variable order (ties by canonical order)."""
        touching = [set() for _ in range(self.n)]
        for c, (_, t) in enumerate(self.constraints):
            for x in t:
                touching[x].add(c)
        placed, order = [False] * self.n, []
        score = [0] * self.n
        remaining = set(range(self.n))
        while remaining:
            x = min(remaining, key=lambda v: (-score[v], len(self.domains[v]), v))
            remaining.discard(x)
            placed[x] = True
            order.append(x)
            for c in touching[x]:
                for y in self.constraints[c][1]:
                    if not placed[y]:
                        score[y] += 1
        return order

    def solve_all(self, cap: int = DEFAULT_CAP, order=None) -> np.ndarray:
        """All solutions as an ``(N, n)`` array sorted lexicographically."""
        if order is None:
            order = self.search_order()
        pos = {x: k for k, x in enumerate(order)}
        by_step = [dict() for _ in range(self.n)]
        for name, t in self.constraints:
            step = max(pos[x] for x in t)
            by_step[step].setdefault(name, []).append([pos[x] for x in t])
        dtype = np.int16 if self.m < 2**15 else np.int32
        rows = np.zeros((1, 0), dtype=dtype)
        work_cap = cap * WORK_FACTOR + 1024
        for k, x in enumerate(order):
            dom = np.array(self.domains[x], dtype=dtype)
            N = len(rows)
            if N * len(dom) > work_cap:
                raise CapExceeded(f"search frontier exceeds {work_cap} partial assignments", N)
            rows = np.concatenate([np.repeat(rows, len(dom), axis=0),
                                   np.tile(dom, N)[:, None]], axis=1)
            for name, scopes in by_step[k].items():
                if not len(rows):
                    break
                rows = rows[self.check_rows(rows, name, np.array(scopes, dtype=np.int64))]
            if not len(rows):
                break
        if len(rows) > cap:
            raise CapExceeded(f"more than {cap} homomorphisms", len(rows))
        if not len(rows):
            return np.zeros((0, self.n), dtype=dtype)
        out = rows[:, [pos[x] for x in range(self.n)]]
        if order != list(range(self.n)):
            out = out[np.lexsort(out.T[::-1])]
        return out

    # -- propagation based search ----------------------------------------
    def gac(self, domains=None):
        """Generalized arc consistency; returns pruned domains (sets) or ``None`` on wipe-out."""
        doms = [set(d) for d in (domains if domains is not None else self.domains)]
        if not all(doms):
            return None
        Hrels = self.H.index_tuples
        watch = [[] for _ in range(self.n)]
        for c, (_, t) in enumerate(self.constraints):
            for x in set(t):
                watch[x].append(c)
        queue = list(range(len(self.constraints)))
        queued = set(queue)
        while queue:
            c = queue.pop()
            queued.discard(c)
            name, t = self.constraints[c]
            supported = [set() for _ in t]
            for s in Hrels[name]:
                ok = True
                seen = {}
                for x, v in zip(t, s):
                    if v not in doms[x] or seen.setdefault(x, v) != v:
                        ok = False
                        break
                if ok:
                    for i, v in enumerate(s):
                        supported[i].add(v)
            for x in set(t):
                keep = set.intersection(*(supported[i] for i, y in enumerate(t) if y == x))
                if keep != doms[x]:
                    doms[x] &= keep
                    if not doms[x]:
                        return None
                    for c2 in watch[x]:
                        if c2 != c and c2 not in queued:
                            queued.add(c2)
                            queue.append(c2)
        return doms

    def first_solution(self, domains=None):
        """Least solution in canonical order (depth-first, arc consistency maintained)."""
        doms = self.gac(domains)
        if doms is None:
            return None

        def dfs(doms):
            x = next((v for v in range(self.n) if len(doms[v]) > 1), None)
            if x is None:
                return [next(iter(d)) for d in doms]
            for v in sorted(doms[x]):
                trial = list(doms)
                trial[x] = {v}
                trial = self.gac(trial)
                if trial is not None:
                    found = dfs(trial)
                    if found is not None:
                        return found
            return None

        return dfs(doms)


def _domains_from(G, H, pinned: Mapping | None, domains: Mapping | None):
    out = {}
    for x, vals in (domains or {}).items():
        out[G.index(x)] = [H.index(v) for v in vals]
    for x, v in (pinned or {}).items():
        out[G.index(x)] = [H.index(v)]
    return out


def hom_array(G: RelStructure, H: RelStructure, pinned: Mapping | None = None,
              domains: Mapping | None = None, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All homomorphisms as rows of target indices, lexicographically sorted."""
    prob = Problem(G, H, _domains_from(G, H, pinned, domains))
    return prob.solve_all(cap)


def enumerate_homs(G: RelStructure, H: RelStructure, cap: int = DEFAULT_CAP,
                   pinned: Mapping | None = None) -> list[Homomorphism]:
    if cap < 1:
        raise ValueError("cap must be >= 1")
    rows = hom_array(G, H, pinned=pinned, cap=cap)
    return [Homomorphism.from_indices(G, H, r) for r in rows]


def count_homs(G: RelStructure, H: RelStructure, cap: int = DEFAULT_CAP) -> int:
    return len(hom_array(G, H, cap=cap))


def extend_partial(G: RelStructure, H: RelStructure, p) -> Homomorphism | None:
    """Least extension of a partial map to a homomorphism, or ``None``."""
    mapping = p.mapping if isinstance(p, PartialMap) else dict(p)
    if violated_tuple(G, H, mapping, partial=True) is not None:
        return None
    prob = Problem(G, H, _domains_from(G, H, mapping, None))
    sol = prob.first_solution()
    if sol is None:
        return None
    return Homomorphism(G, H, {x: H.universe[v] for x, v in zip(G.universe, sol)})


def mixed_extension(G, H, pinned: Mapping, domains: Mapping | None = None):
    """Least homomorphism agreeing with ``pinned`` and drawing from ``domains``."""
    prob = Problem(G, H, _domains_from(G, H, pinned, domains))
    sol = prob.first_solution()
    if sol is None:
        return None
    return Homomorphism(G, H, {x: H.universe[v] for x, v in zip(G.universe, sol)})


# ---------------------------------------------------------------------------
# rigidity of the label map

@dataclass
class RigidityResult:
    holds: bool
    witness: Homomorphism | None
    forest_size: int
    level_check: bool

    def __bool__(self):
        return self.holds


def label_rigidity(H: RelStructure, J: Iterable, depth: int) -> RigidityResult:
    """Is the label map of the depth-truncated walk forest the only homomorphism
    agreeing with it on the deepest level and on the walks ending in ``J``?

    Two routes are computed.  The search route prunes the clamped problem to
    arc consistency; walk forests are acyclic, so every surviving value
    extends to a full homomorphism and rigidity means every domain is a
    singleton.  The level route climbs from the deepest level: the value of a
    walk is constrained only by the tuples it centres (its children are
    already known), so its candidates are the elements dominating its label.
    The two verdicts must agree.
    """
    J = H.check_elements(J)
    if depth < 1:
        raise StructureError("depth must be >= 1")
    if dominated_elements(H, J):
        raise StructureError("structure is not J-non-foldable")
    forest = walk_forest(H, depth)
    F = forest.structure
    pinned = {w: w.end for w in F.universe if len(w) == depth or w.end in J}

    # search route
    prob = Problem(F, H, _domains_from(F, H, pinned, None))
    doms = prob.gac()
    if doms is None:
        raise AssertionError("label map violates its own clamp")
    labels = [H.index(w.end) for w in F.universe]
    witness = None
    loose = next((i for i, d in enumerate(doms) if len(d) > 1), None)
    if loose is not None:
        other = min(v for v in doms[loose] if v != labels[loose])
        trial = list(doms)
        trial[loose] = {other}
        sol = prob.first_solution(trial)
        if sol is None:
            raise AssertionError("arc-consistent value failed to extend on a forest")
        witness = Homomorphism(F, H, {x: H.universe[v] for x, v in zip(F.universe, sol)})
    search_rigid = loose is None

    # level route: candidates for a walk given its children carry their labels
    known = dict(pinned)
    level_rigid = True
    centred = {}
    for name, ts in F.relations.items():
        for t in ts:
            centre = min(t, key=len)
            centred.setdefault(centre, []).append((name, t))
    for n in range(depth - 1, -1, -1):
        for w in forest.level(n):
            if w in known:
                continue
            cands = []
            for v in H.universe:
                if all(tuple(v if y is w else known.get(y, y.end) for y in t) in H.rel_sets[name]
                       for name, t in centred.get(w, ())):
                    cands.append(v)
            if cands != [w.end]:
                level_rigid = False
            known[w] = w.end
    if search_rigid != level_rigid:
        raise AssertionError("search and level routes disagree on label rigidity")
    return RigidityResult(search_rigid, witness, len(F), level_rigid)

"""Finite relational structures: signatures, parsing, substructures and walks.

Elements are arbitrary hashable values.  Parsed structures use string tokens;
derived structures use tuples for pairs (products) and :class:`Walk` objects
(walk forests).  The order of ``universe`` is the canonical total order used
for every tie-break in the library.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Hashable, Iterable, Mapping

INFINITY = math.inf

NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")
# compound element tokens produced by constructions: pairs "(a|b)", walks "r:1.E.0.2"
TOKEN_RE = re.compile(r"[A-Za-z0-9_.:|()]+\Z")


class StructureError(ValueError):
    """Invalid structure, element or signature."""


class ParseError(StructureError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapExceeded(RuntimeError):
    """A configured resource cap was hit; results would be truncated."""

    def __init__(self, message: str, partial_count: int | None = None):
        self.partial_count = partial_count
        super().__init__(message)


@dataclass(frozen=True)
class Signature:
    """Ordered relation symbols with their arities."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        for name, arity in self.symbols:
            if not isinstance(name, str) or not NAME_RE.match(name):
                raise StructureError(f"bad relation symbol name {name!r}")
            if name in seen:
                raise StructureError(f"duplicate relation symbol {name!r}")
            if not isinstance(arity, int) or arity < 1:
                raise StructureError(f"arity of {name!r} must be a positive integer")
            seen.add(name)

    @classmethod
    def of(cls, spec) -> "Signature":
        """Coerce ``"R/2 S/3"``, a mapping, or ``[(name, arity), ...]``."""
        if isinstance(spec, Signature):
            return spec
        if isinstance(spec, str):
            pairs = []
            for item in spec.replace(",", " ").split():
                name, _, arity = item.partition("/")
                if not arity.isdigit():
                    raise StructureError(f"bad symbol spec {item!r}")
                pairs.append((name, int(arity)))
            return cls(tuple(pairs))
        if isinstance(spec, Mapping):
            return cls(tuple((str(k), int(v)) for k, v in spec.items()))
        return cls(tuple((str(k), int(v)) for k, v in spec))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    def arity(self, name: str) -> int:
        for n, k in self.symbols:
            if n == name:
                return k
        raise StructureError(f"unknown relation symbol {name!r}")

    def __contains__(self, name) -> bool:
        return any(n == name for n, _ in self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return " ".join(f"{n}/{k}" for n, k in self.symbols)


class RelStructure:
    """A finite structure: a nonempty ordered universe and one relation per symbol.

    Relations are stored deduplicated and sorted by the universe order, so two
    structures with the same universe order and tuple sets compare equal.
    """

    def __init__(self, signature, universe: Iterable[Hashable], relations: Mapping | None = None):
        self.signature = Signature.of(signature)
        self.universe = tuple(universe)
        if not self.universe:
            raise StructureError("empty universe")
        index = {}
        for i, e in enumerate(self.universe):
            if e in index:
                raise StructureError(f"duplicate element {e!r}")
            index[e] = i
        self._index = index
        relations = dict(relations or {})
        unknown = set(relations) - set(self.signature.names)
        if unknown:
            raise StructureError(f"relations for unknown symbols: {sorted(unknown)}")
        rels = {}
        for name, arity in self.signature:
            seen = set()
            for t in relations.get(name, ()):
                t = tuple(t)
                if len(t) != arity:
                    raise StructureError(f"tuple {t!r} has length {len(t)}, {name} has arity {arity}")
                for e in t:
                    if e not in index:
                        raise StructureError(f"tuple {t!r} of {name} mentions unknown element {e!r}")
                seen.add(t)
            rels[name] = tuple(sorted(seen, key=lambda t: tuple(index[e] for e in t)))
        self.relations = rels

    # -- basic protocol -------------------------------------------------
    def __len__(self):
        return len(self.universe)

    def __contains__(self, e):
        return e in self._index

    def __iter__(self):
        return iter(self.universe)

    def __eq__(self, other):
        if not isinstance(other, RelStructure):
            return NotImplemented
        return (self.signature == other.signature and self.universe == other.universe
                and self.relations == other.relations)

    def __hash__(self):
        return hash((self.signature, self.universe, tuple(self.relations.items())))

    def __repr__(self):
        sizes = ", ".join(f"{n}:{len(ts)}" for n, ts in self.relations.items())
        return f"<RelStructure |U|={len(self.universe)} {sizes}>"

    def index(self, e) -> int:
        try:
            return self._index[e]
        except KeyError:
            raise StructureError(f"unknown element {e!r}") from None

    def check_elements(self, elems: Iterable) -> frozenset:
        elems = frozenset(elems)
        for e in elems:
            if e not in self._index:
                raise StructureError(f"unknown element {e!r}")
        return elems

    def sort_elements(self, elems: Iterable) -> list:
        return sorted(elems, key=self.index)

    def tuples(self, name: str) -> tuple:
        return self.relations[name]

    def items(self):
        """Iterate ``(symbol, tuple)`` pairs in canonical order."""
        for name in self.signature.names:
            for t in self.relations[name]:
                yield name, t

    @property
    def n_tuples(self) -> int:
        return sum(len(ts) for ts in self.relations.values())

    # -- cached views ---------------------------------------------------
    @cached_property
    def rel_sets(self) -> dict[str, frozenset]:
        return {n: frozenset(ts) for n, ts in self.relations.items()}

    @cached_property
    def index_tuples(self) -> dict[str, tuple]:
        """Relations with elements replaced by their universe indices."""
        ix = self._index
        return {n: tuple(tuple(ix[e] for e in t) for t in ts) for n, ts in self.relations.items()}

    @cached_property
    def index_sets(self) -> dict[str, frozenset]:
        return {n: frozenset(ts) for n, ts in self.index_tuples.items()}

    @cached_property
    def neighbours(self) -> tuple[frozenset, ...]:
        """For each element index, indices joined to it by a walk of length 1."""
        nb = [set() for _ in self.universe]
        for ts in self.index_tuples.values():
            for t in ts:
                for i, a in enumerate(t):
                    for j, b in enumerate(t):
                        if i != j:
                            nb[a].add(b)
        return tuple(frozenset(s) for s in nb)

    @cached_property
    def incidence(self) -> tuple[tuple, ...]:
        """Per element index, the ``(symbol, tuple_index, position)`` occurrences (0-based)."""
        occ = [[] for _ in self.universe]
        for name, ts in self.index_tuples.items():
            for ti, t in enumerate(ts):
                for pos, a in enumerate(t):
                    occ[a].append((name, ti, pos))
        return tuple(tuple(o) for o in occ)

    def degree(self, e) -> int:
        """Number of tuples in which ``e`` occurs."""
        return len({(n, ti) for n, ti, _ in self.incidence[self.index(e)]})

    def is_locally_finite(self) -> bool:
        return True

    def reduct(self, names: Iterable[str]) -> "RelStructure":
        """Keep only the given symbols (in signature order)."""
        names = set(names)
        sig = Signature(tuple(s for s in self.signature if s[0] in names))
        return RelStructure(sig, self.universe, {n: self.relations[n] for n in sig.names})

    def relabel(self, mapping: Mapping) -> "RelStructure":
        """Rename elements through an injective ``mapping``."""
        return RelStructure(self.signature, [mapping[e] for e in self.universe],
                            {n: [tuple(mapping[e] for e in t) for t in ts]
                             for n, ts in self.relations.items()})


def structure(signature, universe, **relations) -> RelStructure:
    """Convenience constructor: ``structure("E/2", "xyz", E=[("x","y")])``."""
    return RelStructure(signature, universe, relations)


# ---------------------------------------------------------------------------
# text format

def element_token(e) -> str:
    """Render an element as a whitespace-free token."""
    if isinstance(e, str):
        return e
    if isinstance(e, bool):
        raise StructureError(f"cannot render element {e!r}")
    if isinstance(e, int):
        return str(e)
    token = getattr(e, "token", None)
    if token is not None:
        return token()
    if isinstance(e, tuple) and len(e) == 2:
        return f"({element_token(e[0])}|{element_token(e[1])})"
    raise StructureError(f"cannot render element {e!r}")


def render_structure(H: RelStructure) -> str:
    lines = [f"signature {H.signature}" if len(H.signature) else "signature",
             "universe " + " ".join(element_token(e) for e in H.universe)]
    for name in H.signature.names:
        ts = H.relations[name]
        if ts:
            body = " ".join("(" + ",".join(element_token(e) for e in t) + ")" for t in ts)
            lines.append(f"rel {name} = {body}")
    return "\n".join(lines) + "\n"


def _check_token(tok: str, lineno: int) -> str:
    if not TOKEN_RE.match(tok):
        raise ParseError(f"bad element name {tok!r}", lineno)
    depth = 0
    for ch in tok:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            break
    if depth != 0:
        raise ParseError(f"unbalanced parentheses in {tok!r}", lineno)
    return tok


def _split_tuples(body: str, lineno: int) -> list[list[str]]:
    tuples, i, n = [], 0, len(body)
    while i < n:
        if body[i].isspace():
            i += 1
            continue
        if body[i] != "(":
            raise ParseError(f"expected '(' at {body[i:i + 12]!r}", lineno)
        depth, j, start, parts = 0, i, i + 1, []
        while j < n:
            ch = body[j]
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    parts.append(body[start:j])
                    break
            elif ch == "," and depth == 1:
                parts.append(body[start:j])
                start = j + 1
            j += 1
        else:
            raise ParseError("unterminated tuple", lineno)
        tuples.append([_check_token("".join(p.split()), lineno) for p in parts])
        i = j + 1
    return tuples


def parse_structure(text: str | bytes) -> RelStructure:
    """Parse the line-oriented structure format (see README)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    signature = universe = None
    rel_lines = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if signature is None:
            if keyword != "signature":
                raise ParseError("first line must be the signature line", lineno)
            pairs = []
            for item in rest.split():
                name, slash, arity = item.partition("/")
                if not slash or not NAME_RE.match(name) or not arity.isdigit():
                    raise ParseError(f"bad symbol {item!r}", lineno)
                if int(arity) < 1:
                    raise ParseError(f"arity of {name} must be >= 1", lineno)
                if name in (p[0] for p in pairs):
                    raise ParseError(f"duplicate symbol {name!r}", lineno)
                pairs.append((name, int(arity)))
            signature = Signature(tuple(pairs))
        elif keyword == "universe":
            if universe is not None:
                raise ParseError("second universe line", lineno)
            universe = [_check_token(tok, lineno) for tok in rest.split()]
            if not universe:
                raise ParseError("empty universe", lineno)
            if len(set(universe)) != len(universe):
                dup = next(u for u in universe if universe.count(u) > 1)
                raise ParseError(f"duplicate element {dup!r}", lineno)
        elif keyword == "rel":
            if universe is None:
                raise ParseError("rel line before universe line", lineno)
            name, eq, body = rest.partition("=")
            name = name.strip()
            if not eq:
                raise ParseError("expected 'rel NAME = ...'", lineno)
            if name not in signature:
                raise ParseError(f"unknown relation symbol {name!r}", lineno)
            if name in rel_lines:
                raise ParseError(f"second rel line for {name!r}", lineno)
            arity = signature.arity(name)
            members = set(universe)
            tuples = []
            for t in _split_tuples(body, lineno):
                if len(t) != arity:
                    raise ParseError(f"arity mismatch: {name} has arity {arity}, got {len(t)}", lineno)
                for e in t:
                    if e not in members:
                        raise ParseError(f"unknown element {e!r}", lineno)
                tuples.append(tuple(t))
            rel_lines[name] = tuples
        else:
            raise ParseError(f"unexpected keyword {keyword!r}", lineno)
    if signature is None:
        raise ParseError("missing signature line")
    if universe is None:
        raise ParseError("missing universe line")
    return RelStructure(signature, universe, rel_lines)


def load_structure(path) -> RelStructure:
    with open(path, "rb") as fh:
        return parse_structure(fh.read())


# ---------------------------------------------------------------------------
# substructures, isomorphism

def induced_substructure(H: RelStructure, S: Iterable) -> RelStructure:
    S = H.check_elements(S)
    universe = [e for e in H.universe if e in S]
    return RelStructure(H.signature, universe,
                        {n: [t for t in ts if all(e in S for e in t)] for n, ts in H.relations.items()})


def _profile(H: RelStructure, i: int):
    """Isomorphism-invariant occurrence profile of element index ``i``."""
    counts = {}
    for name, ti, pos in H.incidence[i]:
        t = H.index_tuples[name][ti]
        key = (name, pos, tuple(x == i for x in t))
        counts[key] = counts.get(key, 0) + 1
    return tuple(sorted(counts.items()))


def is_isomorphic(H1: RelStructure, H2: RelStructure, fixed: Iterable = ()) -> dict | None:
    """Find a bijection that is a homomorphism both ways and fixes ``fixed``.

    Exhaustive backtracking; candidates are pruned by occurrence profiles.
    """
    fixed = list(fixed)
    H1.check_elements(fixed)
    H2.check_elements(fixed)
    if H1.signature != H2.signature or len(H1) != len(H2):
        return None
    if any(len(H1.relations[n]) != len(H2.relations[n]) for n in H1.signature.names):
        return None
    n = len(H1)
    prof1 = [_profile(H1, i) for i in range(n)]
    prof2 = [_profile(H2, i) for i in range(n)]
    if sorted(prof1) != sorted(prof2):
        return None
    pinned = {H1.index(e): H2.index(e) for e in fixed}
    # tuples to check once all their members are assigned
    order = sorted(range(n), key=lambda i: (i not in pinned, -len(H1.incidence[i]), i))
    pos_in_order = {v: k for k, v in enumerate(order)}
    checks = [[] for _ in range(n)]
    for name, ts in H1.index_tuples.items():
        for t in ts:
            checks[max(pos_in_order[x] for x in t)].append((name, t))
    sets2 = H2.index_sets
    image = [None] * n
    used = [False] * n

    def extend(k):
        if k == n:
            return True
        x = order[k]
        cands = [pinned[x]] if x in pinned else [y for y in range(n) if prof2[y] == prof1[x]]
        for y in cands:
            if used[y] or (x not in pinned and y in pinned.values()):
                continue
            image[x] = y
            if all(tuple(image[z] for z in t) in sets2[name] for name, t in checks[k]):
                used[y] = True
                if extend(k + 1):
                    return True
                used[y] = False
            image[x] = None
        return False

    if not extend(0):
        return None
    return {H1.universe[i]: H2.universe[image[i]] for i in range(n)}


def _cell_refine(H: RelStructure):
    """Equitable-ish partition of element indices by iterated profiles."""
    n = len(H)
    colour = [_profile(H, i) for i in range(n)]
    ranks = {c: r for r, c in enumerate(sorted(set(colour)))}
    colour = [ranks[c] for c in colour]
    while True:
        sig = []
        for i in range(n):
            nb = []
            for name, ti, pos in H.incidence[i]:
                t = H.index_tuples[name][ti]
                nb.append((name, pos, tuple(colour[x] for x in t)))
            sig.append((colour[i], tuple(sorted(nb))))
        ranks = {c: r for r, c in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(set(new)) == len(set(colour)):
            return new
        colour = new


def canonical_form(H: RelStructure):
    """A hashable key equal for two structures iff they are isomorphic.

    Brute force over permutations that respect a refined colouring; intended
    for the small structures produced by obstruction enumeration.
    """
    n = len(H)
    colour = _cell_refine(H)
    cells = {}
    for i in range(n):
        cells.setdefault(colour[i], []).append(i)
    cell_keys = sorted(cells)
    best = None

    def assignments(k, acc):
        if k == len(cell_keys):
            yield acc
            return
        for perm in permutations(cells[cell_keys[k]]):
            yield from assignments(k + 1, acc + list(perm))

    for order in assignments(0, []):
        label = {v: r for r, v in enumerate(order)}
        key = tuple(tuple(sorted(tuple(label[x] for x in t) for t in H.index_tuples[name]))
                    for name in H.signature.names)
        if best is None or key < best:
            best = key
    return (H.signature, n, tuple(colour.count(c) for c in cell_keys), best)


# ---------------------------------------------------------------------------
# walks, distance, connectivity

@dataclass(frozen=True)
class Walk:
    """A walk ``a0, i1, (R1, t1), j1, a1, ...`` with 1-based positions.

    ``steps`` holds ``(i, R, tuple_index, j)`` where ``tuple_index`` refers to
    the canonical order of ``R``'s tuples in the base structure.
    """

    start: Hashable
    steps: tuple = ()
    end: Hashable = None

    def __post_init__(self):
        if self.end is None and not self.steps:
            object.__setattr__(self, "end", self.start)

    def __len__(self):
        return len(self.steps)

    def token(self) -> str:
        return element_token(self.start) + "".join(f":{i}.{R}.{t}.{j}" for i, R, t, j in self.steps)

    def extend(self, i: int, R: str, t_index: int, j: int, end) -> "Walk":
        return Walk(self.start, self.steps + ((i, R, t_index, j),), end)

    def validate(self, H: RelStructure) -> bool:
        cur = self.start
        for i, R, ti, j in self.steps:
            t = H.relations[R][ti]
            if i == j or t[i - 1] != cur:
                return False
            cur = t[j - 1]
        return cur == self.end

    def __repr__(self):
        return f"Walk({self.token()})"


def _bfs(H: RelStructure, sources: Iterable[int]) -> list:
    dist = [INFINITY] * len(H)
    queue = deque()
    for s in sources:
        if dist[s] != 0:
            dist[s] = 0
            queue.append(s)
    nb = H.neighbours
    while queue:
        a = queue.popleft()
        for b in nb[a]:
            if dist[b] == INFINITY:
                dist[b] = dist[a] + 1
                queue.append(b)
    return dist


def distances_from(G: RelStructure, V: Iterable) -> dict:
    """``dist(x, V)`` for every element ``x``; INFINITY when unreachable or V empty."""
    V = G.check_elements(V)
    d = _bfs(G, (G.index(v) for v in V))
    return dict(zip(G.universe, d))


def distance(G: RelStructure, V: Iterable, W: Iterable):
    """Least walk length between an element of V and one of W (INFINITY if none)."""
    V, W = G.check_elements(V), G.check_elements(W)
    if not V or not W:
        raise StructureError("distance needs nonempty sets")
    d = _bfs(G, (G.index(v) for v in V))
    return min(d[G.index(w)] for w in W)


def boundary(G: RelStructure, V: Iterable) -> frozenset:
    """Elements outside V at distance exactly 1 from V."""
    V = G.check_elements(V)
    nb = G.neighbours
    out = set()
    for v in V:
        out.update(G.universe[b] for b in nb[G.index(v)])
    return frozenset(out - V)


def components(H: RelStructure) -> list[frozenset]:
    """Connected components, ordered by their least element."""
    seen = [False] * len(H)
    comps = []
    for s in range(len(H)):
        if seen[s]:
            continue
        d = _bfs(H, [s])
        comp = [i for i in range(len(H)) if d[i] != INFINITY]
        for i in comp:
            seen[i] = True
        comps.append(frozenset(H.universe[i] for i in comp))
    return comps


def is_connected(H: RelStructure) -> bool:
    return len(components(H)) == 1


def is_forest(H: RelStructure) -> bool:
    """True iff H has no cycles (its incidence multigraph is acyclic)."""
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for name, ts in H.index_tuples.items():
        for ti, t in enumerate(ts):
            edge_node = ("t", name, ti)
            for a in t:
                ra, rb = find(("e", a)), find(edge_node)
                if ra == rb:
                    return False
                parent[ra] = rb
    return True


def diameter(H: RelStructure):
    best = 0
    for s in range(len(H)):
        best = max(best, max(_bfs(H, [s])))
    return best


def sphere(G: RelStructure, v, r) -> frozenset:
    d = distances_from(G, [v])
    return frozenset(x for x, dx in d.items() if dx == r)

"""The acceptance battery: one function per criterion, shared by tests and the CLI."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .dismantling import decide_main, dominators, greedy_dismantle, is_dismantlable
from .duality import enumerate_critical_obstructions, finite_duality_via_A1c, is_core
from .fixtures import digraph, fixture, path_structure, random_structure, small_binary_structures
from .gibbs import GibbsSpecification, boundary_influence, conditional_marginal, hardcore_critical_activity
from .homgraphs import check_B3, check_B5, hom_components, link_walk_correspondence
from .homomorphisms import Homomorphism, hom_array, label_rigidity
from .mixing import MixingQuery, check_C2, mix_constructive, tssm_check
from .structures import RelStructure, boundary, is_isomorphic, structure


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    seconds: float
    checks: dict = field(default_factory=dict)
    budget: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [k for k, v in self.checks.items() if not v]
        extra = f" failed: {', '.join(failed)}" if failed else ""
        budget = f" (budget {self.budget:g}s)" if self.budget else ""
        return f"criterion {self.id:2d} {status}  {self.name}  {self.seconds:.2f}s{budget}{extra}"

    def as_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "passed": self.passed,
                "checks": {k: bool(v) for k, v in self.checks.items()}}


def _run(cid: int, name: str, budget: float | None, body) -> CriterionResult:
    t = time.perf_counter()
    checks = body()
    dt = time.perf_counter() - t
    if budget is not None:
        checks["within time budget"] = dt < budget
    return CriterionResult(cid, name, all(checks.values()), dt, checks, budget)


def criterion_1() -> CriterionResult:
    def body():
        H = fixture("sft3")
        I, seq = greedy_dismantle(H)
        return {"ends at a singleton": len(I) == 1,
                "folds c->b then b->a": seq.pairs() == [("c", "b"), ("b", "a")]}
    return _run(1, "greedy dismantling of SFT3", 1.0, body)


def criterion_2() -> CriterionResult:
    def body():
        E = fixture("edge")
        rep = decide_main(E)
        removed = {f.removed for f in rep.phase2.folds}
        Q = rep.phase2.start
        isolated = {e for e in Q.universe if e[0] != e[1] and not Q.incidence[Q.index(e)]}
        return {"EDGE not dismantlable": not is_dismantlable(E),
                "square dismantles to the diagonal": rep.holds,
                "phase 2 folds exactly the isolated off-diagonal pairs":
                    len(rep.phase2.folds) == 2 and removed == isolated == {("0", "1"), ("1", "0")}}
    return _run(2, "EDGE: not dismantlable, square is", 1.0, body)


def mixing_queries(rep, n: int, seed: int, lengths=(12, 13, 14)):
    """Seeded (G, V, W, phi, psi) with V, W the two ends of an R1-path over TRI."""
    T = fixture("tri")
    rng = random.Random(seed)
    homs = {}
    out = []
    for _ in range(n):
        L = rng.choice(lengths)
        if L not in homs:
            G = path_structure(L, "R1", T.signature)
            homs[L] = (G, hom_array(G, T))
        G, rows = homs[L]
        span = L - rep.gap
        a = rng.randint(0, span)
        V = [f"p{i}" for i in range(a + 1)]
        W = [f"p{i}" for i in range(a + rep.gap, L + 1)]
        phi = Homomorphism.from_indices(G, T, rows[rng.randrange(len(rows))])
        psi = Homomorphism.from_indices(G, T, rows[rng.randrange(len(rows))])
        out.append((G, V, W, phi, psi))
    return out


def criterion_3(seed: int = 0) -> CriterionResult:
    def body():
        T = fixture("tri")
        J = T.universe
        rep = decide_main(T, J)
        checks = {"holds": rep.holds, "length 6": rep.length == 6, "gap 12": rep.gap == 12}
        for L in (12, 13, 14):
            G = path_structure(L, "R1", T.signature)
            checks[f"TSSM at gap 12 on the R1-path of length {L}"] = bool(tssm_check(G, T, 12))
        failures = 0
        for G, V, W, phi, psi in mixing_queries(rep, 100, seed):
            try:
                h = mix_constructive(G, T, J, V, W, phi, psi, rep)
                ok = MixingQuery(G, T, V, W, J, phi, psi).accepts(h)
            except AssertionError:
                ok = False
            failures += not ok
        checks["100 constructive mixing witnesses validate"] = failures == 0
        return checks
    return _run(3, "TRI: gap 12, TSSM, constructive mixing", 60.0, body)


def criterion_4() -> CriterionResult:
    def body():
        K2 = fixture("k2")
        edge = structure(K2.signature, ["x", "y"], E=[("x", "y")])
        gap, _ = boundary_influence(K2, [], 3)
        return {"decide false for J = {}": not decide_main(K2).holds,
                "decide false for J = {0,1}": not decide_main(K2, K2.universe).holds,
                "C_1(edge, K2) has 2 components": len(hom_components(edge, K2)) == 2,
                "link-graph check false": not check_B5(K2),
                "forest mixing check false": not check_C2(K2, [], 2, 4),
                "boundary influence 1": gap == 1 and gap >= Fraction(1, 2)}
    return _run(4, "K2 negative fixture", None, body)


def oracle_structures(seed: int = 0, n_random: int = 200, max_size: int = 3) -> list[RelStructure]:
    rng = random.Random(seed)
    return small_binary_structures(max_size) + [random_structure(rng) for _ in range(n_random)]


def criterion_5(seed: int = 0, n_random: int = 200, max_size: int = 3) -> CriterionResult:
    def body():
        structs = oracle_structures(seed, n_random, max_size)
        disagreements = []
        for k, H in enumerate(structs):
            for J in ((), tuple(H.universe)):
                a = decide_main(H, J).holds
                b = check_B5(H, J).holds
                c = check_B3(H, J).holds
                if not a == b == c:
                    disagreements.append((k, len(J), a, b, c))
        return {f"decide = link check = hom-graph check on {len(structs)} structures x 2 J": not disagreements}
    budget = 600.0 if n_random >= 200 and max_size >= 3 else None
    return _run(5, "oracle equivalence", budget, body)


def confluence_instances(seed: int, n: int):
    """Seeded (H, J) where the fold order is a real choice: two foldable elements or two dominators."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        H = random_structure(rng, max_size=5, max_symbols=2, density=rng.uniform(0.4, 0.9))
        J = [a for a in H.universe if rng.random() < 0.3]
        cands = [a for a in H.universe if a not in J and dominators(H, a)]
        if len(cands) >= 2 or any(len(dominators(H, a)) >= 2 for a in cands):
            out.append((H, J))
    return out


def criterion_6(seed: int = 0, pairs: int = 20, orders: int = 5) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        bad = folds = 0
        for H, J in confluence_instances(seed, pairs):
            runs = [greedy_dismantle(H, J)]
            for _ in range(orders - 1):
                runs.append(greedy_dismantle(H, J, random.Random(rng.random())))
            folds += sum(len(seq) for _, seq in runs)
            for I, _ in runs[1:]:
                bad += is_isomorphic(runs[0][0], I, fixed=J) is None
        return {f"{pairs * orders} runs end in J-fixing isomorphic structures": bad == 0,
                "every run folds something": folds >= pairs * orders}
    return _run(6, "greedy confluence", None, body)


def criterion_7(seed: int = 0, n: int = 50) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        bad = 0
        for _ in range(n):
            G = random_structure(rng, max_size=3, max_symbols=1)
            H = random_structure(rng, max_size=3, max_symbols=1)
            ell = rng.choice((1, 2, 3))
            bad += not link_walk_correspondence(G, H, ell)
        return {f"count equality on {n} instances": bad == 0}
    return _run(7, "link/walk correspondence", None, body)


def criterion_8() -> CriterionResult:
    def body():
        C3 = fixture("c3")
        digon = digraph("xy", [("x", "y"), ("y", "x")])
        cycle4 = digraph("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
        trees = enumerate_critical_obstructions(C3, 6, True)
        small = enumerate_critical_obstructions(C3, 4, False)

        def contains(O):
            return any(is_isomorphic(O, F) is not None for F in small.found)
        return {"C3 is a core": is_core(C3),
                "no tree obstructions up to 6 elements": trees.exhausted and not trees.found,
                "digon found": contains(digon),
                "directed 4-cycle found": contains(cycle4),
                "square does not dismantle to the full diagonal": not finite_duality_via_A1c(C3)}
    return _run(8, "C3 duality", None, body)


def gibbs_instances(seed: int, n: int):
    """Seeded (spec, V, phi, phi2, x) with ``phi2`` another homomorphism agreeing with ``phi`` on the boundary of V."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        H = random_structure(rng, max_size=3, max_symbols=1, density=0.6)
        G = random_structure(rng, max_size=5, max_symbols=1, density=0.35)
        G = RelStructure(H.signature, G.universe, {H.signature.names[0]: G.relations[G.signature.names[0]]})
        rows = hom_array(G, H, cap=10**5)
        if not len(rows):
            continue
        lam = {a: Fraction(rng.randint(1, 4), rng.randint(1, 3)) for a in H.universe}
        spec = GibbsSpecification(G, H, lam)
        V = [x for x in G.universe if rng.random() < 0.5] or [G.universe[0]]
        phi = Homomorphism.from_indices(G, H, rows[rng.randrange(len(rows))])
        bd = boundary(G, V)
        same = [r for r in rows if all(H.universe[r[G.index(b)]] == phi(b) for b in bd)]
        phi2 = Homomorphism.from_indices(G, H, same[rng.randrange(len(same))])
        out.append((spec, V, phi, phi2, rng.choice(V)))
    return out


def criterion_9(seed: int = 0) -> CriterionResult:
    def body():
        sums = all(sum(conditional_marginal(s, V, phi, x).values()) == 1
                   for s, V, phi, _, x in gibbs_instances(seed, 100))
        inv = all(conditional_marginal(s, V, phi, x) == conditional_marginal(s, V, phi2, x, local=False)
                  for s, V, phi, phi2, x in gibbs_instances(seed + 1, 50))
        return {"100 marginals sum to exactly 1": sums,
                "50 marginals unchanged off the boundary": inv,
                "hardcore activity at 6 is 15625/4096": hardcore_critical_activity(6) == Fraction(15625, 4096)}
    return _run(9, "Gibbs exactness", None, body)


def criterion_10() -> CriterionResult:
    def body():
        return {"EDGE rigid at depth 3": bool(label_rigidity(fixture("edge"), [], 3)),
                "K2 rigid at depth 3": bool(label_rigidity(fixture("k2"), [], 3))}
    return _run(10, "label rigidity", None, body)


def run_suite(seed: int = 0, level: str = "full") -> list[CriterionResult]:
    """Every criterion; the quick level trims the oracle battery of criterion 5."""
    if level not in ("quick", "full"):
        raise ValueError("level must be quick or full")
    c5 = criterion_5(seed) if level == "full" else criterion_5(seed, n_random=20, max_size=2)
    return [criterion_1(), criterion_2(), criterion_3(seed), criterion_4(), c5, criterion_6(seed),
            criterion_7(seed), criterion_8(), criterion_9(seed), criterion_10()]

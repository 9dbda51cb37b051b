"""Command line interface.

Exit codes: 0 the property holds or the query was answered, 1 it fails, 2 usage
or parse error, 3 a resource cap was hit.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction

from . import constructions, dismantling, duality, gibbs, homgraphs, homomorphisms, mixing, suite
from .fixtures import FIXTURE_TEXT, fixture
from .structures import (CapExceeded, RelStructure, StructureError, element_token, load_structure,
                         render_structure)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers

def read_structure(path: str) -> RelStructure:
    """A structure file, or a built-in fixture written as ``fixture:NAME``."""
    if path.startswith("fixture:"):
        name = path.split(":", 1)[1]
        if name not in FIXTURE_TEXT:
            raise UsageError(f"unknown fixture {name!r}")
        return fixture(name)
    try:
        return load_structure(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _tokens(H: RelStructure) -> dict:
    return {element_token(e): e for e in H.universe}


def parse_elements(H: RelStructure, text: str | None) -> list:
    if not text:
        return []
    toks = _tokens(H)
    out = []
    for t in text.split(","):
        t = t.strip()
        if t not in toks:
            raise UsageError(f"unknown element {t!r}")
        out.append(toks[t])
    return out


def parse_map(G: RelStructure, H: RelStructure, text: str | None) -> dict:
    """``x=a,y=b`` into a dict of elements."""
    if not text:
        return {}
    gt, ht = _tokens(G), _tokens(H)
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"expected x=a, got {item!r}")
        x, a = (s.strip() for s in item.split("=", 1))
        if x not in gt or a not in ht:
            raise UsageError(f"unknown element in {item!r}")
        out[gt[x]] = ht[a]
    return out


def parse_hom(G, H, text) -> homomorphisms.Homomorphism:
    mapping = parse_map(G, H, text)
    if len(mapping) != len(G):
        raise UsageError("a homomorphism must map every element")
    return homomorphisms.Homomorphism(G, H, mapping)


def parse_lambda(H: RelStructure, text: str | None):
    if not text:
        return None
    toks = _tokens(H)
    lam = {}
    for item in text.split(","):
        a, w = (s.strip() for s in item.split("=", 1))
        if a not in toks:
            raise UsageError(f"unknown element {a!r}")
        try:
            lam[toks[a]] = Fraction(w)
        except ValueError:
            raise UsageError(f"bad weight {w!r}") from None
    return lam


# ---------------------------------------------------------------------------
# JSON rendering

def jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if obj == obj and abs(obj) != float("inf") else str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, homomorphisms.Homomorphism):
        return {element_token(x): element_token(obj(x)) for x in obj.source.universe}
    if isinstance(obj, RelStructure):
        return render_structure(obj)
    if isinstance(obj, homgraphs.JWalk):
        return [jsonable(h) for h in obj.homs]
    if isinstance(obj, dismantling.FoldRecord):
        return [element_token(obj.removed), element_token(obj.dominator)]
    if isinstance(obj, mixing.MixingQuery):
        return {"V": sorted(map(element_token, obj.V)), "W": sorted(map(element_token, obj.W)),
                "J": sorted(map(element_token, obj.J)), "phi": jsonable(obj.phi), "psi": jsonable(obj.psi)}
    if isinstance(obj, dict):
        return {(k if isinstance(k, str) else element_token(k)): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in obj]
        return sorted(items, key=str) if isinstance(obj, (set, frozenset)) else items
    try:
        return element_token(obj)
    except StructureError:
        return str(obj)


class Outcome:
    def __init__(self, verdict, witness=None, result=None, text=""):
        self.verdict, self.witness, self.result, self.text = verdict, witness, result or {}, text


# ---------------------------------------------------------------------------
# subcommands

def cmd_make(args) -> Outcome:
    k = args.kind
    if k == "fixture":
        H = fixture(args.names[0]) if args.names[0] in FIXTURE_TEXT else None
        if H is None:
            raise UsageError(f"unknown fixture {args.names[0]!r}")
    elif k == "product":
        H = constructions.product(read_structure(args.names[0]), read_structure(args.names[1]))
    elif k == "square":
        H = constructions.square(read_structure(args.names[0]))
    elif k == "diagonal":
        H = constructions.diagonal(read_structure(args.names[0]))
    elif k == "constants":
        H = constructions.add_constants(read_structure(args.names[0]))
    elif k == "link":
        H = constructions.link(int(args.names[0]), args.signature or "E/2")
    elif k == "forest":
        H = constructions.walk_forest(read_structure(args.names[0]), args.depth, cap=args.cap).structure
    else:
        raise UsageError(f"unknown kind {k!r}")
    text = render_structure(H)
    return Outcome(None, None, {"structure": text}, text.rstrip("\n"))


def _needs_names(args, n):
    if len(args.names) < n:
        raise UsageError(f"{args.kind} needs {n} argument(s)")


def cmd_dismantle(args) -> Outcome:
    H = read_structure(args.structure)
    J = parse_elements(H, args.J)
    I, seq = dismantling.greedy_dismantle(H, J, random.Random(args.seed) if args.random else None)
    folds = [f"{element_token(a)}->{element_token(b)}" for a, b in seq.pairs()]
    ok = len(I) == 1 if not J else len(I) == len(J)
    text = "folds: " + (", ".join(folds) or "none") + "\nremaining: " + " ".join(map(element_token, I.universe))
    return Outcome(ok, None, {"folds": seq.folds, "remaining": list(I.universe)}, text)


def cmd_decide(args) -> Outcome:
    H = read_structure(args.structure)
    J = parse_elements(H, args.J)
    rep = dismantling.decide_main(H, J)
    result = {"holds": rep.holds, "phase1": rep.phase1.folds, "phase2": rep.phase2.folds,
              "I": list(rep.I.universe), "length": rep.length, "gap": rep.gap}
    witness = None if rep.holds else [element_token(e) for e in rep.K.universe if e[0] != e[1]]
    lines = [f"holds: {str(rep.holds).lower()}",
             "phase 1: " + (", ".join(repr(f) for f in rep.phase1.folds) or "none"),
             "phase 2: " + (", ".join(repr(f) for f in rep.phase2.folds) or "none")]
    if rep.holds:
        lines.append(f"square sequence length {rep.length}, mixing gap {rep.gap}")
    else:
        lines.append("stuck off-diagonal pairs: " + " ".join(witness))
    return Outcome(rep.holds, witness, result, "\n".join(lines))


def cmd_homs(args) -> Outcome:
    G, H = read_structure(args.source), read_structure(args.target)
    pinned = parse_map(G, H, args.pin)
    rows = homomorphisms.hom_array(G, H, pinned=pinned, cap=args.cap)
    homs = [homomorphisms.Homomorphism.from_indices(G, H, r) for r in rows[:args.limit]]
    text = f"count: {len(rows)}\n" + "\n".join(repr(h) for h in homs)
    return Outcome(len(rows) > 0, None, {"count": len(rows), "homs": homs}, text.rstrip())


def cmd_homgraph(args) -> Outcome:
    k = args.kind
    if k == "components":
        G, H = read_structure(args.a), read_structure(args.b)
        comps = homgraphs.hom_components(G, H, cap=args.cap)
        return Outcome(len(comps) <= 1, None, {"components": comps},
                       f"components: {len(comps)}\n" + "\n".join(f"  size {len(c)}" for c in comps))
    if k == "connected":
        G, H = read_structure(args.a), read_structure(args.b)
        J = parse_elements(H, args.J)
        phi, psi = parse_hom(G, H, args.phi), parse_hom(G, H, args.psi)
        walk = homgraphs.j_connected(G, H, J, args.view, phi, psi, cap=args.cap)
        text = "not connected" if walk is None else f"walk of length {len(walk)}\n" + "\n".join(map(repr, walk.homs))
        return Outcome(walk is not None, walk, {}, text)
    if k in ("b3", "b5"):
        H = read_structure(args.a)
        J = parse_elements(H, args.J)
        v = (homgraphs.check_B3 if k == "b3" else homgraphs.check_B5)(H, J, cap=args.cap)
        return Outcome(v.holds, v.witness, {}, f"holds: {str(v.holds).lower()}")
    if k == "links":
        G, H = read_structure(args.a), read_structure(args.b)
        v = homgraphs.link_walk_correspondence(G, H, args.length, cap=args.cap)
        return Outcome(v.holds, None, v.notes, f"homs {v.notes['homs']}, walks {v.notes['walks']}")
    raise UsageError(f"unknown kind {k!r}")


def _gap_text(rep: mixing.GapReport) -> str:
    gap = "none" if rep.gap is None else str(rep.gap)
    text = f"{rep.property}: gap {gap}"
    if rep.counterexample is not None:
        q = rep.counterexample
        text += (f"\ncounterexample at distance {rep.distance}: V={sorted(map(element_token, q.V))}"
                 f" W={sorted(map(element_token, q.W))}\n  phi={q.phi!r}\n  psi={q.psi!r}")
    return text


def cmd_mixing(args) -> Outcome:
    k = args.kind
    if k == "gap":
        G, H = read_structure(args.a), read_structure(args.b)
        rep = mixing.gap_search(G, H, parse_elements(H, args.J), args.gmax, cap=args.cap)
        return Outcome(rep.gap is not None, rep.counterexample,
                       {"property": rep.property, "gap": rep.gap, "distance": rep.distance}, _gap_text(rep))
    if k == "tssm":
        G, H = read_structure(args.a), read_structure(args.b)
        v = mixing.tssm_check(G, H, args.g, cap=args.cap)
        return Outcome(v.holds, v.witness, {"g": args.g}, f"TSSM at gap {args.g}: {str(v.holds).lower()}")
    if k == "construct":
        G, H = read_structure(args.a), read_structure(args.b)
        J = parse_elements(H, args.J)
        rep = dismantling.decide_main(H, J)
        if not rep.holds:
            return Outcome(False, None, {}, "the square does not dismantle; no construction")
        phi, psi = parse_hom(G, H, args.phi), parse_hom(G, H, args.psi)
        h = mixing.mix_constructive(G, H, J, parse_elements(G, args.V), parse_elements(G, args.W), phi, psi, rep)
        return Outcome(True, h, {"gap": rep.gap}, repr(h))
    if k == "c2":
        H = read_structure(args.a)
        v = mixing.check_C2(H, parse_elements(H, args.J), args.g, args.depth, cap=args.cap)
        return Outcome(v.holds, v.witness, {}, f"holds: {str(v.holds).lower()}")
    raise UsageError(f"unknown kind {k!r}")


def cmd_gibbs(args) -> Outcome:
    k = args.kind
    if k == "hardcore":
        value = gibbs.hardcore_critical_activity(args.degree)
        return Outcome(None, None, {"value": value}, str(value))
    if k == "influence":
        H = read_structure(args.a)
        gap, w = gibbs.boundary_influence(H, parse_elements(H, args.J), args.depth,
                                          parse_lambda(H, args.lam), cap=args.cap)
        return Outcome(True, {"root": w.root, "pair": w.pair}, {"gap": gap}, f"gap: {gap}  root {w.root.token()}")
    G, H = read_structure(args.a), read_structure(args.b)
    spec = gibbs.GibbsSpecification(G, H, parse_lambda(H, args.lam))
    if k == "jsm":
        V_family = [parse_elements(G, v) for v in args.V_family] if args.V_family else \
            [[x for x in G.universe if x not in (G.universe[0], G.universe[-1])] or [G.universe[0]]]
        rep = gibbs.jsm_report(spec, parse_elements(H, args.J), V_family, cap=args.cap)
        s = rep.summary()
        text = "\n".join(f"  dist {d}: {v}" for d, v in s["buckets"].items())
        text = f"pairs tested: {rep.pairs_tested}\n{text}\nC={rep.C} alpha={rep.alpha} violation={rep.violation}"
        return Outcome(not rep.violation, None, s, text)
    V = parse_elements(G, args.V)
    phi = parse_hom(G, H, args.phi)
    if k == "z":
        Z = gibbs.partition_function(spec, V, phi, cap=args.cap)
        return Outcome(None, None, {"Z": Z}, str(Z))
    if k == "marginal":
        x = parse_elements(G, args.x)
        if len(x) != 1:
            raise UsageError("--x takes one element")
        dist = gibbs.conditional_marginal(spec, V, phi, x[0], cap=args.cap)
        return Outcome(None, None, {"marginal": dist},
                       "\n".join(f"{element_token(a)}: {p}" for a, p in dist.items()))
    raise UsageError(f"unknown kind {k!r}")


def cmd_duality(args) -> Outcome:
    k = args.kind
    H = read_structure(args.a)
    if k == "core":
        ok = duality.is_core(H)
        return Outcome(ok, None, {}, f"core: {str(ok).lower()}")
    if k == "critical":
        O = read_structure(args.b)
        ok = duality.is_critical_obstruction(H, O)
        return Outcome(ok, None, {}, f"critical obstruction: {str(ok).lower()}")
    if k == "enumerate":
        rep = duality.enumerate_critical_obstructions(H, args.max_size, args.trees)
        text = f"found {len(rep.found)} (exhausted: {str(rep.exhausted).lower()})\n"
        text += "\n".join(render_structure(O) for O in rep.found)
        return Outcome(not rep.found, rep.found,
                       {"max_size": rep.max_size, "trees_only": rep.trees_only, "exhausted": rep.exhausted},
                       text.rstrip())
    if k == "check-a1c":
        ok = duality.finite_duality_via_A1c(H)
        return Outcome(ok, None, {}, f"square dismantles to its full diagonal: {str(ok).lower()}")
    if k == "extend":
        G = read_structure(args.b)
        p = parse_map(G, H, args.map)
        obs = duality.enumerate_critical_obstructions(constructions.add_constants(H), max(len(G), 1))
        if not obs.exhausted:
            raise CapExceeded("obstruction enumeration did not finish")
        ok = duality.extension_via_obstructions(G, H, p, obs)
        return Outcome(ok, None, {}, f"extends: {str(ok).lower()}")
    raise UsageError(f"unknown kind {k!r}")


def cmd_paper_suite(args) -> Outcome:
    results = suite.run_suite(args.seed, args.level)
    ok = all(r.passed for r in results)
    failed = [r.id for r in results if not r.passed]
    return Outcome(ok, failed or None, {"criteria": [r.as_dict() for r in results]},
                   "\n".join(r.line() for r in results))


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relhom", description="Dismantling, homomorphism graphs, mixing and duality.")
    p.add_argument("--json", action="store_true", help="emit one JSON object")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=homomorphisms.DEFAULT_CAP, help="enumeration cap")
    p.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work runs on one thread")
    p.add_argument("--timing", action="store_true", help="report wall time (breaks byte-identical output)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("make", help="print a fixture or derived structure")
    s.add_argument("kind", choices=["fixture", "product", "square", "diagonal", "constants", "link", "forest"])
    s.add_argument("names", nargs="+")
    s.add_argument("--signature")
    s.add_argument("--depth", type=int, default=2)
    s.set_defaults(func=cmd_make, nargs_check=True)

    s = sub.add_parser("dismantle", help="greedy dismantling; holds when it ends at a singleton (or exactly at J)")
    s.add_argument("structure")
    s.add_argument("--J")
    s.add_argument("--random", action="store_true", help="random fold order from --seed")
    s.set_defaults(func=cmd_dismantle)

    s = sub.add_parser("decide", help="two-phase square dismantling decision")
    s.add_argument("structure")
    s.add_argument("--J")
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("homs", help="enumerate homomorphisms")
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--pin", help="x=a,... fixed values")
    s.add_argument("--limit", type=int, default=20)
    s.set_defaults(func=cmd_homs)

    s = sub.add_parser("homgraph", help="graphs on homomorphisms")
    s.add_argument("kind", choices=["components", "connected", "b3", "b5", "links"])
    s.add_argument("a")
    s.add_argument("b", nargs="?")
    s.add_argument("--J")
    s.add_argument("--view", default="c1")
    s.add_argument("--phi")
    s.add_argument("--psi")
    s.add_argument("--length", type=int, default=1)
    s.set_defaults(func=cmd_homgraph)

    s = sub.add_parser("mixing", help="mixing checks and constructions")
    s.add_argument("kind", choices=["gap", "tssm", "construct", "c2"])
    s.add_argument("a")
    s.add_argument("b", nargs="?")
    s.add_argument("--J")
    s.add_argument("--gmax", type=int, default=4)
    s.add_argument("--g", type=int, default=2)
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--V")
    s.add_argument("--W")
    s.add_argument("--phi")
    s.add_argument("--psi")
    s.set_defaults(func=cmd_mixing)

    s = sub.add_parser("gibbs", help="exact Gibbs computations")
    s.add_argument("kind", choices=["z", "marginal", "jsm", "influence", "hardcore"])
    s.add_argument("a", nargs="?")
    s.add_argument("b", nargs="?")
    s.add_argument("--J")
    s.add_argument("--V")
    s.add_argument("--V-family", dest="V_family", action="append")
    s.add_argument("--phi")
    s.add_argument("--x")
    s.add_argument("--lambda", dest="lam")
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--degree", type=int, default=6)
    s.set_defaults(func=cmd_gibbs)

    s = sub.add_parser("duality", help="cores and obstructions")
    s.add_argument("kind", choices=["core", "critical", "enumerate", "check-a1c", "extend"])
    s.add_argument("a")
    s.add_argument("b", nargs="?")
    s.add_argument("--max-size", type=int, default=duality.DEFAULT_MAX_SIZE)
    s.add_argument("--trees", action="store_true")
    s.add_argument("--map")
    s.set_defaults(func=cmd_duality)

    s = sub.add_parser("paper-suite", help="run the acceptance battery")
    s.add_argument("--level", choices=["quick", "full"], default="quick")
    s.set_defaults(func=cmd_paper_suite)
    return p


_POSITIONALS = {
    ("make", "product"): 2, ("homgraph", "components"): 2, ("homgraph", "connected"): 2,
    ("homgraph", "links"): 2, ("mixing", "gap"): 2, ("mixing", "tssm"): 2, ("mixing", "construct"): 2,
    ("gibbs", "z"): 2, ("gibbs", "marginal"): 2, ("gibbs", "jsm"): 2, ("gibbs", "influence"): 1,
    ("duality", "critical"): 2, ("duality", "extend"): 2,
}


def _check_positionals(args):
    need = _POSITIONALS.get((args.command, getattr(args, "kind", None)))
    if need is None:
        return
    if args.command == "make":
        _needs_names(args, need)
        return
    have = sum(getattr(args, n, None) is not None for n in ("a", "b"))
    if have < need:
        raise UsageError(f"{args.command} {args.kind} needs {need} structure argument(s)")


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    t0 = time.perf_counter()
    try:
        _check_positionals(args)
        outcome = args.func(args)
        code = EXIT_OK if outcome.verdict in (True, None) else EXIT_FAIL
        payload = {"verdict": outcome.verdict, "witness": jsonable(outcome.witness),
                   "result": jsonable(outcome.result)}
        text = outcome.text
    except (UsageError, StructureError, ValueError) as e:
        code, payload, text = EXIT_USAGE, {"verdict": None, "witness": None, "error": str(e)}, f"error: {e}"
    except CapExceeded as e:
        code, payload, text = EXIT_CAP, {"verdict": None, "witness": None, "error": str(e)}, f"cap exceeded: {e}"
    payload["timing"] = round(time.perf_counter() - t0, 6) if args.timing else None
    if args.json:
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        if text:
            out.write(text + "\n")
        if args.timing:
            out.write(f"time: {payload['timing']:.3f}s\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

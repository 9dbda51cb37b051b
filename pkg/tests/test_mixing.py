import random
from itertools import chain, combinations

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_homs, structures
from relhom import (Homomorphism, MixingQuery, StructureError, check_C2, connect_constructive,
                    decide_main, distance, enumerate_homs, fixture, gap_search, j_connected, mix_constructive,
                    omega, square, structure, tssm_check, vw_mixing, walk_forest)
from relhom.fixtures import digraph, path_structure
from relhom.structures import components, induced_substructure


def subsets(xs, min_size=0):
    xs = list(xs)
    return chain.from_iterable(combinations(xs, k) for k in range(min_size, len(xs) + 1))


def brute_mixes(G, H, V, W, J, phi, psi, S=()):
    for m in brute_homs(G, H):
        if all(m[x] == phi(x) for x in chain(V, S)) and all(m[x] == psi(x) for x in W) and \
                all(m[x] == phi(x) for x in G.universe if phi(x) == psi(x) and phi(x) in J):
            return True
    return False


def brute_gap(G, H, J, g_max):
    homs = [Homomorphism(G, H, m) for m in brute_homs(G, H)]
    pairs = [(V, W) for V in subsets(G.universe, 1) for W in subsets(G.universe, 1)]
    for g in range(g_max + 1):
        if all(brute_mixes(G, H, V, W, J, phi, psi)
               for V, W in pairs if distance(G, V, W) >= g for phi in homs for psi in homs):
            return g
    return None


def brute_tssm(G, H, g):
    homs = [Homomorphism(G, H, m) for m in brute_homs(G, H)]
    for V in subsets(G.universe, 1):
        for W in subsets(G.universe, 1):
            if distance(G, V, W) < g:
                continue
            for S in subsets(G.universe):
                for phi in homs:
                    for psi in homs:
                        if all(phi(x) == psi(x) for x in S) and not brute_mixes(G, H, V, W, (), phi, psi, S):
                            return False
    return True


def one_tuple(sig):
    return structure(sig, ["x", "y"], **{sig.names[0]: [("x", "y")]})


def test_vw_mixing_examples():
    loops = digraph("xy", [("x", "x"), ("y", "y")])
    H = digraph("ab", [("a", "a"), ("b", "b"), ("a", "b")])
    for phi in enumerate_homs(loops, H):
        for psi in enumerate_homs(loops, H):
            assert vw_mixing(MixingQuery(loops, H, {"x"}, {"y"}, (), phi, psi)) is not None
    K2 = fixture("k2")
    G = one_tuple(K2.signature)
    phi = Homomorphism(G, K2, {"x": "0", "y": "1"})
    psi = Homomorphism(G, K2, {"x": "1", "y": "0"})
    assert vw_mixing(MixingQuery(G, K2, {"x"}, {"y"}, (), phi, psi)) is None
    assert vw_mixing(MixingQuery(G, K2, (), (), (), phi, psi)) == phi


def test_gap_examples():
    for G in (fixture("k2"), path_structure(3, "E")):
        assert gap_search(G, fixture("pt1"), (), 3).gap == 0
    K2 = fixture("k2")
    # a single edge has diameter 1, so every gap above 1 holds vacuously
    rep = gap_search(one_tuple(K2.signature), K2, (), 3)
    assert rep.gap == 2 and rep.distance == 1
    assert vw_mixing(rep.counterexample) is None
    # on a longer path the parity clash persists at every tested distance
    rep = gap_search(path_structure(5, "E"), K2, (), 3)
    assert rep.gap is None and rep.distance == 3
    assert vw_mixing(rep.counterexample) is None


def test_gap_on_tri_path():
    T = fixture("tri")
    rep = gap_search(path_structure(7, "R1", T.signature), T, T.universe, 12)
    assert rep.property == "strong-J-irreducibility"
    # far below the constructive bound of 12
    assert rep.gap == 2
    assert vw_mixing(rep.counterexample) is None and rep.distance == 1


def test_tssm_examples():
    assert tssm_check(fixture("k2"), fixture("pt1"), 0)
    K2 = fixture("k2")
    v = tssm_check(one_tuple(K2.signature), K2, 1)
    assert not v and vw_mixing(v.witness) is None
    T = fixture("tri")
    assert tssm_check(path_structure(12, "R1", T.signature), T, 12)


def test_omega_examples():
    T = fixture("tri")
    rep = decide_main(T, T.universe)
    G = path_structure(6, "R1", T.signature)
    homs = enumerate_homs(G, T)
    phi, psi = homs[0], homs[-1]
    Phi = Homomorphism(G, square(T), {x: (phi(x), psi(x)) for x in G.universe})
    assert omega(Phi, (), rep.retractions) == Phi
    full = omega(Phi, G.universe, rep.retractions)
    assert all(full(x) == rep.retractions[-1](Phi(x)) for x in G.universe)
    assert all(a == b for a, b in full.mapping.values())
    mid = omega(Phi, {"p3"}, rep.retractions)
    for x in G.universe:
        d = abs(int(x[1:]) - 3)
        assert mid(x) == rep.retractions[rep.length - d](Phi(x))


def test_mix_constructive_examples():
    T = fixture("tri")
    rep = decide_main(T, T.universe)
    G = path_structure(14, "R1", T.signature)
    homs = enumerate_homs(G, T)
    rng = random.Random(3)
    for _ in range(20):
        phi, psi = rng.choice(homs), rng.choice(homs)
        h = mix_constructive(G, T, T.universe, {"p0"}, {"p14"}, phi, psi, rep)
        q = MixingQuery(G, T, {"p0"}, {"p14"}, T.universe, phi, psi)
        assert q.accepts(h)
    phi = homs[0]
    assert mix_constructive(G, T, (), (), (), phi, phi, rep) is not None
    with pytest.raises(StructureError):
        mix_constructive(G, T, T.universe, {"p0"}, {"p5"}, phi, phi, rep)
    E = fixture("edge")
    G = digraph("xyzw", [("x", "y"), ("z", "w")], name="R")
    rep = decide_main(E, E.universe)
    for phi in enumerate_homs(G, E):
        for psi in enumerate_homs(G, E):
            h = mix_constructive(G, E, E.universe, {"x", "y"}, {"z", "w"}, phi, psi, rep)
            assert h.restrict("xy") == phi.restrict("xy") and h.restrict("zw") == psi.restrict("zw")
    with pytest.raises(StructureError):
        mix_constructive(G, fixture("k2"), (), {"x"}, {"z"}, phi, phi, decide_main(fixture("k2")))


def test_connect_constructive_examples():
    T = fixture("tri")
    rep = decide_main(T, T.universe)
    G = path_structure(5, "R1", T.signature)
    homs = enumerate_homs(G, T)
    assert len(connect_constructive(G, T, T.universe, homs[0], homs[0], rep)) == 0
    shared = [(a, b) for a in homs for b in homs if a("p2") == b("p2") == "1" and a != b]
    for a, b in shared[:10]:
        walk = connect_constructive(G, T, T.universe, a, b, rep)
        assert all(h("p2") == "1" for h in walk.homs)
        assert walk.validate()
    S = fixture("sft3").reduct(["R1"])
    G = digraph("xyz", [("x", "y"), ("y", "z")], name="R1")
    rep = decide_main(S)
    for a in enumerate_homs(G, S):
        for b in enumerate_homs(G, S):
            walk = connect_constructive(G, S, (), a, b, rep)
            assert walk.homs[0] == a and walk.homs[-1] == b and walk.validate()


def test_check_c2_examples():
    assert not check_C2(fixture("k2"), (), 2, 4)
    assert check_C2(fixture("pt1"), (), 0, 1)
    T = fixture("tri")
    # the full-depth instance is out of reach; the check already passes at gap 2
    assert check_C2(T, T.universe, 2, 3)
    with pytest.raises(StructureError):
        check_C2(T, (), 3, 3)


def test_gap_search_fails_on_forests_when_the_square_is_stuck():
    K2 = fixture("k2")
    F = walk_forest(square(K2), 4).structure
    comp = induced_substructure(F, components(F)[1])
    rep = gap_search(comp, K2, (), 3)
    assert rep.gap is None


@settings(max_examples=25)
@given(structures(max_size=3), structures(max_size=3), st.sampled_from(["none", "all"]))
def test_gap_search_matches_brute_force(G, H, which):
    J = () if which == "none" else H.universe
    assert gap_search(G, H, J, 3).gap == brute_gap(G, H, J, 3)


@settings(max_examples=25)
@given(structures(max_size=3), structures(max_size=2), st.integers(0, 2))
def test_tssm_matches_definition(G, H, g):
    assert tssm_check(G, H, g).holds == brute_tssm(G, H, g)
    assert tssm_check(G, H, g).holds == (gap_search(G, H, H.universe, g).gap is not None)


@st.composite
def constructive_instances(draw):
    H = draw(structures(max_size=3, symbols=("R1", "R2")))
    J = draw(st.sets(st.sampled_from(list(H.universe))))
    rep = decide_main(H, J)
    G = draw(structures(max_size=6, symbols=("R1", "R2")))
    return H, J, rep, G


@given(constructive_instances(), st.data())
def test_constructions_validate_whenever_the_square_dismantles(inst, data):
    H, J, rep, G = inst
    if not rep.holds:
        return
    homs = enumerate_homs(G, H)
    if not homs:
        return
    phi, psi = data.draw(st.sampled_from(homs)), data.draw(st.sampled_from(homs))
    V = set(data.draw(st.sets(st.sampled_from(list(G.universe)), max_size=2)))
    W = {w for w in G.universe if not V or distance(G, V, {w}) >= rep.gap}
    h = mix_constructive(G, H, J, V, W, phi, psi, rep)
    q = MixingQuery(G, H, V, W, J, phi, psi)
    assert q.accepts(h) and vw_mixing(q) is not None
    walk = connect_constructive(G, H, J, phi, psi, rep)
    assert walk.validate() and walk.homs[0] == phi and walk.homs[-1] == psi
    assert j_connected(G, H, J, "c1", phi, psi) is not None

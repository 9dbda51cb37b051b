import pytest
from hypothesis import given, strategies as st

from oracles import brute_homs, structures
from relhom import (CapExceeded, Homomorphism, PartialMap, StructureError, add_constants, count_homs,
                    dominated_elements, enumerate_homs, extend_partial, fixture, is_homomorphism, label_rigidity, structure)
from relhom.duality import constant_expansion
from relhom.fixtures import digraph, small_binary_structures


def one_tuple(sig):
    return structure(sig, ["x", "y"], **{sig.names[0]: [("x", "y")]})


def test_enumerate_examples():
    E = fixture("edge")
    homs = enumerate_homs(one_tuple(E.signature), E, 10)
    assert [h.mapping for h in homs] == [{"x": "0", "y": "1"}]
    K2 = fixture("k2")
    assert len(enumerate_homs(one_tuple(K2.signature), K2, 10)) == 2
    pt = fixture("pt1")
    for G in (fixture("c3"), fixture("k2"), digraph("abcd", [("a", "b"), ("c", "d")])):
        assert len(enumerate_homs(G, pt, 10)) == 1


def test_enumerate_is_lexicographic():
    G = digraph("xyz", [])
    homs = enumerate_homs(G, fixture("k2"))
    assert [h.values() for h in homs] == sorted(h.values() for h in homs)
    assert len(homs) == 8


def test_cap_and_signature_errors():
    G = digraph("abcdef", [])
    with pytest.raises(CapExceeded):
        enumerate_homs(G, fixture("c3"), cap=100)
    with pytest.raises(StructureError):
        enumerate_homs(fixture("edge"), fixture("k2"))


def test_homomorphism_validates():
    with pytest.raises(StructureError):
        Homomorphism(fixture("k2"), fixture("k2"), {"0": "0", "1": "0"})


def test_extend_partial_examples():
    path = digraph("xyz", [("x", "y"), ("y", "z")])
    C3 = fixture("c3")
    assert extend_partial(path, C3, {"x": "0"}).mapping == {"x": "0", "y": "1", "z": "2"}
    total = {"x": "1", "y": "2", "z": "0"}
    assert extend_partial(path, C3, PartialMap.of(path, C3, total)).mapping == total
    digon = digraph("xy", [("x", "y"), ("y", "x")])
    assert extend_partial(digon, C3, {}) is None
    with pytest.raises(StructureError):
        PartialMap.of(path, C3, {"x": "0", "y": "0"})


def test_label_rigidity_examples():
    assert label_rigidity(fixture("edge"), [], 3)
    assert label_rigidity(fixture("pt1"), [], 2)
    assert label_rigidity(fixture("k2"), [], 3)
    with pytest.raises(StructureError):
        label_rigidity(fixture("sft3"), [], 2)


def test_label_rigidity_when_every_dominated_element_is_protected():
    # both internal routes must agree, and the label map is forced on every small structure
    for H in small_binary_structures(3):
        J = [a for a, _ in dominated_elements(H)]
        res = label_rigidity(H, J, 2)
        assert res.holds and res.level_check and res.witness is None


@given(structures(max_size=3), structures(max_size=3))
def test_counts_match_brute_force(G, H):
    homs = enumerate_homs(G, H)
    assert [h.mapping for h in homs] == sorted(brute_homs(G, H), key=lambda m: [H.index(m[x]) for x in G.universe])
    assert all(is_homomorphism(G, H, h.mapping) for h in homs)
    assert count_homs(G, H) == len(homs)


@given(structures(max_size=4, symbols=("R1", "R2")), structures(max_size=3, symbols=("R1", "R2")), st.data())
def test_extend_partial_matches_constants(G, H, data):
    U = data.draw(st.sets(st.sampled_from(list(G.universe))))
    p = {x: data.draw(st.sampled_from(list(H.universe))) for x in sorted(U)}
    direct = extend_partial(G, H, p)
    via = enumerate_homs(constant_expansion(G, H, p), add_constants(H), cap=10**5)
    assert (direct is not None) == bool(via)
    if direct is not None:
        assert all(direct(x) == a for x, a in p.items())
        assert direct.mapping == via[0].mapping


@given(structures(max_size=3))
def test_rigidity_is_monotone_in_depth(H):
    J = [a for a, _ in dominated_elements(H)]
    if label_rigidity(H, J, 3):
        assert label_rigidity(H, J, 2)

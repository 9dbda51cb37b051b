import pytest
from hypothesis import given, strategies as st

from oracles import brute_iso, structures
from relhom import (INFINITY, ParseError, StructureError, boundary, distance, fixture,
                    induced_substructure, is_isomorphic, parse_structure, render_structure, structure)
from relhom.fixtures import digraph, path_structure


def test_parse_fixtures():
    pt1 = fixture("pt1")
    assert len(pt1) == 1 and pt1.n_tuples == 1
    sft3 = fixture("sft3")
    assert len(sft3) == 3
    assert len(sft3.relations["R1"]) == 6 and len(sft3.relations["R2"]) == 6


@pytest.mark.parametrize("text", [
    "signature R/2\nuniverse a b c\nrel R = (a,b,c)\n",          # arity
    "signature R/2\nuniverse a b\nrel R = (a,z)\n",              # unknown element
    "signature R/2 R/3\nuniverse a\n",                           # duplicate symbol
    "signature R/2\nuniverse a a\n",                             # duplicate element
    "signature R/2\nuniverse a\nrel R = (a,a)\nrel R = (a,a)\n",  # repeated rel line
    "universe a\nsignature R/2\n",                               # order
    "signature R/2\nuniverse\n",                                 # empty universe
    "signature R/2\nuniverse a\nrel R = (a,a\n",                 # unclosed tuple
    "signature R/0\nuniverse a\n",                               # zero arity
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_structure(text)


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError, match="line 3"):
        parse_structure("signature R/2\nuniverse a b\nrel R = (a,b,c)\n")


def test_comments_and_missing_relations():
    H = parse_structure("# a comment\nsignature R/2 S/1  # trailing\nuniverse x y\nrel R = (x,y)\n")
    assert H.relations["S"] == ()
    assert H.universe == ("x", "y")


def test_induced_substructure():
    sft3 = fixture("sft3")
    ab = induced_substructure(sft3, {"a", "b"})
    full = {("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}
    assert set(ab.relations["R1"]) == full == set(ab.relations["R2"])
    assert induced_substructure(sft3, sft3.universe) == sft3
    e0 = induced_substructure(fixture("edge"), {"0"})
    assert list(e0.universe) == ["0"] and e0.n_tuples == 0
    with pytest.raises(StructureError):
        induced_substructure(sft3, {"z"})


def test_is_isomorphic_examples():
    E = fixture("edge")
    assert is_isomorphic(E, E, {"0", "1"}) == {"0": "0", "1": "1"}
    rev = structure(E.signature, ["x", "y"], R=[("y", "x")])
    assert is_isomorphic(E, rev) == {"0": "y", "1": "x"}
    assert is_isomorphic(fixture("edge"), digraph("01", [("0", "1"), ("1", "0")], name="R")) is None


def test_distance_and_boundary():
    E = fixture("edge")
    assert distance(E, {"0"}, {"1"}) == 1
    assert distance(E, {"0"}, {"0"}) == 0
    loops = digraph("xy", [("x", "x"), ("y", "y")])
    assert distance(loops, {"x"}, {"y"}) == INFINITY
    assert INFINITY >= 10**9
    assert boundary(E, {"0"}) == {"1"}
    assert boundary(E, E.universe) == frozenset()
    assert boundary(digraph("xyz", [("x", "y"), ("y", "z")]), {"y"}) == {"x", "z"}
    with pytest.raises(StructureError):
        distance(E, set(), {"0"})


def test_path_distances():
    P = path_structure(5)
    assert distance(P, {"p0"}, {"p5"}) == 5
    assert distance(P, {"p1", "p4"}, {"p2"}) == 1


@given(structures(max_size=4, symbols=("R1", "R2")))
def test_render_parse_round_trip(H):
    assert parse_structure(render_structure(H)) == H


@given(structures(max_size=4))
def test_isomorphism_with_identity(H):
    assert is_isomorphic(H, H, H.universe) == {a: a for a in H.universe}


@given(structures(max_size=3), structures(max_size=3))
def test_isomorphism_agrees_with_permutation_search(A, B):
    assert (is_isomorphic(A, B) is not None) == brute_iso(A, B)


@given(structures(max_size=4), st.data())
def test_induced_is_idempotent(H, data):
    S = data.draw(st.sets(st.sampled_from(list(H.universe)), min_size=1))
    once = induced_substructure(H, S)
    assert induced_substructure(once, S) == once


@given(structures(max_size=5, symbols=("R1", "R2")), st.data())
def test_triangle_inequality(H, data):
    pick = st.sampled_from(list(H.universe))
    x, y, z = data.draw(pick), data.draw(pick), data.draw(pick)
    dxy, dyz, dxz = distance(H, {x}, {y}), distance(H, {y}, {z}), distance(H, {x}, {z})
    if INFINITY not in (dxy, dyz, dxz):
        assert dxz <= dxy + dyz
    assert dxy == distance(H, {y}, {x})

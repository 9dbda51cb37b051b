import pytest
from hypothesis import given

from oracles import structures
from relhom import (StructureError, add_constants, components, diagonal, fixture, induced_substructure,
                    is_forest, is_homomorphism, is_isomorphic, link, parse_structure, product,
                    render_structure, square, walk_forest)
from relhom.constructions import WalkForest


def test_product_examples():
    E = fixture("edge")
    P = square(E)
    assert len(P) == 4
    assert set(P.relations["R"]) == {(("0", "0"), ("1", "1"))}
    assert len(square(fixture("pt1"))) == 1 and square(fixture("pt1")).n_tuples == 1
    T2 = square(fixture("tri"))
    assert len(T2) == 9 and len(T2.relations["R1"]) == 9
    with pytest.raises(StructureError):
        product(fixture("edge"), fixture("k2"))


def test_product_universe_is_lexicographic():
    assert square(fixture("tri")).universe[:4] == (("0", "0"), ("0", "1"), ("0", "2"), ("1", "0"))


def test_diagonal_examples():
    D = diagonal(fixture("tri"))
    assert len(D) == 3
    assert set(D.relations["R1"]) == {(("0", "0"), ("0", "0")), (("0", "0"), ("1", "1")),
                                      (("1", "1"), ("0", "0"))}
    assert len(diagonal(fixture("pt1"))) == 1
    assert set(diagonal(fixture("edge")).relations["R"]) == {(("0", "0"), ("1", "1"))}


def test_link_examples():
    L1 = link(1, "E/2")
    assert set(L1.relations["E"]) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert len(link(2, "E/2").relations["E"]) == 7
    assert len(link(1, "R/3").relations["R"]) == 8
    with pytest.raises(StructureError):
        link(0, "E/2")


def test_add_constants():
    C = add_constants(fixture("c3"))
    assert [s for s in C.signature] == [("E", 2), ("const_0", 1), ("const_1", 1), ("const_2", 1)]
    assert C.relations["const_1"] == (("1",),)
    P = add_constants(fixture("pt1"))
    assert len(P.signature) == 2


def test_walk_forest_examples():
    F = walk_forest(fixture("edge"), 1)
    assert len(F.structure) == 4
    assert len(components(F.structure)) == 2
    W0 = walk_forest(fixture("sft3"), 0)
    assert len(W0.structure) == 3 and W0.structure.n_tuples == 0
    F2 = walk_forest(fixture("sft3"), 2)
    assert is_homomorphism(F2.structure, fixture("sft3"), F2.labels)
    assert is_forest(F2.structure)
    assert len(F2.roots) == 3


def test_forest_renders_and_parses():
    F = walk_forest(fixture("tri"), 2).structure
    text = render_structure(F)
    assert len(parse_structure(text)) == len(F)


@given(structures(max_size=3), structures(max_size=3))
def test_product_commutes(A, B):
    assert is_isomorphic(product(A, B), product(B, A)) is not None
    assert product(A, B).n_tuples == A.n_tuples * B.n_tuples


@given(structures(max_size=3, symbols=("R1", "R2")))
def test_square_is_symmetric(H):
    Q = square(H)
    swap = {(a, b): (b, a) for a, b in Q.universe}
    for name, t in Q.items():
        assert tuple(swap[x] for x in t) in Q.rel_sets[name]


@given(structures(max_size=3))
def test_forest_properties(H):
    for d in (0, 1, 2):
        F = walk_forest(H, d)
        assert isinstance(F, WalkForest)
        assert is_homomorphism(F.structure, H, F.labels)
        assert is_forest(F.structure)
        assert len(components(F.structure)) == len(H)
    small, big = walk_forest(H, 1).structure, walk_forest(H, 2).structure
    assert induced_substructure(big, [w for w in big.universe if len(w) <= 1]) == small


def _relabel_walk(w, I, H):
    """The same walk with tuple indices taken in ``H`` instead of ``I``."""
    steps = tuple((i, R, H.relations[R].index(I.relations[R][t]), j) for i, R, t, j in w.steps)
    return type(w)(w.start, steps, w.end)


@given(structures(max_size=3))
def test_forest_of_substructure_embeds(H):
    I = induced_substructure(H, H.universe[:-1] or H.universe)
    FI, FH = walk_forest(I, 2).structure, walk_forest(H, 2).structure
    emb = {w: _relabel_walk(w, I, H) for w in FI.universe}
    assert set(emb.values()) <= set(FH.universe)
    for name, t in FI.items():
        assert tuple(emb[w] for w in t) in FH.rel_sets[name]

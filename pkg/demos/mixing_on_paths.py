"""Glue two homomorphisms of a long path into TRI and compare gaps.

The constructive route gives a gap read off the square sequence; the
exhaustive search on a short path shows how much slack that bound has.
"""
from relhom import Homomorphism, MixingQuery, decide_main, fixture, gap_search, hom_array, mix_constructive
from relhom.fixtures import path_structure

T = fixture("tri")
rep = decide_main(T, T.universe)
print(f"TRI: square sequence length {rep.length}, constructive gap {rep.gap}")

G = path_structure(14, "R1", T.signature)
rows = hom_array(G, T)
phi = Homomorphism.from_indices(G, T, rows[0])
psi = Homomorphism.from_indices(G, T, rows[-1])
V = ["p0", "p1"]
W = ["p14"]
h = mix_constructive(G, T, T.universe, V, W, phi, psi, rep)
ok = MixingQuery(G, T, V, W, T.universe, phi, psi).accepts(h)
print("glued map:", " ".join(str(h(f"p{i}")) for i in range(15)), "valid:", ok)

small = path_structure(7, "R1", T.signature)
found = gap_search(small, T, T.universe, g_max=4)
print(f"exhaustive gap on a 7-path: {found.gap}")

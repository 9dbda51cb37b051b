"""Exact marginals on paths: decaying influence for TRI, none for K2."""
from relhom import GibbsSpecification, boundary_influence, fixture, jsm_report
from relhom.fixtures import path_structure


def report(name, n, J):
    H = fixture(name)
    G = path_structure(n, "R1" if name == "tri" else H.signature.names[0], H.signature)
    spec = GibbsSpecification(G, H)
    V = [f"p{i}" for i in range(1, n)]
    rep = jsm_report(spec, J, [V])
    print(f"== {name} on a {n}-path, {rep.pairs_tested} boundary pairs")
    for d, v in sorted(rep.buckets.items()):
        print(f"  distance {d}: {v}")
    print("  violation:", rep.violation)


report("tri", 8, fixture("tri").universe)
report("k2", 6, [])

gap, w = boundary_influence(fixture("k2"), [], 3)
print("K2 root influence:", gap, w)

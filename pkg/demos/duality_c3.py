"""Search for small obstructions to the directed 3-cycle."""
from relhom import enumerate_critical_obstructions, finite_duality_via_A1c, fixture, is_core, render_structure

C3 = fixture("c3")
print("core:", is_core(C3))
print("square dismantles to the diagonal:", finite_duality_via_A1c(C3))
for size in (3, 4):
    rep = enumerate_critical_obstructions(C3, size)
    print(f"critical obstructions up to {size} elements: {len(rep.found)} (exhausted={rep.exhausted})")
for O in enumerate_critical_obstructions(C3, 3).found:
    print("---")
    print(render_structure(O).strip())

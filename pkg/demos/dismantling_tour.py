"""Fold a few small structures down and decide the square test on each.

Run with ``python demos/dismantling_tour.py``.
"""
from relhom import decide_main, fixture, greedy_dismantle, is_dismantlable, render_structure


def show(name):
    H = fixture(name)
    I, seq = greedy_dismantle(H)
    print(f"== {name}: {len(H)} elements")
    print("  folds:", ", ".join(f"{a}->{b}" for a, b in seq.pairs()) or "none")
    print("  dismantlable:", is_dismantlable(H))
    rep = decide_main(H)
    print(f"  square test: holds={rep.holds} length={rep.length} gap={rep.gap}")
    if len(I) > 1:
        print("  stiff part:")
        for line in render_structure(I).splitlines():
            print("   ", line)


if __name__ == "__main__":
    for name in ("sft3", "edge", "k2", "tri"):
        show(name)

"""
The thrice-punctured sphere
===========================

Every closed curve here is either peripheral (a power of a loop around a
cusp) or crosses the figure-eight aB.  The harness below shows that the
current of aB pairs to at least 1 with every non-peripheral class.
"""

from currentkit import DiscreteCurrent
from currentkit.sphere3 import (
    classify_single_selfint,
    figure_eights,
    lemma_a_grid,
    peripheral_class,
    positivity_harness,
    surface,
)

S = surface()

for w in ("b a^3 B", "(ab)^-2", "aB", "aab"):
    print(f"{w:10s} {peripheral_class(w, S)}")

print("\nfigure-eights:", [S.format(c.word) for c in figure_eights(S)])
table = classify_single_selfint(S, R=5)
print("one double point, length <= 5:", [S.format(c.word) for c in table.single], "holds:", table.holds)

grid = lemma_a_grid(max_exp=2, conj_len=2, S=S)
print(f"lemma grid: {grid.checked} pairs, {grid.hypothesis_met} in scope, {len(grid.counterexamples)} counterexamples")

res = positivity_harness(DiscreteCurrent.build(S, ["aB"]), R=8, S=S)
print("\nrunning minimum by length:", res.curve)
print("attained by", S.format(res.attained_by.word), "constant from length", res.stable_from)

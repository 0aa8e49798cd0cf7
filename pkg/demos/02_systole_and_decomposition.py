"""
Systoles and the decomposition of a current
===========================================

A current with positive systole pairs positively with every closed curve.
When the systole vanishes the zero detector finds a simple curve that
misses the support, and the decomposition cuts the surface along it.
"""

from currentkit import DiscreteCurrent, builtin, decompose, systole_scan, zero_detector
from currentkit.decomposition import check_decomposition

torus = builtin("punctured_torus")
g2 = builtin("genus2_octagon")

# a + b fills the torus; i(mu, c) / length(c) stays in a fixed band
mu = DiscreteCurrent.build(torus, ["a", "b"])
for n in (4, 6, 8):
    scan = systole_scan(mu, torus, R_words=n)
    print(f"length <= {n}: systole {scan.systole:g}, ratio in [{scan.c1:.4f}, {scan.c2:.4f}]")

# one handle of genus 2 carries the current, the other is left empty
nu = DiscreteCurrent.build(g2, [("a1", 2), ("b1", 1), ("a2", 3)])
verdict = zero_detector(nu, g2)
print("\nzero detector:", verdict.verdict, [g2.format(c.word) for c in verdict.witness])

rep = decompose(nu, g2, R=4)
print("special curves:", [g2.format(e.word) for e in rep.special_curves])
for p in rep.pieces:
    atoms = {g2.format(c.word): w for c, w in p.atoms}
    print(f"  {p.label:17s} atoms {atoms} systole bound {p.systole_lower_bound}")

chk = check_decomposition(nu, rep, g2)
print(f"mass {chk.piece_weight:g} of {chk.total_weight:g}; reconstruction checked on {chk.checked} classes")

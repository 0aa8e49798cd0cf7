"""
Length functions from higher-rank representations
=================================================

Composing the Fuchsian representation with the irreducible n-dimensional
representation of SL(2) multiplies every length by n - 1.  Normalized
length tables then feed the same trichotomy as intersection functions.
"""

import math

import numpy as np

from currentkit import builtin, enumerate_classes
from currentkit.lengths import chamber_vector, length_table, sym_power_rep, trichotomy_classify

g2 = builtin("genus2_octagon")

print("chamber vector of diag(4, 1, 1/4):", chamber_vector(np.diag([4.0, 1.0, 0.25])))

for n in (3, 4, 5):
    rep = sym_power_rep(g2, n)
    worst = max(
        abs(rep.length(c) - (n - 1) * 2 * math.acosh(abs(g2.trace(c.word)) / 2)) for c in enumerate_classes(g2, 3)
    )
    print(f"n = {n}: max |L - (n-1) length| = {worst:.1e}")

torus = builtin("punctured_torus")
table = length_table(sym_power_rep(torus, 3), enumerate_classes(torus, 3), S=torus)
print("\nnormalized over", [torus.format(c.word) for c in table.family], "by", round(table.normalization, 6))
for c, v in table.entries[:6]:
    print(f"  {torus.format(c.word):6s} {v:.6f}")

fd = trichotomy_classify(table, torus, R=3)
print("pieces:", [(p.label, round(p.minimum, 6)) for p in fd.pieces])

"""
Intersection numbers of closed curves
=====================================

Curves are conjugacy classes in the surface group, written as words.
The pairing i(mu, c) counts, with weights, the crossings between the
support of a discrete current mu and the closed geodesic of c.
"""

import math

from currentkit import builtin, class_intersection, delta, intersection_number, self_intersection
from currentkit.currents import liouville_length

torus = builtin("punctured_torus")

# the slopes a = (1,0), b = (0,1) and ab = (1,1) meet as |ps - qr| predicts
for u, v in [("a", "b"), ("ab", "aB"), ("aab", "b"), ("aab", "abb")]:
    print(f"i({u}, {v}) = {class_intersection(torus, u, v)}")

# per-atom counts and the lift radius at which they stopped changing
res = intersection_number(delta(torus, "a", 2.0) + delta(torus, "b"), "aaB")
print("\nweighted value", res.value, "per atom", [(torus.format(c.word), n) for c, n in res.per_atom])
print("enumeration", res.enumeration, "radius", res.radius, "stabilized", res.stabilized)

# double points: aab is a simple curve, aabb is the shortest figure-eight
for w in ("aab", "aabb", "aaabbb"):
    c = torus.canonical(torus.parse(w))
    print(f"self-intersection of {w}: {self_intersection(c, torus)}")

# the Liouville current recovers hyperbolic length from the cross ratio
c = torus.canonical(torus.parse("ab"))
print("\nLiouville length of ab", liouville_length(c, torus))
print("2 arccosh(|tr|/2)     ", 2 * math.acosh(abs(torus.trace(c.word)) / 2))

"""
Surgery at a double point
=========================

Cutting a curve at a self-crossing and regluing gives three curves.  On
any surface but the thrice-punctured sphere one of them is hyperbolic,
has fewer double points, and pairs with a current no more than the
original did.  Repeating this ends at a simple curve.
"""

from currentkit import DiscreteCurrent, builtin, delta
from currentkit.surgery import find_self_crossing, resolve, simplify_to_simple, surgery_report

torus = builtin("punctured_torus")
sphere = builtin("sphere3")
g2 = builtin("genus2_octagon")

c = torus.canonical(torus.parse("aabb"))
res = resolve(c, find_self_crossing(c, torus), torus)
for w, kind, si in zip(res.words, res.kinds, res.self_intersections):
    print(f"{torus.format(w):10s} {kind:11s} self-intersection {si}")

rep = surgery_report(delta(torus, "b"), c)
print("i(b, aabb) =", rep.intersection_c, "branches:", rep.intersections)

# the exception: the figure-eight on the sphere splits into three cusps
e = sphere.canonical(sphere.parse("aB"))
res = resolve(e, find_self_crossing(e, sphere), sphere)
print("\nsphere3 aB ->", [sphere.format(w) for w in res.words], res.kinds)

# iterate on genus 2 until the curve is simple
mu = DiscreteCurrent.build(g2, ["b1", ("a2", 2)])
tr = simplify_to_simple(mu, g2.canonical(g2.parse("a1 a1 b2 a1 b2")))
for before, after, val in tr.steps:
    print(f"{g2.format(before.word)} -> {g2.format(after.word)}  i = {val:g}")
print("simple result", g2.format(tr.result.word), "from", tr.initial_intersection, "to", tr.final_intersection)

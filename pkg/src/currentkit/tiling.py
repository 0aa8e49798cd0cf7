"""Tiles of a fundamental polygon met by a compact geodesic segment.

Work happens in the Klein model, where geodesics are chords and the
polygon is a Euclidean convex region ``{x : n_i . x <= b_i}``.  The tiles
``k D`` form a face-adjacency graph whose edges are the side pairings,
so a breadth-first search from ``D`` that keeps only tiles meeting a
connected set finds every tile meeting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ResourceLimit, ValidationError
from .groups import SurfacePresentation, _matrix_key, element_cap

TOL_MEET = 1e-9


def uhp_to_klein(z) -> np.ndarray:
    """Upper-half-plane point (complex, real, or ``inf``) to the Klein disk."""
    if z == math.inf or (isinstance(z, str) and z == "inf"):
        return np.array([1.0, 0.0])
    z = complex(z)
    w = (z - 1j) / (z + 1j)
    k = 2.0 * w / (1.0 + abs(w) ** 2)
    return np.array([k.real, k.imag])


def mobius(m: np.ndarray, z: complex) -> complex:
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


@dataclass(frozen=True)
class Polygon:
    normals: np.ndarray  # (n, 2)
    offsets: np.ndarray  # (n,)
    interior: complex  # a point of the polygon, in the upper half-plane

    def meets(self, a: np.ndarray, b: np.ndarray) -> bool:
        """Does the chord from ``a`` to ``b`` (Klein points) meet the polygon?"""
        lo, hi = 0.0, 1.0
        d = b - a
        na = self.normals @ a
        nd = self.normals @ d
        for s, v, off in zip(nd, na, self.offsets):
            room = off + TOL_MEET - v
            if abs(s) < 1e-15:
                if room < 0:
                    return False
                continue
            t = room / s
            if s > 0:
                hi = min(hi, t)
            else:
                lo = max(lo, t)
            if lo > hi:
                return False
        return True


def _halfplanes_ideal(vertices) -> tuple:
    pts = [uhp_to_klein(v) for v in vertices]
    ang = [math.atan2(p[1], p[0]) for p in pts]
    pts = [p for _, p in sorted(zip(ang, pts), key=lambda t: t[0])]
    centre = np.mean(pts, axis=0)
    normals, offsets = [], []
    for p, q in zip(pts, pts[1:] + pts[:1]):
        n = np.array([q[1] - p[1], p[0] - q[0]])
        n /= np.hypot(*n)
        off = float(n @ p)
        if n @ centre > off:
            n, off = -n, -off
        normals.append(n)
        offsets.append(off)
    return np.array(normals), np.array(offsets)


def _halfplanes_dirichlet(S: SurfacePresentation, centre: complex) -> tuple:
    """Bisectors between ``centre`` and its images under the generators."""
    if abs(centre - 1j) > 1e-12:
        # move the centre to i so that it sits at the Klein origin
        raise ValidationError("Dirichlet domains are supported with centre i")
    normals, offsets = [], []
    for x in S.letters:
        q = mobius(S.generator_matrix(x), 1j)
        w = (q - 1j) / (q + 1j)
        r = abs(w)
        normals.append(np.array([w.real, w.imag]) / r)
        offsets.append(r)  # tanh(d/2) = |w| in the Poincare disk
    return np.array(normals), np.array(offsets)


_POLYGONS: dict = {}


def polygon(S: SurfacePresentation) -> Polygon | None:
    hit = _POLYGONS.get(id(S))
    if hit is not None and hit[0] is S:
        return hit[1]
    dom = S.domain
    poly = None
    if dom:
        if "ideal_vertices" in dom:
            vs = [math.inf if v == "inf" else float(v) for v in dom["ideal_vertices"]]
            n, b = _halfplanes_ideal(vs)
            poly = Polygon(n, b, 1j)
        elif "center" in dom:
            c = complex(*dom["center"])
            n, b = _halfplanes_dirichlet(S, c)
            poly = Polygon(n, b, c)
        else:
            raise ValidationError("domain needs 'center' or 'ideal_vertices'")
    _POLYGONS[id(S)] = (S, poly)
    return poly


def tiles_meeting(S: SurfacePresentation, p: complex, q: complex) -> list:
    """Group elements ``k`` (word, matrix) with ``k D`` meeting the segment ``[p, q]``."""
    poly = polygon(S)
    if poly is None:
        raise ValidationError(f"{S.name} has no fundamental polygon")
    cap = min(element_cap(), 200_000)
    segs = [(poly.interior, p), (p, q)]
    start = ((), np.eye(2))
    seen = {_matrix_key(start[1])}
    queue = [start]
    found = []
    head = 0
    while head < len(queue):
        w, m = queue[head]
        head += 1
        inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
        hits = [poly.meets(uhp_to_klein(mobius(inv, a)), uhp_to_klein(mobius(inv, b))) for a, b in segs]
        if not any(hits):
            continue
        if hits[1]:
            found.append((w, m))
        for x in S.letters:
            if w and w[-1] == -x:
                continue
            m2 = m @ S.generator_matrix(x)
            key = _matrix_key(m2)
            if key in seen:
                continue
            seen.add(key)
            queue.append((w + (x,), m2))
            if len(seen) > cap:
                raise ResourceLimit(f"tile search exceeded {cap} elements")
    return found

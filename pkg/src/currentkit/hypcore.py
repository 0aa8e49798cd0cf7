"""Möbius maps, the boundary circle and Liouville boxes.

The boundary of the hyperbolic plane is modelled as the projective line
RP^1.  A line spanned by ``(x, y)`` is stored by its doubled angle
``phi = 2 * atan2(y, x) mod 2*pi``, which makes the cyclic order a plain
comparison of angles.  The upper half-plane chart point ``t`` is the line
``(t : 1)`` and infinity is ``(1 : 0)``; increasing ``phi`` corresponds to
decreasing ``t``.

Matrices act linearly on the representing vectors, so the projective
action never needs a special case for the point at infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneratePoints,
    NotHyperbolic,
    OverlappingIntervals,
    SharedEndpoint,
    ValidationError,
)

TWO_PI = 2.0 * math.pi

#: angular distance below which two boundary points are the same point
TOL_PT = 1e-9
#: tolerance on ``|trace| - 2`` for the parabolic classification
TOL_CLASS = 1e-9
#: determinant tolerance for accepted matrices
TOL_DET = 1e-12


def _canon(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    if phi >= TWO_PI:
        phi -= TWO_PI
    return phi


def angular_distance(phi1: float, phi2: float) -> float:
    d = abs(_canon(phi1) - _canon(phi2))
    return min(d, TWO_PI - d)


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A point of the circle at infinity, stored by its doubled angle."""

    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", _canon(float(self.phi)))

    @classmethod
    def from_vector(cls, x: float, y: float) -> "BoundaryPoint":
        if x == 0.0 and y == 0.0:
            raise ValidationError("zero vector does not define a boundary point")
        return cls(2.0 * math.atan2(y, x))

    @classmethod
    def from_real(cls, t: float) -> "BoundaryPoint":
        """Point ``t`` of the real line in the upper half-plane chart."""
        return cls.from_vector(t, 1.0)

    @classmethod
    def infinity(cls) -> "BoundaryPoint":
        return cls(0.0)

    @property
    def vector(self) -> np.ndarray:
        half = 0.5 * self.phi
        return np.array([math.cos(half), math.sin(half)])

    def to_real(self) -> float:
        """Upper half-plane coordinate (``inf`` for the point at infinity)."""
        x, y = self.vector
        if abs(y) < 1e-300:
            return math.inf
        return x / y

    def coincides(self, other: "BoundaryPoint", tol: float = TOL_PT) -> bool:
        return angular_distance(self.phi, other.phi) < tol

    def __eq__(self, other):
        if not isinstance(other, BoundaryPoint):
            return NotImplemented
        return self.coincides(other)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MobiusMap:
    """Orientation preserving isometry given by a 2x2 matrix of determinant 1.

    ``M`` and ``-M`` are the same map; use :meth:`same_map` to compare.
    """

    entries: tuple

    def __post_init__(self):
        a, b, c, d = (float(x) for x in self.entries)
        det = a * d - b * c
        if not det > 0.0:
            raise ValidationError(f"determinant {det!r} is not positive")
        if abs(det - 1.0) >= TOL_DET:
            s = 1.0 / math.sqrt(det)
            a, b, c, d = a * s, b * s, c * s, d * s
        object.__setattr__(self, "entries", (a, b, c, d))

    @classmethod
    def from_matrix(cls, m) -> "MobiusMap":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(tuple(m.ravel()))

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls((1.0, 0.0, 0.0, 1.0))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(2, 2)

    @property
    def trace(self) -> float:
        return self.entries[0] + self.entries[3]

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "MobiusMap":
        a, b, c, d = self.entries
        return MobiusMap((d, -b, -c, a))

    def same_map(self, other: "MobiusMap", tol: float = 1e-8) -> bool:
        m, n = self.matrix, other.matrix
        return bool(np.allclose(m, n, rtol=0, atol=tol) or np.allclose(m, -n, rtol=0, atol=tol))

    def classify(self, tol: float = TOL_CLASS) -> str:
        """One of ``identity``, ``hyperbolic``, ``parabolic``, ``elliptic``."""
        if self.same_map(MobiusMap.identity(), tol=max(tol, 1e-12)):
            return "identity"
        t = abs(self.trace)
        if t > 2.0 + tol:
            return "hyperbolic"
        if t >= 2.0 - tol:
            return "parabolic"
        return "elliptic"

    def __repr__(self):
        a, b, c, d = self.entries
        return f"MobiusMap([[{a:.6g}, {b:.6g}], [{c:.6g}, {d:.6g}]])"


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Unordered pair of distinct boundary points."""

    p: BoundaryPoint
    q: BoundaryPoint

    def __post_init__(self):
        if self.p.coincides(self.q):
            raise DegeneratePoints("geodesic endpoints coincide")

    @property
    def endpoints(self):
        return (self.p, self.q)

    def __eq__(self, other):
        if not isinstance(other, Geodesic):
            return NotImplemented
        return (self.p == other.p and self.q == other.q) or (
            self.p == other.q and self.q == other.p
        )

    __hash__ = None


@dataclass(frozen=True)
class Interval:
    """Arc from ``a`` counterclockwise to ``b`` with optional closed ends."""

    a: BoundaryPoint
    b: BoundaryPoint
    closed_a: bool = False
    closed_b: bool = False

    def __post_init__(self):
        if self.a.coincides(self.b):
            raise DegeneratePoints("interval endpoints coincide")

    def contains(self, x: BoundaryPoint, tol: float = TOL_PT) -> bool:
        if x.coincides(self.a, tol):
            return self.closed_a
        if x.coincides(self.b, tol):
            return self.closed_b
        return orient(self.a, x, self.b)


def orient(a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint) -> bool:
    """True iff going counterclockwise from ``a`` one meets ``b`` before ``c``."""
    if a.coincides(b) or a.coincides(c) or b.coincides(c):
        raise DegeneratePoints("orient needs three distinct points")
    return _canon(b.phi - a.phi) < _canon(c.phi - a.phi)


def apply(m: MobiusMap, p: BoundaryPoint) -> BoundaryPoint:
    v = m.matrix @ p.vector
    return BoundaryPoint.from_vector(v[0], v[1])


def eigen_directions(m) -> tuple[np.ndarray, np.ndarray, float]:
    """Unit eigenvectors ``(attracting, repelling)`` and the larger eigenvalue.

    ``m`` is a 2x2 array with ``|trace| > 2`` and determinant 1.
    """
    a, b, c, d = np.asarray(m, dtype=float).ravel()
    tr = a + d
    disc = math.sqrt(max(tr * tr - 4.0, 0.0))
    # larger-modulus eigenvalue without cancellation
    lam = 0.5 * (tr + math.copysign(disc, tr))
    mu = 1.0 / lam
    vecs = []
    for ev in (lam, mu):
        v1 = np.array([b, ev - a])
        v2 = np.array([ev - d, c])
        v = v1 if np.dot(v1, v1) >= np.dot(v2, v2) else v2
        vecs.append(v / np.linalg.norm(v))
    return vecs[0], vecs[1], lam


def axis(m: MobiusMap) -> tuple[BoundaryPoint, BoundaryPoint]:
    """Attracting and repelling fixed points of a hyperbolic map."""
    if m.classify() != "hyperbolic":
        raise NotHyperbolic(f"{m!r} is not hyperbolic")
    vp, vm, _ = eigen_directions(m.matrix)
    return BoundaryPoint.from_vector(*vp), BoundaryPoint.from_vector(*vm)


def translation_length(m: MobiusMap) -> float:
    kind = m.classify()
    if kind in ("parabolic", "identity"):
        return 0.0
    if kind == "elliptic":
        raise NotHyperbolic("elliptic elements have no translation length")
    return 2.0 * math.acosh(abs(m.trace) / 2.0)


def _linked(p1, q1, p2, q2) -> bool:
    inside_p = orient(p1, p2, q1)
    inside_q = orient(p1, q2, q1)
    return inside_p != inside_q


def cross(g1: Geodesic, g2: Geodesic) -> bool:
    """True iff the two geodesics meet in exactly one point of the plane.

    Raises :class:`SharedEndpoint` when the geodesics are asymptotic.
    """
    for x in g2.endpoints:
        for y in g1.endpoints:
            if x.coincides(y):
                raise SharedEndpoint("geodesics share an endpoint")
    return _linked(g1.p, g1.q, g2.p, g2.q)


def _det(u: np.ndarray, v: np.ndarray) -> float:
    return u[0] * v[1] - u[1] * v[0]


def cross_ratio(a, b, c, d) -> float:
    """``(a-c)(b-d) / ((a-d)(b-c))`` computed from representing vectors."""
    va, vb, vc, vd = (p.vector for p in (a, b, c, d))
    return (_det(va, vc) * _det(vb, vd)) / (_det(va, vd) * _det(vb, vc))


def liouville_box(a: BoundaryPoint, b: BoundaryPoint, c: BoundaryPoint, d: BoundaryPoint) -> float:
    """Liouville measure of the box of geodesics from arc ``ab`` to arc ``cd``.

    The arcs are the ones cut out by the unlinked pairs ``{a, b}`` and
    ``{c, d}`` that avoid each other.  Normalized so that the box spanned
    by an axis and a fundamental arc of a hyperbolic element has measure
    equal to its translation length.
    """
    pts = (a, b, c, d)
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i].coincides(pts[j]):
                raise OverlappingIntervals("box corners must be distinct")
    if _linked(a, b, c, d):
        raise OverlappingIntervals("the pairs {a,b} and {c,d} are linked")
    return abs(math.log(abs(cross_ratio(a, b, c, d))))

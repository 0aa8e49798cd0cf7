"""Discrete geodesic currents and the intersection engine.

Intersection numbers are computed with the box formula: the intersection
of a current with a closed geodesic ``c`` is the mass of geodesics with one
endpoint in the arc between the fixed points of ``gamma = c`` and the other
in a fundamental arc ``[z, gamma z[`` of the complementary arc.  For a
discrete current this is a count of lifts of each atom crossing the axis of
``gamma``, taken modulo translation along that axis.

Lifts are found in the diagonal frame of ``gamma``, where the axis is the
imaginary half-line and ``gamma`` acts by a real dilation.  A lift with frame
endpoints ``x1 < 0 < x2`` crosses the axis; the pair
``(log|x1| mod ell, log x2 - log|x1|)`` identifies its orbit under
``<gamma>``.  Choosing ``z`` inside the widest gap of the observed
``log|x1|`` values makes the fundamental arc avoid every atom endpoint.

Three lift enumerations share this orbit count:

``tiles`` (default when the surface carries a fundamental polygon)
    A lift crossing the fundamental segment ``[p, gamma p]`` of the axis does
    so inside some tile ``h D``, and it meets ``D`` itself after moving by
    ``h^-1``; so it equals ``h t^-1 * axis(atom)`` with ``t D`` a tile met by
    one period of the atom's axis.  Both tile lists are finite, so the
    count is exact and does not depend on ``R``.
``tube``
    Coset representatives ``p * s * q`` with ``p`` a prefix of ``c``, ``s`` in
    the Cayley ball of radius ``R`` and ``q`` the inverse of a prefix of the
    atom.  Reliable on free groups at small ``R``; on genus 2 it
    occasionally overcounts pairs of words of length 5 or 6.
``ball``
    Every coset representative from the Cayley ball of radius ``R``.

The radius routes report whether the count was the same at ``R - 1``;
that is a heuristic, not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import groups
from .errors import InvalidCurrent, NotHyperbolic, ValidationError
from .groups import ConjClass, SurfacePresentation, Word, word_key
from .hypcore import BoundaryPoint, Geodesic, eigen_directions, liouville_box
from .parallel import parallel_map
from .tiling import mobius, polygon, tiles_meeting

#: relative size below which a frame coordinate counts as a shared endpoint
TOL_ENDPOINT = 1e-8
#: clustering tolerance for orbit coordinates
TOL_ORBIT = 1e-6

DEFAULT_RADIUS = 2
ENUMERATIONS = ("tiles", "tube", "ball")


# ------------------------------------------------------------- currents


@dataclass(frozen=True)
class DiscreteCurrent:
    """Finite weighted sum of closed-geodesic classes on a surface."""

    atoms: tuple
    surface: SurfacePresentation = field(compare=False, repr=False)

    def __post_init__(self):
        S = self.surface
        seen = set()
        clean = []
        for cls, weight in self.atoms:
            if not isinstance(cls, ConjClass):
                cls = S.canonical(S.parse(cls))
            weight = float(weight)
            label = S.format(cls.word)
            if not math.isfinite(weight) or weight <= 0.0:
                raise InvalidCurrent(f"atom {label}: weight must be positive, got {weight}")
            if not cls.word:
                raise InvalidCurrent(f"atom {label}: trivial class")
            if groups.is_peripheral(cls, S):
                raise InvalidCurrent(f"atom {label}: peripheral class has no closed geodesic")
            if not S.is_hyperbolic(cls.word):
                raise InvalidCurrent(f"atom {label}: class is not hyperbolic")
            if cls in seen:
                raise InvalidCurrent(f"atom {label}: repeated class")
            seen.add(cls)
            clean.append((cls, weight))
        clean.sort(key=lambda cw: word_key(cw[0].word))
        object.__setattr__(self, "atoms", tuple(clean))

    @classmethod
    def build(cls, S: SurfacePresentation, spec) -> "DiscreteCurrent":
        """From ``[(word, weight), ...]``; words may be strings or tuples."""
        if isinstance(spec, dict):
            spec = list(spec.items())
        atoms = []
        for item in spec:
            if isinstance(item, (str, ConjClass)) or (
                isinstance(item, tuple) and all(isinstance(x, int) for x in item)
            ):
                word, weight = item, 1.0
            else:
                word, weight = item
            cls_ = word if isinstance(word, ConjClass) else S.canonical(S.parse(word))
            atoms.append((cls_, weight))
        return cls(tuple(atoms), S)

    @property
    def classes(self) -> list[ConjClass]:
        return [c for c, _ in self.atoms]

    @property
    def total_weight(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    def weight_of(self, c: ConjClass) -> float:
        for cls, w in self.atoms:
            if cls == c:
                return w
        return 0.0

    def __add__(self, other: "DiscreteCurrent") -> "DiscreteCurrent":
        acc: dict[ConjClass, float] = {}
        for cls, w in self.atoms + other.atoms:
            acc[cls] = acc.get(cls, 0.0) + w
        return DiscreteCurrent(tuple(acc.items()), self.surface)

    def __rmul__(self, t: float) -> "DiscreteCurrent":
        return DiscreteCurrent(tuple((c, t * w) for c, w in self.atoms), self.surface)

    def restricted(self, classes: Iterable[ConjClass]) -> "DiscreteCurrent":
        keep = set(classes)
        return DiscreteCurrent(tuple(cw for cw in self.atoms if cw[0] in keep), self.surface)

    def to_json(self) -> list:
        return [[self.surface.format(c.word), w] for c, w in self.atoms]


class LiouvilleCurrent:
    """The Liouville current, handled in closed form."""

    def __init__(self, surface: SurfacePresentation):
        self.surface = surface

    def to_json(self) -> str:
        return "liouville"


def delta(S: SurfacePresentation, word, weight: float = 1.0) -> DiscreteCurrent:
    return DiscreteCurrent.build(S, [(word, weight)])


# -------------------------------------------------------- per-class data


@dataclass
class _ClassData:
    word: Word
    root: Word
    power: int
    gamma: np.ndarray  # matrix of the root
    ell_root: float
    frame_inv: np.ndarray  # inverse of the eigenframe of the root
    frame: np.ndarray
    eig: np.ndarray  # columns: attracting, repelling eigenvectors of the root
    prefix_mats: np.ndarray  # matrices of the root's prefixes, lengths 0..|root|-1
    prefixes: list
    suffix_mats: np.ndarray  # inverse-prefix matrices applied to the eigenvectors
    suffixes: list
    tiles: list | None = None  # tiles met by one period of the axis


_CLASS_CACHE: dict = {}


def _class_data(S: SurfacePresentation, c: ConjClass) -> _ClassData:
    key = (id(S), c.word)
    hit = _CLASS_CACHE.get(key)
    if hit is not None and hit[0] is S:
        return hit[1]
    if not c.word:
        raise NotHyperbolic("trivial class")
    root, k = groups.primitive_root(c)
    g = S.evaluate(root)
    if abs(np.trace(g)) <= 2.0 + 1e-9:
        raise NotHyperbolic(f"{S.format(c.word)} is not hyperbolic")
    vp, vm, lam = eigen_directions(g)
    P = np.column_stack([vp, vm])
    if np.linalg.det(P) < 0:
        P[:, 1] = -P[:, 1]
    Pinv = np.linalg.inv(P)
    prefixes = [root[:i] for i in range(len(root))]
    prefix_mats = np.stack([S.evaluate(p) for p in prefixes])
    suffixes = [groups.inverse(p) for p in prefixes]
    suffix_mats = np.stack([S.evaluate(q) @ P for q in suffixes])
    data = _ClassData(
        word=c.word,
        root=root,
        power=k,
        gamma=g,
        ell_root=2.0 * math.log(abs(lam)),
        frame_inv=Pinv,
        frame=P,
        eig=P,
        prefix_mats=prefix_mats,
        prefixes=prefixes,
        suffix_mats=suffix_mats,
        suffixes=suffixes,
    )
    _CLASS_CACHE[key] = (S, data)
    return data


def _as_class(S: SurfacePresentation, c) -> ConjClass:
    if isinstance(c, ConjClass):
        return c
    return S.canonical(S.parse(c))


# --------------------------------------------------------- orbit counting


def _crossing_coords(Y: np.ndarray):
    """Frame endpoints ``Y[..., :, 0]`` and ``Y[..., :, 1]`` -> crossing mask and coordinates.

    ``Y`` has shape ``(N, 2, 2)``: column ``j`` is a vector for endpoint ``j``.
    """
    norms = np.sqrt((Y**2).sum(axis=1))  # (N, 2)
    tiny = (np.abs(Y[:, 0, :]) < TOL_ENDPOINT * norms) | (np.abs(Y[:, 1, :]) < TOL_ENDPOINT * norms)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = Y[:, 0, :] / Y[:, 1, :]
    degenerate = tiny.any(axis=1)
    crossing = (~degenerate) & (np.sign(x[:, 0]) != np.sign(x[:, 1]))
    return crossing, x


def _orbit_clusters(u: np.ndarray, d: np.ndarray, ell: float) -> np.ndarray:
    """Cluster labels for orbit coordinates ``(u mod ell, d)``."""
    n = len(u)
    if n == 0:
        return np.zeros(0, dtype=int)
    um = np.mod(u, ell)
    srt = np.sort(um)
    gaps = np.diff(np.concatenate([srt, [srt[0] + ell]]))
    j = int(np.argmax(gaps))
    offset = srt[j] + 0.5 * gaps[j]
    us = np.mod(um - offset, ell)
    order = np.lexsort((d, us))
    labels = np.empty(n, dtype=int)
    label = -1
    # group by u, then split each u-group by d
    cuts = np.nonzero(np.diff(us[order]) > TOL_ORBIT)[0] + 1
    bounds = [0, *cuts.tolist(), n]
    for a, b in zip(bounds[:-1], bounds[1:]):
        idx = order[a:b]
        idx = idx[np.argsort(d[idx], kind="stable")]
        dv = d[idx]
        label += 1
        labels[idx[0]] = label
        for t in range(1, len(idx)):
            if dv[t] - dv[t - 1] > TOL_ORBIT:
                label += 1
            labels[idx[t]] = label
    return labels


@dataclass
class _AtomCount:
    orbits: int
    witness: Word | None
    count_prev: int | None  # orbit count at radius R - 1
    orbit_words: list | None = None  # minimal coset word per orbit


def _enumeration(S: SurfacePresentation, enumeration: str | None) -> str:
    if enumeration is None:
        return "tiles" if polygon(S) is not None else "tube"
    if enumeration not in ENUMERATIONS:
        raise ValidationError(f"enumeration must be one of {ENUMERATIONS}")
    if enumeration == "tiles" and polygon(S) is None:
        raise ValidationError(f"{S.name} has no fundamental polygon for exact counts")
    return enumeration


def _adj(m: np.ndarray) -> np.ndarray:
    """Inverse of a determinant-one matrix."""
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


def _period_tiles(S: SurfacePresentation, data: _ClassData) -> list:
    """Tiles met by one period of the axis, centred on the projection of i.

    Centring keeps the tile words about half as long as a segment that
    starts at the projection, which is what limits rounding error.
    """
    if data.tiles is None:
        P = data.frame
        z = mobius(_adj(P) / np.linalg.det(P), 1j)
        half = math.exp(data.ell_root / 2.0)
        p = mobius(P, 1j * abs(z) / half)
        q = mobius(P, 1j * abs(z) * half)
        data.tiles = tiles_meeting(S, p, q)
    return data.tiles


def _count_orbits(
    S: SurfacePresentation,
    target: _ClassData,
    atom: _ClassData,
    R: int,
    enumeration: str,
    want_witness: bool = False,
) -> _AtomCount:
    enumeration = _enumeration(S, enumeration)
    n_prev = None
    if enumeration == "tiles":
        H = _period_tiles(S, target)
        T = _period_tiles(S, atom)
        # frame coordinate of h*u is det(u, h^-1 r) / det(h^-1 a, u); moving the
        # frame instead of multiplying h t^-1 keeps every matrix short
        Hinv = np.stack([_adj(m) for _, m in H])
        Tinv = np.stack([_adj(m) for _, m in T])
        A = Hinv @ target.eig[:, 0]  # (nh, 2)
        Rv = Hinv @ target.eig[:, 1]
        U = np.einsum("qab,bj->qja", Tinv, atom.eig)  # (nt, 2 endpoints, 2)
        num = U[None, :, :, 0] * Rv[:, None, None, 1] - U[None, :, :, 1] * Rv[:, None, None, 0]
        den = A[:, None, None, 0] * U[None, :, :, 1] - A[:, None, None, 1] * U[None, :, :, 0]
        un = np.linalg.norm(U, axis=2)[None]
        tiny = (np.abs(num) < TOL_ENDPOINT * un * np.linalg.norm(Rv, axis=1)[:, None, None]) | (
            np.abs(den) < TOL_ENDPOINT * un * np.linalg.norm(A, axis=1)[:, None, None]
        )
        shape = num.shape[:2]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (num / den).reshape(-1, 2)
        degenerate = tiny.reshape(-1, 2).any(axis=1)
        crossing = (~degenerate) & (np.sign(x[:, 0]) != np.sign(x[:, 1]))
        idx = np.nonzero(crossing)[0]
        p_i, q_i = np.unravel_index(idx, shape)
        in_prev = np.ones(len(idx), dtype=bool)

        def word_of(t):
            return groups.free_reduce(H[p_i[t]][0] + groups.inverse(T[q_i[t]][0]))

    elif enumeration == "tube":
        B = groups.ball(S, R)
        n_prev_ball = len(groups.ball(S, R - 1)) if R >= 1 else 0
        A = np.einsum("ab,pbc->pac", target.frame_inv, target.prefix_mats)
        Y = np.einsum("pab,jbc,qcd->pjqad", A, B.matrices, atom.suffix_mats)
        shape = Y.shape[:3]
        Y = Y.reshape(-1, 2, 2)
        crossing, x = _crossing_coords(Y)
        idx = np.nonzero(crossing)[0]
        p_i, j_i, q_i = np.unravel_index(idx, shape)
        in_prev = j_i < n_prev_ball

        def word_of(t):
            return target.prefixes[p_i[t]] + B.words[j_i[t]] + atom.suffixes[q_i[t]]

    elif enumeration == "ball":
        B = groups.ball(S, R)
        reps = groups.coset_reps(S, R, atom.root)
        mats = np.stack([S.evaluate(r) for r in reps])
        Y = np.einsum("ab,jbc,cd->jad", target.frame_inv, mats, atom.eig)
        crossing, x = _crossing_coords(Y)
        idx = np.nonzero(crossing)[0]
        in_prev = np.array([len(reps[t]) <= R - 1 for t in idx], dtype=bool)

        def word_of(t):
            return reps[int(idx[t])]
    else:
        raise ValidationError(f"enumeration must be one of {ENUMERATIONS}")

    if len(idx) == 0:
        return _AtomCount(0, None, 0)
    xs = x[idx]
    neg = np.where(xs[:, 0] < 0, xs[:, 0], xs[:, 1])
    pos = np.where(xs[:, 0] < 0, xs[:, 1], xs[:, 0])
    u = np.log(-neg)
    d = np.log(pos) - u
    labels = _orbit_clusters(u, d, target.ell_root)
    n = int(labels.max()) + 1
    n_prev = len(set(labels[in_prev].tolist()))
    if not want_witness:
        return _AtomCount(n, None, n_prev)
    per_orbit: list = [None] * n
    for t in range(len(idx)):
        w = S.reduce(word_of(t))
        lab = labels[t]
        if per_orbit[lab] is None or word_key(w) < word_key(per_orbit[lab]):
            per_orbit[lab] = w
    per_orbit.sort(key=word_key)
    return _AtomCount(n, per_orbit[0], n_prev, per_orbit)


# ------------------------------------------------------------- results


@dataclass
class IntersectionResult:
    """Weighted crossing count of a current with one closed geodesic."""

    value: float
    radius: int
    stabilized: bool
    per_atom: list  # (ConjClass, count)
    witnesses: dict = field(default_factory=dict)
    enumeration: str = "tiles"

    def count_for(self, c: ConjClass) -> int:
        for cls, n in self.per_atom:
            if cls == c:
                return n
        return 0


def _check_radius(R: int):
    if not isinstance(R, (int, np.integer)) or R < 0:
        raise ValidationError(f"radius must be a non-negative integer, got {R!r}")


def intersection_number(
    mu,
    c,
    S: SurfacePresentation | None = None,
    R: int = DEFAULT_RADIUS,
    enumeration: str | None = None,
    want_witness: bool = False,
) -> IntersectionResult:
    """Intersection of the current ``mu`` with the closed geodesic ``c``.

    Parameters
    ----------
    mu : DiscreteCurrent or LiouvilleCurrent
    c : class, word or string
    S : surface; defaults to the surface of ``mu``
    R : radius of the lift enumeration
    enumeration : ``"tiles"``, ``"tube"`` or ``"ball"``; by default
        ``"tiles"`` when the surface has a fundamental polygon

    Returns
    -------
    IntersectionResult
        ``value = sum(weight * count)`` with integer per-atom counts.  For a
        non-primitive class or atom the count includes both exponents.
    """
    S = S or mu.surface
    _check_radius(R)
    enumeration = _enumeration(S, enumeration)
    c = _as_class(S, c)
    if isinstance(mu, LiouvilleCurrent):
        return IntersectionResult(liouville_length(c, S), 0, True, [], {}, "closed_form")
    target = _class_data(S, c)
    per_atom = []
    witnesses = {}
    value = 0.0
    stable = True
    for cls, weight in mu.atoms:
        atom = _class_data(S, cls)
        res = _count_orbits(S, target, atom, R, enumeration, want_witness)
        factor = target.power * atom.power
        count = res.orbits * factor
        per_atom.append((cls, count))
        if res.witness is not None:
            witnesses[cls] = res.witness
        value += weight * count
        if enumeration != "tiles" and (R == 0 or res.count_prev != res.orbits):
            stable = False
    return IntersectionResult(value, R, stable, per_atom, witnesses, enumeration)


def pairing(mu: DiscreteCurrent, nu: DiscreteCurrent, S=None, R: int = DEFAULT_RADIUS, enumeration=None):
    """Bilinear pairing ``i(mu, nu)`` summed over the atoms of ``nu``."""
    S = S or mu.surface
    total = 0.0
    for cls, weight in nu.atoms:
        total += weight * intersection_number(mu, cls, S, R, enumeration).value
    return total


def class_intersection(S: SurfacePresentation, c1, c2, R: int = DEFAULT_RADIUS, enumeration=None) -> int:
    """Integer intersection number of two hyperbolic classes."""
    c1, c2 = _as_class(S, c1), _as_class(S, c2)
    target, atom = _class_data(S, c2), _class_data(S, c1)
    res = _count_orbits(S, target, atom, R, enumeration)
    return res.orbits * target.power * atom.power


def crossing_orbits(S: SurfacePresentation, target, atom, R: int = DEFAULT_RADIUS, enumeration=None) -> list:
    """Minimal coset word ``eta`` for every orbit of lifts ``eta * axis(atom)``
    crossing the axis of ``target``, sorted by (length, lex)."""
    t, a = _class_data(S, _as_class(S, target)), _class_data(S, _as_class(S, atom))
    res = _count_orbits(S, t, a, R, enumeration, want_witness=True)
    return res.orbit_words or []


def self_intersection(c, S: SurfacePresentation, R: int = DEFAULT_RADIUS, enumeration=None) -> int:
    """Number of double points of the closed geodesic (half of ``i(c, c)``)."""
    n = class_intersection(S, c, c, R, enumeration)
    if n % 2:
        raise ValidationError(f"odd self-pairing {n} for {S.format(_as_class(S, c).word)}")
    return n // 2


def is_simple(c, S: SurfacePresentation, R: int = DEFAULT_RADIUS) -> bool:
    return self_intersection(c, S, R) == 0


# ---------------------------------------------------- somewhat short test


@dataclass
class SSCertificate:
    verdict: str  # "crossing_found" or "clear_up_to_radius"
    witness: tuple | None  # (atom class, coset word)
    radius: int

    @property
    def clear(self) -> bool:
        return self.verdict == "clear_up_to_radius"


def lift_geodesic(S: SurfacePresentation, eta: Sequence[int], cls: ConjClass) -> Geodesic:
    """The geodesic ``eta * axis(cls)``."""
    root, _ = groups.primitive_root(cls)
    vp, vm, _ = eigen_directions(S.evaluate(root))
    M = S.evaluate(eta)
    a, b = M @ vp, M @ vm
    return Geodesic(BoundaryPoint.from_vector(*a), BoundaryPoint.from_vector(*b))


def axis_geodesic(S: SurfacePresentation, c) -> Geodesic:
    return lift_geodesic(S, (), _as_class(S, c))


def _linked_mask(gp: np.ndarray, gq: np.ndarray, E1: np.ndarray, E2: np.ndarray) -> np.ndarray:
    def det(u, V):
        return u[0] * V[:, 1] - u[1] * V[:, 0]

    d1p, d1q, d2p, d2q = det(gp, E1), det(gq, E1), det(gp, E2), det(gq, E2)
    scale = np.sqrt((E1**2).sum(axis=1)) * np.sqrt((E2**2).sum(axis=1))
    tiny = np.minimum.reduce([np.abs(d1p), np.abs(d1q), np.abs(d2p), np.abs(d2q)])
    degenerate = tiny < TOL_ENDPOINT * np.sqrt(scale)
    # the pairs are linked iff the cross-ratio is negative
    return (~degenerate) & ((d1p * d2q) * (d2p * d1q) < 0)


def somewhat_short(mu: DiscreteCurrent, g: Geodesic, S=None, R: int = DEFAULT_RADIUS) -> SSCertificate:
    """Look for a lift of a support atom crossing ``g`` among ball coset representatives."""
    S = S or mu.surface
    _check_radius(R)
    gp, gq = g.p.vector, g.q.vector
    for cls, _w in mu.atoms:
        root, _ = groups.primitive_root(cls)
        reps = groups.coset_reps(S, R, root)
        vp, vm, _ = eigen_directions(S.evaluate(root))
        mats = np.stack([S.evaluate(r) for r in reps])
        E1, E2 = mats @ vp, mats @ vm
        hit = np.nonzero(_linked_mask(gp, gq, E1, E2))[0]
        if len(hit):
            return SSCertificate("crossing_found", (cls, reps[int(hit[0])]), R)
    return SSCertificate("clear_up_to_radius", None, R)


@dataclass
class QuadrilateralCheck:
    diagonals_clear: bool
    sides_clear: tuple  # (x1x2, x2x3, x3x4, x4x1)

    @property
    def holds(self) -> bool:
        """A clear pair of diagonals forces four clear sides."""
        return not self.diagonals_clear or all(self.sides_clear)


def quadrilateral_check(mu: DiscreteCurrent, points: Sequence[BoundaryPoint], S=None, R: int = DEFAULT_RADIUS) -> QuadrilateralCheck:
    """Test the diagonals and sides of a positively oriented boundary quadrilateral."""
    from .hypcore import orient

    S = S or mu.surface
    x1, x2, x3, x4 = points
    if not (orient(x1, x2, x3) and orient(x1, x3, x4)):
        raise ValidationError("quadrilateral corners must be positively oriented")

    def clear(p, q):
        return somewhat_short(mu, Geodesic(p, q), S, R).clear

    diag = clear(x1, x3) and clear(x2, x4)
    sides = tuple(clear(p, q) for p, q in ((x1, x2), (x2, x3), (x3, x4), (x4, x1)))
    return QuadrilateralCheck(diag, sides)


# ------------------------------------------------------------- Liouville


def liouville_length(c, S: SurfacePresentation, z: BoundaryPoint | None = None) -> float:
    """Liouville mass of the box spanned by the axis of ``c`` and ``[z, c z[``."""
    c = _as_class(S, c)
    g = S.evaluate(c.word)
    if abs(np.trace(g)) <= 2.0 + 1e-9:
        raise NotHyperbolic(f"{S.format(c.word)} is not hyperbolic")
    vp, vm, lam = eigen_directions(g)
    plus, minus = BoundaryPoint.from_vector(*vp), BoundaryPoint.from_vector(*vm)
    if z is None:
        # g is diag(lam, 1/lam) in its eigenframe, so z and gz can be placed
        # symmetrically there; multiplying by g would round away the small
        # component of gz
        P = np.column_stack([vp, vm])
        if np.linalg.det(P) < 0:
            P[:, 1] = -P[:, 1]
        r = math.sqrt(abs(lam))
        z = BoundaryPoint.from_vector(*(P @ np.array([-1.0 / r, r])))
        gz = P @ np.array([-r, 1.0 / r])
    else:
        gz = g @ z.vector
    return liouville_box(plus, minus, z, BoundaryPoint.from_vector(*gz))


# ------------------------------------------------------------ enumeration

_ENUM_CACHE: dict = {}


def _cyclic_words(S: SurfacePresentation, n: int):
    letters = S.letters

    def rec(prefix):
        if len(prefix) == n:
            if prefix[0] != -prefix[-1]:
                yield prefix
            return
        for x in letters:
            if prefix and prefix[-1] == -x:
                continue
            yield from rec(prefix + (x,))

    yield from rec(())


def _all_classes(S: SurfacePresentation, R: int) -> list[ConjClass]:
    key = (id(S), R)
    hit = _ENUM_CACHE.get(key)
    if hit is not None and hit[0] is S:
        return hit[1]
    found = set()
    for n in range(1, R + 1):
        for w in _cyclic_words(S, n):
            inv = groups.inverse(w)
            if any(word_key(r) < word_key(w) for r in groups.rotations(w)):
                continue
            if any(word_key(r) < word_key(w) for r in groups.rotations(inv)):
                continue
            c = S.canonical(w)
            if c.word and len(c.word) <= R:
                found.add(c)
    out = sorted(found, key=lambda c: word_key(c.word))
    _ENUM_CACHE[key] = (S, out)
    return out


def enumerate_classes(
    S: SurfacePresentation,
    R: int,
    non_peripheral: bool = True,
    primitive: bool = False,
    simple: bool = False,
    radius: int = DEFAULT_RADIUS,
) -> list[ConjClass]:
    """Canonical hyperbolic classes of word length at most ``R``, ordered by (length, lex)."""
    out = []
    for c in _all_classes(S, R):
        if non_peripheral and groups.is_peripheral(c, S):
            continue
        if not S.is_hyperbolic(c.word):
            continue
        if primitive and groups.primitive_root(c)[1] != 1:
            continue
        if simple and self_intersection(c, S, radius) != 0:
            continue
        out.append(c)
    return out


# ------------------------------------------------------------ systole scan


@dataclass
class ScanRow:
    cls: ConjClass
    intersection: float
    length: float
    ratio: float
    stabilized: bool


@dataclass
class SystoleScan:
    rows: list
    systole: float
    systole_class: ConjClass | None
    c1: float
    c2: float
    radius: int
    word_radius: int


def systole_scan(
    mu,
    S: SurfacePresentation | None = None,
    R_words: int = 4,
    R_count: int = DEFAULT_RADIUS,
    simple_only: bool = False,
    threads: int = 1,
    classes: Sequence[ConjClass] | None = None,
) -> SystoleScan:
    """Tabulate ``i(mu, c)``, ``ell(c)`` and their ratio over enumerated classes."""
    S = S or mu.surface
    if R_words < 1:
        raise ValidationError("R_words must be at least 1")
    if classes is None:
        classes = enumerate_classes(S, R_words, primitive=True, simple=simple_only, radius=R_count)

    def row(c):
        ell = 2.0 * math.acosh(abs(S.trace(c.word)) / 2.0)
        res = intersection_number(mu, c, S, R_count)
        return ScanRow(c, res.value, ell, res.value / ell, res.stabilized)

    rows = parallel_map(row, list(classes), threads)
    if not rows:
        return SystoleScan([], math.inf, None, math.nan, math.nan, R_count, R_words)
    best = min(rows, key=lambda r: (r.intersection, word_key(r.cls.word)))
    ratios = [r.ratio for r in rows]
    return SystoleScan(rows, best.intersection, best.cls, min(ratios), max(ratios), R_count, R_words)

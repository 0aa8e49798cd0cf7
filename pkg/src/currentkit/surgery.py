"""Resolving a self-intersection of a closed geodesic.

A double point of ``c`` lifts to a crossing ``p = axis(c) ∩ h·axis(c)``.
The point ``q = h⁻¹ p`` lies on the axis as well, and after replacing ``h``
by ``h c^m`` it sits between ``p`` and ``c p``.  The axis segment from ``p``
to ``q`` closes up to the loop ``h⁻¹``; the segment from ``q`` to ``c p``
closes up to ``h c``.  Their product is ``c``; the third curve of the
resolution reverses the first lobe, ``(h⁻¹)⁻¹ (h c) = h² c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import groups
from .currents import (
    DEFAULT_RADIUS,
    _as_class,
    _class_data,
    crossing_orbits,
    intersection_number,
    self_intersection,
)
from .errors import NoCrossing, NoHyperbolicBranch, StepLimit, ValidationFailed
from .groups import ConjClass, SurfacePresentation, Word, word_key


def find_self_crossing(c, S: SurfacePresentation, R: int = DEFAULT_RADIUS) -> Word:
    """Minimal word ``h`` whose translate ``h·axis(c)`` crosses ``axis(c)``."""
    c = _as_class(S, c)
    root, k = groups.primitive_root(c)
    if k != 1:
        # a proper power crosses itself only through its root
        c = ConjClass(root)
    words = crossing_orbits(S, c, c, R)
    if not words:
        raise NoCrossing(f"{S.format(c.word)} has no self-crossing up to radius {R}")
    return words[0]


def _mobius_upper(m: np.ndarray, z: complex) -> complex:
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def _normalize(c: ConjClass, h: Word, S: SurfacePresentation) -> Word:
    """Replace ``h`` by ``h c^m`` so that ``h⁻¹ p`` lies in ``(p, c p)``."""
    data = _class_data(S, c)
    F, Finv = data.frame_inv, data.frame
    Hf = F @ S.evaluate(h) @ Finv
    # endpoints of h·axis in the frame: images of 0 and of infinity
    x1 = Hf[0, 1] / Hf[1, 1]
    x2 = Hf[0, 0] / Hf[1, 0]
    if x1 * x2 >= 0:
        raise ValidationFailed("translated axis does not cross", {"h": list(h)})
    p = complex(0.0, math.sqrt(-x1 * x2))
    Hinv = np.array([[Hf[1, 1], -Hf[0, 1]], [-Hf[1, 0], Hf[0, 0]]])
    q = _mobius_upper(Hinv, p)
    if abs(q.real) > 1e-6 * abs(q):
        raise ValidationFailed("h⁻¹ p is off the axis", {"h": list(h), "q": [q.real, q.imag]})
    shift = (math.log(q.imag) - math.log(p.imag)) / data.ell_root
    m = math.floor(shift)
    if abs(shift - round(shift)) < 1e-9:
        raise ValidationFailed("h⁻¹ p coincides with a translate of p", {"h": list(h)})
    return S.reduce(h + groups.power(c.word, m))


@dataclass
class Resolution:
    original: ConjClass
    h: Word
    words: tuple  # (gamma1, gamma2, gamma3) as words
    classes: tuple  # canonical classes
    kinds: tuple  # "hyperbolic", "peripheral" or "trivial"
    self_intersections: tuple  # None for non-hyperbolic
    original_self_intersection: int


def _kind(S: SurfacePresentation, w: Word) -> str:
    if not S.reduce(w):
        return "trivial"
    if groups.is_peripheral(w, S) or not S.is_hyperbolic(w):
        return "peripheral"
    return "hyperbolic"


def _try_resolve(c: ConjClass, h: Word, S: SurfacePresentation, R: int, si_c: int):
    h = _normalize(c, h, S)
    g2 = S.reduce(groups.inverse(h))
    g3 = S.reduce(h + c.word)
    g1 = S.reduce(groups.inverse(g2) + g3)
    words = (g1, g2, g3)
    problems = []
    if S.canonical(S.reduce(g2 + g3)) != c:
        problems.append("gamma2 * gamma3 is not conjugate to c")
    kinds = tuple(_kind(S, w) for w in words)
    sis = []
    for w, kind in zip(words, kinds):
        if kind != "hyperbolic":
            sis.append(None)
            continue
        si = self_intersection(S.canonical(w), S, R)
        sis.append(si)
        if si >= si_c:
            problems.append(f"self-intersection of {S.format(w)} is {si} >= {si_c}")
    classes = tuple(S.canonical(w) if kinds[i] != "trivial" else ConjClass(()) for i, w in enumerate(words))
    return Resolution(c, h, words, classes, kinds, tuple(sis), si_c), problems


def resolve(c, h: Word, S: SurfacePresentation, R: int = DEFAULT_RADIUS) -> Resolution:
    """Split ``c`` at the double point witnessed by ``h``.

    Both ``h`` and ``h⁻¹`` are tried; the first one whose output passes the
    postconditions (product law and strictly smaller self-intersection for
    every hyperbolic branch) is returned.
    """
    c = _as_class(S, c)
    si_c = self_intersection(c, S, R)
    diagnostics = {}
    for cand in (tuple(h), groups.inverse(h)):
        try:
            res, problems = _try_resolve(c, cand, S, R, si_c)
        except ValidationFailed as exc:
            diagnostics[S.format(cand)] = [str(exc)]
            continue
        if not problems:
            return res
        diagnostics[S.format(cand)] = problems
    raise ValidationFailed(f"no validated resolution of {S.format(c.word)}", diagnostics)


@dataclass
class SurgeryReport:
    resolution: Resolution
    intersection_c: float
    intersections: tuple  # i(mu, gamma_i) for hyperbolic branches, else None
    inequality_holds: tuple
    some_hyperbolic: bool
    radius: int
    notes: list = field(default_factory=list)


def surgery_report(mu, c, S: SurfacePresentation | None = None, R: int = DEFAULT_RADIUS) -> SurgeryReport:
    """Resolve one double point of ``c`` and compare ``i(mu, ·)`` on the pieces."""
    S = S or mu.surface
    c = _as_class(S, c)
    h = find_self_crossing(c, S, R)
    res = resolve(c, h, S, R)
    ic = intersection_number(mu, c, S, R).value
    vals, holds = [], []
    for cls, kind in zip(res.classes, res.kinds):
        if kind != "hyperbolic":
            vals.append(None)
            holds.append(None)
            continue
        v = intersection_number(mu, cls, S, R).value
        vals.append(v)
        holds.append(v <= ic + 1e-9)
    some = any(k == "hyperbolic" for k in res.kinds)
    notes = []
    if not some:
        if S.name == "sphere3":
            notes.append("all branches peripheral: the thrice-punctured sphere exception")
        else:
            notes.append("no hyperbolic branch on a surface other than the thrice-punctured sphere")
    return SurgeryReport(res, ic, tuple(vals), tuple(holds), some, R, notes)


@dataclass
class SimplifyTrace:
    result: ConjClass
    steps: list  # (class, chosen branch, i(mu, branch))
    initial_intersection: float
    final_intersection: float


def simplify_to_simple(mu, c, S: SurfacePresentation | None = None, R: int = DEFAULT_RADIUS, max_steps: int = 50) -> SimplifyTrace:
    """Iterate surgery, following a hyperbolic branch of least ``i(mu, ·)``."""
    S = S or mu.surface
    c = _as_class(S, c)
    i0 = intersection_number(mu, c, S, R).value
    cur, cur_i = c, i0
    steps = []
    for _ in range(max_steps + 1):
        si = self_intersection(cur, S, R)
        if si == 0:
            return SimplifyTrace(cur, steps, i0, cur_i)
        if len(steps) == max_steps:
            break
        rep = surgery_report(mu, cur, S, R)
        options = [
            (rep.intersections[j], rep.resolution.self_intersections[j], word_key(rep.resolution.classes[j].word), j)
            for j in range(3)
            if rep.resolution.kinds[j] == "hyperbolic"
        ]
        if not options:
            raise NoHyperbolicBranch(f"every branch of {S.format(cur.word)} is peripheral or trivial")
        best = min(options)
        nxt = rep.resolution.classes[best[3]]
        steps.append((cur, nxt, best[0]))
        cur, cur_i = nxt, best[0]
    raise StepLimit(f"no simple class reached within {max_steps} steps")

"""Checks on the thrice-punctured sphere.

The group is free on ``a, b`` with the third cusp ``c = (ab)⁻¹``.  The
three figure-eight classes ``ab⁻¹``, ``bc⁻¹ = bab`` and ``ca⁻¹ = b⁻¹a⁻²``
(and their inverses) are the curves with exactly one double point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import groups
from .currents import DEFAULT_RADIUS, enumerate_classes, intersection_number, self_intersection
from .errors import ValidationError
from .groups import ConjClass, SurfacePresentation, word_key
from .parallel import parallel_map

CUSP_TAGS = ("a_cusp", "b_cusp", "c_cusp")


def surface() -> SurfacePresentation:
    return groups.builtin("sphere3")


def figure_eights(S: SurfacePresentation | None = None) -> list[ConjClass]:
    """Canonical classes of ``(ab⁻¹)^±1``, ``(bc⁻¹)^±1``, ``(ca⁻¹)^±1``."""
    S = S or surface()
    words = [(1, -2), (2, 1, 2), (-2, -1, -1)]
    out = []
    for w in words:
        for v in (w, groups.inverse(w)):
            c = S.canonical(v)
            if c not in out:
                out.append(c)
    return out


@dataclass(frozen=True)
class PeripheralTag:
    tag: str  # a_cusp, b_cusp, c_cusp or none
    k: int = 0


def peripheral_class(w, S: SurfacePresentation | None = None) -> PeripheralTag:
    """Which cusp ``w`` winds around, and how many times."""
    S = S or surface()
    word = w.word if isinstance(w, ConjClass) else S.parse(w)
    hit = groups.peripheral_power(word, S)
    if hit is None:
        return PeripheralTag("none", 0)
    idx, k = hit
    if idx == 2:
        # (ab)^k = c^-k
        k = -k
    return PeripheralTag(CUSP_TAGS[idx], k)


def lemma_a_check(g1, g2, S: SurfacePresentation | None = None) -> str:
    """Test the peripheral-product lemma on one pair.

    Returns ``hypothesis_not_met``, ``conclusion_holds`` or ``COUNTEREXAMPLE``.
    The product ``g1 g2`` must be non-trivial and non-peripheral, and each
    of ``g1``, ``g2`` and ``g1 g2⁻¹`` non-trivial and peripheral.
    """
    S = S or surface()
    g1 = S.reduce(S.parse(g1) if not isinstance(g1, tuple) else g1)
    g2 = S.reduce(S.parse(g2) if not isinstance(g2, tuple) else g2)
    prod = S.reduce(g1 + g2)
    quot = S.reduce(g1 + groups.inverse(g2))
    if not prod or not g1 or not g2 or not quot:
        return "hypothesis_not_met"
    tags = [peripheral_class(x, S) for x in (g1, g2, quot)]
    if peripheral_class(prod, S).tag != "none" or any(t.tag == "none" for t in tags):
        return "hypothesis_not_met"
    distinct = len({t.tag for t in tags}) == 3
    primitive = all(abs(t.k) == 1 for t in tags)
    listed = S.canonical(prod) in figure_eights(S)
    return "conclusion_holds" if (distinct and primitive and listed) else "COUNTEREXAMPLE"


@dataclass
class GridResult:
    checked: int
    hypothesis_met: int
    counterexamples: list  # (g1, g2) words


def lemma_a_grid(max_exp: int = 3, conj_len: int = 3, S: SurfacePresentation | None = None) -> GridResult:
    """Every pair ``(u p^k u⁻¹, v q^l v⁻¹)`` with ``|u| <= 1``, ``|v| <= conj_len``.

    Conjugating both elements at once does not change any verdict, so the
    first conjugator only needs to absorb the choice of cusp side.
    """
    S = S or surface()
    cusps = [(1,), (2,), (1, 2)]
    exps = [e for e in range(-max_exp, max_exp + 1) if e]
    us = groups.ball(S, 1).words
    vs = groups.ball(S, conj_len).words
    checked = met = 0
    bad = []
    for p, k, u in itertools.product(cusps, exps, us):
        g1 = S.reduce(u + groups.power(p, k) + groups.inverse(u))
        for q, l, v in itertools.product(cusps, exps, vs):
            g2 = S.reduce(v + groups.power(q, l) + groups.inverse(v))
            verdict = lemma_a_check(g1, g2, S)
            checked += 1
            if verdict != "hypothesis_not_met":
                met += 1
            if verdict == "COUNTEREXAMPLE":
                bad.append((g1, g2))
    return GridResult(checked, met, bad)


@dataclass
class SelfIntTable:
    rows: list  # (ConjClass, self-intersection)
    single: list  # classes with exactly one double point
    unexpected: list  # single-double-point classes outside the figure-eights
    radius: int

    @property
    def holds(self) -> bool:
        return not self.unexpected


def classify_single_selfint(S: SurfacePresentation | None = None, R: int = 6, count_radius: int = DEFAULT_RADIUS, threads: int = 1) -> SelfIntTable:
    """Self-intersection of every non-peripheral class up to length ``R``."""
    S = S or surface()
    classes = enumerate_classes(S, R, non_peripheral=True)
    sis = parallel_map(lambda c: self_intersection(c, S, count_radius), classes, threads)
    rows = list(zip(classes, sis))
    eights = set(figure_eights(S))
    single = [c for c, si in rows if si == 1]
    unexpected = [c for c in single if c not in eights]
    return SelfIntTable(rows, single, unexpected, R)


@dataclass
class PositivityResult:
    minimum: float
    attained_by: ConjClass
    curve: list  # (radius, running minimum)
    stable_from: int  # smallest radius from which the running minimum is constant
    stabilized: bool  # every count agreed with radius count_radius - 1


def positivity_harness(mu, R: int = 10, S: SurfacePresentation | None = None, count_radius: int = DEFAULT_RADIUS, threads: int = 1) -> PositivityResult:
    """Minimum of ``i(mu, ·)`` over non-peripheral classes, as the length bound grows."""
    S = S or mu.surface
    if not mu.atoms:
        raise ValidationError("the current has no atoms")
    classes = enumerate_classes(S, R, non_peripheral=True)
    results = parallel_map(lambda c: intersection_number(mu, c, S, count_radius), classes, threads)
    best_val, best_cls = None, None
    curve = []
    stable = all(r.stabilized for r in results)
    by_len: dict[int, list] = {}
    for c, r in zip(classes, results):
        by_len.setdefault(len(c.word), []).append((r.value, c))
    for n in range(1, R + 1):
        for val, c in sorted(by_len.get(n, []), key=lambda vc: (vc[0], word_key(vc[1].word))):
            if best_val is None or val < best_val:
                best_val, best_cls = val, c
        if n >= 2 and best_val is not None:
            curve.append((n, best_val))
    stable_from = R
    for n, v in reversed(curve):
        if v == best_val:
            stable_from = n
        else:
            break
    return PositivityResult(best_val, best_cls, curve, stable_from, stable)

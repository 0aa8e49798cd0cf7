"""Acceptance suite: twelve end-to-end criteria, one PASS/FAIL line each.

Run with ``pytest -s tests/test_acceptance.py`` to see only these lines, or
``python tests/test_acceptance.py`` to run them without pytest.  The lines
are also shown under plain ``pytest``.
"""

import itertools
import json
import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from currentkit import groups
from currentkit.cli import run as cli_run
from currentkit.currents import (
    DiscreteCurrent,
    axis_geodesic,
    class_intersection,
    delta,
    enumerate_classes,
    intersection_number,
    lift_geodesic,
    liouville_length,
    quadrilateral_check,
    self_intersection,
    somewhat_short,
    systole_scan,
)
from currentkit.decomposition import check_decomposition, decompose, zero_detector
from currentkit.groups import builtin
from currentkit.hypcore import BoundaryPoint
from currentkit.lengths import sym_power_rep
from currentkit.sphere3 import classify_single_selfint, lemma_a_grid, positivity_harness
from currentkit.surgery import find_self_crossing, resolve

from oracles import christoffel, primitive_slopes

NAMES = ("punctured_torus", "sphere3", "genus2_octagon")
BASELINES = Path(__file__).parent / "baselines"


def hyp_length(S, c):
    return 2 * math.acosh(abs(S.trace(c.word)) / 2)


def _emit(capsys, n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


# --- the criteria; each returns (ok, detail)


def criterion_1():
    worst, count = 0.0, 0
    for name in NAMES:
        S = builtin(name)
        for c in enumerate_classes(S, 6):
            worst = max(worst, abs(liouville_length(c, S) - hyp_length(S, c)))
            count += 1
    return count >= 300 and worst < 1e-9, f"Liouville calibration: {count} classes, max error {worst:.2e}"


def criterion_2():
    S = builtin("punctured_torus")
    bad, worst_radius, pairs = [], 0, 0
    for (p, q), (r, s) in itertools.combinations_with_replacement(primitive_slopes(3), 2):
        res = intersection_number(delta(S, christoffel(p, q)), christoffel(r, s), S)
        worst_radius = max(worst_radius, res.radius)
        pairs += 1
        if res.value != abs(p * s - q * r) or not res.stabilized:
            bad.append(((p, q), (r, s), res.value))
    ok = not bad and worst_radius <= 8
    return ok, f"torus slopes: {pairs} pairs, {len(bad)} mismatches, radius {worst_radius}"


def _random_pair(rng, S, pool):
    """A class and a current; half the time the atoms avoid the class."""
    c = rng.choice(pool)
    src = pool
    if rng.random() < 0.5:
        src = [d for d in pool if class_intersection(S, c, d) == 0] or pool
    atoms = rng.sample(src, min(len(src), rng.randint(1, 2)))
    return c, DiscreteCurrent.build(S, [(d, rng.randint(1, 3)) for d in atoms])


def criterion_3(R=3):
    rng = random.Random(2024)
    surfaces = [builtin(n) for n in NAMES]
    pools = [enumerate_classes(S, 3, primitive=True) for S in surfaces]
    agree = agree_exact = zeros = 0
    for k in range(100):
        S, pool = surfaces[k % 3], pools[k % 3]
        c, mu = _random_pair(rng, S, pool)
        clear = somewhat_short(mu, axis_geodesic(S, c), S, R).clear
        at_radius = intersection_number(mu, c, S, R, "ball").value
        exact = intersection_number(mu, c, S).value
        agree += clear == (at_radius == 0)
        agree_exact += clear == (exact == 0)
        zeros += exact == 0
    ok = agree == 100 and agree_exact == 100
    return ok, f"somewhat short vs zero pairing: {agree}/100 at radius {R}, {agree_exact}/100 exact, {zeros} zeros"


def criterion_4(R=2):
    rng = random.Random(99)
    surfaces = [builtin(n) for n in NAMES]
    pools = [enumerate_classes(S, 3, primitive=True) for S in surfaces]
    found = tries = violations = 0
    while found < 100 and tries < 5000:
        tries += 1
        S, pool = surfaces[tries % 3], pools[tries % 3]
        mu = DiscreteCurrent.build(S, [(c, 1) for c in rng.sample(pool, rng.randint(1, 2))])
        if rng.random() < 0.3:
            pts = [BoundaryPoint(rng.uniform(0, 2 * math.pi)) for _ in range(4)]
        else:
            # corners hugging one side of a support geodesic keep both diagonals clear
            lift = lift_geodesic(S, rng.choice(groups.ball(S, 2).words), rng.choice(mu.classes))
            side = rng.choice([1, -1])
            off = [rng.uniform(1e-6, 1e-4) for _ in range(4)]
            pts = [
                BoundaryPoint(lift.p.phi + side * off[0]),
                BoundaryPoint(lift.p.phi + side * off[1]),
                BoundaryPoint(lift.q.phi - side * off[2]),
                BoundaryPoint(lift.q.phi - side * off[3]),
            ]
        pts.sort(key=lambda p: p.phi)
        chk = quadrilateral_check(mu, pts, S, R)
        if chk.diagonals_clear:
            found += 1
            violations += not chk.holds
    ok = found == 100 and violations == 0
    return ok, f"quadrilaterals: {found} with clear diagonals ({tries} drawn), {violations} violations"


def criterion_5(max_len=6, currents_per_class=5):
    rng = random.Random(5)
    stats = {}
    ok = True
    for name in ("punctured_torus", "genus2_octagon"):
        S = builtin(name)
        atoms = enumerate_classes(S, 2, primitive=True)
        targets = [c for c in enumerate_classes(S, max_len, primitive=True) if 1 <= self_intersection(c, S) <= 3]
        no_hyp = ineq = not_lower = 0
        for c in targets:
            res = resolve(c, find_self_crossing(c, S), S)
            hyper = [(k, s) for k, kind, s in zip(res.classes, res.kinds, res.self_intersections) if kind == "hyperbolic"]
            no_hyp += not hyper
            not_lower += any(s >= res.original_self_intersection for _, s in hyper)
            for _ in range(currents_per_class):
                chosen = rng.sample(atoms, rng.randint(1, 3))
                weights = [rng.randint(1, 4) for _ in chosen]
                ic = sum(w * class_intersection(S, a, c) for a, w in zip(chosen, weights))
                for k, _ in hyper:
                    ineq += sum(w * class_intersection(S, a, k) for a, w in zip(chosen, weights)) > ic
        stats[name] = (len(targets), no_hyp, ineq, not_lower)
        ok &= no_hyp == 0 and ineq == 0 and not_lower == 0 and len(targets) > 0
    sphere = builtin("sphere3")
    c = sphere.canonical(sphere.parse("aB"))
    res = resolve(c, find_self_crossing(c, sphere), sphere)
    exception = res.kinds == ("peripheral",) * 3
    ok &= exception
    parts = ", ".join(f"{n}: {t} classes, {h}/{i}/{d} failures" for n, (t, h, i, d) in stats.items())
    return ok, f"surgery: {parts} (hyperbolic/inequality/descent); sphere3 aB all peripheral: {exception}"


def criterion_6():
    S = builtin("sphere3")
    out, ok = [], True
    for spec in (["aB"], ["aB", "bab"]):
        res = positivity_harness(DiscreteCurrent.build(S, spec), R=10, S=S)
        ok &= res.minimum >= 1 and res.stable_from <= 4 and res.stabilized
        out.append(f"{'+'.join(spec)} min {res.minimum:g} stable from {res.stable_from}")
    return ok, "sphere3 positivity to length 10: " + "; ".join(out)


def criterion_7():
    S = builtin("sphere3")
    grid = lemma_a_grid(3, 3, S)
    table = classify_single_selfint(S, 6)
    ok = not grid.counterexamples and table.holds and grid.hypothesis_met > 0
    return ok, (
        f"sphere3 lemma grid: {grid.checked} pairs, {grid.hypothesis_met} meeting the hypothesis, "
        f"{len(grid.counterexamples)} counterexamples; single double point classes to length 6: "
        f"{[S.format(c.word) for c in table.single]}"
    )


def decomposition_summary(S, rep):
    fmt = lambda c: S.format(c.word)  # noqa: E731
    return {
        "special_curves": [fmt(e) for e in rep.special_curves],
        "atoms_on_special": [[fmt(c), w] for c, w in rep.atoms_on_special],
        "pieces": [
            {
                "label": p.label,
                "atoms": [[fmt(c), w] for c, w in p.atoms],
                "systole_lower_bound": p.systole_lower_bound,
                "boundary": [fmt(e) for e in p.boundary],
                "interior_zero": [fmt(z) for z in p.interior_zero],
            }
            for p in rep.pieces
        ],
        "candidate_radius": rep.candidate_radius,
    }


def criterion_8():
    S = builtin("genus2_octagon")
    mu = DiscreteCurrent.build(S, [("a1", 2), ("b1", 1), ("a2", 3)])
    rep = decompose(mu, S, R=6)
    got = decomposition_summary(S, rep)
    want = json.loads((BASELINES / "decomposition_genus2.json").read_text())
    chk = check_decomposition(mu, rep, S)
    labels = sorted(p["label"] for p in got["pieces"])
    ok = got == want and labels == ["lamination", "positive_systole"] and chk.holds
    return ok, (
        f"genus-2 decomposition: baseline {'matches' if got == want else 'DIFFERS'}, specials {got['special_curves']}, "
        f"labels {labels}, mass {chk.piece_weight:g}/{chk.total_weight:g}, "
        f"reconstruction on {chk.checked} candidates with {len(chk.reconstruction_failures)} failures"
    )


def criterion_9(R=4):
    rng = random.Random(9)
    bad, zeros, total = [], 0, 0
    for name in NAMES:
        S = builtin(name)
        pool = enumerate_classes(S, 3, primitive=True)
        for _ in range(30):
            atoms = rng.sample(pool, rng.randint(1, 3))
            mu = DiscreteCurrent.build(S, [(c, rng.randint(1, 4)) for c in atoms])
            found = zero_detector(mu, S, R).verdict == "zero_found"
            scan_zero = systole_scan(mu, S, R_words=R).systole == 0
            zeros += found
            total += 1
            if found != scan_zero:
                bad.append((name, [S.format(c.word) for c in atoms]))
    return not bad, f"zero detector vs systole: {total} currents, {zeros} with zeros, {len(bad)} disagreements"


def criterion_10():
    worst, count = 0.0, 0
    for name in NAMES:
        S = builtin(name)
        classes = enumerate_classes(S, 5)
        for n in (3, 4, 5):
            rep = sym_power_rep(S, n)
            for c in classes:
                worst = max(worst, abs(rep.length(c) - (n - 1) * hyp_length(S, c)))
                count += 1
    return worst < 1e-6, f"Hitchin length factor: {count} evaluations, max error {worst:.2e}"


def criterion_11():
    S = builtin("punctured_torus")
    mu = DiscreteCurrent.build(S, ["a", "b"])
    six = systole_scan(mu, S, R_words=6)
    eight = systole_scan(mu, S, R_words=8)
    stable = all(abs(x - y) <= 0.01 * abs(y) for x, y in ((six.c1, eight.c1), (six.c2, eight.c2)))
    ok = eight.c1 > 0 and stable
    return ok, f"bilipschitz ratio for a+b: length 6 [{six.c1:.5f}, {six.c2:.5f}], length 8 [{eight.c1:.5f}, {eight.c2:.5f}]"


# every suite as it is run from the command line
CLI_SUITES = [
    ["liouville-check", "--surface", "genus2_octagon", "--max-len", "4"],
    ["intersect", "--current", '[["a",1],["b",2]]', "--class", "aaBB"],
    ["somewhat-short", "--current", '[["b",1]]', "--class", "a"],
    ["surgery", "--surface", "genus2_octagon", "--current", '[["a1",2],["b2",1]]', "--class", "a1 a1 b2 a1 b2"],
    ["systole", "--current", '[["a",1],["b",1]]', "--max-len", "7"],
    ["decompose", "--surface", "genus2_octagon", "--current", '[["a1",2],["b1",1],["a2",3]]', "--max-len", "4"],
    ["sphere3-verify", "--max-len", "6"],
    ["lengths", "--surface", "genus2_octagon", "--sym-power", "4", "--max-len", "3"],
    ["trichotomy", "--surface", "genus2_octagon", "--current", '[["a1",1],["b1",1]]', "--max-len", "4"],
    ["enumerate", "--surface", "genus2_octagon", "--max-len", "4", "--primitive", "--simple-only"],
]


def criterion_12():
    differ = []
    for argv in CLI_SUITES:
        s1, one = cli_run(argv + ["--threads", "1"])
        s8, eight = cli_run(argv + ["--threads", "8"])
        one.pop("runtime")
        eight.pop("runtime")
        if s1 != 0 or s1 != s8 or json.dumps(one, sort_keys=True) != json.dumps(eight, sort_keys=True):
            differ.append(argv[0])
    return not differ, f"determinism over {len(CLI_SUITES)} CLI suites, 1 vs 8 threads: differing {differ}"


CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
]


@pytest.mark.parametrize("n", range(1, 13))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    assert _emit(capsys, n, ok, detail), detail


if __name__ == "__main__":
    results = [_emit(None, n, *fn()) for n, fn in enumerate(CRITERIA, 1)]
    sys.exit(0 if all(results) else 1)

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from currentkit import groups
from currentkit.errors import ResourceLimit, UnknownGenerator, UnknownSurface, ValidationError
from currentkit.groups import ball, builtin, canonical_conj, coset_reps, free_group, is_peripheral

from oracles import free_ball_matrix_count

TORUS = builtin("punctured_torus")
SPHERE = builtin("sphere3")
G2 = builtin("genus2_octagon")


def words(rank, max_len=8):
    letters = [i for k in range(1, rank + 1) for i in (k, -k)]
    return st.lists(st.sampled_from(letters), max_size=max_len).map(tuple)


# --- reduction and canonical forms


def test_reduce_examples():
    S = TORUS
    assert S.format(S.reduce(S.parse("a b B a"))) == "aa"
    assert S.canonical(S.parse("B aab b")) == S.canonical(S.parse("aab"))
    ab = S.canonical(S.parse("ab"))
    assert S.canonical(S.parse("ba")) == ab
    assert S.canonical(S.parse("B A")) == ab


def test_parser_forms():
    S = TORUS
    assert S.parse("a b^-1") == (1, -2)
    assert S.parse("(ab)^3") == (1, 2) * 3
    assert S.parse("a²") == (1, 1)
    assert G2.parse("a1 b1 A1 B1") == (1, 2, -1, -2)
    with pytest.raises(UnknownGenerator):
        S.parse("ac")


def test_unknown_letters_and_surfaces():
    with pytest.raises(UnknownGenerator):
        TORUS.evaluate((3,))
    with pytest.raises(UnknownSurface):
        builtin("klein_bottle")


@given(words(2), words(2))
def test_canonical_conj_is_conjugation_invariant(w, h):
    S = TORUS
    if not groups.free_reduce(w):
        return
    conj = h + w + groups.inverse(h)
    assert S.canonical(conj) == S.canonical(w)
    assert S.canonical(groups.inverse(w)) == S.canonical(w)


@settings(max_examples=40, deadline=None)
@given(words(4, 6), words(4, 3))
def test_genus2_canonical_form_is_conjugation_invariant(w, h):
    S = G2
    if not S.reduce(w):
        return
    c1 = S.canonical(w)
    c2 = S.canonical(h + w + groups.inverse(h))
    assert c1 == c2
    # traces agree as a numerical cross-check of the combinatorics
    assert abs(S.trace(c1.word)) == pytest.approx(abs(S.trace(w)), rel=1e-8)


@given(words(2))
def test_canonical_is_idempotent(w):
    c = canonical_conj(w)
    assert canonical_conj(c.word) == c


# --- evaluation


def test_evaluate_examples():
    assert np.allclose(TORUS.evaluate(()), np.eye(2))
    assert np.allclose(TORUS.evaluate((1,)), [[1, 1], [1, 2]])
    m = TORUS.evaluate(TORUS.parse("ab"))
    assert np.allclose(TORUS.evaluate(TORUS.parse("BA")) @ m, np.eye(2))


def test_builtin_invariants():
    # sphere3: ab = [[-3, 2], [-2, 1]], a parabolic third cusp
    assert np.allclose(SPHERE.evaluate((1, 2)), [[-3, 2], [-2, 1]])
    assert SPHERE.trace((1, 2)) == pytest.approx(-2.0)
    assert TORUS.trace((1, 2, -1, -2)) == pytest.approx(-2.0)
    rel = G2.evaluate(G2.relators[0])
    assert np.allclose(rel, np.eye(2), atol=1e-8) or np.allclose(rel, -np.eye(2), atol=1e-8)


def test_octagon_geometry():
    # every generator of the regular octagon group moves i by 2 arccosh(cot(pi/8))
    d = 2 * math.acosh(1 / math.tan(math.pi / 8))
    for m in G2.matrices:
        z = (m[0, 0] * 1j + m[0, 1]) / (m[1, 0] * 1j + m[1, 1])
        dist = math.acosh(1 + abs(z - 1j) ** 2 / (2 * z.imag))
        assert dist == pytest.approx(d, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(words(4, 10))
def test_dehn_equal_words_evaluate_equal(w):
    red = G2.reduce(w)
    a, b = G2.evaluate(w), G2.evaluate(red)
    assert np.allclose(a, b, atol=1e-8) or np.allclose(a, -b, atol=1e-8)
    assert len(red) <= len(groups.free_reduce(w))


@given(words(2), words(2))
def test_trace_is_a_class_function(w, h):
    t1 = abs(TORUS.trace(w))
    t2 = abs(TORUS.trace(h + w + groups.inverse(h)))
    assert t2 == pytest.approx(t1, rel=1e-8, abs=1e-8)


# --- balls and cosets


@pytest.mark.parametrize("R", range(5))
def test_free_ball_growth(R):
    F = free_group(2)
    assert len(ball(F, R)) == 1 + sum(4 * 3 ** (k - 1) for k in range(1, R + 1))


def test_free_ball_examples():
    F = free_group(2)
    assert len(ball(F, 1)) == 5
    assert len(ball(F, 2)) == 17


@pytest.mark.parametrize("R", range(5))
def test_genus2_ball_matches_matrix_dedup(R):
    assert len(ball(G2, R)) == free_ball_matrix_count(G2.matrices, R)


def test_genus2_ball_first_merge():
    # no relation is shorter than 8, so the first merge happens at radius 4
    assert len(ball(G2, 2)) == 65
    assert len(ball(G2, 3)) == 457
    assert len(ball(G2, 4)) == 3193 < 1 + sum(8 * 7 ** (k - 1) for k in range(1, 5))


def test_ball_monotone_and_inverse_closed():
    B = ball(G2, 3)
    assert len(ball(G2, 2)) < len(B)
    for w in B.words:
        assert B.lookup(groups.inverse(w)) is not None


def test_ball_cap(monkeypatch):
    with pytest.raises(ResourceLimit):
        ball(TORUS, 6, cap=100)
    monkeypatch.setenv("CURRENTKIT_ELEMENT_CAP", "50")
    with pytest.raises(ResourceLimit):
        ball(TORUS, 5)


def test_coset_reps_example():
    F = free_group(2)
    reps = coset_reps(F, 1, (1,))
    assert reps == [(), (2,), (-2,)]


def test_coset_reps_identity_and_generator_share_a_coset():
    reps = coset_reps(TORUS, 3, (1, 2))
    assert () in reps and (1, 2) not in reps
    assert len(set(reps)) == len(reps)
    with pytest.raises(ValidationError):
        coset_reps(TORUS, 2, ())


# --- peripherals


def test_is_peripheral_examples():
    assert is_peripheral(SPHERE.parse("b a B"), SPHERE)
    assert is_peripheral(SPHERE.parse("(ab)^3"), SPHERE)
    assert not is_peripheral(SPHERE.parse("aB"), SPHERE)
    assert is_peripheral(TORUS.parse("abAB"), TORUS)
    assert not is_peripheral(G2.parse("a1 b1 A1 B1"), G2)


# --- custom presentations


def test_presentation_round_trip(tmp_path):
    doc = TORUS.to_json()
    path = tmp_path / "torus.json"
    path.write_text(json.dumps(doc))
    S = groups.load_presentation(str(path))
    assert S.generators == TORUS.generators
    assert np.allclose(S.evaluate((1, 2)), TORUS.evaluate((1, 2)))
    assert S.domain == TORUS.domain


def test_presentation_validation():
    with pytest.raises(ValidationError):
        groups.load_presentation({"generators": ["a"], "matrices": [[[1, 0], [0, 1]]], "genus": 0, "punctures": 1})
    bad_relator = {
        "generators": ["a", "b"],
        "matrices": [[[1, 1], [1, 2]], [[1, -1], [-1, 2]]],
        "relators": ["ab"],
        "genus": 2,
    }
    with pytest.raises(ValidationError):
        groups.load_presentation(bad_relator)

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from currentkit.currents import DiscreteCurrent, enumerate_classes, intersection_number
from currentkit.errors import DegenerateFamily, NonInvertible, SpectrumPairingFailed, ValidationError
from currentkit.groups import builtin
from currentkit.lengths import (
    MatrixRep,
    chamber_vector,
    default_family,
    length_L,
    length_table,
    normalize,
    sym_power_matrix,
    sym_power_rep,
    symplectic_form,
    trichotomy_classify,
)

TORUS = builtin("punctured_torus")
G2 = builtin("genus2_octagon")


def ell(S, c):
    return 2 * math.acosh(abs(S.trace(c.word)) / 2)


def random_sl(rng, n):
    M = rng.normal(size=(n, n))
    if np.linalg.det(M) < 0:
        M[0] *= -1
    return M / abs(np.linalg.det(M)) ** (1 / n)


def random_sp(rng, n):
    A = rng.normal(size=(2 * n, 2 * n))
    H = 0.3 * (A + A.T)
    return expm(symplectic_form(n) @ H)


# --- chamber vectors and lengths


def test_chamber_examples():
    v = chamber_vector(np.diag([2.0, 1.0, 0.5]), "SL")
    assert np.allclose(v, [math.log(2), 0.0, -math.log(2)], atol=1e-14)
    e = math.e
    sp = np.diag([e, math.sqrt(e), 1 / math.sqrt(e), 1 / e])
    assert np.allclose(chamber_vector(sp, "Sp"), [1.0, 0.5], atol=1e-14)
    assert length_L(np.diag([2.0, 1.0, 0.5]), "SL") == pytest.approx(1.3862943611, abs=1e-10)
    assert length_L(sp, "Sp") == pytest.approx(1.5, abs=1e-12)
    assert length_L(np.eye(3), "SL") == 0.0
    assert length_L(np.eye(4), "Sp") == 0.0


def test_chamber_errors():
    with pytest.raises(NonInvertible):
        chamber_vector(np.zeros((2, 2)))
    with pytest.raises(SpectrumPairingFailed):
        chamber_vector(np.diag([4.0, 1.0, 0.5, 0.5]), "Sp")
    with pytest.raises(ValidationError):
        chamber_vector(np.eye(3), "GL")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 5))
def test_conjugation_invariance(seed, n):
    rng = np.random.default_rng(seed)
    M, h = random_sl(rng, n), random_sl(rng, n)
    conj = h @ M @ np.linalg.inv(h)
    assert np.allclose(chamber_vector(conj), chamber_vector(M), atol=1e-8)
    assert length_L(conj) == pytest.approx(length_L(M), abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_sp_chamber_validity(seed, n):
    M = random_sp(np.random.default_rng(seed), n)
    J = symplectic_form(n)
    assert np.allclose(M.T @ J @ M, J, atol=1e-8)
    x = chamber_vector(M, "Sp")
    assert np.all(np.diff(x) <= 0) and np.all(x >= 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 5))
def test_sl_vectors_sum_to_zero(seed, n):
    x = chamber_vector(random_sl(np.random.default_rng(seed), n))
    assert abs(x.sum()) < 1e-10
    assert np.all(np.diff(x) <= 0)


def test_power_rule():
    M = sym_power_matrix(TORUS.evaluate((1, 2)), 4)
    assert length_L(np.linalg.matrix_power(M, 3)) == pytest.approx(3 * length_L(M), abs=1e-8)


# --- symmetric powers


def test_sym_power_examples():
    for m in TORUS.matrices:
        m2 = sym_power_matrix(m, 2)
        assert np.allclose(m2, m) or np.allclose(m2, -m)
    g = TORUS.evaluate((1, 2))
    lam = max(abs(np.linalg.eigvals(g)))
    ev = np.sort(np.abs(np.linalg.eigvals(sym_power_matrix(g, 3))))[::-1]
    assert np.allclose(ev, [lam**2, 1.0, lam**-2], rtol=1e-10)


@pytest.mark.parametrize("S", [TORUS, G2], ids=lambda S: S.name)
@pytest.mark.parametrize("n", [3, 4, 5])
def test_hitchin_factor_small(S, n):
    rep = sym_power_rep(S, n)
    for c in enumerate_classes(S, 3):
        assert abs(rep.length(c) - (n - 1) * ell(S, c)) < 1e-6


def test_sym_power_rejects_small_n():
    with pytest.raises(ValidationError):
        sym_power_rep(TORUS, 1)


# --- representations


def test_matrix_rep_validation():
    with pytest.raises(ValidationError):
        MatrixRep("SL", 2, [np.eye(2)], TORUS)
    with pytest.raises(ValidationError):
        MatrixRep("SL", 2, [2 * np.eye(2), np.eye(2)], TORUS)
    with pytest.raises(ValidationError):
        MatrixRep("Sp", 2, [np.array([[1.0, 1.0], [0.0, 1.0]]), np.eye(2)], G2)
    # relators must map to plus or minus the identity
    bad = [np.array([[1.0, 1.0], [0.0, 1.0]]), np.array([[1.0, 0.0], [1.0, 1.0]]), np.eye(2), np.eye(2)]
    with pytest.raises(ValidationError):
        MatrixRep("SL", 2, bad, G2)


def test_matrix_rep_from_json(tmp_path):
    rep = sym_power_rep(TORUS, 3)
    doc = {
        "group_type": "SL_n",
        "dimension": 3,
        "surface": "punctured_torus",
        "matrices": {g: m.tolist() for g, m in zip(TORUS.generators, rep.matrices)},
    }
    path = tmp_path / "rep.json"
    path.write_text(json.dumps(doc))
    loaded = MatrixRep.from_json(str(path))
    assert loaded.length("ab") == pytest.approx(rep.length("ab"))
    with pytest.raises(ValidationError):
        MatrixRep.from_json({"group_type": "SL", "surface": "punctured_torus"})


# --- tables


def test_length_table_examples():
    classes = enumerate_classes(TORUS, 3)
    t3 = length_table(sym_power_rep(TORUS, 3), classes)
    fam = default_family(TORUS)
    assert t3.normalization == pytest.approx(sum(2 * ell(TORUS, c) for c in fam))
    assert sum(t3.value(c) for c in fam) == pytest.approx(1.0, abs=1e-10)
    for c, v in t3.entries:
        assert v == pytest.approx(2 * ell(TORUS, c) / t3.normalization, abs=1e-12)
    t2 = length_table(sym_power_rep(TORUS, 2), classes)
    for (c, v2), (_, v3) in zip(t2.entries, t3.entries):
        assert v2 == pytest.approx(v3, abs=1e-10)


def test_degenerate_family():
    trivial = MatrixRep("SL", 2, [np.eye(2), np.eye(2)], TORUS)
    with pytest.raises(DegenerateFamily):
        length_table(trivial, ["a"])


def test_normalization_idempotent():
    t = length_table(sym_power_rep(G2, 3), enumerate_classes(G2, 2))
    once = normalize(t)
    twice = normalize(once)
    assert [v for _, v in once.entries] == pytest.approx([v for _, v in twice.entries], abs=1e-12)
    assert sum(once.value(c) for c in once.family) == pytest.approx(1.0, abs=1e-10)


def test_genus2_family_is_simple_and_has_six_classes():
    fam = default_family(G2)
    assert len(fam) == 6
    from currentkit.currents import self_intersection

    assert all(self_intersection(c, G2) == 0 for c in fam)


# --- trichotomy


def test_trichotomy_fuchsian():
    t = length_table(sym_power_rep(TORUS, 3), [], S=TORUS)
    fd = trichotomy_classify(t, TORUS, R=3)
    assert fd.special_curves == []
    assert [p.label for p in fd.pieces] == ["positive_systole"]
    systole = min(ell(TORUS, c) for c in enumerate_classes(TORUS, 3, primitive=True, simple=True))
    assert fd.pieces[0].minimum == pytest.approx(2 * systole / t.normalization, abs=1e-12)


def test_trichotomy_one_handle():
    mu = DiscreteCurrent.build(G2, ["a1", "b1"])
    t = length_table(lambda c: intersection_number(mu, c, G2).value, [], S=G2)
    fd = trichotomy_classify(t, G2, R=4)
    assert fd.special_curves == [G2.canonical(G2.parse("a1 b1 A1 B1"))]
    assert sorted(p.label for p in fd.pieces) == ["positive_systole", "zero"]


def test_trichotomy_rejects_zero_function():
    t = length_table(lambda c: 1.0 if c in default_family(TORUS) else 0.0, [], S=TORUS)
    t.value_fn = lambda c: 0.0
    t.family = []
    with pytest.raises(ValidationError):
        trichotomy_classify(t, TORUS, R=2)

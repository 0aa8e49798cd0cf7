import pytest
from hypothesis import given
from hypothesis import strategies as st

from currentkit import groups
from currentkit.currents import DiscreteCurrent, self_intersection
from currentkit.sphere3 import (
    PeripheralTag,
    classify_single_selfint,
    figure_eights,
    lemma_a_check,
    lemma_a_grid,
    peripheral_class,
    positivity_harness,
    surface,
)

S = surface()
words = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(tuple)


def test_peripheral_class_examples():
    assert peripheral_class("b a^3 B", S) == PeripheralTag("a_cusp", 3)
    assert peripheral_class("(ab)^-2", S) == PeripheralTag("c_cusp", 2)
    assert peripheral_class("aB", S) == PeripheralTag("none", 0)
    assert peripheral_class("b^-2", S) == PeripheralTag("b_cusp", -2)


@given(st.sampled_from(["a", "b", "ab", "aB", "aab", "a^2"]), words)
def test_peripheral_class_is_conjugation_invariant(w, h):
    base = S.parse(w)
    conj = S.reduce(h + base + groups.inverse(h))
    assert peripheral_class(conj, S) == peripheral_class(base, S)
    tag = peripheral_class(base, S)
    inv = peripheral_class(groups.inverse(base), S)
    assert inv.tag == tag.tag and inv.k == -tag.k


def test_figure_eights_are_the_listed_classes():
    listed = {S.canonical(S.parse(w)) for w in ("aB", "bA", "bab", "BAB", "BAA", "aab")}
    assert set(figure_eights(S)) == listed
    # bc^-1 and ca^-1 with c = (ab)^-1
    assert S.canonical(S.parse("b a b")) in listed
    assert S.canonical(S.parse("(ab)^-1 a^-1")) in listed


def test_lemma_check_examples():
    assert lemma_a_check("a", "B", S) == "conclusion_holds"
    assert lemma_a_check("a^2", "B", S) == "hypothesis_not_met"
    assert lemma_a_check("a", "A", S) == "hypothesis_not_met"
    assert lemma_a_check("b a B", "a", S) == "hypothesis_not_met"


def test_small_grid_has_no_counterexamples():
    res = lemma_a_grid(max_exp=2, conj_len=2, S=S)
    assert res.counterexamples == []
    assert res.hypothesis_met > 0 and res.checked > res.hypothesis_met


def test_single_selfint_classification_small():
    table = classify_single_selfint(S, R=4)
    assert table.holds
    assert set(table.single) == set(figure_eights(S))
    si = dict(table.rows)
    assert si[S.canonical(S.parse("aB"))] == 1
    assert si[S.canonical(S.parse("bab"))] == 1


def test_positivity_small():
    mu = DiscreteCurrent.build(S, ["aB"])
    res = positivity_harness(mu, R=6, S=S)
    assert res.minimum >= 1
    assert res.stabilized
    mins = [v for _, v in res.curve]
    assert mins == sorted(mins, reverse=True)
    both = positivity_harness(DiscreteCurrent.build(S, ["aB", "bab"]), R=6, S=S)
    assert both.minimum >= 1


def test_surgery_lobes_have_one_double_point():
    for c in figure_eights(S):
        assert self_intersection(c, S) == 1

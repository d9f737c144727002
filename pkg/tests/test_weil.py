from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invdist.cyclotomic import Cyclo, InsufficientLevel, cyclo_abs_sq
from invdist.harmonic import (
    BilinearForm,
    FiniteDistribution,
    Level,
    LevelledFunction,
    coset_point,
    fourier,
    reflect,
)
from invdist.weil import (
    J_MATRIX,
    RELATIONS,
    SL2Element,
    a_,
    a_scale_half_power,
    apply_a,
    apply_nbar,
    apply_word,
    axis_haar_family,
    metaplectic_test,
    n_,
    nbar,
    projective_check,
    random_sl2,
    rejected_family,
    relation_words,
    sl2_decompose,
    weil_J,
    weil_operator,
    word_matrix,
)

L11 = Level(1, 1)


# --- SL(2) words --------------------------------------------------------------------


def test_decompose_examples():
    assert sl2_decompose(SL2Element.identity()) == ()
    assert sl2_decompose(n_(Fraction(3, 2))) == (("n", Fraction(3, 2)),)
    assert sl2_decompose(nbar(5)) == (("nbar", 5),)
    assert sl2_decompose(J_MATRIX) == (("nbar", 1), ("n", -1), ("nbar", 1))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_decompose_multiplies_back(seed):
    g = random_sl2(random.Random(seed))
    w = sl2_decompose(g)
    assert len(w) <= 4
    assert all(letter[0] in ("n", "nbar") for letter in w)
    assert word_matrix(w) == g


def test_diagonal_elements_decompose():
    for t in (Fraction(2), Fraction(-1), Fraction(1, 3)):
        assert word_matrix(sl2_decompose(a_(t))) == a_(t)


def test_determinant_checked():
    with pytest.raises(ValueError):
        SL2Element(1, 1, 1, 1)


# --- letters ------------------------------------------------------------------------


def test_nbar_zero_is_identity():
    B = BilinearForm.hyperbolic(3)
    f = LevelledFunction.basis(3, 2, L11)
    assert apply_nbar(f, 0, B).equals(f)


@pytest.mark.parametrize("p", [2, 3])
def test_nbar_multiplier_is_one_on_isotropic_axes(p):
    B = BilinearForm.hyperbolic(p)
    for axis in (0, 1):
        xi = FiniteDistribution.axis_haar(p, L11, axis)
        f = xi.weights
        assert apply_nbar(f, 1, B).equals(f)
        assert apply_nbar(f, 2, B).equals(f)


def test_nbar_multiplier_off_the_cone():
    p = 3
    B = BilinearForm.hyperbolic(p)
    f = LevelledFunction.indicator(p, 2, L11, (1, 1))  # the coset of (1/3, 1/3)
    g = apply_nbar(f, 1, B)
    x = coset_point(p, f.levels, (1, 1))
    assert B(x, x) == Fraction(2, 9)
    assert g.ratio_to(f) == Cyclo.root_of_unity(p, 2, 2)


def test_nbar_needs_level_room():
    B = BilinearForm.hyperbolic(2)
    f = LevelledFunction.basis(2, 2, Level(2, 0))
    with pytest.raises(InsufficientLevel):
        apply_nbar(f, Fraction(1, 2), B)


def test_a_scale_exponent():
    assert a_scale_half_power(3, 2, 3) == 2
    assert a_scale_half_power(Fraction(1, 2), 2, 2) == -2
    assert a_scale_half_power(5, 2, 3) == 0


def test_a_one_is_identity():
    f = LevelledFunction.basis(2, 2, L11)
    assert apply_a(f, 1).equals(f)


def test_a_is_unitary_dilation():
    p = 3
    f = LevelledFunction.lattice_indicator(p, 2, L11)
    g = apply_a(f, p)
    # |p|^{-1} f(v / p): indicator of p Z_p^2 scaled by p
    want = LevelledFunction.lattice_indicator(p, 2, g.levels, 1).scaled(p)
    assert g.equals(want)


@pytest.mark.parametrize("p", [2, 3])
def test_J_powers(p):
    B = BilinearForm.hyperbolic(p)
    f = LevelledFunction.basis(p, 2, L11)
    assert apply_word(f, (("J",), ("J",)), B).equals(reflect(f))
    assert apply_word(f, (("J",),) * 4, B).equals(f)
    g = LevelledFunction.lattice_indicator(p, 1, L11)
    assert apply_word(g, (("J",),), BilinearForm.diagonal(p, [1])).equals(g)


# --- projective relations --------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("name", ["conj-unipotent", "j4", "nbar-add"])
def test_relations_hold_with_unimodular_ratio(p, name):
    B = BilinearForm.hyperbolic(p)
    w1, w2 = relation_words(name, 1)
    v = projective_check(w1, w2, B, L11)
    assert v.ok and cyclo_abs_sq(v.ratio) == Cyclo.one(p)


def test_identical_words_have_ratio_one():
    B = BilinearForm.hyperbolic(2)
    w = (("nbar", 1), ("J",))
    assert projective_check(w, w, B, L11).ratio == Cyclo.one(2)


def test_mismatched_words_are_refused():
    B = BilinearForm.hyperbolic(2)
    with pytest.raises(ValueError):
        projective_check((("nbar", 1),), (), B, L11)


@pytest.mark.parametrize("p", [2, 3])
def test_braid_relation_depends_on_the_multiplier(p):
    """With J = F_B the braid J = nbar_1 n_{-1} nbar_1 needs the multiplier psi(t B(v,v)/2);
    the unhalved multiplier breaks proportionality."""
    B = BilinearForm.hyperbolic(p)
    w1, w2 = relation_words("braid")
    assert not projective_check(w1, w2, B, L11, "literal").proportional
    half = projective_check(w1, w2, B, L11, "half")
    assert half.ok and half.ratio == Cyclo.one(p)


def test_half_multiplier_keeps_the_other_relations():
    B = BilinearForm.hyperbolic(3)
    for name in RELATIONS:
        w1, w2 = relation_words(name, 1)
        assert projective_check(w1, w2, B, L11, "half").ok


def test_unknown_relation():
    with pytest.raises(ValueError):
        relation_words("nope")


def test_weil_J_matches_fourier():
    B = BilinearForm.hyperbolic(2)
    op = weil_J(B, L11)
    assert op.images.equals(fourier(LevelledFunction.basis(2, 2, L11), B))
    assert op.sl2 == J_MATRIX


def test_operator_leaving_the_window_is_reported():
    B = BilinearForm.hyperbolic(3)
    with pytest.raises(ValueError):
        weil_operator((("a", Fraction(1, 9)),), B, L11)


# --- the metaplectic instance ---------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3])
def test_axis_haar_family_measures_half_dimension(p):
    B = BilinearForm.hyperbolic(p)
    for name, xi in axis_haar_family(p, L11)[:3]:
        v = metaplectic_test(xi, B)
        assert v.preconditions, name
        assert v.ok and v.degree == 1, name


@pytest.mark.parametrize("p", [2, 3])
def test_rejected_family_fails_preconditions(p):
    B = BilinearForm.hyperbolic(p)
    for name, xi in rejected_family(p, L11):
        v = metaplectic_test(xi, B)
        assert not v.preconditions, name
    v = metaplectic_test(FiniteDistribution.delta(p, 2, L11), B)
    assert v.reason == "F_B(xi) not supported in Z(B)"


def test_zero_distribution_is_vacuous():
    v = metaplectic_test(FiniteDistribution.zero(2, 2, L11), BilinearForm.hyperbolic(2))
    assert v.ok and v.reason == "vacuous"


def test_verdict_json_shape():
    v = metaplectic_test(FiniteDistribution.axis_haar(2, L11), BilinearForm.hyperbolic(2))
    obj = v.to_json()
    assert obj["degree"] == "1" and obj["expected_degree"] == "1"

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invdist.cyclotomic import Cyclo, psi_eval
from invdist.harmonic import (
    BilinearForm,
    Constraint,
    FiniteDistribution,
    Level,
    LevelError,
    LevelledFunction,
    abs_homogeneity_degree,
    cells_from_json,
    cells_to_json,
    coset_meets_cell,
    coset_point,
    dilate,
    embed,
    fourier,
    fourier_level,
    inner_product,
    inverse_fourier,
    isotropic_cells,
    partial_fourier,
    point_index,
    reflect,
    supported_in,
)

L11 = Level(1, 1)


def brute_fourier(f: LevelledFunction, B: BilinearForm, y) -> Cyclo:
    """Direct character sum for a unimodular form; psi(B(x, y)) is constant on input cosets."""
    p = f.p
    vol = Fraction(1, p ** sum(lv.k for lv in f.levels))
    total = Cyclo.zero(p)
    for idx in itertools.product(*(range(n) for n in f.grid)):
        c = f.values.item(idx)
        if c.is_zero():
            continue
        x = coset_point(p, f.levels, idx)
        total = total + c * psi_eval(B(x, y), p, 3)
    return total * Cyclo.rational(p, vol)


def random_function(p, d, level, seed) -> LevelledFunction:
    rng = np.random.default_rng(seed)
    grid = (level.size(p),) * d
    vals = rng.integers(-3, 4, size=grid)
    return LevelledFunction.from_callable(
        p, d, level, lambda x: Cyclo.rational(p, int(vals[point_index(p, (level,) * d, x)])))


# --- levels and forms ---------------------------------------------------------------


def test_level_validation_and_cover():
    with pytest.raises(ValueError):
        Level(-1, 0)
    assert Level(2, 1).covers(Level(1, 1)) and not Level(1, 1).covers(Level(2, 0))


def test_form_shifts():
    H = BilinearForm.hyperbolic(2)
    assert H.is_unimodular and fourier_level(Level(2, 1), H) == Level(1, 2)
    D = BilinearForm.diagonal(3, [1, 3])
    assert not D.is_unimodular and D.det_valuation == 1
    with pytest.raises(ValueError):
        BilinearForm([[1, 2], [3, 4]], 3)
    with pytest.raises(ValueError):
        BilinearForm([[0, 0], [0, 1]], 3)
    with pytest.raises(ValueError):
        BilinearForm.hyperbolic(4)


def test_hyperbolic_quadratic_form_is_the_pairing():
    H = BilinearForm.hyperbolic(3)
    assert H((2, 5), (2, 5)) == 2 * 2 * 5
    assert H((1, 0), (0, 1)) == 1


# --- the Fourier transform ----------------------------------------------------------


def test_fourier_of_lattice_indicator_d1():
    for p in (2, 3, 5):
        f = LevelledFunction.lattice_indicator(p, 1, L11)
        assert fourier(f, BilinearForm.diagonal(p, [1])).equals(f)


@pytest.mark.parametrize("p", [2, 3])
def test_fourier_of_lattice_indicator_hyperbolic(p):
    f = LevelledFunction.lattice_indicator(p, 2, L11)
    assert fourier(f, BilinearForm.hyperbolic(p)).equals(f)


@pytest.mark.parametrize("p,d", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_double_fourier_is_reflection_on_full_basis(p, d):
    B = BilinearForm.hyperbolic(p) if d == 2 else BilinearForm.diagonal(p, [1])
    basis = LevelledFunction.basis(p, d, L11)
    assert fourier(fourier(basis, B), B).equals(reflect(basis))
    assert inverse_fourier(fourier(basis, B), B).equals(basis)


@pytest.mark.parametrize("p,d,form", [(2, 2, "hyperbolic"), (3, 2, "hyperbolic"), (3, 2, "diag:1,1"),
                                      (5, 1, "diag:2")])
def test_fourier_matches_direct_character_sum(p, d, form):
    B = BilinearForm.from_spec(form, p, d)
    f = random_function(p, d, L11, seed=p)
    F = fourier(f, B)
    assert F.levels == (fourier_level(L11, B),) * d
    cosets = list(itertools.product(*(range(n) for n in F.grid)))
    for idx in cosets:
        y = coset_point(p, F.levels, idx)
        assert F.evaluate(y) == brute_fourier(f, B, y)


def test_double_fourier_with_non_unimodular_form():
    B = BilinearForm.diagonal(3, [1, 3])
    f = random_function(3, 2, L11, seed=7)
    assert fourier(fourier(f, B), B).equals(reflect(f))


@pytest.mark.parametrize("p", [2, 3])
def test_parseval_on_basis(p):
    B = BilinearForm.hyperbolic(p)
    basis = LevelledFunction.basis(p, 2, L11)
    n = basis.batch_shape[0]
    F = fourier(basis, B)
    for i in range(0, n, max(1, n // 6)):
        for j in range(0, n, max(1, n // 5)):
            assert inner_product(F[i], F[j], B) == inner_product(basis[i], basis[j], B)


def test_partial_transform_factorization():
    p = 3
    B1, B2 = BilinearForm.diagonal(p, [1]), BilinearForm.diagonal(p, [2])
    f = random_function(p, 2, L11, seed=1)
    full = fourier(f, B1.direct_sum(B2))
    stepwise = partial_fourier(partial_fourier(f, B2, axes=[1]), B1, axes=[0])
    assert full.equals(stepwise)


def test_partial_transform_of_pure_tensor():
    p = 2
    f1 = LevelledFunction.indicator(p, 1, L11, (1,))
    f2 = LevelledFunction.indicator(p, 1, L11, (3,))
    B = BilinearForm.diagonal(p, [1])
    tensor = LevelledFunction.from_callable(p, 2, L11, lambda x: f1.evaluate(x[:1]) * f2.evaluate(x[1:]))
    Ff2 = fourier(f2, B)
    want = LevelledFunction.from_callable(p, 2, L11, lambda x: f1.evaluate(x[:1]) * Ff2.evaluate(x[1:]))
    assert partial_fourier(tensor, B, axes=[1]).equals(want)


def test_embedding_is_compatible_with_fourier():
    p = 2
    B = BilinearForm.hyperbolic(p)
    f = random_function(p, 2, L11, seed=3)
    assert fourier(embed(f, Level(2, 1)), B).equals(fourier(f, B))


# --- dilations and evaluation ---------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([Fraction(3), Fraction(1, 3), Fraction(-1), Fraction(2)]))
def test_dilate_evaluates_at_scaled_point(t):
    p = 3
    f = random_function(p, 1, Level(1, 1), seed=0)
    g = dilate(f, t)
    for a in range(-9, 10):
        x = Fraction(a, 9)
        assert g.evaluate((x,)) == f.evaluate((t * x,))


def test_reflect_then_reflect():
    f = random_function(5, 2, L11, seed=4)
    assert reflect(reflect(f)).equals(f)


def test_function_json_roundtrip():
    f = random_function(3, 2, Level(1, 2), seed=9)
    assert LevelledFunction.from_json(f.to_json()).equals(f)


def test_size_cap():
    with pytest.raises(ValueError):
        LevelledFunction.zero(5, 4, Level(2, 2))


# --- distributions and supports -----------------------------------------------------


def test_distribution_examples():
    p = 3
    delta = FiniteDistribution.delta(p, 2, L11)
    haar = FiniteDistribution.haar(p, 2, L11)
    assert delta.support() == [(0, 0)]
    assert len(haar.support()) == 81
    axis = FiniteDistribution.axis_haar(p, L11, axis=0)
    assert sorted(axis.support()) == [(a, 0) for a in range(9)]
    # Haar of Z_p^2 is 1, delta at 0 evaluates f(0)
    one = LevelledFunction.lattice_indicator(p, 2, L11)
    assert haar(one) == Cyclo.one(p) and delta(one) == Cyclo.one(p)


def test_fourier_swaps_delta_and_haar():
    p = 2
    B = BilinearForm.hyperbolic(p)
    delta = FiniteDistribution.delta(p, 2, L11)
    haar = FiniteDistribution.haar(p, 2, L11)
    assert delta.fourier(B).equals(haar)
    assert haar.fourier(B).equals(delta)


def test_distribution_json_roundtrip():
    xi = FiniteDistribution.axis_haar(2, L11, axis=1)
    assert FiniteDistribution.from_json(xi.to_json()).equals(xi)


def test_support_in_isotropic_cone():
    p = 3
    H = BilinearForm.hyperbolic(p)
    Z = isotropic_cells(H)
    assert supported_in(FiniteDistribution.zero(p, 2, L11), Z, H)
    assert supported_in(FiniteDistribution.delta(p, 2, L11), Z, H)
    assert supported_in(FiniteDistribution.axis_haar(p, L11, axis=1), Z, H)
    diag = FiniteDistribution.line_haar(p, L11, (1, 1))
    assert not supported_in(diag, Z, H)


def test_form_cell_over_approximation_is_exact_for_unit_cosets():
    p = 3
    D = BilinearForm.diagonal(p, [1, 1])
    cells = ((Constraint("form", "zero"),),)
    lv = (L11, L11)
    # x = (1, 0) has B(x, x) = 1, a unit on the whole coset
    assert not coset_meets_cell(p, lv, (3, 0), cells[0], D)
    assert coset_meets_cell(p, lv, (0, 0), cells[0], D)


def test_cells_json_and_validation():
    cells = ((Constraint("coord", "ge", 1, 0), Constraint("form", "zero")),)
    assert cells_from_json(cells_to_json(cells)) == cells
    with pytest.raises(ValueError):
        Constraint("coord", "ge", 1)
    with pytest.raises(ValueError):
        Constraint("form", "eq", 1)


def test_partial_transform_keeps_support_projection():
    p = 2
    B1 = BilinearForm.diagonal(p, [1])
    xi = FiniteDistribution(LevelledFunction.indicator(p, 2, L11, (2, 1)))
    before = {i for i, _ in xi.support()}
    after = {i for i, _ in xi.partial_fourier(B1, axes=[1]).support()}
    assert before == after


# --- abs-homogeneity ----------------------------------------------------------------------


@pytest.mark.parametrize("p,d", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_haar_and_delta_degrees(p, d):
    lv = Level(2, 2) if d == 1 else L11
    h = abs_homogeneity_degree(FiniteDistribution.haar(p, d, lv))
    assert h.homogeneous and h.degree == d
    h = abs_homogeneity_degree(FiniteDistribution.delta(p, d, lv))
    assert h.homogeneous and h.degree == 0


@pytest.mark.parametrize("p", [2, 3])
def test_axis_haar_degree_is_one(p):
    h = abs_homogeneity_degree(FiniteDistribution.axis_haar(p, L11))
    assert h.homogeneous and h.degree == 1


def test_zero_distribution_has_any_degree():
    h = abs_homogeneity_degree(FiniteDistribution.zero(3, 2, L11))
    assert h.homogeneous and h.degree is None


def test_mixed_distribution_is_not_homogeneous():
    p = 3
    w = FiniteDistribution.haar(p, 1, Level(2, 2)).weights + FiniteDistribution.delta(p, 1, Level(2, 2)).weights
    h = abs_homogeneity_degree(FiniteDistribution(w))
    assert not h.homogeneous and h.witness


def test_homogeneity_needs_room():
    with pytest.raises(LevelError):
        abs_homogeneity_degree(FiniteDistribution.haar(3, 1, Level(0, 1)))

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invdist.cyclotomic import (
    Cyclo,
    CycloArray,
    InsufficientLevel,
    TowerError,
    cyclo_abs_sq,
    psi_eval,
    sqrt_p,
)
from invdist.scalars import INF, QQ, field_from_spec, gf, padic_norm, padic_valuation, parse_rational

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=81)


def cyc(p, N, vec):
    return Cyclo.from_cyclic(p, N, vec)


# --- parsing and valuations ---------------------------------------------------


def test_parse_rational_forms():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(4) == Fraction(4)
    assert parse_rational("-7") == Fraction(-7)
    with pytest.raises(ValueError):
        parse_rational("x/2")


def test_padic_norm_examples():
    assert padic_norm(1, 3).valuation == 0
    n = padic_norm(5, 5)
    assert n.valuation == 1 and n.abs == Fraction(1, 5)
    assert padic_norm(12, 2).valuation == 2
    assert padic_norm(0, 2).valuation == INF and padic_norm(0, 2).abs == 0


@given(rationals, rationals, st.sampled_from([2, 3, 5]))
def test_padic_norm_multiplicative_and_ultrametric(x, y, p):
    assert padic_norm(x * y, p).abs == padic_norm(x, p).abs * padic_norm(y, p).abs
    assert padic_norm(x + y, p).abs <= max(padic_norm(x, p).abs, padic_norm(y, p).abs)


def test_padic_norm_rejects_composite():
    with pytest.raises(ValueError):
        padic_norm(3, 6)


def test_valuation_of_fraction():
    assert padic_valuation(Fraction(9, 2), 3) == 2
    assert padic_valuation(Fraction(1, 8), 2) == -3


# --- finite fields -------------------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4, 5, 9])
def test_gf_inverses_and_distributivity(q):
    F = gf(q)
    els = list(F.elements())
    assert len(els) == q
    for a in els:
        if a:
            assert a * (F.one / a) == F.one
        for b in els:
            assert a * b == b * a
            for c in els[:3]:
                assert a * (b + c) == a * b + a * c


def test_mixed_moduli_rejected():
    with pytest.raises(ValueError):
        gf(3)(1) + gf(5)(1)


def test_field_selectors():
    assert field_from_spec("Q") == QQ
    assert field_from_spec("gf3") == gf(3)
    assert field_from_spec({"gf": 5}) == gf(5)
    with pytest.raises(ValueError):
        field_from_spec("R")


# --- the character psi and cyclotomic arithmetic -------------------------------


def test_psi_examples():
    assert psi_eval(0, 3, 1) == Cyclo.one(3)
    z3 = psi_eval(Fraction(1, 3), 3, 1)
    assert z3 == Cyclo.root_of_unity(3, 1, 1)
    assert z3 != Cyclo.one(3) and z3 ** 3 == Cyclo.one(3)
    # integers are in the kernel
    assert psi_eval(7, 3, 2) == Cyclo.one(3)


def test_psi_insufficient_level():
    with pytest.raises(InsufficientLevel):
        psi_eval(Fraction(1, 9), 3, 1)


@given(st.sampled_from([2, 3, 5]), st.integers(-40, 40), st.integers(-40, 40), st.integers(0, 2))
def test_psi_homomorphism(p, a, b, j):
    x, y = Fraction(a, p**j), Fraction(b, p**j)
    N = 2
    assert psi_eval(x + y, p, N) == psi_eval(x, p, N) * psi_eval(y, p, N)
    assert psi_eval(x, p, N) * psi_eval(-x, p, N) == Cyclo.one(p)


def test_abs_sq_examples():
    assert cyclo_abs_sq(Cyclo.one(3)) == Cyclo.one(3)
    for p, N in ((2, 2), (3, 1), (5, 1)):
        for a in range(p**N):
            assert cyclo_abs_sq(Cyclo.root_of_unity(p, N, a)) == Cyclo.one(p)
    z = Cyclo.root_of_unity(3, 1, 1)
    w = Cyclo.one(3) + z
    assert w == -(z * z)
    assert cyclo_abs_sq(w) == Cyclo.one(3)


@pytest.mark.parametrize("p,N", [(2, 1), (2, 3), (3, 1), (3, 2), (5, 1)])
def test_full_character_sum_vanishes(p, N):
    s = Cyclo.zero(p)
    for a in range(p**N):
        s = s + Cyclo.root_of_unity(p, N, a)
    assert s.is_zero()


cyclo_vectors = st.lists(st.integers(-4, 4), min_size=9, max_size=9)


@given(cyclo_vectors, cyclo_vectors)
def test_abs_sq_multiplicative_and_conj_involution(u, v):
    z, w = cyc(3, 2, u), cyc(3, 2, v)
    assert z.conj().conj() == z
    assert cyclo_abs_sq(z * w) == cyclo_abs_sq(z) * cyclo_abs_sq(w)
    assert cyclo_abs_sq(z).is_real()


@given(cyclo_vectors)
def test_inverse(u):
    z = cyc(3, 2, u)
    if not z.is_zero():
        assert z * z.inverse() == Cyclo.one(3)


def test_sqrt_p_squares_to_p():
    for p in (2, 3, 5, 7):
        r = sqrt_p(p)
        assert r * r == Cyclo.rational(p, p)


def test_half_power_tower():
    h = Cyclo.p_power(3, 1)
    assert h * h == Cyclo.rational(3, 3)
    assert cyclo_abs_sq(h) == Cyclo.rational(3, 3)


def test_json_roundtrip():
    z = cyc(3, 2, [1, 0, -2, 0, 0, 3, 0, 0, 1]) * Cyclo.p_power(3, 1)
    assert Cyclo.from_json(z.to_json()) == z


def test_complex_value_matches_symbolic():
    z = Cyclo.root_of_unity(5, 1, 2)
    assert abs(complex(z) - np.exp(2j * np.pi * 2 / 5)) < 1e-12


# --- arrays ------------------------------------------------------------------------


def test_array_matches_scalar_arithmetic():
    vals = [psi_eval(Fraction(a, 9), 3, 2) for a in range(9)]
    arr = CycloArray.from_cyclos(3, vals)
    prod = arr * arr.conj()
    for i in range(9):
        assert prod.item((i,)) == Cyclo.one(3)
    total = arr.sum()
    assert total.item(()).is_zero()


def test_array_ratio():
    vals = [Cyclo.rational(2, k) for k in (1, 2, 0, 5)]
    a = CycloArray.from_cyclos(2, vals)
    u = Cyclo.root_of_unity(2, 2, 1)
    b = a * u
    assert b.ratio_to(a) == u
    c = CycloArray.from_cyclos(2, [Cyclo.rational(2, k) for k in (1, 2, 1, 5)])
    assert c.ratio_to(a) is None


def test_array_large_entries_stay_exact():
    big = 10**30
    a = CycloArray.from_rationals(3, [big, 1])
    b = a * a
    assert b.item((0,)) == Cyclo.rational(3, big * big)


def test_array_tower_mixing():
    a = CycloArray.from_cyclos(2, [Cyclo.one(2)])
    b = CycloArray.from_cyclos(2, [Cyclo.p_power(2, 1)])
    # sqrt(2) lies in Q(zeta_8), so it folds into the field and addition works
    assert (a + b).item((0,)) == Cyclo.one(2) + sqrt_p(2)
    # sqrt(3) is not in any Q(zeta_{3^N}); it stays formal and cannot be added to 1
    c = CycloArray(3, 0, np.array([[1]], dtype=object))
    d = CycloArray(3, 0, np.array([[1]], dtype=object), half=1)
    with pytest.raises(TowerError):
        c + d

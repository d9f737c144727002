from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from invdist.geometry import random_matrix, random_vector, vectors
from invdist.linalg import (
    DimensionError,
    Matrix,
    Subspace,
    ad_image,
    centralizer_space,
    char_poly,
    commutator,
    direct_sum,
    kernel_space,
    minimal_polynomial,
    orthocomplement,
    pair,
    poly_eval_matrix,
    poly_mul,
    rank_one,
    solve_in_subspace,
)
from invdist.scalars import QQ, gf

E = Matrix.unit
small = st.integers(-4, 4)


def mat(n):
    return st.lists(small, min_size=n * n, max_size=n * n).map(lambda xs: Matrix.from_flat(xs, n))


def to_sympy(A: Matrix) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in A.rows])


def test_commutator_examples():
    A = Matrix([[1, 2], [3, 4]])
    assert commutator(A, A).is_zero()
    assert commutator(E(0, 1, 2), E(1, 0, 2)) == Matrix.diag([1, -1])


@given(mat(3), mat(3))
def test_commutator_is_traceless(A, B):
    assert commutator(A, B).trace() == 0


def test_rank_one_examples():
    assert rank_one((0, 0), (3, 5)).is_zero()
    assert rank_one((1, 0), (0, 1)) == E(0, 1, 2)


@given(st.lists(small, min_size=4, max_size=4), st.lists(small, min_size=4, max_size=4))
def test_rank_one_trace_is_pairing(v, phi):
    v, phi = [Fraction(x) for x in v], [Fraction(x) for x in phi]
    assert rank_one(v, phi).trace() == pair(phi, v)


def test_ad_image_examples():
    assert ad_image(Matrix.zero(3)).dim == 0
    S = ad_image(Matrix.jordan_block(2))
    assert S == Subspace([E(0, 1, 2).flat(), Matrix.diag([1, -1]).flat()], 4)
    assert S.dim == 2


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("field", [QQ, gf(2), gf(3)])
def test_regular_nilpotent_ad_image_dimension(n, field):
    assert ad_image(Matrix.jordan_block(n, field)).dim == n * n - n


@settings(max_examples=30, deadline=None)
@given(mat(3))
def test_rank_nullity_for_ad(A):
    assert ad_image(A).dim + centralizer_space(A).dim == 9


def test_ad_image_conjugation():
    rng = random.Random(5)
    A = random_matrix(rng, 3)
    g = Matrix([[1, 2, 0], [0, 1, 3], [1, 0, 1]])
    gi = g.inverse()
    S = ad_image(A)
    T = ad_image(g @ A @ gi)
    for b in S.basis:
        X = Matrix.from_flat(b, 3)
        assert (g @ X @ gi).flat() in T


def test_solve_in_subspace_examples():
    S = ad_image(Matrix.jordan_block(2))
    z = solve_in_subspace(Matrix.zero(2), S)
    assert z.member and all(c == 0 for c in z.coordinates)
    assert solve_in_subspace(E(0, 1, 2), S).member
    # the witness E12 = [J2, E22]
    assert commutator(Matrix.jordan_block(2), E(1, 1, 2)) == E(0, 1, 2)
    assert not solve_in_subspace(E(1, 0, 2), S).member


def test_solve_in_subspace_coordinates_reconstruct():
    S = ad_image(Matrix.jordan_block(3))
    target = commutator(Matrix.jordan_block(3), Matrix([[1, 2, 0], [0, 3, 1], [4, 0, 1]]))
    m = solve_in_subspace(target, S)
    assert m.member and S.combine(m.coordinates) == target.flat()


def test_char_poly_examples():
    x2 = (0, 0, 1)
    assert char_poly(Matrix.zero(2)) == x2
    assert char_poly(Matrix.diag([1, 2])) == (2, -3, 1)
    for r in (1, 2, 4):
        assert char_poly(Matrix.jordan_block(r)) == (0,) * r + (1,)


@settings(max_examples=40, deadline=None)
@given(mat(4))
def test_char_poly_matches_sympy(A):
    lam = sympy.Symbol("lam")
    want = sympy.Poly(to_sympy(A).charpoly(lam).as_expr(), lam).all_coeffs()[::-1]
    assert list(char_poly(A)) == [Fraction(int(c)) for c in want]


@settings(max_examples=25, deadline=None)
@given(mat(2), mat(3))
def test_char_poly_of_direct_sum(A1, A2):
    assert char_poly(direct_sum(A1, A2)) == poly_mul(char_poly(A1), char_poly(A2))


@settings(max_examples=25, deadline=None)
@given(mat(3))
def test_cayley_hamilton_and_minimal_polynomial(A):
    assert poly_eval_matrix(char_poly(A), A).is_zero()
    mp = minimal_polynomial(A)
    assert poly_eval_matrix(mp, A).is_zero()
    assert mp[-1] == 1
    assert sympy.degree(to_sympy(A).charpoly().as_expr()) >= len(mp) - 1


@settings(max_examples=30, deadline=None)
@given(mat(4))
def test_rank_and_det_match_sympy(A):
    S = to_sympy(A)
    assert A.rank() == S.rank()
    assert A.det() == Fraction(int(S.det()))


def test_direct_sum_with_empty():
    A = Matrix([[1, 2], [3, 4]])
    assert direct_sum(A, Matrix([], QQ)) == A
    assert direct_sum(Matrix([], QQ), A) == A


def test_orthocomplement_examples():
    zero = Subspace([], 4)
    assert orthocomplement(zero) == Subspace.full(4)
    r = 3
    V = Subspace([[1 if j == i else 0 for j in range(2 * r)] for i in range(r)], 2 * r)
    assert orthocomplement(V) == V


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(small, min_size=6, max_size=6), max_size=4))
def test_orthocomplement_dimension_and_involution(gens):
    S = Subspace(gens, 6)
    P = orthocomplement(S)
    assert S.dim + P.dim == 6
    assert orthocomplement(P) == S
    for a in S.basis:
        for b in P.basis:
            assert pair(a[3:], b[:3]) + pair(b[3:], a[:3]) == 0


def test_kernel_space_over_gf2_exhaustive():
    F = gf(2)
    A = Matrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]], F)
    K = kernel_space(A)
    brute = [v for v in vectors(F, 3) if not any(A.apply(v))]
    assert K.dim == 1 and len(brute) == 2 and all(v in K for v in brute)


def test_dimension_errors():
    with pytest.raises(DimensionError):
        Matrix([[1, 2], [3]])
    with pytest.raises(DimensionError):
        commutator(Matrix.zero(2), Matrix.zero(3))
    with pytest.raises(DimensionError):
        rank_one((1, 2), (1,))


def test_random_vector_helper_is_seeded():
    a = random_vector(random.Random(3), 4)
    b = random_vector(random.Random(3), 4)
    assert a == b

from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from invdist.geometry import nilpotent_matrices, random_invertible, random_matrix
from invdist.linalg import Matrix, ad_image, commutator, direct_sum, minimal_polynomial
from invdist.orbits import (
    NotNilpotent,
    block_slice,
    block_unslice,
    centralizer,
    conjugate,
    dominates,
    in_stratum,
    in_stratum_by_closure,
    is_squarefree,
    jc_map,
    jordan_chevalley,
    jordan_matrix,
    nilpotent_profile,
    partition_dimension,
    partitions,
    trace_slice,
    trace_unslice,
)
from invdist.scalars import QQ, gf
from invdist.xspace import PointX

J = Matrix.jordan_block


# --- partitions ------------------------------------------------------------------


def test_partition_counts():
    assert [len(list(partitions(n))) for n in range(1, 8)] == [1, 2, 3, 5, 7, 11, 15]


@pytest.mark.parametrize("n", range(1, 8))
def test_conjugate_is_involution(n):
    for lam in partitions(n):
        assert conjugate(conjugate(lam)) == lam
        assert sum(conjugate(lam)) == n


def test_dominance_reverses_under_conjugation():
    for lam in partitions(6):
        for mu in partitions(6):
            assert dominates(mu, lam) == dominates(conjugate(lam), conjugate(mu))


# --- profiles and strata ---------------------------------------------------------


def test_profile_examples():
    p0 = nilpotent_profile(Matrix.zero(3))
    assert p0.partition == (1, 1, 1) and p0.dimension == 0
    for n in range(1, 6):
        p = nilpotent_profile(J(n))
        assert p.partition == (n,) and p.dimension == n * n - n
    p = nilpotent_profile(direct_sum(J(2), J(1)))
    assert p.partition == (2, 1) and p.dimension == 4


def test_profile_rejects_non_nilpotent():
    with pytest.raises(NotNilpotent):
        nilpotent_profile(Matrix.identity(2))


@pytest.mark.parametrize("n", range(1, 6))
def test_partition_formula_matches_ad_rank(n):
    for lam in partitions(n):
        A = jordan_matrix(lam)
        assert partition_dimension(lam) == ad_image(A).dim
        assert nilpotent_profile(A).partition == lam


def test_stratum_examples():
    A = direct_sum(J(2), J(1))
    assert in_stratum(Matrix.zero(3), 0)
    assert not in_stratum(A, 3)
    assert in_stratum(A, 4)
    for M in nilpotent_matrices(gf(2), 3):
        assert in_stratum(M, 6)


def test_stratum_closure_route_agrees_over_gf2():
    for M in nilpotent_matrices(gf(2), 3):
        for i in range(7):
            assert in_stratum(M, i) == in_stratum_by_closure(M, i)


def test_profile_is_conjugation_invariant():
    rng = random.Random(11)
    for lam in partitions(4):
        A = jordan_matrix(lam)
        g = random_invertible(rng, 4)
        assert nilpotent_profile(g @ A @ g.inverse()).partition == lam


# --- Jordan-Chevalley --------------------------------------------------------------


def test_jc_examples():
    N = direct_sum(J(2), J(1))
    d = jordan_chevalley(N)
    assert d.semisimple.is_zero() and d.nilpotent == N
    D = Matrix.diag([1, 2])
    d = jordan_chevalley(D)
    assert d.semisimple == D and d.nilpotent.is_zero()
    d = jordan_chevalley(Matrix([[1, 1], [0, 1]]))
    assert d.semisimple == Matrix.identity(2) and d.nilpotent == Matrix.unit(0, 1, 2)


def test_jc_map_examples():
    g = Matrix([[2, 1], [1, 1]])
    assert jc_map(g @ Matrix([[1, 1], [0, 1]]) @ g.inverse()) == Matrix.identity(2)
    D = Matrix.diag([3, -1, 2])
    assert jc_map(D) == D
    D0 = Matrix.diag([3, -1, -2])
    assert jc_map(PointX(D0, (0, 0, 0), (1, 0, 0))) == D0


def _sympy_semisimple(A: Matrix) -> Matrix:
    S = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in A.rows])
    P, Jf = S.jordan_form()
    Ds = P * sympy.diag(*[Jf[i, i] for i in range(Jf.rows)]) * P.inv()
    return Matrix([[Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in row]
                   for row in Ds.tolist()])


def test_jc_against_sympy_jordan_form():
    # conjugates of explicit Jordan matrices with repeated rational eigenvalues
    rng = random.Random(2)
    blocks = [direct_sum(J(2, eigenvalue=2), J(2, eigenvalue=-1)),
              direct_sum(J(3, eigenvalue=1), Matrix([[5]])),
              direct_sum(J(2, eigenvalue=2), Matrix.diag([2, 3]))]
    for B in blocks:
        g = random_invertible(rng, 4)
        A = g @ B @ g.inverse()
        assert jordan_chevalley(A).semisimple == _sympy_semisimple(A)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 5))
def test_jc_contract(seed, n):
    A = random_matrix(random.Random(seed), n)
    d = jordan_chevalley(A)
    assert d.semisimple + d.nilpotent == A
    assert commutator(d.semisimple, d.nilpotent).is_zero()
    assert (d.nilpotent ** n).is_zero()
    assert is_squarefree(minimal_polynomial(d.semisimple))


def test_jc_over_finite_field_is_refused():
    with pytest.raises(ValueError):
        jordan_chevalley(J(2, gf(3)))


# --- centralizers ------------------------------------------------------------------


def test_centralizer_examples():
    assert centralizer(Matrix.zero(3)).dimension == 9
    c = centralizer(Matrix.diag([1, 2]))
    assert c.dimension == 2
    assert all(b[1] == 0 and b[2] == 0 for b in c.space.basis)
    c = centralizer(Matrix([[0, -1], [1, 0]]))
    assert c.dimension == 2 == c.predicted_dimension
    assert c.factors == (((1, 0, 1), 1, 2),)


def test_centralizer_prediction_for_semisimple_with_multiplicity():
    A = direct_sum(Matrix([[0, -1], [1, 0]]), Matrix([[0, -1], [1, 0]]))
    A = direct_sum(A, Matrix([[3]]))
    c = centralizer(A)
    assert c.dimension == c.predicted_dimension == 2 * 2 * 2 + 1


# --- slices ------------------------------------------------------------------------


def test_trace_slice_examples():
    A = Matrix([[1, 2], [3, -1]])
    assert trace_slice(A) == A
    assert trace_slice(Matrix.identity(3)).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_trace_slice_roundtrip(seed):
    A = random_matrix(random.Random(seed), 3)
    B = trace_slice(A)
    assert B.trace() == 0
    assert trace_unslice(B, A.trace()) == A


def test_block_slice_examples():
    z = block_slice(Matrix.zero(3))
    assert z.A.is_zero() and not any(z.v) and not any(z.phi)
    B = Matrix([[-1, 0, 0], [0, -1, 0], [0, 0, 2]])
    # A = -(lam/n) Id with lam = 2, n = 2 cancels
    assert block_slice(B).A.is_zero()
    B = Matrix([[0, 0, 1], [0, -2, 0], [1, 0, 2]])
    x = block_slice(B)
    assert x.A == Matrix([[1, 0], [0, -1]])
    assert x.v == (1, 0) and x.phi == (1, 0)
    assert block_unslice(x, 2) == B


@pytest.mark.parametrize("field", [QQ, gf(5), gf(7)])
def test_block_slice_roundtrip(field):
    rng = random.Random(1)
    for _ in range(10):
        rows = [[field(rng.randint(-3, 3)) for _ in range(3)] for _ in range(3)]
        B = trace_slice(Matrix(rows, field))
        assert block_unslice(block_slice(B), B[2, 2]) == B

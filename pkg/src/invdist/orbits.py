"""Nilpotent orbits, Jordan-Chevalley decomposition and the slice maps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .linalg import (
    Matrix,
    Subspace,
    ad_image,
    centralizer_space,
    char_poly,
    commutator,
    minimal_polynomial,
    poly_deriv,
    poly_divmod,
    poly_eval_matrix,
    poly_gcd,
    poly_monic,
    poly_trim,
    squarefree_part,
)
from .scalars import QQ
from .xspace import PointX


class NotNilpotent(ValueError):
    pass


# ---------------------------------------------------------------------------
# partitions


def partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """All partitions of n as weakly decreasing tuples."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def conjugate(lam: Sequence[int]) -> tuple[int, ...]:
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part > i) for i in range(lam[0]))


def partition_dimension(lam: Sequence[int]) -> int:
    """Dimension of the nilpotent orbit with Jordan type lam."""
    n = sum(lam)
    return n * n - sum(c * c for c in conjugate(lam))


def partition_ranks(lam: Sequence[int]) -> tuple[int, ...]:
    """rank A^k for k = 0..n, A nilpotent of Jordan type lam."""
    n = sum(lam)
    return tuple(sum(max(part - k, 0) for part in lam) for k in range(n + 1))


def dominates(mu: Sequence[int], lam: Sequence[int]) -> bool:
    """True iff lam <= mu in dominance order, i.e. O_lam lies in the closure of O_mu."""
    a = b = 0
    for i in range(max(len(mu), len(lam))):
        a += mu[i] if i < len(mu) else 0
        b += lam[i] if i < len(lam) else 0
        if b > a:
            return False
    return True


def jordan_matrix(lam: Sequence[int], field=QQ) -> Matrix:
    """Nilpotent matrix in Jordan form with block sizes lam."""
    n = sum(lam)
    rows = [[field.zero] * n for _ in range(n)]
    start = 0
    for part in lam:
        for i in range(start, start + part - 1):
            rows[i][i + 1] = field.one
        start += part
    return Matrix(rows, field)


@dataclass(frozen=True)
class NilpotentProfile:
    partition: tuple[int, ...]

    @property
    def n(self) -> int:
        return sum(self.partition)

    @property
    def rank_sequence(self) -> tuple[int, ...]:
        return partition_ranks(self.partition)

    @property
    def dimension(self) -> int:
        return partition_dimension(self.partition)

    def to_json(self) -> dict:
        return {"partition": list(self.partition), "ranks": list(self.rank_sequence),
                "dimension": self.dimension}


def _ranks(A: Matrix) -> list[int]:
    n = A.n
    ranks, P = [n], Matrix.identity(n, A.field)
    for _ in range(n):
        P = P @ A
        ranks.append(P.rank())
    return ranks


def nilpotent_profile(A: Matrix) -> NilpotentProfile:
    ranks = _ranks(A)
    if ranks[-1] != 0:
        raise NotNilpotent("operator is not nilpotent")
    # number of blocks of size >= k is rank A^{k-1} - rank A^k
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks)) if ranks[k - 1] > ranks[k]]
    return NilpotentProfile(conjugate(tuple(at_least)) if at_least else ())


def orbit_dimension(A: Matrix) -> int:
    return nilpotent_profile(A).dimension


def is_nilpotent(A: Matrix) -> bool:
    return (A ** A.n).is_zero()


def in_stratum(A: Matrix, i: int) -> bool:
    """Membership of the nilpotent A in N_i (orbits of dimension <= i)."""
    return nilpotent_profile(A).dimension <= i


def in_stratum_by_closure(A: Matrix, i: int) -> bool:
    """Same predicate through rank dominance: A lies in the closure of some O_mu, dim O_mu <= i."""
    ranks = _ranks(A)
    if ranks[-1] != 0:
        raise NotNilpotent("operator is not nilpotent")
    n = A.n
    for mu in partitions(n):
        if partition_dimension(mu) <= i:
            if all(r <= s for r, s in zip(ranks, partition_ranks(mu))):
                return True
    return False


# ---------------------------------------------------------------------------
# Jordan-Chevalley


@dataclass(frozen=True)
class JCDecomp:
    semisimple: Matrix
    nilpotent: Matrix


def jordan_chevalley(A: Matrix, max_steps: int | None = None) -> JCDecomp:
    """A = A_s + A_n over Q by Newton iteration on the squarefree part of char(A).

    S <- S - g(S) g'(S)^{-1} converges quadratically in the nilpotent ideal,
    so at most log2(n) + 1 steps are needed.
    """
    if A.field != QQ:
        raise ValueError("Jordan-Chevalley decomposition is implemented over Q")
    n = A.n
    g = squarefree_part(char_poly(A))
    dg = poly_deriv(g)
    S = A
    steps = max_steps if max_steps is not None else n.bit_length() + 2
    for _ in range(steps):
        gS = poly_eval_matrix(g, S)
        if gS.is_zero():
            break
        S = S - gS @ poly_eval_matrix(dg, S).inverse()
    else:
        if not poly_eval_matrix(g, S).is_zero():
            raise ArithmeticError("Newton iteration did not converge")
    return JCDecomp(S, A - S)


def jc_map(x: PointX | Matrix) -> Matrix:
    """The semisimple part of the operator component."""
    A = x.A if isinstance(x, PointX) else x
    return jordan_chevalley(A).semisimple


def is_squarefree(P: Sequence, field=QQ) -> bool:
    return len(poly_gcd(P, poly_deriv(P, field), field)) == 1


def yun_decomposition(P: Sequence, field=QQ) -> dict[int, tuple]:
    """Squarefree factorization {k: g_k} with monic P = prod g_k^k (char 0)."""
    P = poly_monic(P, field)
    out: dict[int, tuple] = {}
    dP = poly_deriv(P, field)
    a = poly_gcd(P, dP, field)
    b = poly_divmod(P, a, field)[0]
    c = poly_divmod(dP, a, field)[0]
    d = poly_trim([x - y for x, y in _pad(c, poly_deriv(b, field), field)])
    k = 1
    while len(b) > 1:
        a = poly_gcd(b, d, field)
        if len(a) > 1:
            out[k] = a
        b = poly_divmod(b, a, field)[0]
        c = poly_divmod(d, a, field)[0]
        d = poly_trim([x - y for x, y in _pad(c, poly_deriv(b, field), field)])
        k += 1
    return out


def _pad(a, b, field):
    n = max(len(a), len(b))
    a = list(a) + [field.zero] * (n - len(a))
    b = list(b) + [field.zero] * (n - len(b))
    return zip(a, b)


@dataclass(frozen=True)
class CentralizerReport:
    space: Subspace
    dimension: int
    # for semisimple A: (irreducible factor, multiplicity k, degree d) -> GL_k(Q[x]/f)
    factors: tuple | None = None
    predicted_dimension: int | None = None


def centralizer(A: Matrix) -> CentralizerReport:
    space = centralizer_space(A)
    if A.field != QQ or not is_squarefree(minimal_polynomial(A)):
        return CentralizerReport(space, space.dim)
    P = char_poly(A)
    predicted = sum(k * k * (len(g) - 1) for k, g in yun_decomposition(P).items())
    return CentralizerReport(space, space.dim, _rational_factors(P), predicted)


def _rational_factors(P: Sequence) -> tuple:
    import sympy

    x = sympy.symbols("x")
    poly = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in P])), x)
    _, facs = sympy.factor_list(poly.as_expr(), x)
    out = []
    for f, k in facs:
        coeffs = tuple(Fraction(int(c.p), int(c.q)) for c in reversed(sympy.Poly(f, x).all_coeffs()))
        out.append((poly_monic(coeffs), int(k), len(coeffs) - 1))
    return tuple(sorted(out, key=lambda t: (t[2], t[1], t[0])))


# ---------------------------------------------------------------------------
# reductions from gl_{n+1} to sl_{n+1} and from sl_{n+1} to X_n


def trace_slice(A: Matrix) -> Matrix:
    """A - (tr A / size) Id: bijection from each trace slice of gl_{n+1} onto sl_{n+1}."""
    m = A.n
    return A - Matrix.identity(m, A.field).scale(A.trace() / A.field(m))


def trace_unslice(B: Matrix, t) -> Matrix:
    m = B.n
    return B + Matrix.identity(m, B.field).scale(B.field(t) / B.field(m))


def block_slice(B: Matrix) -> PointX:
    """Matrix [[A, v], [phi, lam]] in sl_{n+1} -> (A + (lam/n) Id, v, phi) in X_n."""
    m = B.n
    n = m - 1
    if n < 1:
        raise ValueError("block_slice needs n >= 1")
    f = B.field
    lam = B[n, n]
    A = B.submatrix(range(n), range(n))
    A = A + Matrix.identity(n, f).scale(lam / f(n))
    v = tuple(B[i, n] for i in range(n))
    phi = tuple(B[n, j] for j in range(n))
    return PointX(A, v, phi)


def block_unslice(x: PointX, lam) -> Matrix:
    """Inverse of block_slice on the slice {B_{n+1,n+1} = lam}."""
    n, f = x.n, x.field
    lam = f(lam)
    A = x.A - Matrix.identity(n, f).scale(lam / f(n))
    rows = [list(A.rows[i]) + [x.v[i]] for i in range(n)] + [list(x.phi) + [lam]]
    return Matrix(rows, f)

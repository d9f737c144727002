"""The group G~ = Aut(V) u Iso(V, V*), its action on X, the shears nu_lambda, and
the subsets of V + V* used in the support arguments."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .linalg import (
    DimensionError,
    Matrix,
    Subspace,
    ad_image,
    centralizer_space,
    image,
    kernel_space,
    pair,
    rank_one,
)
from .orbits import NotNilpotent, is_nilpotent, nilpotent_profile
from .scalars import QQ
from .xspace import PointX, point

__all__ = [
    "PointX", "point", "GtildeElement", "aut", "iso", "identity", "gtilde_mul", "chi",
    "act", "act_pair", "coordinate_T_action", "standard_iso", "antidiagonal_form", "nu",
    "in_Y", "in_QA", "in_QA_dual", "qa_table", "FlagSpaces", "flag_spaces", "in_Z", "in_Otilde_sampled",
    "default_lambda_samples", "rho", "stabilizer_check_z0", "stabilizer_block",
]


# ---------------------------------------------------------------------------
# the group


@dataclass(frozen=True)
class GtildeElement:
    """kind 'aut': g in Aut(V); kind 'iso': h : V -> V*, v |-> row vector (H v)^t."""

    kind: str
    matrix: Matrix

    def __post_init__(self):
        if self.kind not in ("aut", "iso"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if not self.matrix.is_invertible():
            raise ValueError("G~ elements must be invertible")

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def field(self):
        return self.matrix.field

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.matrix.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "GtildeElement":
        return cls(obj["kind"], Matrix.from_json(obj))


def aut(g: Matrix) -> GtildeElement:
    return GtildeElement("aut", g)


def iso(h: Matrix) -> GtildeElement:
    return GtildeElement("iso", h)


def identity(n: int, field=QQ) -> GtildeElement:
    return aut(Matrix.identity(n, field))


def standard_iso(n: int, field=QQ) -> GtildeElement:
    """e_i -> e_i*; under G~ = G x| {1, T} this is T."""
    return iso(Matrix.identity(n, field))


def antidiagonal_form(r: int, field=QQ) -> GtildeElement:
    """T(e_i) = e*_{r+1-i}, the symmetric form preserved by a Jordan block."""
    rows = [[field.one if i + j == r - 1 else field.zero for j in range(r)] for i in range(r)]
    return iso(Matrix(rows, field))


def chi(x: GtildeElement) -> int:
    return 1 if x.kind == "aut" else -1


def _inv_dual(M: Matrix) -> Matrix:
    # (M*)^{-1}; the dual of a map with matrix M has matrix M^t
    return M.T.inverse()


def gtilde_mul(x: GtildeElement, y: GtildeElement) -> GtildeElement:
    """g*g' = g g', h*g = h g, g*h = (g*)^{-1} h, h*h' = (h*)^{-1} h'."""
    if x.n != y.n or x.field != y.field:
        raise DimensionError("G~ elements of different dimensions")
    X, Y = x.matrix, y.matrix
    if x.kind == "aut" and y.kind == "aut":
        return aut(X @ Y)
    if x.kind == "iso" and y.kind == "aut":
        return iso(X @ Y)
    if x.kind == "aut" and y.kind == "iso":
        return iso(_inv_dual(X) @ Y)
    return aut(_inv_dual(X) @ Y)


def gtilde_inverse(x: GtildeElement) -> GtildeElement:
    if x.kind == "aut":
        return aut(x.matrix.inverse())
    # solve h * k = id: (H^t)^{-1} K = Id
    return iso(x.matrix.T)


def act_pair(x: GtildeElement, v: Sequence, phi: Sequence) -> tuple[tuple, tuple]:
    """The action on V + V*."""
    M = x.matrix
    if x.kind == "aut":
        return M.apply(v), tuple(M.inverse().apply_left(phi))
    return _inv_dual(M).apply(phi), M.apply(v)


def act(x: GtildeElement, pt: PointX) -> PointX:
    if x.n != pt.n:
        raise DimensionError("dimension mismatch between group element and point")
    M = x.matrix
    Minv = M.inverse()
    v, phi = act_pair(x, pt.v, pt.phi)
    if x.kind == "aut":
        A = M @ pt.A @ Minv
    else:
        # (h A h^{-1})^*: h A h^{-1} on V* has matrix H A H^{-1} in dual coordinates
        A = (M @ pt.A @ Minv).T
    return PointX(A, v, phi)


def coordinate_T_action(pt: PointX) -> PointX:
    """(A, v, phi) -> (A^t, phi^t, v^t)."""
    return PointX(pt.A.T, tuple(pt.phi), tuple(pt.v))


# ---------------------------------------------------------------------------
# shears


def nu(lam, pt: PointX) -> PointX:
    n, f = pt.n, pt.field
    if n < 1:
        raise DimensionError("nu needs n >= 1")
    lam = f(lam)
    shift = rank_one(pt.v, pt.phi, f).scale(lam)
    s = pair(pt.phi, pt.v)
    if s and lam:
        if not f(n):
            raise ZeroDivisionError("nu needs n invertible in the field when <phi, v> != 0")
        shift = shift - Matrix.identity(n, f).scale(lam * s / f(n))
    return PointX(pt.A + shift, pt.v, pt.phi)


# ---------------------------------------------------------------------------
# subsets of V + V*


def in_Y(v: Sequence, phi: Sequence) -> bool:
    return not pair(phi, v)


@lru_cache(maxsize=4096)
def _ad_image_cached(A: Matrix) -> Subspace:
    return ad_image(A)


@lru_cache(maxsize=4096)
def _nilpotent_cached(A: Matrix) -> bool:
    return is_nilpotent(A)


def in_QA(A: Matrix, v: Sequence, phi: Sequence) -> bool:
    """v (x) phi in [A, gl(V)], for nilpotent A."""
    if not _nilpotent_cached(A):
        raise NotNilpotent("Q_A is only defined for nilpotent A")
    f = A.field
    return rank_one(v, phi, f).flat() in _ad_image_cached(A)


@lru_cache(maxsize=4096)
def _centralizer_cached(A: Matrix) -> tuple[Matrix, ...]:
    n = A.n
    return tuple(Matrix.from_flat(b, n, A.field) for b in centralizer_space(A).basis)


def in_QA_dual(A: Matrix, v: Sequence, phi: Sequence) -> bool:
    """Same set as in_QA, decided through the trace pairing.

    [A, gl(V)] is the trace-orthogonal of the centralizer of A, so v (x) phi lies in
    it iff phi(C v) = 0 for every C commuting with A.
    """
    if not _nilpotent_cached(A):
        raise NotNilpotent("Q_A is only defined for nilpotent A")
    return all(not pair(phi, C.apply(v)) for C in _centralizer_cached(A))


def qa_table(A: Matrix):
    """Boolean array Q[i, j]: (v_i, phi_j) in Q_A, vectors in the order of vectors().

    Prime fields only; evaluates the trace-pairing test for all pairs at once.
    """
    import numpy as np

    f = A.field
    if f == QQ or getattr(f, "m", 1) != 1:
        raise ValueError("qa_table needs a prime field")
    if not _nilpotent_cached(A):
        raise NotNilpotent("Q_A is only defined for nilpotent A")
    p, n = f.p, A.n
    cents = np.array([[[c.value for c in row] for row in C.rows] for C in _centralizer_cached(A)],
                     dtype=np.int64).reshape(-1, n, n)
    vecs = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64).reshape(-1, n)
    cv = np.einsum("cij,vj->cvi", cents, vecs) % p
    vals = np.einsum("wi,cvi->cvw", vecs, cv) % p
    return ~vals.astype(bool).any(axis=0)


@dataclass(frozen=True)
class FlagSpaces:
    r: int
    F: tuple[Subspace, ...]
    L: tuple[Subspace, ...]


def annihilator(S: Subspace) -> Subspace:
    """{phi in V* : phi(s) = 0 for s in S}, phi in column coordinates."""
    n, f = S.ambient, S.field
    if S.dim == 0:
        return Subspace.full(n, f)
    return kernel_space(Matrix([list(b) for b in S.basis] + [[f.zero] * n] * (n - S.dim), f))


@lru_cache(maxsize=64)
def flag_spaces(r: int, field=QQ) -> FlagSpaces:
    """F^i = Ker J^i = Im J^{r-i}, L^i = (F^{r-i})^perp = Im (J*)^{r-i} = Ker (J*)^i.

    Every space is computed by all of its characterizations; disagreement raises.
    """
    J = Matrix.jordan_block(r, field)
    Jd = J.T  # J* acting on column coordinates of covectors
    F, L = [], []
    for i in range(r + 1):
        f1, f2 = kernel_space(J ** i), image(J ** (r - i))
        if f1 != f2 or f1.dim != i:
            raise ArithmeticError(f"kernel and image descriptions of F^{i} disagree")
        F.append(f1)
    for i in range(r + 1):
        l1 = annihilator(F[r - i])
        l2, l3 = image(Jd ** (r - i)), kernel_space(Jd ** i)
        if not (l1 == l2 == l3) or l1.dim != i:
            raise ArithmeticError(f"descriptions of L^{i} disagree")
        L.append(l1)
    return FlagSpaces(r, tuple(F), tuple(L))


def z_index(v: Sequence, phi: Sequence, r: int, field=QQ) -> int | None:
    """Some i with v in F^i and phi in L^{r-i}, or None."""
    fl = flag_spaces(r, field)
    for i in range(r + 1):
        if tuple(v) in fl.F[i] and tuple(phi) in fl.L[r - i]:
            return i
    return None


def in_Z(v: Sequence, phi: Sequence, r: int, field=QQ) -> bool:
    return z_index(v, phi, r, field) is not None


def default_lambda_samples(field=QQ) -> tuple:
    if field == QQ:
        return tuple(Fraction(x) for x in (0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2)))
    return tuple(field.elements())


def in_Otilde_sampled(pt: PointX, i: int, samples: Iterable | None = None) -> bool:
    """Necessary condition for membership in O~: pt in O x Y and nu_lambda(pt) in N_i x Y
    for each sampled lambda, where O is the orbit of pt.A (of dimension i)."""
    prof = nilpotent_profile(pt.A)
    if prof.dimension != i:
        raise ValueError(f"operator has orbit dimension {prof.dimension}, not {i}")
    if not in_Y(pt.v, pt.phi):
        return False
    samples = default_lambda_samples(pt.field) if samples is None else samples
    for lam in samples:
        B = nu(lam, pt).A
        if not _nilpotent_cached(B) or nilpotent_profile(B).dimension > i:
            return False
    return True


def rho(lam, v: Sequence, phi: Sequence, field=None) -> tuple[tuple, tuple]:
    f = field or _field_of(v, phi)
    lam = f(lam)
    if not lam:
        raise ZeroDivisionError("rho(lambda) needs lambda != 0")
    inv = f.one / lam
    return tuple(lam * a for a in v), tuple(inv * b for b in phi)


def _field_of(v, phi):
    for x in itertools.chain(v, phi):
        fld = getattr(x, "field", None)
        if fld is not None:
            return fld
    return QQ


# ---------------------------------------------------------------------------
# stabilizer of z0 = (e_n, lam e_n*)


def z0(n: int, lam, field=QQ) -> tuple[tuple, tuple]:
    e = tuple(field.one if j == n - 1 else field.zero for j in range(n))
    return e, tuple(field(lam) * x for x in e)


def stabilizer_check_z0(x: GtildeElement, lam) -> bool:
    f = x.field
    if not f(lam):
        raise ValueError("z0 needs lambda != 0")
    v, phi = z0(x.n, lam, f)
    return act_pair(x, v, phi) == (v, phi)


def stabilizer_block(x: GtildeElement, lam) -> GtildeElement:
    """Image of a stabilizer element of z0 in G~_{n-1}: the top-left block, same kind."""
    if not stabilizer_check_z0(x, lam):
        raise ValueError("element does not fix z0")
    n, M, f = x.n, x.matrix, x.field
    corner = f.one if x.kind == "aut" else f(lam)
    last = n - 1
    if any(M[last, j] for j in range(last)) or any(M[i, last] for i in range(last)) \
            or M[last, last] != corner:
        raise ArithmeticError("stabilizer element is not block diagonal")
    return GtildeElement(x.kind, M.submatrix(range(last), range(last)))


def stabilizer_lift(y: GtildeElement, lam) -> GtildeElement:
    """Inverse of stabilizer_block."""
    f = y.field
    n = y.n + 1
    corner = f.one if y.kind == "aut" else f(lam)
    rows = [list(r) + [f.zero] for r in y.matrix.rows] + [[f.zero] * (n - 1) + [corner]]
    return GtildeElement(y.kind, Matrix(rows, f))


# ---------------------------------------------------------------------------
# enumeration and sampling


def vectors(field, n: int) -> Iterator[tuple]:
    return itertools.product(tuple(field.elements()), repeat=n)


def matrices(field, n: int) -> Iterator[Matrix]:
    for flat in vectors(field, n * n):
        yield Matrix.from_flat(flat, n, field)


def gl_elements(field, n: int) -> list[Matrix]:
    return [M for M in matrices(field, n) if M.is_invertible()]


def gtilde_elements(field, n: int) -> list[GtildeElement]:
    gl = gl_elements(field, n)
    return [aut(g) for g in gl] + [iso(h) for h in gl]


def nilpotent_matrices(field, n: int) -> list[Matrix]:
    return [M for M in matrices(field, n) if is_nilpotent(M)]


def sl_points(field, n: int) -> Iterator[PointX]:
    for M in matrices(field, n):
        if not M.trace():
            for v in vectors(field, n):
                for phi in vectors(field, n):
                    yield PointX(M, v, phi)


def random_rational(rng: random.Random, height: int = 5) -> Fraction:
    num = rng.randint(-height, height)
    den = rng.choice((1, 1, 1, 2, 3))
    return Fraction(num, den)


def random_matrix(rng: random.Random, n: int, field=QQ, height: int = 5) -> Matrix:
    if field == QQ:
        return Matrix([[random_rational(rng, height) for _ in range(n)] for _ in range(n)], QQ)
    els = tuple(field.elements())
    return Matrix([[rng.choice(els) for _ in range(n)] for _ in range(n)], field)


def random_invertible(rng: random.Random, n: int, field=QQ, height: int = 3) -> Matrix:
    while True:
        M = random_matrix(rng, n, field, height)
        if M.is_invertible():
            return M


def random_traceless(rng: random.Random, n: int, field=QQ, height: int = 5) -> Matrix:
    M = random_matrix(rng, n, field, height)
    rows = [list(r) for r in M.rows]
    rows[n - 1][n - 1] = rows[n - 1][n - 1] - M.trace()
    return Matrix(rows, field)


def random_vector(rng: random.Random, n: int, field=QQ, height: int = 5) -> tuple:
    if field == QQ:
        return tuple(random_rational(rng, height) for _ in range(n))
    els = tuple(field.elements())
    return tuple(rng.choice(els) for _ in range(n))


def random_point(rng: random.Random, n: int, field=QQ, height: int = 5) -> PointX:
    return PointX(random_traceless(rng, n, field, height), random_vector(rng, n, field, height),
                  random_vector(rng, n, field, height))


def random_gtilde(rng: random.Random, n: int, field=QQ) -> GtildeElement:
    return GtildeElement(rng.choice(("aut", "iso")), random_invertible(rng, n, field))

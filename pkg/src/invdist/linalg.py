"""Exact dense linear algebra over Q and GF(q).

Operators are :class:`Matrix` instances; vectors and covectors are plain
tuples of field elements (columns and rows respectively).  Polynomials
are tuples of coefficients from the constant term upwards.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .scalars import FFElement, QQ, field_from_spec, field_to_spec, parse_rational, scalar_to_json

MAX_DIM = 16


class DimensionError(ValueError):
    pass


def _infer_field(entries):
    for x in entries:
        if isinstance(x, FFElement):
            return x.field
    return QQ


class Matrix:
    """An immutable matrix over Q or GF(q)."""

    __slots__ = ("field", "rows", "_hash")

    def __init__(self, rows: Iterable[Iterable], field=None):
        rows = [list(r) for r in rows]
        if field is None:
            field = _infer_field(x for r in rows for x in r)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged matrix")
        self.field = field
        self.rows = tuple(tuple(field(x) for x in r) for r in rows)
        if self.nrows > MAX_DIM or self.ncols > MAX_DIM:
            raise DimensionError(f"dimensions beyond {MAX_DIM} are not supported")
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, n: int, m: int | None = None, field=QQ) -> "Matrix":
        m = n if m is None else m
        return cls([[field.zero] * m for _ in range(n)], field)

    @classmethod
    def identity(cls, n: int, field=QQ) -> "Matrix":
        return cls([[field.one if i == j else field.zero for j in range(n)] for i in range(n)], field)

    @classmethod
    def unit(cls, i: int, j: int, n: int, field=QQ) -> "Matrix":
        """The elementary matrix E_ij (0-based indices)."""
        return cls([[field.one if (a, b) == (i, j) else field.zero for b in range(n)]
                    for a in range(n)], field)

    @classmethod
    def diag(cls, values: Sequence, field=QQ) -> "Matrix":
        n = len(values)
        return cls([[values[i] if i == j else field.zero for j in range(n)] for i in range(n)], field)

    @classmethod
    def jordan_block(cls, r: int, field=QQ, eigenvalue=0) -> "Matrix":
        """Upper triangular block: A e_1 = lambda e_1, A e_{j+1} = lambda e_{j+1} + e_j."""
        return cls([[field(eigenvalue) if i == j else (field.one if j == i + 1 else field.zero)
                     for j in range(r)] for i in range(r)], field)

    @classmethod
    def from_flat(cls, flat: Sequence, n: int, field=QQ) -> "Matrix":
        return cls([flat[i * n:(i + 1) * n] for i in range(n)], field)

    @classmethod
    def from_json(cls, obj: dict) -> "Matrix":
        field = field_from_spec(obj.get("field", "Q"))
        return cls([[field(parse_rational(x) if isinstance(x, str) else x) for x in row]
                    for row in obj["entries"]], field)

    def to_json(self) -> dict:
        return {"field": field_to_spec(self.field),
                "entries": [[scalar_to_json(x) for x in r] for r in self.rows]}

    # shape -----------------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def n(self) -> int:
        if self.nrows != self.ncols:
            raise DimensionError("not square")
        return self.nrows

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def flat(self) -> tuple:
        return tuple(x for r in self.rows for x in r)

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "Matrix"):
        if other.field != self.field:
            raise DimensionError(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionError("shape mismatch")
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.field)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionError("shape mismatch")
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.field)

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.rows], self.field)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.ncols != other.nrows:
            raise DimensionError("shape mismatch in product")
        cols = list(zip(*other.rows))
        zero = self.field.zero
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                s = zero
                for a, b in zip(r, c):
                    if a and b:
                        s = s + a * b
                row.append(s)
            out.append(row)
        return Matrix(out, self.field)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        return Matrix([[c * a for a in r] for r in self.rows], self.field)

    def __mul__(self, c):
        if isinstance(c, Matrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Matrix":
        if e < 0:
            return self.inverse() ** (-e)
        out, base = Matrix.identity(self.n, self.field), self
        while e:
            if e & 1:
                out = out @ base
            base = base @ base
            e >>= 1
        return out

    def apply(self, v: Sequence) -> tuple:
        """A v for a column vector v."""
        if len(v) != self.ncols:
            raise DimensionError("vector length mismatch")
        zero = self.field.zero
        return tuple(sum((a * b for a, b in zip(r, v)), zero) for r in self.rows)

    def apply_left(self, phi: Sequence) -> tuple:
        """phi A for a row covector phi."""
        if len(phi) != self.nrows:
            raise DimensionError("covector length mismatch")
        zero = self.field.zero
        return tuple(sum((phi[i] * self.rows[i][j] for i in range(self.nrows)), zero)
                     for j in range(self.ncols))

    @property
    def T(self) -> "Matrix":
        return Matrix(list(zip(*self.rows)) if self.rows else [], self.field)

    def trace(self):
        return sum((self.rows[i][i] for i in range(self.n)), self.field.zero)

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def inverse(self) -> "Matrix":
        n = self.n
        f = self.field
        aug = [list(r) + [f.one if i == j else f.zero for j in range(n)] for i, r in enumerate(self.rows)]
        red, pivots = rref(aug, f)
        if pivots[:n] != list(range(n)) or len([p for p in pivots if p < n]) < n:
            raise ZeroDivisionError("singular matrix")
        return Matrix([r[n:] for r in red[:n]], f)

    def det(self):
        return determinant(self)

    def rank(self) -> int:
        return len(rref([list(r) for r in self.rows], self.field)[1])

    def is_invertible(self) -> bool:
        return self.rank() == self.n

    def is_nilpotent(self) -> bool:
        return (self ** self.n).is_zero()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], self.field)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field, self.rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix[{self.field}]({body})"

    def __reduce__(self):
        return (Matrix, ([list(r) for r in self.rows], self.field))


# ---------------------------------------------------------------------------
# elimination


def rref(rows: list[list], field) -> tuple[list[list], list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.one / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def determinant(A: Matrix):
    """Bareiss fraction-free elimination (over Q on a cleared-denominator copy)."""
    n = A.n
    if n == 0:
        return A.field.one
    if A.field == QQ:
        from math import lcm
        dens = [lcm(*(x.denominator for x in r)) for r in A.rows]
        M = [[int(x * d) for x in r] for r, d in zip(A.rows, dens)]
        sign, prev = 1, 1
        for k in range(n - 1):
            if M[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if M[i][k]), None)
                if swap is None:
                    return Fraction(0)
                M[k], M[swap] = M[swap], M[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            prev = M[k][k]
        den = 1
        for d in dens:
            den *= d
        return Fraction(sign * M[n - 1][n - 1], den)
    rows, d = [list(r) for r in A.rows], A.field.one
    for k in range(n):
        piv = next((i for i in range(k, n) if rows[i][k]), None)
        if piv is None:
            return A.field.zero
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            d = -d
        d = d * rows[k][k]
        inv = A.field.one / rows[k][k]
        for i in range(k + 1, n):
            f = rows[i][k] * inv
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[k])]
    return d


def kernel(A: Matrix) -> list[tuple]:
    """Basis of {x : A x = 0}."""
    f = A.field
    red, pivots = rref([list(r) for r in A.rows], f)
    free = [c for c in range(A.ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [f.zero] * A.ncols
        x[fc] = f.one
        for row, pc in zip(red, pivots):
            x[pc] = -row[fc]
        basis.append(tuple(x))
    return basis


class Subspace:
    """A subspace of field^ambient with a reduced-echelon basis.

    The basis is canonical, so equality of subspaces is equality of bases.
    """

    __slots__ = ("ambient", "field", "basis", "pivots")

    def __init__(self, vectors: Iterable[Sequence], ambient: int, field=QQ):
        vecs = [list(field(x) for x in v) for v in vectors]
        if any(len(v) != ambient for v in vecs):
            raise DimensionError("vector length differs from the ambient dimension")
        red, piv = rref(vecs, field) if vecs else ([], [])
        self.ambient = ambient
        self.field = field
        self.basis = tuple(tuple(r) for r in red)
        self.pivots = tuple(piv)

    @classmethod
    def full(cls, ambient: int, field=QQ) -> "Subspace":
        return cls([[field.one if i == j else field.zero for j in range(ambient)]
                    for i in range(ambient)], ambient, field)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _residual(self, x: Sequence) -> list:
        x = list(x)
        for row, c in zip(self.basis, self.pivots):
            f = x[c]
            if f:
                x = [a - f * b for a, b in zip(x, row)]
        return x

    def coordinates(self, x: Sequence) -> tuple | None:
        """Coefficients of x in the echelon basis, or None if x is outside."""
        x = [self.field(a) for a in x]
        if len(x) != self.ambient:
            raise DimensionError("vector length differs from the ambient dimension")
        if any(self._residual(x)):
            return None
        return tuple(x[c] for c in self.pivots)

    def __contains__(self, x: Sequence) -> bool:
        return self.coordinates(x) is not None

    def combine(self, coords: Sequence) -> tuple:
        zero = self.field.zero
        return tuple(sum((c * row[j] for c, row in zip(coords, self.basis)), zero)
                     for j in range(self.ambient))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.basis + other.basis, self.ambient, self.field)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(v in self for v in other.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient, self.field, self.basis) == (other.ambient, other.field, other.basis)

    def __hash__(self) -> int:
        return hash((self.ambient, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, basis={list(self.basis)})"


class Membership(NamedTuple):
    member: bool
    coordinates: tuple | None


# ---------------------------------------------------------------------------
# the operations used throughout


def pair(phi: Sequence, v: Sequence):
    """<phi, v> = phi(v)."""
    if len(phi) != len(v):
        raise DimensionError("pairing of different dimensions")
    it = iter(a * b for a, b in zip(phi, v))
    s = next(it)
    for t in it:
        s = s + t
    return s


def commutator(A: Matrix, B: Matrix) -> Matrix:
    if A.field != B.field or A.n != B.n:
        raise DimensionError("commutator needs equal dimensions and fields")
    return A @ B - B @ A


def rank_one(v: Sequence, phi: Sequence, field=None) -> Matrix:
    """The operator w -> <phi, w> v."""
    if len(v) != len(phi):
        raise DimensionError("rank_one needs equal dimensions")
    if field is None:
        field = _infer_field(list(v) + list(phi))
    return Matrix([[a * b for b in phi] for a in v], field)


def ad_image(A: Matrix) -> Subspace:
    """[A, gl(V)] as a subspace of End(V) (flattened row-major)."""
    n, f = A.n, A.field
    vecs = []
    for i in range(n):
        for j in range(n):
            vecs.append(commutator(A, Matrix.unit(i, j, n, f)).flat())
    return Subspace(vecs, n * n, f)


def centralizer_space(A: Matrix) -> Subspace:
    """{B : [A, B] = 0}, flattened row-major."""
    n, f = A.n, A.field
    cols = [commutator(A, Matrix.unit(i, j, n, f)).flat() for i in range(n) for j in range(n)]
    # the ad map is n^2 x n^2, beyond the Matrix size cap, so eliminate on raw rows
    red, pivots = rref([[cols[k][r] for k in range(n * n)] for r in range(n * n)], f)
    free = [c for c in range(n * n) if c not in pivots]
    basis = []
    for fc in free:
        x = [f.zero] * (n * n)
        x[fc] = f.one
        for row, pc in zip(red, pivots):
            x[pc] = -row[fc]
        basis.append(x)
    return Subspace(basis, n * n, f)


def solve_in_subspace(target: Matrix, S: Subspace) -> Membership:
    flat = target.flat()
    if len(flat) != S.ambient:
        raise DimensionError("ambient dimensions differ")
    coords = S.coordinates(flat)
    return Membership(coords is not None, coords)


def direct_sum(A1: Matrix, A2: Matrix) -> Matrix:
    if A1.field != A2.field and A1.nrows and A2.nrows:
        raise DimensionError("direct sum of operators over different fields")
    f = A1.field if A1.nrows else A2.field
    k, l = A1.nrows, A2.nrows
    rows = [list(r) + [f.zero] * l for r in A1.rows] + [[f.zero] * k + list(r) for r in A2.rows]
    return Matrix(rows, f)


def block_split(x: Sequence, k: int) -> tuple[tuple, tuple]:
    """Split a vector or covector of V_k + V_l into its two blocks."""
    x = tuple(x)
    if not 0 <= k <= len(x):
        raise DimensionError("block size out of range")
    return x[:k], x[k:]


def block_join(x1: Sequence, x2: Sequence) -> tuple:
    return tuple(x1) + tuple(x2)


def hyperbolic_gram(r: int, field=QQ) -> list[list]:
    """Gram matrix of the pairing (v, phi).(w, psi) = <phi, w> + <psi, v> on V_r + V_r*."""
    return [[field.one if (j == i + r or i == j + r) else field.zero for j in range(2 * r)]
            for i in range(2 * r)]


def orthocomplement(S: Subspace) -> Subspace:
    """Orthogonal complement in V_r + V_r* for the canonical symmetric form."""
    if S.ambient % 2:
        raise DimensionError("ambient space must be V_r + V_r*")
    r = S.ambient // 2
    f = S.field
    # (w, psi) is orthogonal to (v, phi) iff (phi, v) . (w, psi) = 0
    eqs = [list(b[r:]) + list(b[:r]) for b in S.basis]
    if not eqs:
        return Subspace.full(S.ambient, f)
    red, pivots = rref(eqs, f)
    free = [c for c in range(S.ambient) if c not in pivots]
    basis = []
    for fc in free:
        x = [f.zero] * S.ambient
        x[fc] = f.one
        for row, pc in zip(red, pivots):
            x[pc] = -row[fc]
        basis.append(x)
    return Subspace(basis, S.ambient, f)


def image(A: Matrix) -> Subspace:
    return Subspace([A.col(j) for j in range(A.ncols)], A.nrows, A.field)


def kernel_space(A: Matrix) -> Subspace:
    return Subspace(kernel(A), A.ncols, A.field)


# ---------------------------------------------------------------------------
# polynomials (coefficient tuples, constant term first)


def poly_trim(a: Sequence) -> tuple:
    a = list(a)
    while len(a) > 1 and not a[-1]:
        a.pop()
    return tuple(a)


def poly_mul(a: Sequence, b: Sequence, field=QQ) -> tuple:
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return poly_trim(out)


def poly_divmod(a: Sequence, b: Sequence, field=QQ) -> tuple[tuple, tuple]:
    a, b = list(poly_trim(a)), poly_trim(b)
    if len(b) == 1 and not b[0]:
        raise ZeroDivisionError("polynomial division by zero")
    inv = field.one / b[-1]
    q = [field.zero] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        c = a[-1] * inv
        shift = len(a) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = a[shift + i] - c * y
        a = list(poly_trim(a))
        if len(a) == 1 and not a[0]:
            break
        if len(a) < len(b):
            break
    return poly_trim(q), poly_trim(a)


def poly_monic(a: Sequence, field=QQ) -> tuple:
    a = poly_trim(a)
    inv = field.one / a[-1]
    return tuple(x * inv for x in a)


def poly_gcd(a: Sequence, b: Sequence, field=QQ) -> tuple:
    a, b = poly_trim(a), poly_trim(b)
    while not (len(b) == 1 and not b[0]):
        a, b = b, poly_divmod(a, b, field)[1]
    return poly_monic(a, field)


def poly_deriv(a: Sequence, field=QQ) -> tuple:
    if len(a) == 1:
        return (field.zero,)
    return poly_trim([a[i] * i for i in range(1, len(a))])


def poly_eval_matrix(a: Sequence, A: Matrix) -> Matrix:
    """a(A) by Horner's rule."""
    n, f = A.n, A.field
    out = Matrix.zero(n, n, f)
    I = Matrix.identity(n, f)
    for c in reversed(a):
        out = out @ A + I.scale(c)
    return out


def char_poly(A: Matrix) -> tuple:
    """det(x I - A) by the division-free Samuelson-Berkowitz recursion."""
    f = A.field
    n = A.n

    def rec(k: int) -> list:
        # characteristic polynomial (highest coefficient first) of A[k:, k:]
        m = n - k
        if m == 0:
            return [f.one]
        lower = rec(k + 1)                      # size m - 1
        a = A.rows[k][k]
        R = [A.rows[k][j] for j in range(k + 1, n)]
        C = [A.rows[i][k] for i in range(k + 1, n)]
        # r_i = R B^i C for the trailing block B
        r = []
        vec = C
        for _ in range(m - 1):
            r.append(sum((x * y for x, y in zip(R, vec)), f.zero))
            vec = [sum((A.rows[i][j] * vec[j - k - 1] for j in range(k + 1, n)), f.zero)
                   for i in range(k + 1, n)]
        out = [f.zero] * (m + 1)
        for idx, c in enumerate(lower):
            out[idx] = out[idx] + c
            out[idx + 1] = out[idx + 1] - a * c
        for kk in range(m - 1):
            s = f.zero
            for j in range(kk + 1):
                s = s + lower[j] * r[kk - j]
            out[kk + 2] = out[kk + 2] - s
        return out

    return tuple(reversed(rec(0)))


def squarefree_part(P: Sequence, field=QQ) -> tuple:
    """P / gcd(P, P'), monic (characteristic zero)."""
    g = poly_gcd(P, poly_deriv(P, field), field)
    return poly_monic(poly_divmod(P, g, field)[0], field)


def minimal_polynomial(A: Matrix) -> tuple:
    """Monic polynomial of least degree killing A (Krylov on End(V))."""
    n, f = A.n, A.field
    powers = [Matrix.identity(n, f)]
    while True:
        k = len(powers)
        target = (powers[-1] @ A)
        S_rows = [M.flat() for M in powers]
        # solve target = sum c_i A^i
        mat_rows = [list(col) + [t] for col, t in zip(zip(*S_rows), target.flat())]
        red, piv = rref(mat_rows, f)
        if k not in piv:
            coeffs = [f.zero] * k
            for row, pc in zip(red, piv):
                coeffs[pc] = row[k]
            return tuple(-c for c in coeffs) + (f.one,)
        powers.append(target)

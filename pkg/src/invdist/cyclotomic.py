"""Exact arithmetic in Q(zeta_{p^N}) with a formal half-integer power of p.

A value is ``alpha * p**(half_pow / 2)`` with ``alpha`` in the cyclotomic
field of p-power conductor.  ``alpha`` is stored on the power basis
zeta^0 .. zeta^{phi(p^N)-1}, obtained from the cyclic representation
(length p^N) by the relations sum_j zeta^{r + j p^{N-1}} = 0.

When sqrt(p) already lies in some Q(zeta_{p^N}) (p = 2 or p = 1 mod 4) the
half power is absorbed into ``alpha`` for comparisons, so equality is exact
for every p.  For p = 3 mod 4 the representation alpha + beta*sqrt(p) is
not closed under addition; mixing parities raises :class:`TowerError`.

:class:`CycloArray` is the vectorized counterpart used by the harmonic
analysis code: a numpy object array of integer group-ring coefficients with
one rational scale factor shared by all entries.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

from .scalars import is_prime, parse_rational


class TowerError(ArithmeticError):
    """The result does not lie in the represented scalar tower."""


class InsufficientLevel(ValueError):
    """A root of unity of higher p-power order than allowed was needed."""


def totient(p: int, N: int) -> int:
    return 1 if N == 0 else (p - 1) * p ** (N - 1)


def _reduce_cyclic(vec: Sequence, p: int, N: int) -> list:
    """Power-basis coefficients (length phi) of a cyclic vector (length p^N)."""
    if N == 0:
        return [vec[0]]
    b = p ** (N - 1)
    top = vec[(p - 1) * b : p * b]
    return [vec[i] - top[i % b] for i in range((p - 1) * b)]


def _lift_cyclic(vec: Sequence, p: int, N: int, M: int) -> list:
    """Cyclic vector for Q(zeta_{p^N}) re-expressed at level M >= N."""
    step = p ** (M - N)
    out = [0] * p**M
    for i, c in enumerate(vec):
        out[i * step] = c
    return out


@lru_cache(maxsize=None)
def _sqrt_p_cyclic(p: int) -> tuple[int, tuple[int, ...]] | None:
    """(N, cyclic vector) of sqrt(p) inside Q(zeta_{p^N}), if it exists there."""
    if p == 2:
        v = [0] * 8
        v[1] = v[7] = 1
        return 3, tuple(v)
    if p % 4 == 1:
        v = [0] * p
        for a in range(1, p):
            v[a] = 1 if pow(a, (p - 1) // 2, p) == 1 else -1
        return 1, tuple(v)
    return None


def _solve_square(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(mat)
    aug = [row[:] + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


class Cyclo:
    """An element alpha * p^{half_pow/2}, alpha in Q(zeta_{p^N})."""

    __slots__ = ("p", "N", "coeffs", "half_pow", "_canon_cache")

    def __init__(self, p: int, N: int, coeffs: Iterable, half_pow: int = 0):
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) != totient(p, N):
            raise ValueError(f"expected {totient(p, N)} coefficients at level {N}")
        # shrink to the smallest level containing alpha
        while N >= 1:
            if N == 1:
                if any(coeffs[1:]):
                    break
                coeffs = coeffs[:1]
            else:
                if any(c for i, c in enumerate(coeffs) if i % p):
                    break
                coeffs = coeffs[::p]
            N -= 1
        self.p = p
        self.N = N
        self.coeffs = tuple(coeffs)
        self.half_pow = int(half_pow)
        self._canon_cache = None

    # constructors -------------------------------------------------------
    @classmethod
    def rational(cls, p: int, x) -> "Cyclo":
        return cls(p, 0, [parse_rational(x)])

    @classmethod
    def zero(cls, p: int) -> "Cyclo":
        return cls(p, 0, [0])

    @classmethod
    def one(cls, p: int) -> "Cyclo":
        return cls(p, 0, [1])

    @classmethod
    def root_of_unity(cls, p: int, N: int, a: int) -> "Cyclo":
        """zeta_{p^N}^a for zeta_{p^N} = exp(2 pi i / p^N)."""
        L = p**N
        v = [0] * L
        v[a % L] = 1
        return cls(p, N, _reduce_cyclic(v, p, N))

    @classmethod
    def p_power(cls, p: int, half_pow: int) -> "Cyclo":
        """p^{half_pow/2}, kept with the exponent as given."""
        return cls(p, 0, [1], half_pow)

    @classmethod
    def from_cyclic(cls, p: int, N: int, vec: Sequence, half_pow: int = 0) -> "Cyclo":
        return cls(p, N, _reduce_cyclic(list(vec), p, N), half_pow)

    # internal representations ------------------------------------------
    def cyclic(self, M: int | None = None) -> list[Fraction]:
        """Cyclic coefficient vector at level M (default: own level)."""
        M = self.N if M is None else M
        if M < self.N:
            raise ValueError("cannot lower the level")
        v = list(self.coeffs) + [Fraction(0)] * (self.p**self.N - len(self.coeffs))
        return _lift_cyclic(v, self.p, self.N, M)

    def _canon(self) -> tuple[int, tuple[Fraction, ...], int]:
        """(N, coeffs, r) with r in {0, 1}: the value is alpha * p^{r/2}."""
        if self._canon_cache is None:
            p, e = self.p, self.half_pow
            r = e % 2
            scale = Fraction(p) ** ((e - r) // 2)
            alpha = Cyclo(p, self.N, [c * scale for c in self.coeffs])
            if alpha.is_zero_alpha():
                r = 0
            elif r == 1 and _sqrt_p_cyclic(p) is not None:
                sN, sv = _sqrt_p_cyclic(p)
                alpha = alpha._mul_alpha(Cyclo.from_cyclic(p, sN, sv))
                r = 0
            self._canon_cache = (alpha.N, alpha.coeffs, r)
        return self._canon_cache

    def is_zero_alpha(self) -> bool:
        return not any(self.coeffs)

    def _mul_alpha(self, other: "Cyclo") -> "Cyclo":
        p = self.p
        M = max(self.N, other.N)
        a, b = self.cyclic(M), other.cyclic(M)
        L = p**M
        out = [Fraction(0)] * L
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % L] += x * y
        return Cyclo.from_cyclic(p, M, out)

    def _coerce(self, other) -> "Cyclo | None":
        if isinstance(other, Cyclo):
            if other.p != self.p:
                raise ValueError(f"cyclotomic values for p={self.p} and p={other.p}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Cyclo.rational(self.p, other)
        return None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        N1, c1, r1 = self._canon()
        N2, c2, r2 = o._canon()
        if not any(c1):
            return o
        if not any(c2):
            return self
        if r1 != r2:
            raise TowerError("sum of alpha and beta*sqrt(p) is outside Q(zeta)")
        M = max(N1, N2)
        a = Cyclo(self.p, N1, c1).cyclic(M)
        b = Cyclo(self.p, N2, c2).cyclic(M)
        return Cyclo.from_cyclic(self.p, M, [x + y for x, y in zip(a, b)], r1)

    __radd__ = __add__

    def __neg__(self) -> "Cyclo":
        return Cyclo(self.p, self.N, [-c for c in self.coeffs], self.half_pow)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prod = self._mul_alpha(o)
        return Cyclo(self.p, prod.N, prod.coeffs, self.half_pow + o.half_pow)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Cyclo":
        if e < 0:
            return self.inverse() ** (-e)
        out = Cyclo.one(self.p)
        for _ in range(e):
            out = out * self
        return out

    def conj(self) -> "Cyclo":
        """Complex conjugation zeta -> zeta^{-1}; p^{1/2} is real."""
        L = self.p**self.N
        v = self.cyclic()
        w = [Fraction(0)] * L
        for i, c in enumerate(v):
            w[(-i) % L] = c
        return Cyclo.from_cyclic(self.p, self.N, w, self.half_pow)

    def abs_sq(self) -> "Cyclo":
        return self * self.conj()

    def inverse(self) -> "Cyclo":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        p, N = self.p, self.N
        n = totient(p, N)
        cols = []
        for j in range(n):
            basis = Cyclo(p, N, [1 if i == j else 0 for i in range(n)])
            col = self._mul_alpha(basis).cyclic(N)
            cols.append(_reduce_cyclic(col, p, N))
        mat = [[cols[j][i] for j in range(n)] for i in range(n)]
        sol = _solve_square(mat, [Fraction(1)] + [Fraction(0)] * (n - 1))
        return Cyclo(p, N, sol, -self.half_pow)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        N, c, r = self._canon()
        return N == 0 and r == 0

    def to_rational(self) -> Fraction:
        N, c, r = self._canon()
        if N != 0 or r != 0:
            raise TowerError(f"{self!r} is not rational")
        return c[0]

    def is_real(self) -> bool:
        return self == self.conj()

    def __eq__(self, other) -> bool:
        try:
            o = self._coerce(other)
        except ValueError:
            return False
        if o is None:
            return NotImplemented
        return self._canon() == o._canon()

    def __hash__(self) -> int:
        return hash((self.p,) + self._canon())

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __complex__(self) -> complex:
        # report rendering only
        L = self.p**self.N
        z = sum(float(c) * complex(math.cos(2 * math.pi * i / L), math.sin(2 * math.pi * i / L))
                for i, c in enumerate(self.coeffs))
        return z * math.sqrt(self.p) ** self.half_pow

    def __repr__(self) -> str:
        terms = [f"{c}*z^{i}" if i else f"{c}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) or "0"
        tail = f" * {self.p}^({self.half_pow}/2)" if self.half_pow else ""
        return f"Cyclo[p={self.p},N={self.N}]({body}){tail}"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "N": self.N,
            "coeffs": [str(c) for c in self.coeffs],
            "halfPowP": self.half_pow,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Cyclo":
        return cls(int(obj["p"]), int(obj["N"]), [parse_rational(c) for c in obj["coeffs"]],
                   int(obj.get("halfPowP", 0)))


def cyclo_abs_sq(z: Cyclo) -> Cyclo:
    return z.abs_sq()


def sqrt_p(p: int) -> Cyclo:
    """sqrt(p) as a Cyclo; stored in the field when possible, else as p^{1/2}."""
    hit = _sqrt_p_cyclic(p)
    if hit is None:
        return Cyclo.p_power(p, 1)
    N, v = hit
    return Cyclo.from_cyclic(p, N, v)


def fractional_exponent(x, p: int, N: int) -> int:
    """The a in [0, p^N) with x = a / p^N mod Z_p.

    Raises InsufficientLevel when the p-part of the denominator exceeds p^N.
    """
    x = parse_rational(x)
    den = x.denominator
    j = 0
    while den % p == 0:
        den //= p
        j += 1
    if j > N:
        raise InsufficientLevel(f"psi({x}) needs level {j} > {N}")
    # x = num / (p^j * den); its class mod Z_p is (num * den^{-1} mod p^j) / p^j
    pj = p**j
    a = x.numerator * pow(den, -1, pj) % pj if j else 0
    return a * p ** (N - j)


def psi_eval(x, p: int, N: int) -> Cyclo:
    """The additive character psi(x) = exp(2 pi i {x}_p) as zeta_{p^N}^a."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return Cyclo.root_of_unity(p, N, fractional_exponent(x, p, N))


# ---------------------------------------------------------------------------
# vectorized arrays


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.gcd(a.numerator, b.numerator),
                    a.denominator * b.denominator // math.gcd(a.denominator, b.denominator))


def _max_abs(data: np.ndarray) -> int:
    if data.size == 0:
        return 0
    if data.dtype != object:
        return int(np.abs(data).max())
    return max(int(data.max()), -int(data.min()))


class CycloArray:
    """An array of Cyclo values sharing p, a level N, a scale and a half power.

    ``data[..., j]`` is the coefficient of zeta^j (cyclic length p^N) and is
    kept reduced (top block zero) so that equal values have equal data.
    """

    __slots__ = ("p", "N", "data", "scale", "half")

    def __init__(self, p: int, N: int, data: np.ndarray, scale=Fraction(1), half: int = 0):
        if data.shape[-1] != p**N:
            raise ValueError("last axis must have length p^N")
        self.p, self.N = p, N
        self.data = data
        self.scale = Fraction(scale)
        self.half = half
        if half not in (0, 1):
            raise ValueError("half must be 0 or 1")

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, p: int, shape: tuple[int, ...], N: int = 0) -> "CycloArray":
        return cls(p, N, np.zeros(tuple(shape) + (p**N,), dtype=object))

    @classmethod
    def from_rationals(cls, p: int, values) -> "CycloArray":
        arr = np.asarray(values, dtype=object)
        fr = np.vectorize(parse_rational, otypes=[object])(arr) if arr.size else arr
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fr.flat), 1)
        ints = np.vectorize(lambda f: int(f * den), otypes=[object])(fr) if arr.size else arr
        data = np.zeros(arr.shape + (1,), dtype=object)
        data[..., 0] = ints
        return cls(p, 0, data, Fraction(1, den)).normalize()

    @classmethod
    def from_cyclos(cls, p: int, values) -> "CycloArray":
        arr = np.empty(np.shape(values) if not isinstance(values, np.ndarray) else values.shape,
                       dtype=object)
        flat_in = list(np.asarray(values, dtype=object).flat)
        canon = []
        halves = set()
        for z in flat_in:
            if isinstance(z, (int, Fraction)):
                z = Cyclo.rational(p, z)
            if z.p != p:
                raise ValueError("mixed primes")
            c = z._canon()
            canon.append(c)
            if any(c[1]):
                halves.add(c[2])
        if len(halves) > 1:
            raise TowerError("entries mix alpha and alpha*sqrt(p)")
        half = halves.pop() if halves else 0
        N = max((c[0] for c in canon), default=0)
        den = 1
        for c in canon:
            for f in c[1]:
                den = den * f.denominator // math.gcd(den, f.denominator)
        L = p**N
        data = np.zeros((len(canon), L), dtype=object)
        for i, (Nc, coeffs, _) in enumerate(canon):
            vec = Cyclo(p, Nc, coeffs).cyclic(N)
            data[i] = [int(x * den) for x in vec]
        data = data.reshape(arr.shape + (L,))
        return cls(p, N, data, Fraction(1, den), half).normalize()

    # shape handling --------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape[:-1]

    @property
    def L(self) -> int:
        return self.p**self.N

    def _with(self, data: np.ndarray, N: int | None = None, scale=None, half=None) -> "CycloArray":
        return CycloArray(self.p, self.N if N is None else N, data,
                          self.scale if scale is None else scale,
                          self.half if half is None else half)

    def reshape(self, *shape) -> "CycloArray":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return self._with(self.data.reshape(tuple(shape) + (self.L,)))

    def __getitem__(self, idx) -> "CycloArray":
        if not isinstance(idx, tuple):
            idx = (idx,)
        if any(i is Ellipsis for i in idx):
            raise IndexError("Ellipsis indexing is not supported")
        return self._with(self.data[idx])

    def take(self, indices, axis: int) -> "CycloArray":
        axis = axis % len(self.shape)
        return self._with(np.take(self.data, indices, axis=axis))

    def moveaxis(self, src: int, dst: int) -> "CycloArray":
        nd = len(self.shape)
        return self._with(np.moveaxis(self.data, src % nd, dst % nd))

    def broadcast_to(self, shape: tuple[int, ...]) -> "CycloArray":
        return self._with(np.broadcast_to(self.data, tuple(shape) + (self.L,)).copy())

    def item(self, idx=()) -> Cyclo:
        if not isinstance(idx, tuple):
            idx = (idx,)
        vec = self.data[idx]
        if vec.ndim != 1:
            raise IndexError("item needs a full index")
        coeffs = _reduce_cyclic([Fraction(int(c)) * self.scale for c in vec], self.p, self.N)
        return Cyclo(self.p, self.N, coeffs, self.half)

    def to_cyclos(self) -> np.ndarray:
        out = np.empty(self.shape, dtype=object)
        for idx in np.ndindex(*self.shape):
            out[idx] = self.item(idx)
        return out

    # normalization -----------------------------------------------------------
    def _reduce(self, data: np.ndarray) -> np.ndarray:
        if self.N == 0:
            return data
        b = self.p ** (self.N - 1)
        blocks = data.reshape(data.shape[:-1] + (self.p, b))
        blocks = blocks - blocks[..., self.p - 1 : self.p, :]
        return blocks.reshape(data.shape)

    def normalize(self) -> "CycloArray":
        """Reduce and move the content of the integer data into the scale."""
        data = self._reduce(self.data)
        g = 0
        for x in data.flat:
            if x:
                g = math.gcd(g, int(x))
                if g == 1:
                    break
        if g == 0:
            return CycloArray(self.p, self.N, data, Fraction(1), 0)
        if g > 1:
            data = data // g
        return CycloArray(self.p, self.N, data, self.scale * g, self.half)

    def lift(self, N: int) -> "CycloArray":
        if N < self.N:
            raise ValueError("cannot lower the level")
        if N == self.N:
            return self
        step = self.p ** (N - self.N)
        data = np.zeros(self.shape + (self.p**N,), dtype=object)
        data[..., ::step] = self.data
        return self._with(data, N=N)

    def _absorb_half(self) -> "CycloArray":
        """Fold p^{1/2} into the data when sqrt(p) is in a cyclotomic field."""
        if self.half == 0:
            return self
        hit = _sqrt_p_cyclic(self.p)
        if hit is None:
            return self
        sN, sv = hit
        s = CycloArray(self.p, sN, np.array(sv, dtype=object))
        out = self._with(self.data, half=0) * s
        return out

    def _align(self, other: "CycloArray"):
        if other.p != self.p:
            raise ValueError("mixed primes")
        a, b = self._absorb_half(), other._absorb_half()
        if a.half != b.half:
            if a.is_all_zero():
                a = a._with(a.data, half=b.half)
            elif b.is_all_zero():
                b = b._with(b.data, half=a.half)
            else:
                raise TowerError("arrays mix alpha and alpha*sqrt(p)")
        N = max(a.N, b.N)
        a, b = a.lift(N), b.lift(N)
        common = _frac_gcd(a.scale, b.scale) if a.scale and b.scale else (a.scale or b.scale or Fraction(1))
        fa = a.scale / common
        fb = b.scale / common
        assert fa.denominator == 1 and fb.denominator == 1
        return a.data * int(fa), b.data * int(fb), N, common, a.half

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: "CycloArray") -> "CycloArray":
        da, db, N, scale, half = self._align(other)
        return CycloArray(self.p, N, da + db, scale, half).normalize()

    def __sub__(self, other: "CycloArray") -> "CycloArray":
        da, db, N, scale, half = self._align(other)
        return CycloArray(self.p, N, da - db, scale, half).normalize()

    def __neg__(self) -> "CycloArray":
        return self._with(-self.data)

    def scaled(self, factor) -> "CycloArray":
        return self._with(self.data, scale=self.scale * Fraction(factor))

    def times_p_half(self, half_pow: int) -> "CycloArray":
        """Multiply every entry by p^{half_pow/2}."""
        e = self.half + half_pow
        r = e % 2
        out = self._with(self.data, scale=self.scale * Fraction(self.p) ** ((e - r) // 2), half=r)
        return out._absorb_half() if r else out

    def __mul__(self, other) -> "CycloArray":
        if isinstance(other, (int, Fraction)):
            return self.scaled(other).normalize()
        if isinstance(other, Cyclo):
            other = CycloArray.from_cyclos(self.p, [other]).reshape(())
        if other.p != self.p:
            raise ValueError("mixed primes")
        N = max(self.N, other.N)
        a, b = self.lift(N), other.lift(N)
        L = self.p**N
        shape = np.broadcast_shapes(a.shape, b.shape)
        ad, bd = a.data, b.data
        cols_a = [i for i in range(L) if ad[..., i].any()]
        cols_b = [i for i in range(L) if bd[..., i].any()]
        if len(cols_b) < len(cols_a):
            ad, bd, cols_a = bd, ad, cols_b
        # cyclic convolution in int64 when it provably cannot overflow
        ba, bb = _max_abs(ad), _max_abs(bd)
        fast = ba * bb * max(len(cols_a), 1) < 2**62
        if fast:
            ad, bd = ad.astype(np.int64), bd.astype(np.int64)
        out = np.zeros(shape + (L,), dtype=np.int64 if fast else object)
        for i in cols_a:
            out = out + ad[..., i : i + 1] * np.roll(bd, i, axis=-1)
        if fast:
            out = out.astype(object)
        e = self.half + other.half
        res = CycloArray(self.p, N, out, a.scale * b.scale, e % 2)
        res = res.scaled(Fraction(self.p) ** (e // 2)) if e >= 2 else res
        return res.normalize()

    __rmul__ = __mul__

    def mul_root(self, exps) -> "CycloArray":
        """Multiply entry x by zeta_{p^N}^{exps[x]} (exponents at level N)."""
        exps = np.broadcast_to(np.asarray(exps, dtype=np.int64), self.shape)
        L = self.L
        idx = (np.arange(L)[None, :] - exps.reshape(-1, 1)) % L
        flat = self.data.reshape(-1, L)
        out = np.take_along_axis(flat, idx, axis=1).reshape(self.data.shape)
        return self._with(self._reduce(out))

    def conj(self) -> "CycloArray":
        L = self.L
        idx = (-np.arange(L)) % L
        return self._with(self._reduce(self.data[..., idx]))

    def sum(self, axis=None) -> "CycloArray":
        nd = len(self.shape)
        if axis is None:
            axis = tuple(range(nd))
        elif isinstance(axis, int):
            axis = (axis % nd,)
        else:
            axis = tuple(a % nd for a in axis)
        data = self.data.sum(axis=axis) if axis else self.data
        return self._with(np.asarray(data, dtype=object)).normalize()

    # comparison -----------------------------------------------------------
    def is_zero_mask(self) -> np.ndarray:
        return ~self.data.astype(bool).any(axis=-1)

    def is_all_zero(self) -> bool:
        return not self.data.any()

    def equals(self, other: "CycloArray") -> bool:
        if self.shape != other.shape:
            return False
        try:
            da, db, *_ = self._align(other)
        except TowerError:
            return False
        return bool(np.all(da == db))

    def ratio_to(self, other: "CycloArray") -> Cyclo | None:
        """The scalar u with self == u * other, or None when not proportional.

        Both zero gives u = 1.
        """
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        mask = ~other.is_zero_mask()
        if not mask.any():
            return Cyclo.one(self.p) if self.is_all_zero() else None
        idx = tuple(int(i) for i in np.argwhere(mask)[0])
        u = self.item(idx) / other.item(idx)
        return u if self.equals(other * u) else None

    def __repr__(self) -> str:
        return f"CycloArray(p={self.p}, N={self.N}, shape={self.shape}, scale={self.scale}, half={self.half})"

"""Exact scalars: rationals, finite fields, p-adic valuations.

Everything here is immutable.  Rationals are plain :class:`fractions.Fraction`
objects; the :data:`QQ` field object only gives them a uniform field
interface next to :class:`GF`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

INF = math.inf

RationalLike = Union[int, Fraction, str]


def parse_rational(x: RationalLike) -> Fraction:
    """Parse ``3``, ``"3"``, ``"-2/5"`` or a Fraction into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def ord_p(n: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise ValueError("ord_p(0) is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_valuation(x: RationalLike, p: int) -> float | int:
    x = parse_rational(x)
    if x == 0:
        return INF
    return ord_p(x.numerator, p) - ord_p(x.denominator, p)


@dataclass(frozen=True)
class Valued:
    """A rational split as ``p**valuation * unit`` with ``unit`` prime to p."""

    p: int
    valuation: float | int
    unit: Fraction

    @property
    def abs(self) -> Fraction:
        """|x|_p = p^{-v(x)} as an exact rational (0 for x = 0)."""
        if self.valuation == INF:
            return Fraction(0)
        return Fraction(self.p) ** (-self.valuation)

    def __mul__(self, other: "Valued") -> "Valued":
        if self.p != other.p:
            raise ValueError("valuations at different primes")
        return Valued(self.p, self.valuation + other.valuation, self.unit * other.unit)


def padic_norm(x: RationalLike, p: int) -> Valued:
    x = parse_rational(x)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    v = padic_valuation(x, p)
    if v == INF:
        return Valued(p, INF, Fraction(0))
    return Valued(p, v, x / Fraction(p) ** v)


def padic_residue(x: RationalLike, p: int, prec: int) -> int:
    """The integer in [0, p**prec) congruent to the p-integral ``x``."""
    x = parse_rational(x)
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not p-integral for p={p}")
    mod = p**prec
    return x.numerator * pow(x.denominator, -1, mod) % mod


# ---------------------------------------------------------------------------
# fields


class RationalField:
    """The field Q; elements are Fractions."""

    name = "Q"
    characteristic = 0
    order = None

    def __repr__(self) -> str:
        return "QQ"

    def __reduce__(self):
        return (_qq, ())

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def __call__(self, x) -> Fraction:
        return parse_rational(x)

    def elements(self):
        raise ValueError("Q is infinite")

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")


QQ = RationalField()


def _qq() -> RationalField:
    return QQ


def _find_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree m over GF(p).

    Returned as coefficients c_0..c_{m-1} of x^m + sum c_i x^i.
    """
    def has_root_factor(coeffs: tuple[int, ...]) -> bool:
        # brute force: try dividing by every monic polynomial of degree <= m/2
        full = list(coeffs) + [1]
        for deg in range(1, m // 2 + 1):
            for code in range(p**deg):
                div = [(code // p**i) % p for i in range(deg)] + [1]
                rem = full[:]
                for shift in range(len(rem) - len(div), -1, -1):
                    c = rem[shift + deg]
                    if c:
                        for i, dc in enumerate(div):
                            rem[shift + i] = (rem[shift + i] - c * dc) % p
                if not any(rem[:deg]):
                    return True
        return False

    for code in range(p**m):
        coeffs = tuple((code // p**i) % p for i in range(m))
        if coeffs[0] == 0:
            continue
        if not has_root_factor(coeffs):
            return coeffs
    raise AssertionError("no irreducible polynomial found")


class GF:
    """The finite field with q = p**m elements.

    Elements are :class:`FFElement`; for m > 1 an element's integer code
    holds the base-p digits of its polynomial representative.
    """

    def __init__(self, q: int):
        p, m = _prime_power(q)
        self.q, self.p, self.m = q, p, m
        self.characteristic = p
        self.order = q
        self.name = f"GF({q})"
        if m > 1:
            self.modulus = _find_irreducible(p, m)
            self._mul = _ext_mul_table(p, m, self.modulus)
        else:
            self.modulus = None
            self._mul = None

    def __repr__(self) -> str:
        return self.name

    def __reduce__(self):
        return (GF, (self.q,))

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))

    @property
    def zero(self) -> "FFElement":
        return FFElement(self, 0)

    @property
    def one(self) -> "FFElement":
        return FFElement(self, 1)

    def __call__(self, x) -> "FFElement":
        if isinstance(x, FFElement):
            if x.field != self:
                raise ValueError(f"element of {x.field} used in {self}")
            return x
        if isinstance(x, str):
            x = parse_rational(x)
        if isinstance(x, Fraction):
            return FFElement(self, self._embed_int(x.numerator)) / FFElement(
                self, self._embed_int(x.denominator)
            )
        if isinstance(x, int) and not isinstance(x, bool):
            return FFElement(self, self._embed_int(x))
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def _embed_int(self, n: int) -> int:
        return n % self.p

    def elements(self) -> Iterator["FFElement"]:
        return (FFElement(self, c) for c in range(self.q))

    def nonzero_elements(self) -> Iterator["FFElement"]:
        return (FFElement(self, c) for c in range(1, self.q))

    # raw code arithmetic
    def _add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        return _digitwise(a, b, self.p, self.m, 1)

    def _sub(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a - b) % self.p
        return _digitwise(a, b, self.p, self.m, -1)

    def _mul_codes(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        return self._mul[a][b]

    def _inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"inverse of 0 in {self}")
        if self.m == 1:
            return pow(a, -1, self.p)
        return pow_code(self, a, self.q - 2)


def pow_code(field: GF, a: int, e: int) -> int:
    result, base = 1, a
    while e:
        if e & 1:
            result = field._mul_codes(result, base)
        base = field._mul_codes(base, base)
        e >>= 1
    return result


def _digitwise(a: int, b: int, p: int, m: int, sign: int) -> int:
    out, scale = 0, 1
    for _ in range(m):
        out += ((a % p + sign * (b % p)) % p) * scale
        a //= p
        b //= p
        scale *= p
    return out


def _ext_mul_table(p: int, m: int, modulus: tuple[int, ...]) -> list[list[int]]:
    q = p**m

    def digits(c: int) -> list[int]:
        return [(c // p**i) % p for i in range(m)]

    def code(ds: list[int]) -> int:
        return sum(d * p**i for i, d in enumerate(ds))

    table = [[0] * q for _ in range(q)]
    for a in range(q):
        da = digits(a)
        for b in range(a, q):
            db = digits(b)
            prod = [0] * (2 * m - 1)
            for i, x in enumerate(da):
                if x:
                    for j, y in enumerate(db):
                        prod[i + j] = (prod[i + j] + x * y) % p
            for top in range(2 * m - 2, m - 1, -1):
                c = prod[top]
                if c:
                    prod[top] = 0
                    for i, mc in enumerate(modulus):
                        prod[top - m + i] = (prod[top - m + i] - c * mc) % p
            table[a][b] = table[b][a] = code(prod[:m])
    return table


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(f for f in range(2, q + 1) if q % f == 0)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1 or not is_prime(p):
        raise ValueError(f"{q} is not a prime power")
    return p, m


@lru_cache(maxsize=None)
def gf(q: int) -> GF:
    """Shared field instance for GF(q)."""
    return GF(q)


class FFElement:
    __slots__ = ("field", "value")

    def __init__(self, field: GF, value: int):
        self.field = field
        self.value = value

    def _coerce(self, other) -> int | None:
        if isinstance(other, FFElement):
            if other.field.q != self.field.q:
                raise ValueError(f"mixed moduli: {self.field} and {other.field}")
            return other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field(other).value
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FFElement(self.field, self.field._add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FFElement(self.field, self.field._sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FFElement(self.field, self.field._sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FFElement(self.field, self.field._mul_codes(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FFElement(self.field, self.field._mul_codes(self.value, self.field._inv(o)))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FFElement(self.field, self.field._mul_codes(o, self.field._inv(self.value)))

    def __neg__(self):
        return FFElement(self.field, self.field._sub(0, self.value))

    def __pow__(self, e: int):
        if e < 0:
            return (1 / self) ** (-e)
        return FFElement(self.field, pow_code(self.field, self.value, e))

    def __eq__(self, other) -> bool:
        if isinstance(other, FFElement):
            return other.field.q == self.field.q and other.value == self.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            try:
                return self.field(other).value == self.value
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.q, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value}" if self.field.m == 1 else f"{self.field.name}[{self.value}]"

    def __reduce__(self):
        return (_ff_element, (self.field.q, self.value))


def _ff_element(q: int, value: int) -> FFElement:
    return FFElement(gf(q), value)


def field_from_spec(spec) -> RationalField | GF:
    """Field from the JSON-ish selector: ``"Q"``, ``{"gf": q}``, ``"gf3"``."""
    if isinstance(spec, (RationalField, GF)):
        return spec
    if isinstance(spec, dict):
        if set(spec) != {"gf"}:
            raise ValueError(f"malformed field selector {spec!r}")
        return gf(int(spec["gf"]))
    if isinstance(spec, str):
        s = spec.strip().lower()
        if s in ("q", "qq"):
            return QQ
        if s.startswith("gf"):
            return gf(int(s[2:].strip("()")))
    raise ValueError(f"unknown field selector {spec!r}")


def field_to_spec(field) -> str | dict:
    return "Q" if field == QQ else {"gf": field.q}


def scalar_to_json(x):
    if isinstance(x, FFElement):
        return x.value
    return format_rational(x)

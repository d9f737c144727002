"""Finite-level Schwartz functions and distributions on Q_p^d.

A function at level (m, k) on one axis lives on p^{-m}Z_p / p^k Z_p: grid index a
stands for the coset of x = a p^{-m}, 0 <= a < p^{m+k}.  Values are CycloArrays, so
every transform below is exact.  Leading axes of ``values`` beyond the last d are a
batch (used to push a whole basis through an operator at once).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import Cyclo, CycloArray, InsufficientLevel
from .scalars import INF, is_prime, padic_valuation, parse_rational

MAX_POINTS = 10**6


class LevelError(ValueError):
    """A requested operation does not fit in the level window."""


@dataclass(frozen=True, order=True)
class Level:
    m: int
    k: int

    def __post_init__(self):
        if self.m < 0 or self.k < 0:
            raise ValueError("level exponents must be nonnegative")

    @property
    def L(self) -> int:
        return self.m + self.k

    def size(self, p: int) -> int:
        return p**self.L

    def covers(self, other: "Level") -> bool:
        return self.m >= other.m and self.k >= other.k

    def to_json(self) -> dict:
        return {"m": self.m, "k": self.k}


def _levels(levels, d: int | None = None) -> tuple[Level, ...]:
    if isinstance(levels, Level):
        if d is None:
            raise ValueError("dimension needed")
        return (levels,) * d
    return tuple(levels)


def _check_cap(p: int, levels: Sequence[Level]):
    total = 1
    for lv in levels:
        total *= lv.size(p)
    if total > MAX_POINTS:
        raise LevelError(f"finite model has {total} points, above the cap {MAX_POINTS}")


# ---------------------------------------------------------------------------
# bilinear forms


def _val(x: Fraction, p: int):
    return padic_valuation(x, p)


class BilinearForm:
    """A nondegenerate symmetric bilinear form on Q_p^d given by a rational matrix."""

    def __init__(self, matrix: Sequence[Sequence], p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        rows = tuple(tuple(parse_rational(x) for x in r) for r in matrix)
        d = len(rows)
        if any(len(r) != d for r in rows):
            raise ValueError("form matrix must be square")
        if any(rows[i][j] != rows[j][i] for i in range(d) for j in range(d)):
            raise ValueError("form must be symmetric")
        self.p, self.d, self.rows = p, d, rows
        if not self.det:
            raise ValueError("degenerate bilinear form")

    @classmethod
    def hyperbolic(cls, p: int, r: int = 1) -> "BilinearForm":
        """Polarization of Q((v, phi)) = <phi, v> on U + U*, dim U = r."""
        d = 2 * r
        return cls([[1 if (j == i + r or i == j + r) else 0 for j in range(d)] for i in range(d)], p)

    @classmethod
    def diagonal(cls, p: int, values: Sequence) -> "BilinearForm":
        values = [parse_rational(v) for v in values]
        d = len(values)
        return cls([[values[i] if i == j else 0 for j in range(d)] for i in range(d)], p)

    @classmethod
    def from_spec(cls, spec: str, p: int, d: int) -> "BilinearForm":
        if spec == "hyperbolic":
            if d % 2:
                raise ValueError("hyperbolic form needs even d")
            return cls.hyperbolic(p, d // 2)
        if spec.startswith("diag:"):
            vals = spec[5:].split(",")
            if len(vals) != d:
                raise ValueError(f"diag form needs {d} entries")
            return cls.diagonal(p, vals)
        raise ValueError(f"unknown form {spec!r}")

    def direct_sum(self, other: "BilinearForm") -> "BilinearForm":
        if other.p != self.p:
            raise ValueError("mixed primes")
        d1, d2 = self.d, other.d
        rows = [list(r) + [0] * d2 for r in self.rows] + [[0] * d1 + list(r) for r in other.rows]
        return BilinearForm(rows, self.p)

    def __call__(self, x: Sequence, y: Sequence) -> Fraction:
        return sum((self.rows[i][j] * parse_rational(x[i]) * parse_rational(y[j])
                    for i in range(self.d) for j in range(self.d)), Fraction(0))

    @cached_property
    def det(self) -> Fraction:
        from .linalg import Matrix

        return Matrix([list(r) for r in self.rows]).det()

    @cached_property
    def inverse_rows(self) -> tuple:
        from .linalg import Matrix

        return Matrix([list(r) for r in self.rows]).inverse().rows

    @cached_property
    def det_valuation(self) -> int:
        return _val(self.det, self.p)

    @cached_property
    def elementary_valuations(self) -> tuple[int, ...]:
        """Valuations of the Smith normal form of the matrix over Z_p."""
        p = self.p
        M = [list(r) for r in self.rows]
        out = []
        while M:
            best = None
            for i, r in enumerate(M):
                for j, x in enumerate(r):
                    if x:
                        v = _val(x, p)
                        if best is None or v < best[0]:
                            best = (v, i, j)
            v, i, j = best
            out.append(v)
            M[0], M[i] = M[i], M[0]
            for r in M:
                r[0], r[j] = r[j], r[0]
            piv = M[0][0]
            for r in M[1:]:
                f = r[0] / piv
                for c in range(len(r)):
                    r[c] -= f * M[0][c]
            # the pivot has least valuation, so column operations clear its row
            # without touching the remaining block
            M = [r[1:] for r in M[1:]]
        return tuple(sorted(out))

    @property
    def s_hi(self) -> int:
        return max(0, self.elementary_valuations[-1])

    @property
    def s_lo(self) -> int:
        return max(0, -self.elementary_valuations[0])

    @property
    def is_unimodular(self) -> bool:
        return all(v == 0 for v in self.elementary_valuations)

    @property
    def min_entry_valuation(self) -> int:
        return min(_val(x, self.p) for r in self.rows for x in r if x)

    def to_json(self) -> dict:
        return {"p": self.p, "matrix": [[_fmt(x) for x in r] for r in self.rows]}

    def __eq__(self, other) -> bool:
        return isinstance(other, BilinearForm) and (self.p, self.rows) == (other.p, other.rows)

    def __hash__(self) -> int:
        return hash((self.p, self.rows))

    def __repr__(self) -> str:
        return f"BilinearForm(p={self.p}, {[[str(x) for x in r] for r in self.rows]})"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fourier_level(level: Level, B: BilinearForm) -> Level:
    """Output level of F_B: (k + s_hi, m + s_lo)."""
    return Level(level.k + B.s_hi, level.m + B.s_lo)


# ---------------------------------------------------------------------------
# levelled functions


def _as_int64(data: np.ndarray, factor: int) -> np.ndarray | None:
    if data.dtype != object:
        return data
    bound = max(int(data.max()), -int(data.min())) if data.size else 0
    if bound * max(factor, 1) < 2**62:
        return data.astype(np.int64)
    return None


class LevelledFunction:
    """A locally constant function with compact support on Q_p^d (plus batch axes)."""

    __slots__ = ("p", "levels", "values")

    def __init__(self, p: int, levels, values: CycloArray):
        self.p = p
        self.levels = tuple(levels)
        self.values = values
        d = len(self.levels)
        grid = tuple(lv.size(p) for lv in self.levels)
        if values.p != p or values.shape[len(values.shape) - d:] != grid:
            raise ValueError("values do not match the level grid")

    # construction -----------------------------------------------------------
    @classmethod
    def zero(cls, p: int, d: int, level, batch: tuple = ()) -> "LevelledFunction":
        levels = _levels(level, d)
        _check_cap(p, levels)
        grid = tuple(lv.size(p) for lv in levels)
        return cls(p, levels, CycloArray.zeros(p, batch + grid))

    @classmethod
    def indicator(cls, p: int, d: int, level, index: Sequence[int]) -> "LevelledFunction":
        f = cls.zero(p, d, level)
        data = f.values.data.copy()
        data[tuple(index) + (0,)] = 1
        return cls(p, f.levels, CycloArray(p, 0, data))

    @classmethod
    def lattice_indicator(cls, p: int, d: int, level, e: int = 0) -> "LevelledFunction":
        """Indicator of p^e Z_p^d."""
        levels = _levels(level, d)
        for lv in levels:
            if not (-lv.m <= e <= lv.k):
                raise LevelError("lattice not representable at this level")
        f = cls.zero(p, d, levels)
        data = f.values.data.copy()
        sl = tuple(slice(None, None, p ** (lv.m + e)) for lv in levels)
        sub = data[sl]
        sub[...] = 1
        data[sl] = sub
        return cls(p, levels, CycloArray(p, 0, data))

    @classmethod
    def basis(cls, p: int, d: int, level) -> "LevelledFunction":
        """All coset indicators, stacked along one batch axis in C order."""
        levels = _levels(level, d)
        _check_cap(p, levels)
        grid = tuple(lv.size(p) for lv in levels)
        count = int(np.prod(grid))
        data = np.zeros((count, count, 1), dtype=object)
        data[np.arange(count), np.arange(count), 0] = 1
        return cls(p, levels, CycloArray(p, 0, data.reshape((count,) + grid + (1,))))

    @classmethod
    def from_callable(cls, p: int, d: int, level, fn) -> "LevelledFunction":
        levels = _levels(level, d)
        _check_cap(p, levels)
        grid = tuple(lv.size(p) for lv in levels)
        vals = np.empty(grid, dtype=object)
        for idx in np.ndindex(*grid):
            vals[idx] = fn(coset_point(p, levels, idx))
        return cls(p, levels, CycloArray.from_cyclos(p, vals))

    # shape ---------------------------------------------------------------
    @property
    def d(self) -> int:
        return len(self.levels)

    @property
    def grid(self) -> tuple[int, ...]:
        return tuple(lv.size(self.p) for lv in self.levels)

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.values.shape[: len(self.values.shape) - self.d]

    @property
    def level(self) -> Level:
        if any(lv != self.levels[0] for lv in self.levels):
            raise ValueError("function has axis-dependent levels")
        return self.levels[0]

    def __getitem__(self, i) -> "LevelledFunction":
        if not self.batch_shape:
            raise IndexError("no batch axis")
        return LevelledFunction(self.p, self.levels, self.values[i])

    def with_values(self, values: CycloArray) -> "LevelledFunction":
        return LevelledFunction(self.p, self.levels, values)

    # evaluation --------------------------------------------------------------
    def evaluate(self, x: Sequence) -> Cyclo:
        if self.batch_shape:
            raise ValueError("evaluate a single function, not a batch")
        idx = point_index(self.p, self.levels, x)
        if idx is None:
            return Cyclo.zero(self.p)
        return self.values.item(idx)

    # arithmetic --------------------------------------------------------------
    def _aligned(self, other: "LevelledFunction"):
        if other.p != self.p or other.d != self.d:
            raise ValueError("functions on different spaces")
        if self.levels == other.levels:
            return self, other
        common = tuple(Level(max(a.m, b.m), max(a.k, b.k)) for a, b in zip(self.levels, other.levels))
        return embed(self, common), embed(other, common)

    def __add__(self, other: "LevelledFunction") -> "LevelledFunction":
        a, b = self._aligned(other)
        return a.with_values(a.values + b.values)

    def __sub__(self, other: "LevelledFunction") -> "LevelledFunction":
        a, b = self._aligned(other)
        return a.with_values(a.values - b.values)

    def scaled(self, c) -> "LevelledFunction":
        return self.with_values(self.values * c)

    def equals(self, other: "LevelledFunction") -> bool:
        a, b = self._aligned(other)
        return a.values.equals(b.values)

    def ratio_to(self, other: "LevelledFunction") -> Cyclo | None:
        a, b = self._aligned(other)
        return a.values.ratio_to(b.values)

    def is_zero(self) -> bool:
        return self.values.is_all_zero()

    def support(self) -> list[tuple[int, ...]]:
        if self.batch_shape:
            raise ValueError("support of a batch is not defined")
        mask = ~self.values.is_zero_mask()
        return [tuple(int(i) for i in ix) for ix in np.argwhere(mask)]

    def conj(self) -> "LevelledFunction":
        return self.with_values(self.values.conj())

    # serialization -----------------------------------------------------------
    def to_json(self) -> dict:
        if self.batch_shape:
            raise ValueError("cannot serialize a batch")
        entries = []
        for idx in self.support():
            entries.append({"coset": [coset_digits(self.p, lv, a) for lv, a in zip(self.levels, idx)],
                            "value": self.values.item(idx).to_json()})
        return {"p": self.p, "d": self.d, **_levels_json(self.levels), "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "LevelledFunction":
        p, d = int(obj["p"]), int(obj["d"])
        levels = _levels_from_json(obj, d)
        f = cls.zero(p, d, levels)
        grid = f.grid
        vals = np.full(grid, Cyclo.zero(p), dtype=object)
        for e in obj.get("entries", []):
            idx = tuple(parse_coset_digits(p, lv, s) for lv, s in zip(levels, e["coset"]))
            vals[idx] = Cyclo.from_json(e["value"])
        return cls(p, levels, CycloArray.from_cyclos(p, vals))

    def __repr__(self) -> str:
        return f"LevelledFunction(p={self.p}, levels={self.levels}, batch={self.batch_shape})"


def _levels_json(levels: Sequence[Level]) -> dict:
    if all(lv == levels[0] for lv in levels):
        return {"level": levels[0].to_json()}
    return {"levels": [lv.to_json() for lv in levels]}


def _levels_from_json(obj: dict, d: int) -> tuple[Level, ...]:
    if "levels" in obj:
        return tuple(Level(int(x["m"]), int(x["k"])) for x in obj["levels"])
    return (Level(int(obj["level"]["m"]), int(obj["level"]["k"])),) * d


def coset_point(p: int, levels: Sequence[Level], idx: Sequence[int]) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(a), p**lv.m) for lv, a in zip(levels, idx))


def point_index(p: int, levels: Sequence[Level], x: Sequence) -> tuple[int, ...] | None:
    """Grid index of the coset containing x, or None when x is outside the support window."""
    out = []
    for lv, xi in zip(levels, x):
        xi = parse_rational(xi) * p**lv.m
        v = padic_valuation(xi, p)
        if v != INF and v < 0:
            return None
        mod = p**lv.L
        out.append(int(xi.numerator * pow(xi.denominator, -1, mod) % mod) if mod > 1 else 0)
    return tuple(out)


def coset_digits(p: int, lv: Level, a: int) -> str:
    """Base-p digits of x = a p^{-m} mod p^k, most significant first, with a radix point."""
    digits = []
    for _ in range(lv.L):
        digits.append(str(a % p) if p <= 10 else f"[{a % p}]")
        a //= p
    digits.reverse()
    s = "".join(digits)
    if lv.m == 0:
        return s or "0"
    head = s[: len(s) - lv.m] if lv.k else "0"
    return f"{head}.{s[len(s) - lv.m:]}" if lv.k else f"0.{s}"


def parse_coset_digits(p: int, lv: Level, s: str) -> int:
    s = s.replace(".", "")
    if p > 10:
        import re

        ds = [int(x) for x in re.findall(r"\[(\d+)\]", s)]
    else:
        ds = [int(c) for c in s]
    a = 0
    for c in ds:
        if not 0 <= c < p:
            raise ValueError(f"bad digit {c} for p={p}")
        a = a * p + c
    return a % p**lv.L


# ---------------------------------------------------------------------------
# core maps: pullback along linear maps, per-axis DFT


def _pullback_index(p: int, out_levels, in_levels, M: Sequence[Sequence[Fraction]]) -> np.ndarray:
    """Flat input index of M y for every output grid point y, -1 where M y is outside."""
    out_grid = tuple(lv.size(p) for lv in out_levels)
    in_grid = tuple(lv.size(p) for lv in in_levels)
    b = np.indices(out_grid, dtype=object).reshape(len(out_grid), -1) if out_grid else np.zeros((0, 1))
    npts = b.shape[1]
    valid = np.ones(npts, dtype=bool)
    coords = []
    for i, li in enumerate(in_levels):
        c = [Fraction(M[i][j]) * Fraction(p) ** (li.m - lj.m) for j, lj in enumerate(out_levels)]
        D = 1
        for x in c:
            D = D * x.denominator // math.gcd(D, x.denominator)
        s = 0
        Dp = D
        while Dp % p == 0:
            Dp //= p
            s += 1
        C = [int(x * D) for x in c]
        S = np.zeros(npts, dtype=object)
        for j, cij in enumerate(C):
            if cij:
                S = S + cij * b[j]
        ps = p**s
        if s:
            valid &= np.array([int(t) % ps == 0 for t in S], dtype=bool)
            S = S // ps
        mod = li.size(p)
        inv = pow(Dp, -1, mod) if mod > 1 else 0
        coords.append(np.array([int(t) * inv % mod if mod > 1 else 0 for t in S], dtype=np.int64))
    if coords:
        flat = np.ravel_multi_index(tuple(coords), in_grid)
    else:
        flat = np.zeros(npts, dtype=np.int64)
    flat = np.where(valid, flat, -1)
    return flat.reshape(out_grid)


def _gather(f: LevelledFunction, flat_idx: np.ndarray, out_levels) -> LevelledFunction:
    vals = f.values
    bshape = f.batch_shape
    Lc = vals.L
    count = int(np.prod(f.grid))
    data = vals.data.reshape(bshape + (count, Lc))
    zero = np.zeros(bshape + (1, Lc), dtype=data.dtype)
    data = np.concatenate([data, zero], axis=-2)
    idx = np.where(flat_idx.reshape(-1) < 0, count, flat_idx.reshape(-1))
    out = np.take(data, idx, axis=-2)
    out_grid = tuple(lv.size(f.p) for lv in out_levels)
    out = out.reshape(bshape + out_grid + (Lc,))
    return LevelledFunction(f.p, out_levels, CycloArray(f.p, vals.N, out, vals.scale, vals.half))


def pullback(f: LevelledFunction, M: Sequence[Sequence], out_levels) -> LevelledFunction:
    """g(y) = f(M y) at the given output levels (the caller checks they are adequate)."""
    out_levels = _levels(out_levels, f.d)
    _check_cap(f.p, out_levels)
    M = [[parse_rational(x) for x in r] for r in M]
    idx = _pullback_index(f.p, out_levels, f.levels, M)
    return _gather(f, idx, out_levels)


def _identity(d: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(d)] for i in range(d)]


def embed(f: LevelledFunction, levels) -> LevelledFunction:
    """The same function seen at a finer level."""
    levels = _levels(levels, f.d)
    for new, old in zip(levels, f.levels):
        if not new.covers(old):
            raise LevelError(f"cannot embed level {old} into {new}")
    if levels == f.levels:
        return f
    return pullback(f, _identity(f.d), levels)


def reflect(f: LevelledFunction) -> LevelledFunction:
    """f(-x)."""
    return pullback(f, [[-x for x in r] for r in _identity(f.d)], f.levels)


def dilate(f: LevelledFunction, t) -> LevelledFunction:
    """h_{t^{-1}} f, i.e. v -> f(t v)."""
    t = parse_rational(t)
    if not t:
        raise ValueError("dilation by zero")
    e = padic_valuation(t, f.p)
    levels = tuple(Level(max(lv.m + e, 0), max(lv.k - e, 0)) for lv in f.levels)
    M = [[t if i == j else 0 for j in range(f.d)] for i in range(f.d)]
    return pullback(f, M, levels)


def _axis_dft(vals: CycloArray, axis: int, P: int, Llev: int, inverse: bool = False) -> CycloArray:
    """sum_a zeta_{p^L}^{+-ab} vals[.., a, ..] along one axis (no volume factor)."""
    p = vals.p
    N = max(vals.N, Llev)
    vals = vals.lift(N)
    Lc = p**N
    step = p ** (N - Llev)
    data = np.moveaxis(vals.data, axis, 0)
    fast = _as_int64(data, P)
    work = fast if fast is not None else data
    out = np.empty_like(work)
    a = np.arange(P)
    c = np.arange(Lc)
    sign = -1 if inverse else 1
    shape_idx = (P,) + (1,) * (work.ndim - 2) + (Lc,)
    for b in range(P):
        sh = (sign * (a * b % P) * step) % Lc
        idx = ((c[None, :] - sh[:, None]) % Lc).reshape(shape_idx)
        g = np.take_along_axis(work, np.broadcast_to(idx, work.shape), axis=-1)
        out[b] = g.sum(axis=0)
    if out.dtype != object:
        out = out.astype(object)
    out = np.moveaxis(out, 0, axis)
    return CycloArray(p, N, out, vals.scale, vals.half).normalize()


def std_fourier_axes(f: LevelledFunction, axes: Iterable[int]) -> LevelledFunction:
    """Transform with the dot-product pairing along the given grid axes.

    Axis levels (m, k) become (k, m); the coset volume p^{-k} is included.
    """
    vals = f.values
    nb = len(f.batch_shape)
    levels = list(f.levels)
    for ax in axes:
        lv = levels[ax]
        vals = _axis_dft(vals, nb + ax, lv.size(f.p), lv.L)
        vals = vals.scaled(Fraction(1, f.p**lv.k))
        levels[ax] = Level(lv.k, lv.m)
    return LevelledFunction(f.p, levels, vals)


def _uniform(levels: Sequence[Level]) -> Level:
    return Level(max(lv.m for lv in levels), max(lv.k for lv in levels))


def fourier(f: LevelledFunction, B: BilinearForm) -> LevelledFunction:
    """(F_B f)(y) = int f(x) psi(B(x, y)) dmu_B(x) with the self-dual measure mu_B.

    Computed as |det B|^{1/2} (F_std f)(B y).
    """
    if B.p != f.p or B.d != f.d:
        raise ValueError("form does not match the function's space")
    lv = _uniform(f.levels)
    g = embed(f, (lv,) * f.d)
    h = std_fourier_axes(g, range(f.d))
    out = (fourier_level(lv, B),) * f.d
    r = pullback(h, B.rows, out)
    return r.with_values(r.values.times_p_half(-B.det_valuation))


def inverse_fourier(f: LevelledFunction, B: BilinearForm) -> LevelledFunction:
    """F_B^{-1} = reflection after F_B."""
    return reflect(fourier(f, B))


def partial_fourier(f: LevelledFunction, B1: BilinearForm, axes: Sequence[int] | None = None
                    ) -> LevelledFunction:
    """Transform only the coordinates in ``axes`` (default: the first dim B1 ones) with B1."""
    axes = list(range(B1.d)) if axes is None else list(axes)
    if len(axes) != B1.d or len(set(axes)) != len(axes) or any(not 0 <= a < f.d for a in axes):
        raise ValueError("split dimensions inconsistent with the form")
    if B1.p != f.p:
        raise ValueError("mixed primes")
    lv = _uniform([f.levels[a] for a in axes])
    levels = list(f.levels)
    for a in axes:
        levels[a] = lv
    g = embed(f, levels)
    h = std_fourier_axes(g, axes)
    out_levels = list(h.levels)
    M = _identity(f.d)
    for i, a in enumerate(axes):
        out_levels[a] = fourier_level(lv, B1)
        for j, b in enumerate(axes):
            M[a][b] = B1.rows[i][j]
    r = pullback(h, M, out_levels)
    return r.with_values(r.values.times_p_half(-B1.det_valuation))


def inner_product(f: LevelledFunction, g: LevelledFunction, B: BilinearForm | None = None) -> Cyclo:
    """int f conj(g) dmu_B (standard Haar when B is None)."""
    a, b = f._aligned(g)
    vol = Fraction(1, f.p ** sum(lv.k for lv in a.levels))
    s = (a.values * b.values.conj()).sum().scaled(vol)
    if B is not None:
        s = s.times_p_half(-B.det_valuation)
    return s.item(()) if s.shape == () else s.item()


def norm_sq(f: LevelledFunction, B: BilinearForm | None = None) -> Cyclo:
    return inner_product(f, f, B)


# ---------------------------------------------------------------------------
# distributions


class FiniteDistribution:
    """xi(f) = vol * sum_cosets w * f at a window level; vol is the standard coset volume."""

    __slots__ = ("weights",)

    def __init__(self, weights: LevelledFunction):
        if weights.batch_shape:
            raise ValueError("weights must be a single function")
        self.weights = weights

    @property
    def p(self) -> int:
        return self.weights.p

    @property
    def d(self) -> int:
        return self.weights.d

    @property
    def levels(self) -> tuple[Level, ...]:
        return self.weights.levels

    @classmethod
    def zero(cls, p: int, d: int, level) -> "FiniteDistribution":
        return cls(LevelledFunction.zero(p, d, level))

    @classmethod
    def haar(cls, p: int, d: int, level) -> "FiniteDistribution":
        return cls(_constant(p, d, level, Fraction(1)))

    @classmethod
    def delta(cls, p: int, d: int, level) -> "FiniteDistribution":
        levels = _levels(level, d)
        w = LevelledFunction.indicator(p, d, levels, (0,) * d)
        return cls(w.scaled(p ** sum(lv.k for lv in levels)))

    @classmethod
    def line_haar(cls, p: int, level, direction: Sequence[int], d: int | None = None) -> "FiniteDistribution":
        """Haar measure dt on the line {t u : t in Q_p}, u a primitive integral vector."""
        d = len(direction) if d is None else d
        levels = _levels(level, d)
        lv = _uniform(levels)
        if any(x != lv for x in levels):
            raise ValueError("line Haar needs a uniform level")
        u = [int(x) for x in direction]
        if all(x % p == 0 for x in u):
            raise ValueError("direction must be primitive at p")
        grid = tuple(x.size(p) for x in levels)
        data = np.zeros(grid + (1,), dtype=object)
        P = lv.size(p)
        for a in range(P):
            # the coset of t = a p^{-m} maps to the coset of a u p^{-m}
            data[tuple((a * x) % P for x in u) + (0,)] += 1
        # int f(tu) dt = p^{-k} sum_a f(a u p^{-m}); xi = vol * sum w f with vol = p^{-kd}
        w = CycloArray(p, 0, data, Fraction(p ** (lv.k * (d - 1))))
        return cls(LevelledFunction(p, levels, w.normalize()))

    @classmethod
    def axis_haar(cls, p: int, level, axis: int = 0, d: int = 2) -> "FiniteDistribution":
        u = [1 if i == axis else 0 for i in range(d)]
        return cls.line_haar(p, level, u, d)

    def __call__(self, f: LevelledFunction):
        """xi(f); a batch of test functions gives a CycloArray over the batch."""
        w = self.weights
        for a, b in zip(f.levels, w.levels):
            if not b.covers(a):
                raise LevelError("test function is finer than the distribution window")
        g = embed(f, w.levels)
        vol = Fraction(1, self.p ** sum(lv.k for lv in w.levels))
        nb = len(g.batch_shape)
        # only the support of the weights contributes
        flat_w = w.values.reshape(-1)
        keep = np.flatnonzero(~flat_w.is_zero_mask())
        gv = g.values.reshape(g.batch_shape + (-1,)).take(keep, axis=-1)
        prod = gv * flat_w.take(keep, axis=0)
        s = prod.sum(axis=-1).scaled(vol)
        return s if nb else s.item(())

    def support(self) -> list[tuple[int, ...]]:
        return self.weights.support()

    def fourier(self, B: BilinearForm) -> "FiniteDistribution":
        """(F_B xi)(f) = xi(F_B f); the weight function transforms like a function."""
        return FiniteDistribution(fourier(self.weights, B))

    def partial_fourier(self, B1: BilinearForm, axes=None) -> "FiniteDistribution":
        return FiniteDistribution(partial_fourier(self.weights, B1, axes))

    def equals(self, other: "FiniteDistribution") -> bool:
        return self.weights.equals(other.weights)

    def is_zero(self) -> bool:
        return self.weights.is_zero()

    def to_json(self) -> dict:
        return {"kind": "distribution", **self.weights.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteDistribution":
        return cls(LevelledFunction.from_json(obj))


def _constant(p: int, d: int, level, c: Fraction) -> LevelledFunction:
    levels = _levels(level, d)
    f = LevelledFunction.zero(p, d, levels)
    data = np.ones(f.grid + (1,), dtype=object)
    return LevelledFunction(p, levels, CycloArray(p, 0, data, Fraction(c)))


# ---------------------------------------------------------------------------
# valuation cells and support containment


@dataclass(frozen=True)
class Constraint:
    """One exact valuation constraint.

    target 'coord' (with index) or 'form' (the value B(x, x)); op 'ge' (v >= value),
    'eq' (v == value) or 'zero' (the quantity vanishes).
    """

    target: str
    op: str
    value: int | None = None
    index: int | None = None

    def __post_init__(self):
        if self.target not in ("coord", "form"):
            raise ValueError(f"bad constraint target {self.target!r}")
        if self.op not in ("ge", "eq", "zero"):
            raise ValueError(f"bad constraint op {self.op!r}")
        if self.target == "coord" and (self.index is None or self.index < 0):
            raise ValueError("coordinate constraint needs an index")
        if self.op != "zero" and self.value is None:
            raise ValueError("constraint needs a value")
        if self.target == "form" and self.op == "eq":
            raise ValueError("form constraints support 'ge' and 'zero' only")

    def to_json(self) -> dict:
        out = {"target": self.target, "op": self.op}
        if self.value is not None:
            out["value"] = self.value
        if self.index is not None:
            out["index"] = self.index
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Constraint":
        try:
            return cls(obj["target"], obj["op"], obj.get("value"), obj.get("index"))
        except KeyError as exc:
            raise ValueError(f"malformed constraint {obj!r}") from exc


Cell = tuple  # a conjunction of Constraints; a cell set is a tuple of cells


def cells_from_json(obj) -> tuple:
    if not isinstance(obj, list):
        raise ValueError("cell set must be a list of cells")
    out = []
    for cell in obj:
        if not isinstance(cell, list):
            raise ValueError("each cell must be a list of constraints")
        out.append(tuple(Constraint.from_json(c) for c in cell))
    return tuple(out)


def cells_to_json(cells) -> list:
    return [[c.to_json() for c in cell] for cell in cells]


def isotropic_cells(B: BilinearForm) -> tuple:
    """Z(B) = {B(x, x) = 0} as a cell set.

    For a hyperbolic plane [[0, c], [c, 0]] the cone is the union of the two axes
    and the cells are exact; otherwise one 'form zero' cell is used.
    """
    r = B.rows
    if B.d == 2 and r[0][0] == 0 and r[1][1] == 0:
        return ((Constraint("coord", "zero", index=0),), (Constraint("coord", "zero", index=1),))
    return ((Constraint("form", "zero"),),)


def _coord_meets(c: Constraint, xv, k: int) -> bool:
    # the coset is x + p^k Z_p; xv = v(x) of the representative
    if c.op == "zero":
        return xv >= k
    if c.op == "ge":
        return xv >= min(c.value, k)
    if c.value < k:
        return xv == c.value
    return xv >= k


def coset_meets_cell(p: int, levels: Sequence[Level], idx: Sequence[int], cell, B: BilinearForm | None = None
                     ) -> bool:
    """The documented coset-meets-cell rule.

    Coordinate constraints are decided exactly (the coset is a product of balls).  A
    form constraint v(B(x, x)) >= c is accepted when the representative satisfies it
    up to the coset's own scale sigma, the least valuation of B(x+u, x+u) - B(x, x)
    over offsets u; this over-approximates the true cell.
    """
    x = coset_point(p, levels, idx)
    for c in cell:
        if c.target == "coord":
            if c.index >= len(levels):
                raise ValueError("constraint index outside the dimension")
            if not _coord_meets(c, padic_valuation(x[c.index], p), levels[c.index].k):
                return False
        else:
            if B is None:
                raise ValueError("form constraint without a form")
            q = B(x, x)
            sigma = _form_scale(p, levels, x, B)
            target = sigma if c.op == "zero" else min(c.value, sigma)
            if padic_valuation(q, p) < target:
                return False
    return True


def _form_scale(p: int, levels, x, B: BilinearForm):
    v2 = padic_valuation(Fraction(2), p)
    best = INF
    for i in range(B.d):
        for j in range(B.d):
            bij = B.rows[i][j]
            if not bij:
                continue
            vb = padic_valuation(bij, p)
            vx = padic_valuation(x[i], p)
            best = min(best, v2 + vx + vb + levels[j].k, levels[i].k + levels[j].k + vb)
    return best


def supported_in(xi: FiniteDistribution, cells, B: BilinearForm | None = None) -> bool:
    return not unsupported_cosets(xi, cells, B)


def unsupported_cosets(xi: FiniteDistribution, cells, B: BilinearForm | None = None) -> list:
    bad = []
    for idx in xi.support():
        if not any(coset_meets_cell(xi.p, xi.levels, idx, cell, B) for cell in cells):
            bad.append(idx)
    return bad


# ---------------------------------------------------------------------------
# abs-homogeneity


@dataclass(frozen=True)
class HomogeneityVerdict:
    homogeneous: bool
    degree: Fraction | None  # None with homogeneous=True means xi = 0 (any degree)
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"homogeneous": self.homogeneous,
                "degree": None if self.degree is None else _fmt(self.degree),
                "witness": self.witness}


def default_t_samples(p: int) -> tuple[Fraction, ...]:
    units = [Fraction(-1)] + ([Fraction(2)] if p != 2 else []) + [Fraction(1 + p)]
    return (Fraction(p), Fraction(1, p), *units)


def abs_homogeneity_degree(xi: FiniteDistribution, t_samples: Sequence | None = None
                           ) -> HomogeneityVerdict:
    """The d with |xi(f(t .))| = |t|^{-d} |xi(f)| for the sampled t and every coset
    indicator f one level inside the window, compared exactly through |.|^2."""
    p = xi.p
    ts = [parse_rational(t) for t in (default_t_samples(p) if t_samples is None else t_samples)]
    vals = [padic_valuation(t, p) for t in ts]
    if any(abs(e) > 1 for e in vals):
        raise LevelError("t-samples must have valuation in {-1, 0, 1}")
    if any(lv.m < 1 or lv.k < 1 for lv in xi.levels):
        raise LevelError("level window too small: need m, k >= 1 for dilation room")
    test_levels = tuple(Level(lv.m - 1, lv.k - 1) for lv in xi.levels)
    basis = LevelledFunction.basis(p, xi.d, test_levels)
    base = xi(basis)
    base_sq = (base * base.conj())
    degree: Fraction | None = None
    pending = []
    for t, e in zip(ts, vals):
        img = xi(dilate(basis, t))
        img_sq = img * img.conj()
        pending.append((t, e, img_sq))
        if e and degree is None:
            for i in range(base_sq.shape[0]):
                a, b = base_sq.item((i,)), img_sq.item((i,))
                if a and b:
                    ratio = b / a
                    if not ratio.is_rational():
                        return HomogeneityVerdict(False, None, {"t": _fmt(t), "test_index": i,
                                                                "reason": "ratio is not rational"})
                    r = ratio.to_rational()
                    pe = _exact_p_power(r, p)
                    if pe is None:
                        return HomogeneityVerdict(False, None, {"t": _fmt(t), "test_index": i,
                                                                "reason": f"ratio {r} is not a power of p"})
                    # |t|^{-2 deg} = p^{2 deg e}
                    degree = Fraction(pe, 2 * e)
                    break
    if degree is None:
        if base_sq.is_all_zero() and all(x[2].is_all_zero() for x in pending):
            return HomogeneityVerdict(True, None)
        if all(e == 0 for e in vals):
            raise ValueError("t-samples need an element of nonzero valuation")
    if degree is None:
        return HomogeneityVerdict(False, None, {"reason": "xi vanishes on test functions but not on their dilates"})
    for t, e, img_sq in pending:
        expo = 2 * degree * e
        if expo.denominator != 1:
            return HomogeneityVerdict(False, None, {"t": _fmt(t), "reason": "non-integral exponent"})
        expected = base_sq.scaled(Fraction(p) ** int(expo))
        if not img_sq.equals(expected):
            diff = (img_sq - expected).is_zero_mask()
            i = int(np.argwhere(~diff)[0][0])
            return HomogeneityVerdict(False, None, {"t": _fmt(t), "test_index": i,
                                                    "candidate_degree": _fmt(degree)})
    return HomogeneityVerdict(True, degree)


def _exact_p_power(r: Fraction, p: int) -> int | None:
    if r <= 0:
        return None
    v = padic_valuation(r, p)
    return v if r == Fraction(p) ** v else None

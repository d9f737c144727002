"""SL(2) words and the Weil representation on finite-level Schwartz spaces."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cyclotomic import Cyclo, CycloArray, InsufficientLevel, cyclo_abs_sq
from .harmonic import (
    BilinearForm,
    FiniteDistribution,
    HomogeneityVerdict,
    Level,
    LevelError,
    LevelledFunction,
    abs_homogeneity_degree,
    coset_point,
    dilate,
    fourier,
    inverse_fourier,
    isotropic_cells,
    pullback,
    supported_in,
    unsupported_cosets,
)
from .scalars import INF, padic_valuation, parse_rational

# ---------------------------------------------------------------------------
# SL(2) over Q


@dataclass(frozen=True)
class SL2Element:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, parse_rational(getattr(self, name)))
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("determinant is not 1")

    def __matmul__(self, o: "SL2Element") -> "SL2Element":
        return SL2Element(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                          self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> "SL2Element":
        return SL2Element(self.d, -self.b, -self.c, self.a)

    def to_json(self) -> list:
        return [[str(self.a), str(self.b)], [str(self.c), str(self.d)]]

    @classmethod
    def identity(cls) -> "SL2Element":
        return cls(1, 0, 0, 1)


def n_(t) -> SL2Element:
    return SL2Element(1, t, 0, 1)


def nbar(t) -> SL2Element:
    return SL2Element(1, 0, t, 1)


def a_(t) -> SL2Element:
    t = parse_rational(t)
    return SL2Element(t, 0, 0, 1 / t)


J_MATRIX = SL2Element(0, -1, 1, 0)

# letters: ("n", t), ("nbar", t), ("a", t), ("J",), ("Jinv",)
Letter = tuple


def letter_matrix(letter: Letter) -> SL2Element:
    kind = letter[0]
    if kind == "n":
        return n_(letter[1])
    if kind == "nbar":
        return nbar(letter[1])
    if kind == "a":
        return a_(letter[1])
    if kind == "J":
        return J_MATRIX
    if kind == "Jinv":
        return J_MATRIX.inverse()
    raise ValueError(f"unknown letter {letter!r}")


def word_matrix(word: Sequence[Letter]) -> SL2Element:
    g = SL2Element.identity()
    for letter in word:
        g = g @ letter_matrix(letter)
    return g


def sl2_decompose(g: SL2Element) -> tuple[Letter, ...]:
    """A word of length <= 4 in n_t, nbar_t whose product is g (Gauss elimination)."""
    a, b, c, d = g.a, g.b, g.c, g.d
    if (a, b, c, d) == (1, 0, 0, 1):
        return ()
    if a == 1 and d == 1 and c == 0:
        return (("n", b),)
    if a == 1 and d == 1 and b == 0:
        return (("nbar", c),)
    if b != 0:
        # nbar_x n_b nbar_y = [[1 + b y, b], [x + (x b + 1) y, x b + 1]]
        return (("nbar", (d - 1) / b), ("n", b), ("nbar", (a - 1) / b))
    if c != 0:
        # n_x nbar_c n_y = [[1 + x c, (1 + x c) y + x], [c, c y + 1]]
        return (("n", (a - 1) / c), ("nbar", c), ("n", (d - 1) / c))
    # diagonal: n_1 g has b = 1/a != 0
    return (("n", Fraction(-1)),) + sl2_decompose(n_(1) @ g)


def random_sl2(rng: random.Random, height: int = 6, rational: bool = True) -> SL2Element:
    while True:
        a = Fraction(rng.randint(-height, height), rng.choice((1, 1, 2, 3)) if rational else 1)
        c = Fraction(rng.randint(-height, height), rng.choice((1, 1, 2, 5)) if rational else 1)
        if a == 0 and c == 0:
            continue
        if a != 0:
            b = Fraction(rng.randint(-height, height), rng.choice((1, 3)) if rational else 1)
            d = (1 + b * c) / a
        else:
            d = Fraction(rng.randint(-height, height))
            b = -1 / c
        g = SL2Element(a, b, c, d)
        if not rational and any(x.denominator != 1 for x in (g.a, g.b, g.c, g.d)):
            continue
        return g


# ---------------------------------------------------------------------------
# operators on a fixed level window


def nbar_exponents(t, B: BilinearForm, levels: Sequence[Level], N: int) -> np.ndarray:
    """Exponents e with psi(t B(v, v)) = zeta_{p^N}^e on every coset of the window."""
    p = B.p
    t = parse_rational(t)
    _check_nbar_level(t, B, levels)
    grid = tuple(lv.size(p) for lv in levels)
    out = np.zeros(grid, dtype=np.int64)
    mod = p**N
    for idx in np.ndindex(*grid):
        q = t * B(coset_point(p, levels, idx), coset_point(p, levels, idx))
        den = q.denominator
        j = 0
        while den % p == 0:
            den //= p
            j += 1
        if j > N:
            raise InsufficientLevel(f"psi needs level {j} > {N}")
        pj = p**j
        a = q.numerator * pow(den, -1, pj) % pj if j else 0
        out[idx] = a * p ** (N - j) % mod
    return out


def _check_nbar_level(t: Fraction, B: BilinearForm, levels: Sequence[Level]):
    """psi(t B(v, v)) must be constant on the cosets of the window."""
    if not t:
        return
    p = B.p
    vt = padic_valuation(t, p)
    v2 = padic_valuation(Fraction(2), p)
    for i in range(B.d):
        for j in range(B.d):
            bij = B.rows[i][j]
            if not bij:
                continue
            vb = padic_valuation(bij, p)
            # cross term 2 t B_ij x_i u_j and square term t B_ij u_i u_j
            if vt + v2 + vb - levels[i].m + levels[j].k < 0 or vt + vb + levels[i].k + levels[j].k < 0:
                raise InsufficientLevel(f"nbar_{t} is not defined at levels {levels}")


def _nbar_N(t: Fraction, B: BilinearForm, levels: Sequence[Level]) -> int:
    p = B.p
    if not t:
        return 0
    vt = padic_valuation(t, p)
    lo = min(padic_valuation(B.rows[i][j], p) - levels[i].m - levels[j].m
             for i in range(B.d) for j in range(B.d) if B.rows[i][j])
    return max(0, -(vt + lo))


# "literal": psi(t B(v, v)); "half": psi(t B(v, v) / 2), the multiplier under which
# nbar_t together with J = F_B satisfies every SL(2) relation (braid included)
MULTIPLIERS = ("literal", "half")


def _effective_t(t, multiplier: str) -> Fraction:
    t = parse_rational(t)
    if multiplier == "literal":
        return t
    if multiplier == "half":
        return t / 2
    raise ValueError(f"unknown multiplier {multiplier!r}")


def apply_nbar(f: LevelledFunction, t, B: BilinearForm, multiplier: str = "literal") -> LevelledFunction:
    """pi(nbar_t) f (v) = psi(t B(v, v)) f(v), or psi(t B(v, v) / 2) with multiplier="half"."""
    t = _effective_t(t, multiplier)
    if not t:
        return f
    N = max(f.values.N, _nbar_N(t, B, f.levels))
    exps = nbar_exponents(t, B, f.levels, N)
    vals = f.values.lift(N)
    return f.with_values(vals.mul_root(np.broadcast_to(exps, vals.shape)))


def a_scale_half_power(t, d: int, p: int) -> int:
    """|t|^{-d/2} = p^{h/2} with h = d v(t)."""
    return d * padic_valuation(parse_rational(t), p)


def apply_a(f: LevelledFunction, t, d: int | None = None) -> LevelledFunction:
    """pi(a_t) f (v) = |t|^{-d/2} f(t^{-1} v); the output level moves with v(t)."""
    t = parse_rational(t)
    g = dilate(f, 1 / t)
    h = a_scale_half_power(t, f.d if d is None else d, f.p)
    return g.with_values(g.values.times_p_half(h))


def apply_letter(f: LevelledFunction, letter: Letter, B: BilinearForm,
                 multiplier: str = "literal") -> LevelledFunction:
    kind = letter[0]
    if kind == "nbar":
        return apply_nbar(f, letter[1], B, multiplier)
    if kind == "J":
        return fourier(f, B)
    if kind == "Jinv":
        return inverse_fourier(f, B)
    if kind == "a":
        return apply_a(f, letter[1])
    if kind == "n":
        # n_s = J nbar_{-s} J^{-1}
        return fourier(apply_nbar(inverse_fourier(f, B), -parse_rational(letter[1]), B, multiplier), B)
    raise ValueError(f"unknown letter {letter!r}")


def apply_word(f: LevelledFunction, word: Sequence[Letter], B: BilinearForm,
               multiplier: str = "literal") -> LevelledFunction:
    """pi(w_1) ... pi(w_r) f, rightmost letter first."""
    for letter in reversed(tuple(word)):
        f = apply_letter(f, letter, B, multiplier)
    return f


@dataclass
class WeilOperator:
    """An operator realized by a word, as the images of every coset indicator."""

    word: tuple
    B: BilinearForm
    levels: tuple
    images: LevelledFunction = field(repr=False)
    multiplier: str = "literal"

    @property
    def matrix(self) -> CycloArray:
        return self.images.values

    @property
    def sl2(self) -> SL2Element:
        return word_matrix(self.word)


def weil_operator(word: Sequence[Letter], B: BilinearForm, level, multiplier: str = "literal"
                  ) -> WeilOperator:
    levels = (level,) * B.d if isinstance(level, Level) else tuple(level)
    basis = LevelledFunction.basis(B.p, B.d, levels)
    img = apply_word(basis, word, B, multiplier)
    if img.levels != levels:
        from .harmonic import embed

        try:
            img = embed(img, levels)
        except LevelError as exc:
            raise LevelError(f"word {word} leaves the level window {levels}") from exc
    return WeilOperator(tuple(word), B, levels, img, multiplier)


def weil_nbar(t, B: BilinearForm, level) -> WeilOperator:
    return weil_operator((("nbar", parse_rational(t)),), B, level)


def weil_a(t, B: BilinearForm, level) -> WeilOperator:
    return weil_operator((("a", parse_rational(t)),), B, level)


def weil_J(B: BilinearForm, level) -> WeilOperator:
    return weil_operator((("J",),), B, level)


@dataclass(frozen=True)
class ProjectiveVerdict:
    proportional: bool
    unimodular: bool
    ratio: Cyclo | None
    witness: int | None = None  # basis index where the products disagree

    @property
    def ok(self) -> bool:
        return self.proportional and self.unimodular

    def to_json(self) -> dict:
        return {"proportional": self.proportional, "unimodular": self.unimodular,
                "ratio": None if self.ratio is None else self.ratio.to_json(),
                "witness_basis_index": self.witness}


def projective_check(word1: Sequence[Letter], word2: Sequence[Letter], B: BilinearForm, level,
                     multiplier: str = "literal") -> ProjectiveVerdict:
    """pi(word1) = u pi(word2) with |u| = 1, checked exactly on the coset basis."""
    g1, g2 = word_matrix(word1), word_matrix(word2)
    if g1 != g2:
        raise ValueError("words do not multiply to the same SL(2) element")
    o1 = weil_operator(word1, B, level, multiplier)
    o2 = weil_operator(word2, B, level, multiplier)
    u = o1.images.values.ratio_to(o2.images.values)
    if u is None:
        diff = None
        m1, m2 = o1.images.values, o2.images.values
        for i in range(m1.shape[0]):
            if m1[i].ratio_to(m2[i]) is None:
                diff = i
                break
        return ProjectiveVerdict(False, False, None, diff)
    return ProjectiveVerdict(True, cyclo_abs_sq(u) == Cyclo.one(B.p), u)


def relation_words(name: str, t=1) -> tuple[tuple, tuple]:
    t = parse_rational(t)
    if name == "conj-unipotent":
        return (("Jinv",), ("nbar", t), ("J",)), sl2_decompose(n_(-t))
    if name == "j4":
        return (("J",),) * 4, ()
    if name == "braid":
        return (("J",),), sl2_decompose(J_MATRIX)
    if name == "nbar-add":
        return (("nbar", t), ("nbar", t + 1)), (("nbar", 2 * t + 1),)
    raise ValueError(f"unknown relation {name!r}")


RELATIONS = ("conj-unipotent", "j4", "braid", "nbar-add")


# ---------------------------------------------------------------------------
# the homogeneity argument, replayed


@dataclass(frozen=True)
class MetaplecticVerdict:
    preconditions: bool
    reason: str
    nbar_fixed: bool | None = None
    conj_ratio_unimodular: bool | None = None
    a_ratio_unimodular: bool | None = None
    degree: Fraction | None = None
    expected_degree: Fraction | None = None
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return (self.preconditions and bool(self.nbar_fixed) and bool(self.conj_ratio_unimodular)
                and bool(self.a_ratio_unimodular) and self.degree == self.expected_degree) \
            or (self.preconditions and self.reason == "vacuous")

    def to_json(self) -> dict:
        def fr(x):
            return None if x is None else str(x)

        return {"preconditions": self.preconditions, "reason": self.reason,
                "nbar_fixed": self.nbar_fixed, "conj_ratio_unimodular": self.conj_ratio_unimodular,
                "a_ratio_unimodular": self.a_ratio_unimodular, "degree": fr(self.degree),
                "expected_degree": fr(self.expected_degree), "witness": self.witness}


def _dual_ratio(xi: FiniteDistribution, word: Sequence[Letter], B: BilinearForm, test_levels,
                multiplier: str = "literal") -> Cyclo | None:
    """u with xi(pi(word)^{-1} f) = u xi(f) for every test basis function f, if it exists."""
    basis = LevelledFunction.basis(xi.p, xi.d, test_levels)
    inv = _inverse_word(word)
    moved = apply_word(basis, inv, B, multiplier)
    lhs = xi(moved)
    rhs = xi(basis)
    return lhs.ratio_to(rhs)


def _inverse_word(word: Sequence[Letter]) -> tuple:
    out = []
    for letter in reversed(tuple(word)):
        kind = letter[0]
        if kind in ("n", "nbar"):
            out.append((kind, -parse_rational(letter[1])))
        elif kind == "a":
            out.append(("a", 1 / parse_rational(letter[1])))
        elif kind == "J":
            out.append(("Jinv",))
        elif kind == "Jinv":
            out.append(("J",))
        else:
            raise ValueError(f"unknown letter {letter!r}")
    return tuple(out)


def metaplectic_test(xi: FiniteDistribution, B: BilinearForm, t_samples: Sequence | None = None,
                     multiplier: str = "literal") -> MetaplecticVerdict:
    """Check the support hypotheses on xi and F_B(xi), then replay the argument:
    nbar_t fixes xi, J^{-1} nbar_t J scales it by a unimodular u1, a_t scales it by a
    unimodular u2, and the measured degree is dim W / 2."""
    p = xi.p
    cells = isotropic_cells(B)
    bad = unsupported_cosets(xi, cells, B)
    if bad:
        return MetaplecticVerdict(False, "xi not supported in Z(B)", witness={"coset": list(bad[0])})
    xh = xi.fourier(B)
    bad = unsupported_cosets(xh, cells, B)
    if bad:
        return MetaplecticVerdict(False, "F_B(xi) not supported in Z(B)", witness={"coset": list(bad[0])})
    expected = Fraction(B.d, 2)
    if xi.is_zero():
        return MetaplecticVerdict(True, "vacuous", expected_degree=expected)
    if any(lv.m < 1 or lv.k < 1 for lv in xi.levels):
        raise LevelError("level window too small")
    test_levels = tuple(Level(lv.m - 1, lv.k - 1) for lv in xi.levels)
    ts = [Fraction(1), Fraction(-1)] + ([Fraction(2)] if p != 2 else [])
    one = Cyclo.one(p)
    nbar_fixed = all(_dual_ratio(xi, (("nbar", t),), B, test_levels, multiplier) == one for t in ts)
    conj_ok = True
    for t in ts:
        u1 = _dual_ratio(xi, (("Jinv",), ("nbar", t), ("J",)), B, test_levels, multiplier)
        conj_ok &= u1 is not None and cyclo_abs_sq(u1) == one
    a_ok = True
    for t in (Fraction(p), Fraction(1, p)) + ((Fraction(-1),) if p != 2 else (Fraction(3),)):
        u2 = _dual_ratio(xi, (("a", t),), B, test_levels)
        a_ok &= u2 is not None and cyclo_abs_sq(u2) == one
    hv: HomogeneityVerdict = abs_homogeneity_degree(xi, t_samples)
    return MetaplecticVerdict(True, "checked", nbar_fixed, conj_ok, a_ok, hv.degree, expected,
                              None if hv.homogeneous else hv.witness)


def axis_haar_family(p: int, level: Level) -> list[tuple[str, FiniteDistribution]]:
    """Isotropic-axis Haar measures of the hyperbolic plane and combinations of them.

    Each axis is its own annihilator under B, so every member and its transform sit
    on the isotropic cone; axis Haar is invariant under translation along the axis
    and dilation only rescales it, so these exhaust the constructed family.
    """
    h0 = FiniteDistribution.axis_haar(p, level, 0)
    h1 = FiniteDistribution.axis_haar(p, level, 1)
    z = Cyclo.root_of_unity(p, 1, 1)
    zarr = CycloArray.from_cyclos(p, [z]).reshape(())

    def comb(a, b):
        wa = h0.weights.values * a if not isinstance(a, CycloArray) else h0.weights.values * a
        return FiniteDistribution(h0.weights.with_values(wa + h1.weights.values * b))

    return [
        ("axis0", h0),
        ("axis1", h1),
        (f"{p}*axis0", FiniteDistribution(h0.weights.scaled(p))),
        ("axis0+axis1", comb(1, 1)),
        ("axis0-axis1", comb(1, -1)),
        ("zeta*axis0+2*axis1", comb(zarr, 2)),
    ]


def rejected_family(p: int, level: Level) -> list[tuple[str, FiniteDistribution]]:
    """Distributions on the cone whose transform leaves it (the hypotheses must fail)."""
    out = [("delta", FiniteDistribution.delta(p, 2, level))]
    for e in range(0, level.k + 1):
        out.append((f"axis0|p^{e}Z", _restrict_to_axis_ball(p, level, 0, e)))
    out.append(("line(1,1)", FiniteDistribution.line_haar(p, level, [1, 1])))
    return out


def _restrict_to_axis_ball(p: int, level: Level, axis: int, e: int) -> FiniteDistribution:
    base = FiniteDistribution.axis_haar(p, level, axis)
    grid = base.weights.grid
    mask = np.zeros(grid + (1,), dtype=object)
    step = p ** (level.m + e)
    for a in range(0, grid[axis], step):
        idx = [0, 0]
        idx[axis] = a
        mask[tuple(idx) + (0,)] = 1
    w = base.weights.values * CycloArray(p, 0, mask)
    return FiniteDistribution(LevelledFunction(p, base.levels, w))

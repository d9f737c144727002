"""Registered verification suites, the seeded runner and the report format."""

from __future__ import annotations

import json
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Callable

import numpy as np

from . import geometry as geo
from . import harmonic as hm
from . import weil as wl
from .cyclotomic import Cyclo
from .linalg import (
    Matrix,
    Subspace,
    ad_image,
    block_split,
    commutator,
    direct_sum,
    minimal_polynomial,
)
from .orbits import (
    is_nilpotent,
    jordan_chevalley,
    jordan_matrix,
    nilpotent_profile,
    partition_dimension,
    partitions,
    trace_slice,
    trace_unslice,
    block_slice,
    block_unslice,
    is_squarefree,
)
from .scalars import QQ, field_from_spec, field_to_spec, format_rational, parse_rational, scalar_to_json

MAX_EXHAUSTIVE_N = 8
MAX_RANDOM_N = 16
ENUMERATION_BUDGET = 10**6


class CapError(ValueError):
    """A requested size exceeds the desk-scale caps."""


class UnknownSuite(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration and results


@dataclass
class SuiteConfig:
    suite: str
    field: str | None = None
    n: int | None = None
    lambda_samples: tuple[str, ...] | None = None
    seed: int = 0
    p: int | None = None
    m: int | None = None
    k: int | None = None
    d: int | None = None
    form: str | None = None
    samples: int | None = None
    multiplier: str | None = None
    output: str | None = None

    def validate(self) -> "SuiteConfig":
        if self.suite not in SUITES:
            raise UnknownSuite(f"unknown suite {self.suite!r}; known: {', '.join(sorted(SUITES))}")
        if self.field is not None:
            for spec in self.field.split(","):
                try:
                    field_from_spec(spec)
                except (ValueError, TypeError) as exc:
                    raise ValueError(f"bad field selector {spec!r}") from exc
        if self.n is not None:
            if self.n < 1:
                raise ValueError("n must be positive")
            exhaustive = self.field is not None and "q" not in self.field.lower().split(",")
            cap = MAX_EXHAUSTIVE_N if exhaustive else MAX_RANDOM_N
            if self.n > cap:
                raise CapError(f"n = {self.n} exceeds the cap {cap}")
        if self.p is not None:
            from .scalars import is_prime

            if not is_prime(self.p):
                raise ValueError(f"p = {self.p} is not prime")
        for name in ("m", "k"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.d is not None and self.d < 1:
            raise ValueError("d must be positive")
        if self.samples is not None and not 0 <= self.samples <= 100000:
            raise CapError("samples must lie in [0, 100000]")
        if self.multiplier is not None and self.multiplier not in wl.MULTIPLIERS:
            raise ValueError(f"multiplier must be one of {wl.MULTIPLIERS}")
        if self.lambda_samples is not None:
            self.lambda_samples = tuple(str(x) for x in self.lambda_samples)
            for x in self.lambda_samples:
                parse_rational(x)
        p = self.p or 3
        m = 2 if self.m is None else self.m
        k = 2 if self.k is None else self.k
        d = 2 if self.d is None else self.d
        if p ** ((m + k) * d) > hm.MAX_POINTS:
            raise CapError(f"p^((m+k)d) = {p}^{(m + k) * d} exceeds {hm.MAX_POINTS}")
        return self

    def body(self) -> dict:
        """The part of the config that determines the results (no output paths)."""
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "output"}
        if out["lambda_samples"] is not None:
            out["lambda_samples"] = list(out["lambda_samples"])
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SuiteConfig":
        if not isinstance(obj, dict):
            raise ValueError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        if "suite" not in obj:
            raise ValueError("config needs a 'suite' key")
        data = dict(obj)
        if data.get("lambda_samples") is not None:
            data["lambda_samples"] = tuple(str(x) for x in data["lambda_samples"])
        return cls(**data)


@dataclass
class Outcome:
    ok: bool | None  # None: skipped
    cases: int = 0
    witness: dict | None = None
    detail: dict = field(default_factory=dict)


@dataclass
class CheckResult:
    check_id: str
    status: str  # pass | fail | skipped
    witness: dict | None
    runtime_ms: float
    cases: int = 0
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in ("pass", "fail", "skipped"):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "fail" and not self.witness:
            raise ValueError(f"failing check {self.check_id} has no witness")

    def body(self) -> dict:
        return {"id": self.check_id, "status": self.status, "cases": self.cases,
                "witness": self.witness, "detail": self.detail}


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    fn: Callable[..., Outcome]
    kwargs: dict


# ---------------------------------------------------------------------------
# helpers


def _fields(cfg: SuiteConfig, default: str):
    return [field_from_spec(s) for s in (cfg.field or default).split(",")]


def _fname(f) -> str:
    return "Q" if f == QQ else f"gf{f.q}"


def _vec_json(v) -> list:
    return [scalar_to_json(x) for x in v]


def _budget(count: int, what: str):
    if count > ENUMERATION_BUDGET:
        raise CapError(f"{what}: {count} cases exceed the enumeration budget {ENUMERATION_BUDGET}")


def _fr(x) -> str:
    return format_rational(Fraction(x))


def _lambda_samples(cfg: SuiteConfig, f):
    if cfg.lambda_samples is None:
        return geo.default_lambda_samples(f)
    return tuple(f(parse_rational(x)) for x in cfg.lambda_samples)


def _nilpotent_matrices(f, n: int) -> list[Matrix]:
    _budget(f.q ** (n * n), f"nilpotent {n}x{n} matrices over {f}")
    return geo.nilpotent_matrices(f, n)


# ---------------------------------------------------------------------------
# Q_A and the flag sets


def chk_qa_in_z(rng, field: str, r: int) -> Outcome:
    f = field_from_spec(field)
    _budget(f.q ** (2 * r), "pairs")
    J = Matrix.jordan_block(r, f)
    cases = positives = 0
    for v in geo.vectors(f, r):
        for phi in geo.vectors(f, r):
            cases += 1
            if geo.in_QA(J, v, phi):
                positives += 1
                if not geo.in_Y(v, phi) or not geo.in_Z(v, phi, r, f):
                    return Outcome(False, cases, {"kind": "qa-not-in-z", "field": field, "r": r,
                                                  "v": _vec_json(v), "phi": _vec_json(phi)})
    return Outcome(True, cases, detail={"in_QA": positives})


def chk_linalg_matrix(rng, field: str, n: int, index: int) -> Outcome:
    f = field_from_spec(field)
    A = _nilpotent_matrices(f, n)[index]
    is_block = A == Matrix.jordan_block(n, f)
    cases = positives = 0
    for v in geo.vectors(f, n):
        for phi in geo.vectors(f, n):
            cases += 1
            if geo.in_QA(A, v, phi):
                positives += 1
                bad = not geo.in_Y(v, phi) or (is_block and not geo.in_Z(v, phi, n, f))
                if bad:
                    return Outcome(False, cases, {"kind": "qa-containment", "A": A.to_json(),
                                                  "v": _vec_json(v), "phi": _vec_json(phi),
                                                  "jordan_block": is_block})
    return Outcome(True, cases, detail={"in_QA": positives, "jordan_block": is_block})


def chk_direct_sum(rng, field: str, k: int, l: int) -> Outcome:
    f = field_from_spec(field)
    q = f.q
    nil1, nil2 = _nilpotent_matrices(f, k), _nilpotent_matrices(f, l)
    _budget(len(nil1) * len(nil2) * q ** (2 * (k + l)), "direct-sum cases")
    tabs1 = [geo.qa_table(A) for A in nil1]
    tabs2 = [geo.qa_table(A) for A in nil2] if l != k else tabs1
    cases = positives = 0
    for i, A1 in enumerate(nil1):
        for j, A2 in enumerate(nil2):
            Q = geo.qa_table(direct_sum(A1, A2)).reshape(q**k, q**l, q**k, q**l)
            pred = tabs1[i][:, None, :, None] & tabs2[j][None, :, None, :]
            cases += Q.size
            positives += int(Q.sum())
            bad = np.argwhere(Q & ~pred)
            if bad.size:
                a, b, c, d = (int(x) for x in bad[0])
                vs1 = list(geo.vectors(f, k))
                vs2 = list(geo.vectors(f, l))
                return Outcome(False, cases, {"kind": "direct-sum", "A1": A1.to_json(), "A2": A2.to_json(),
                                              "v": _vec_json(vs1[a] + vs2[b]),
                                              "phi": _vec_json(vs1[c] + vs2[d])})
    return Outcome(True, cases, detail={"in_QA": positives, "pairs_of_matrices": len(nil1) * len(nil2)})


def chk_qa_table(rng, field: str, n: int) -> Outcome:
    """The vectorized trace-pairing decider agrees with the subspace solver."""
    f = field_from_spec(field)
    vs = list(geo.vectors(f, n))
    cases = 0
    for A in _nilpotent_matrices(f, n):
        T = geo.qa_table(A)
        for i, v in enumerate(vs):
            for j, phi in enumerate(vs):
                cases += 1
                if bool(T[i, j]) != geo.in_QA(A, v, phi):
                    return Outcome(False, cases, {"kind": "qa-decider", "A": A.to_json(),
                                                  "v": _vec_json(v), "phi": _vec_json(phi)})
    return Outcome(True, cases)


def _otilde_points(f, n: int):
    for lam in partitions(n):
        A = jordan_matrix(lam, f)
        yield lam, A, nilpotent_profile(A).dimension


def chk_raqa_exhaustive(rng, field: str, n: int, samples: tuple) -> Outcome:
    f = field_from_spec(field)
    lams = tuple(f(parse_rational(x)) for x in samples) if samples else None
    _budget(sum(1 for _ in partitions(n)) * f.q ** (2 * n), "pairs")
    cases = positives = 0
    for lam, A, i in _otilde_points(f, n):
        for v in geo.vectors(f, n):
            for phi in geo.vectors(f, n):
                cases += 1
                pt = geo.PointX(A, v, phi)
                if geo.in_Otilde_sampled(pt, i, lams):
                    positives += 1
                    if not geo.in_QA(A, v, phi):
                        return Outcome(False, cases, {"kind": "raqa", "point": pt.to_json(), "i": i,
                                                      "samples": list(samples) if samples else None})
    return Outcome(True, cases, detail={"sampled_Otilde": positives})


def _small_vec(rng, n):
    return tuple(Fraction(rng.choice((-1, 0, 0, 1))) for _ in range(n))


def chk_raqa_random(rng, n: int, count: int, samples: tuple) -> Outcome:
    lams = tuple(parse_rational(x) for x in samples) if samples else None
    positives = 0
    for case in range(count):
        lam = rng.choice(list(partitions(n)))
        g = geo.random_invertible(rng, n)
        A = g @ jordan_matrix(lam) @ g.inverse()
        i = partition_dimension(lam)
        # draw v, phi in a flag-adapted basis so that hits are frequent
        v = g.apply(_small_vec(rng, n))
        phi = g.inverse().apply_left(_small_vec(rng, n))
        pt = geo.PointX(A, v, phi)
        if geo.in_Otilde_sampled(pt, i, lams):
            positives += 1
            if not geo.in_QA(A, v, phi):
                return Outcome(False, case + 1, {"kind": "raqa", "point": pt.to_json(), "i": i,
                                                 "samples": list(samples) if samples else None})
    return Outcome(True, count, detail={"sampled_Otilde": positives})


def _tangent_fail(A, v, phi, lams):
    dim = nilpotent_profile(A).dimension
    E = geo.rank_one(v, phi, A.field)
    for lam in lams:
        B = A + E.scale(lam)
        if not is_nilpotent(B) or nilpotent_profile(B).dimension > dim:
            return lam
    return None


def chk_tangent_exhaustive(rng, field: str, n: int, samples: tuple) -> Outcome:
    f = field_from_spec(field)
    lams = tuple(f(parse_rational(x)) for x in samples) if samples else geo.default_lambda_samples(f)
    _budget(sum(1 for _ in partitions(n)) * f.q ** (2 * n), "pairs")
    cases = hits = 0
    for lam, A, i in _otilde_points(f, n):
        for v in geo.vectors(f, n):
            for phi in geo.vectors(f, n):
                cases += 1
                if geo.in_Y(v, phi) and geo.in_QA(A, v, phi):
                    hits += 1
                    bad = _tangent_fail(A, v, phi, lams)
                    if bad is not None:
                        return Outcome(False, cases, {"kind": "tangent", "A": A.to_json(), "v": _vec_json(v),
                                                      "phi": _vec_json(phi), "lambda": scalar_to_json(bad)})
    return Outcome(True, cases, detail={"pencils": hits})


def chk_tangent_random(rng, n: int, count: int, samples: tuple) -> Outcome:
    lams = tuple(parse_rational(x) for x in samples) if samples else geo.default_lambda_samples(QQ)
    hits = 0
    for case in range(count):
        lam = rng.choice(list(partitions(n)))
        g = geo.random_invertible(rng, n)
        A = g @ jordan_matrix(lam) @ g.inverse()
        v = g.apply(_small_vec(rng, n))
        phi = g.inverse().apply_left(_small_vec(rng, n))
        if geo.in_Y(v, phi) and geo.in_QA(A, v, phi):
            hits += 1
            bad = _tangent_fail(A, v, phi, lams)
            if bad is not None:
                return Outcome(False, case + 1, {"kind": "tangent", "A": A.to_json(), "v": _vec_json(v),
                                                 "phi": _vec_json(phi), "lambda": scalar_to_json(bad)})
    return Outcome(True, count, detail={"pencils": hits})


def _flag_sum(fl, i: int, j: int) -> Subspace:
    r, f = fl.r, fl.F[0].field
    vecs = [tuple(b) + (f.zero,) * r for b in fl.F[i].basis]
    vecs += [(f.zero,) * r + tuple(b) for b in fl.L[j].basis]
    return Subspace(vecs, 2 * r, f)


def chk_orthocomplement(rng, field: str, r: int) -> Outcome:
    from .linalg import orthocomplement

    f = field_from_spec(field)
    fl = geo.flag_spaces(r, f)
    lhs = orthocomplement(_flag_sum(fl, r - 1, r - 1))
    rhs = _flag_sum(fl, 1, 1)
    if lhs != rhs:
        return Outcome(False, 1, {"kind": "orthocomplement", "field": field, "r": r, "i": r - 1, "j": r - 1})
    # the general pattern (F^i + L^j)^perp = F^{r-j} + L^{r-i}
    cases = 1
    for i in range(r + 1):
        for j in range(r + 1):
            cases += 1
            if orthocomplement(_flag_sum(fl, i, j)) != _flag_sum(fl, r - j, r - i):
                return Outcome(False, cases, {"kind": "orthocomplement", "field": field, "r": r, "i": i, "j": j})
    return Outcome(True, cases, detail={"dim": lhs.dim})


# ---------------------------------------------------------------------------
# operators on V


def _trace_of_product(X: Matrix, Y: Matrix):
    n = X.n
    return sum(X.rows[i][j] * Y.rows[j][i] for i in range(n) for j in range(n))


def chk_trace_identity(rng, count: int, max_n: int) -> Outcome:
    cases = 0
    for _ in range(count):
        n = rng.randint(1, max_n)
        A, B = geo.random_matrix(rng, n), geo.random_matrix(rng, n)
        C = commutator(A, B)
        P = Matrix.identity(n)
        for i in range(n + 1):
            cases += 1
            M = P @ B
            t1 = _trace_of_product(P, C)
            t2 = _trace_of_product(A, M) - _trace_of_product(M, A)
            if t1 or t2:
                return Outcome(False, cases, {"kind": "trace", "A": A.to_json(), "B": B.to_json(), "i": i})
            P = P @ A
    return Outcome(True, cases)


def random_structured_matrix(rng: random.Random, n: int) -> Matrix:
    """A rational matrix with repeated eigenvalues, possibly irrational ones, and
    nontrivial Jordan blocks, in a random basis."""
    blocks = []
    size = 0
    while size < n:
        room = n - size
        kind = rng.random()
        if room >= 2 and kind < 0.25:
            c = rng.choice((-2, -1, 2, 3))  # x^2 - c: irreducible for these c
            C = Matrix([[Fraction(0), Fraction(c)], [Fraction(1), Fraction(0)]])
            reps = rng.randint(1, room // 2)
            M = Matrix.zero(2 * reps)
            rows = [list(r) for r in M.rows]
            for b in range(reps):
                for a in range(2):
                    for e in range(2):
                        rows[2 * b + a][2 * b + e] = C[a, e]
                if b + 1 < reps and rng.random() < 0.7:
                    rows[2 * b][2 * b + 2] = Fraction(1)
                    rows[2 * b + 1][2 * b + 3] = Fraction(1)
            blocks.append(Matrix(rows))
            size += 2 * reps
        else:
            r = rng.randint(1, room)
            blocks.append(Matrix.jordan_block(r, QQ, Fraction(rng.randint(-2, 2))))
            size += r
    M = blocks[0]
    for b in blocks[1:]:
        M = direct_sum(M, b)
    g = geo.random_invertible(rng, n)
    return g @ M @ g.inverse()


def chk_jordan_chevalley(rng, count: int, max_n: int) -> Outcome:
    for case in range(count):
        n = rng.randint(1, max_n)
        A = random_structured_matrix(rng, n) if rng.random() < 0.8 else geo.random_matrix(rng, n)
        jc = jordan_chevalley(A)
        S, N = jc.semisimple, jc.nilpotent
        problems = []
        if S + N != A:
            problems.append("sum")
        if not commutator(S, N).is_zero():
            problems.append("commute")
        if not (N ** n).is_zero():
            problems.append("nilpotent")
        if not is_squarefree(minimal_polynomial(S)):
            problems.append("semisimple")
        if problems:
            return Outcome(False, case + 1, {"kind": "jc", "A": A.to_json(), "failed": problems})
    return Outcome(True, count)


def chk_jc_equivariance(rng, count: int, max_n: int) -> Outcome:
    for case in range(count):
        n = rng.randint(1, max_n)
        A = random_structured_matrix(rng, n)
        g = geo.random_invertible(rng, n)
        lhs = jordan_chevalley(g @ A @ g.inverse()).semisimple
        rhs = g @ jordan_chevalley(A).semisimple @ g.inverse()
        if lhs != rhs:
            return Outcome(False, case + 1, {"kind": "jc-equivariance", "A": A.to_json(), "g": g.to_json()})
    return Outcome(True, count)


def chk_orbit_dimension(rng, n: int) -> Outcome:
    cases = 0
    for lam in partitions(n):
        cases += 1
        A = jordan_matrix(lam)
        g = geo.random_invertible(rng, n)
        B = g @ A @ g.inverse()
        dims = {"partition": partition_dimension(lam), "ad_image": ad_image(A).dim,
                "conjugate_ad_image": ad_image(B).dim, "profile": nilpotent_profile(B).dimension}
        if len(set(dims.values())) != 1 or nilpotent_profile(B).partition != lam:
            return Outcome(False, cases, {"kind": "orbit-dimension", "partition": list(lam), "dims": dims})
    return Outcome(True, cases)


# ---------------------------------------------------------------------------
# G~ and its action


def chk_gtilde_group(rng, field: str, n: int) -> Outcome:
    f = field_from_spec(field)
    G = geo.gtilde_elements(f, n)
    e = geo.identity(n, f)
    cases = 0
    for x in G:
        cases += 1
        if geo.gtilde_mul(e, x) != x or geo.gtilde_mul(x, e) != x:
            return Outcome(False, cases, {"kind": "gtilde-identity", "x": x.to_json()})
        if geo.gtilde_mul(x, geo.gtilde_inverse(x)) != e:
            return Outcome(False, cases, {"kind": "gtilde-inverse", "x": x.to_json()})
    for x in G:
        for y in G:
            xy = geo.gtilde_mul(x, y)
            if geo.chi(xy) != geo.chi(x) * geo.chi(y):
                return Outcome(False, cases, {"kind": "gtilde-chi", "x": x.to_json(), "y": y.to_json()})
            for z in G:
                cases += 1
                if geo.gtilde_mul(xy, z) != geo.gtilde_mul(x, geo.gtilde_mul(y, z)):
                    return Outcome(False, cases, {"kind": "gtilde-assoc", "x": x.to_json(), "y": y.to_json(),
                                                  "z": z.to_json()})
    return Outcome(True, cases, detail={"order": len(G)})


def chk_gtilde_action(rng, field: str, n: int) -> Outcome:
    f = field_from_spec(field)
    G = geo.gtilde_elements(f, n)
    pts = list(geo.sl_points(f, n))
    _budget(len(G) ** 2 * len(pts), "action cases")
    cases = 0
    for y in G:
        ys = [geo.act(y, p) for p in pts]
        for x in G:
            xy = geo.gtilde_mul(x, y)
            for p, yp in zip(pts, ys):
                cases += 1
                if geo.act(xy, p) != geo.act(x, yp):
                    return Outcome(False, cases, {"kind": "gtilde-action", "x": x.to_json(), "y": y.to_json(),
                                                  "point": p.to_json()})
    return Outcome(True, cases)


def chk_t_action(rng, field: str, n: int) -> Outcome:
    f = field_from_spec(field)
    T = geo.standard_iso(n, f)
    cases = 0
    for p in geo.sl_points(f, n):
        cases += 1
        if geo.coordinate_T_action(p) != geo.act(T, p) or geo.act(T, geo.act(T, p)) != p:
            return Outcome(False, cases, {"kind": "t-action", "point": p.to_json()})
    return Outcome(True, cases)


def chk_gtilde_random(rng, n: int, count: int) -> Outcome:
    T = geo.standard_iso(n)
    for case in range(count):
        x, y, z = (geo.random_gtilde(rng, n) for _ in range(3))
        p = geo.random_point(rng, n)
        xy = geo.gtilde_mul(x, y)
        problems = []
        if geo.gtilde_mul(xy, z) != geo.gtilde_mul(x, geo.gtilde_mul(y, z)):
            problems.append("assoc")
        if geo.chi(xy) != geo.chi(x) * geo.chi(y):
            problems.append("chi")
        if geo.act(xy, p) != geo.act(x, geo.act(y, p)):
            problems.append("action")
        if geo.gtilde_mul(x, geo.gtilde_inverse(x)) != geo.identity(n):
            problems.append("inverse")
        if geo.coordinate_T_action(p) != geo.act(T, p):
            problems.append("T-action")
        if problems:
            return Outcome(False, case + 1, {"kind": "gtilde-random", "x": x.to_json(), "y": y.to_json(),
                                             "z": z.to_json(), "point": p.to_json(), "failed": problems})
    return Outcome(True, count)


def chk_t_form(rng, max_r: int) -> Outcome:
    """The antidiagonal form is symmetric (T x T = Id) and fixes its Jordan block."""
    cases = 0
    for r in range(1, max_r + 1):
        cases += 1
        T = geo.antidiagonal_form(r)
        J = Matrix.jordan_block(r)
        zero = (Fraction(0),) * r
        if geo.gtilde_mul(T, T) != geo.identity(r) or geo.act(T, geo.PointX(J, zero, zero)).A != J:
            return Outcome(False, cases, {"kind": "t-form", "r": r})
    return Outcome(True, cases)


def chk_nu_random(rng, n: int, count: int) -> Outcome:
    for case in range(count):
        p = geo.random_point(rng, n)
        lam, mu = geo.random_rational(rng), geo.random_rational(rng)
        x = geo.random_gtilde(rng, n)
        problems = []
        if geo.nu(0, p) != p:
            problems.append("nu_0")
        q = geo.nu(lam, p)
        if q.A.trace():
            problems.append("trace")
        if geo.nu(mu, q) != geo.nu(lam + mu, p):
            problems.append("additive")
        if geo.nu(lam, geo.act(x, p)) != geo.act(x, q):
            problems.append("equivariant")
        if problems:
            return Outcome(False, case + 1, {"kind": "nu", "point": p.to_json(), "lambda": _fr(lam),
                                             "mu": _fr(mu), "x": x.to_json(), "failed": problems})
    return Outcome(True, count)


def chk_nu_finite(rng, field: str, n: int, count: int) -> Outcome:
    f = field_from_spec(field)
    pts = list(geo.sl_points(f, n))
    G = geo.gtilde_elements(f, n)
    els = list(f.elements())
    for case in range(count):
        p, x = rng.choice(pts), rng.choice(G)
        lam, mu = rng.choice(els), rng.choice(els)
        q = geo.nu(lam, p)
        if (geo.nu(f.zero, p) != p or q.A.trace() or geo.nu(mu, q) != geo.nu(lam + mu, p)
                or geo.nu(lam, geo.act(x, p)) != geo.act(x, q)):
            return Outcome(False, case + 1, {"kind": "nu", "point": p.to_json(), "lambda": scalar_to_json(lam),
                                             "mu": scalar_to_json(mu), "x": x.to_json()})
    return Outcome(True, count)


def chk_stabilizer(rng, field: str, n: int) -> Outcome:
    f = field_from_spec(field)
    lams = list(f.nonzero_elements())
    G = geo.gtilde_elements(f, n)
    small = geo.gtilde_elements(f, n - 1)
    cases = 0
    for lam in lams:
        stab = [x for x in G if geo.stabilizer_check_z0(x, lam)]
        cases += len(G)
        blocks = [geo.stabilizer_block(x, lam) for x in stab]
        if len(stab) != len(small) or len(set(blocks)) != len(stab):
            return Outcome(False, cases, {"kind": "stabilizer", "field": field, "n": n,
                                          "lambda": scalar_to_json(lam), "size": len(stab)})
        for x, bx in zip(stab, blocks):
            if geo.stabilizer_lift(bx, lam) != x:
                return Outcome(False, cases, {"kind": "stabilizer-lift", "x": x.to_json(),
                                              "lambda": scalar_to_json(lam)})
            for y, by in zip(stab[:8], blocks[:8]):
                if geo.stabilizer_block(geo.gtilde_mul(x, y), lam) != geo.gtilde_mul(bx, by):
                    return Outcome(False, cases, {"kind": "stabilizer-hom", "x": x.to_json(), "y": y.to_json(),
                                                  "lambda": scalar_to_json(lam)})
    return Outcome(True, cases, detail={"stabilizer_order": len(small)})


def chk_rho_z(rng, field: str, r: int) -> Outcome:
    f = field_from_spec(field)
    cases = 0
    for lam in f.nonzero_elements():
        for v in geo.vectors(f, r):
            for phi in geo.vectors(f, r):
                cases += 1
                v2, phi2 = geo.rho(lam, v, phi)
                from .linalg import pair

                if geo.in_Z(v, phi, r, f) != geo.in_Z(v2, phi2, r, f) or pair(phi, v) != pair(phi2, v2):
                    return Outcome(False, cases, {"kind": "rho", "v": _vec_json(v), "phi": _vec_json(phi),
                                                  "lambda": scalar_to_json(lam)})
    return Outcome(True, cases)


def chk_flags(rng, field: str, max_r: int) -> Outcome:
    f = field_from_spec(field)
    for r in range(1, max_r + 1):
        try:
            geo.flag_spaces(r, f)
        except ArithmeticError as exc:
            return Outcome(False, r, {"kind": "flags", "field": field, "r": r, "error": str(exc)})
    return Outcome(True, max_r)


def chk_slices(rng, n: int, count: int) -> Outcome:
    for case in range(count):
        m = n + 1
        B = geo.random_matrix(rng, m)
        t = B.trace()
        S = trace_slice(B)
        x = block_slice(S)
        if S.trace() or trace_unslice(S, t) != B or block_unslice(x, S[n, n]) != S:
            return Outcome(False, case + 1, {"kind": "slices", "B": B.to_json()})
    return Outcome(True, count)


# ---------------------------------------------------------------------------
# finite-level harmonic analysis


def _form(spec: str, p: int, d: int) -> hm.BilinearForm:
    return hm.BilinearForm.from_spec(spec, p, d)


def chk_fourier_reflect(rng, p: int, d: int, form: str, m: int, k: int) -> Outcome:
    B = _form(form, p, d)
    basis = hm.LevelledFunction.basis(p, d, hm.Level(m, k))
    ff, ref = _common(hm.fourier(hm.fourier(basis, B), B), hm.reflect(basis))
    if not ff.equals(ref):
        return Outcome(False, basis.batch_shape[0], {"kind": "fourier-reflect", "p": p, "d": d, "form": form,
                                                     "level": [m, k]})
    return Outcome(True, basis.batch_shape[0])


def _common(f: hm.LevelledFunction, g: hm.LevelledFunction):
    """Both functions embedded at the finest common level."""
    levels = tuple(hm.Level(max(a.m, b.m), max(a.k, b.k)) for a, b in zip(f.levels, g.levels))
    return hm.embed(f, levels), hm.embed(g, levels)


def _gram(f: hm.LevelledFunction):
    vol = Fraction(1, f.p ** sum(lv.k for lv in f.levels))
    nb = f.batch_shape[0]
    flat = f.values.reshape(nb, -1)
    g = (flat.reshape(nb, 1, -1) * flat.conj().reshape(1, nb, -1)).sum(axis=-1)
    return g.scaled(vol)


def chk_parseval(rng, p: int, d: int, form: str, m: int, k: int) -> Outcome:
    B = _form(form, p, d)
    basis = hm.LevelledFunction.basis(p, d, hm.Level(m, k))
    F = hm.fourier(basis, B)
    g0 = _gram(basis)
    g1 = _gram(F)  # F_B is unitary for the standard Haar measure
    nb = basis.batch_shape[0]
    if not g1.equals(g0):
        diff = np.argwhere(~(g1 - g0).is_zero_mask())[0]
        return Outcome(False, nb * nb, {"kind": "parseval", "p": p, "d": d, "form": form, "level": [m, k],
                                        "pair": [int(diff[0]), int(diff[1])]})
    return Outcome(True, nb * nb)


def chk_partial(rng, p: int, a: str, b: str, m: int, k: int) -> Outcome:
    B1 = _form(f"diag:{a}", p, 1)
    B2 = _form(f"diag:{b}", p, 1)
    B = B1.direct_sum(B2)
    basis = hm.LevelledFunction.basis(p, 2, hm.Level(m, k))
    full, split = _common(hm.fourier(basis, B), hm.partial_fourier(hm.partial_fourier(basis, B2, [1]), B1, [0]))
    if not full.equals(split):
        return Outcome(False, basis.batch_shape[0], {"kind": "partial-fourier", "p": p, "a": a, "b": b,
                                                     "level": [m, k]})
    return Outcome(True, basis.batch_shape[0])


def chk_homogeneity(rng, p: int, d: int, which: str, m: int, k: int) -> Outcome:
    lv = hm.Level(m, k)
    if which == "haar":
        xi, expected = hm.FiniteDistribution.haar(p, d, lv), Fraction(d)
    elif which == "delta":
        xi, expected = hm.FiniteDistribution.delta(p, d, lv), Fraction(0)
    elif which == "line":
        xi, expected = hm.FiniteDistribution.line_haar(p, lv, [1] * d, d), Fraction(1)
    else:
        raise ValueError(which)
    v = hm.abs_homogeneity_degree(xi)
    detail = {"degree": None if v.degree is None else _fr(v.degree), "expected": _fr(expected)}
    if not v.homogeneous or v.degree != expected:
        return Outcome(False, 1, {"kind": "homogeneity", "p": p, "d": d, "distribution": which,
                                  "level": [m, k], "verdict": v.to_json()}, detail)
    return Outcome(True, 1, detail=detail)


def chk_metaplectic(rng, p: int, m: int, k: int, member: str, expect: str, multiplier: str) -> Outcome:
    lv = hm.Level(m, k)
    B = hm.BilinearForm.hyperbolic(p)
    family = dict(wl.axis_haar_family(p, lv) if expect == "pass" else wl.rejected_family(p, lv))
    v = wl.metaplectic_test(family[member], B, multiplier=multiplier)
    detail = {"preconditions": v.preconditions, "reason": v.reason,
              "degree": None if v.degree is None else _fr(v.degree)}
    ok = v.ok and v.degree == 1 if expect == "pass" else not v.preconditions
    if not ok:
        return Outcome(False, 1, {"kind": "metaplectic", "p": p, "level": [m, k], "member": member,
                                  "expect": expect, "verdict": v.to_json()}, detail)
    return Outcome(True, 1, detail=detail)


def _words_json(word) -> list:
    return [[letter[0]] + [_fr(x) for x in letter[1:]] for letter in word]


def words_from_json(obj) -> tuple:
    return tuple((w[0],) + tuple(parse_rational(x) for x in w[1:]) for w in obj)


def chk_relation(rng, p: int, d: int, form: str, m: int, k: int, relation: str, t: str, multiplier: str) -> Outcome:
    B = _form(form, p, d)
    w1, w2 = wl.relation_words(relation, parse_rational(t))
    v = wl.projective_check(w1, w2, B, hm.Level(m, k), multiplier)
    nb = p ** (d * (m + k))
    detail = {"ratio": None if v.ratio is None else v.ratio.to_json()}
    if not v.ok:
        return Outcome(False, nb, {"kind": "projective", "p": p, "d": d, "form": form, "level": [m, k],
                                   "word1": _words_json(w1), "word2": _words_json(w2), "multiplier": multiplier,
                                   "basis_index": v.witness}, detail)
    return Outcome(True, nb, detail=detail)


def chk_sl2_decompose(rng, count: int) -> Outcome:
    for case in range(count):
        g = wl.random_sl2(rng)
        word = wl.sl2_decompose(g)
        if wl.word_matrix(word) != g or len(word) > 4:
            return Outcome(False, case + 1, {"kind": "sl2-decompose", "g": g.to_json()})
    return Outcome(True, count)


# ---------------------------------------------------------------------------
# registry


def _level(cfg: SuiteConfig, m: int, k: int) -> tuple[int, int]:
    return (m if cfg.m is None else cfg.m, k if cfg.k is None else cfg.k)


def _primes(cfg: SuiteConfig) -> tuple[int, ...]:
    return (2, 3) if cfg.p is None else (cfg.p,)


def build_qa_in_z(cfg):
    rs = (2, 3, 4) if cfg.n is None else (cfg.n,)
    return [CheckSpec(f"qa-in-z/{_fname(f)}/r{r}", chk_qa_in_z, {"field": _fname(f), "r": r})
            for f in _fields(cfg, "gf2,gf3") for r in rs]


def build_linalg(cfg):
    out = []
    n = cfg.n or 2
    for f in _fields(cfg, "gf2"):
        if f == QQ:
            raise ValueError("linalg-lemma enumerates a finite field")
        for i, A in enumerate(_nilpotent_matrices(f, n)):
            code = "".join(str(x.value) for x in A.flat())
            out.append(CheckSpec(f"linalg/{_fname(f)}/n{n}/A{code}", chk_linalg_matrix,
                                 {"field": _fname(f), "n": n, "index": i}))
    return out


def build_direct_sum(cfg):
    total = cfg.n or 4
    out = []
    for f in _fields(cfg, "gf2"):
        if f == QQ or f.m != 1:
            raise ValueError("direct-sum enumerates a prime field")
        for k in range(1, total):
            for l in range(1, total - k + 1):
                out.append(CheckSpec(f"direct-sum/{_fname(f)}/k{k}-l{l}", chk_direct_sum,
                                     {"field": _fname(f), "k": k, "l": l}))
        out.append(CheckSpec(f"direct-sum/{_fname(f)}/decider-agreement", chk_qa_table,
                             {"field": _fname(f), "n": 2}))
    return out


def build_trace(cfg):
    total = 1000 if cfg.samples is None else cfg.samples
    n = cfg.n or 5
    chunks = math.ceil(total / 100) if total else 0
    return [CheckSpec(f"trace-identity/chunk{c}", chk_trace_identity,
                      {"count": min(100, total - 100 * c), "max_n": n}) for c in range(chunks)]


def build_jc(cfg):
    total = 200 if cfg.samples is None else cfg.samples
    n = cfg.n or 5
    out = [CheckSpec(f"jordan-chevalley/decomposition{c}", chk_jordan_chevalley,
                     {"count": min(50, total - 50 * c), "max_n": n}) for c in range(math.ceil(total / 50))]
    eq = total // 2
    out += [CheckSpec(f"jordan-chevalley/equivariance{c}", chk_jc_equivariance,
                      {"count": min(50, eq - 50 * c), "max_n": n}) for c in range(math.ceil(eq / 50))]
    return out


def build_orbits(cfg):
    return [CheckSpec(f"orbit-dimension/n{n}", chk_orbit_dimension, {"n": n}) for n in range(1, (cfg.n or 5) + 1)]


def build_gtilde(cfg):
    count = 25 if cfg.samples is None else cfg.samples
    out = [
        CheckSpec("gtilde/gf2/n2/group", chk_gtilde_group, {"field": "gf2", "n": 2}),
        CheckSpec("gtilde/gf2/n2/action", chk_gtilde_action, {"field": "gf2", "n": 2}),
        CheckSpec("gtilde/gf2/n2/T-action", chk_t_action, {"field": "gf2", "n": 2}),
        CheckSpec("gtilde/gf3/n2/T-action", chk_t_action, {"field": "gf3", "n": 2}),
        CheckSpec("gtilde/Q/T-form", chk_t_form, {"max_r": 6}),
    ]
    out += [CheckSpec(f"gtilde/Q/n{n}/random", chk_gtilde_random, {"n": n, "count": count})
            for n in range(1, (cfg.n or 4) + 1)]
    return out


def build_nu(cfg):
    count = 30 if cfg.samples is None else cfg.samples
    out = [CheckSpec(f"nu/Q/n{n}/random", chk_nu_random, {"n": n, "count": count})
           for n in range(1, (cfg.n or 4) + 1)]
    out.append(CheckSpec("nu/gf3/n2/sampled", chk_nu_finite, {"field": "gf3", "n": 2, "count": 4 * count}))
    out.append(CheckSpec("nu/gf5/n2/sampled", chk_nu_finite, {"field": "gf5", "n": 2, "count": 4 * count}))
    return out


def build_fourier(cfg):
    m, k = _level(cfg, 1, 1)
    out = []
    for p in _primes(cfg):
        for d in ((1, 2) if cfg.d is None else (cfg.d,)):
            forms = [cfg.form] if cfg.form else (["diag:1"] if d == 1 else ["hyperbolic", f"diag:1,{p}"])
            for form in forms:
                kw = {"p": p, "d": d, "form": form, "m": m, "k": k}
                out.append(CheckSpec(f"fourier/p{p}/d{d}/{form}/FF-reflect", chk_fourier_reflect, kw))
                out.append(CheckSpec(f"fourier/p{p}/d{d}/{form}/parseval", chk_parseval, kw))
        for a, b in (("1", "1"), ("1", "-1"), ("1", str(p))):
            out.append(CheckSpec(f"fourier/p{p}/partial-diag{a},{b}", chk_partial,
                                 {"p": p, "a": a, "b": b, "m": m, "k": k}))
    return out


def build_homogeneity(cfg):
    m, k = _level(cfg, 2, 2)
    out = []
    for p in _primes(cfg):
        for d in ((1, 2) if cfg.d is None else (cfg.d,)):
            for which in ("haar", "delta") + (("line",) if d == 2 else ()):
                out.append(CheckSpec(f"homogeneity/p{p}/d{d}/{which}", chk_homogeneity,
                                     {"p": p, "d": d, "which": which, "m": m, "k": k}))
    return out


def build_metaplectic(cfg):
    m, k = _level(cfg, 2, 2)
    mult = cfg.multiplier or "literal"
    out = []
    for p in _primes(cfg):
        lv = hm.Level(m, k)
        for name, _ in wl.axis_haar_family(p, lv):
            out.append(CheckSpec(f"metaplectic/p{p}/accept/{name}", chk_metaplectic,
                                 {"p": p, "m": m, "k": k, "member": name, "expect": "pass", "multiplier": mult}))
        for name, _ in wl.rejected_family(p, lv):
            out.append(CheckSpec(f"metaplectic/p{p}/reject/{name}", chk_metaplectic,
                                 {"p": p, "m": m, "k": k, "member": name, "expect": "reject", "multiplier": mult}))
    return out


def build_weil(cfg):
    m, k = _level(cfg, 1, 1)
    d = cfg.d or 2
    form = cfg.form or "hyperbolic"
    mult = cfg.multiplier or "literal"
    out = []
    for p in _primes(cfg):
        base = {"p": p, "d": d, "form": form, "m": m, "k": k}
        for t in ("1", "-1", "2"):
            out.append(CheckSpec(f"weil/p{p}/conj-unipotent/t={t}", chk_relation,
                                 dict(base, relation="conj-unipotent", t=t, multiplier=mult)))
        out.append(CheckSpec(f"weil/p{p}/j4", chk_relation, dict(base, relation="j4", t="1", multiplier=mult)))
        for t in ("1", "-1"):
            out.append(CheckSpec(f"weil/p{p}/nbar-add/t={t}", chk_relation,
                                 dict(base, relation="nbar-add", t=t, multiplier=mult)))
        out.append(CheckSpec(f"weil/p{p}/braid[half]", chk_relation,
                             dict(base, relation="braid", t="1", multiplier="half")))
    out.append(CheckSpec("weil/sl2-decompose", chk_sl2_decompose, {"count": 100}))
    return out


def build_orthocomplement(cfg):
    rs = (2, 3, 4) if cfg.n is None else (cfg.n,)
    return [CheckSpec(f"orthocomplement/{_fname(f)}/r{r}", chk_orthocomplement, {"field": _fname(f), "r": r})
            for f in _fields(cfg, "Q,gf2,gf3") for r in rs]


def build_raqa(cfg):
    samples = cfg.lambda_samples
    out = []
    count = 200 if cfg.samples is None else cfg.samples
    for f in _fields(cfg, "gf2,gf3,Q"):
        ns = (cfg.n,) if cfg.n else (2, 3)
        for n in ns:
            if f == QQ:
                out.append(CheckSpec(f"raqa/Q/n{n}/random", chk_raqa_random,
                                     {"n": n, "count": count, "samples": samples}))
            else:
                out.append(CheckSpec(f"raqa/{_fname(f)}/n{n}/exhaustive", chk_raqa_exhaustive,
                                     {"field": _fname(f), "n": n, "samples": samples}))
    return out


def build_tangent(cfg):
    samples = cfg.lambda_samples
    out = []
    count = 200 if cfg.samples is None else cfg.samples
    for f in _fields(cfg, "gf2,gf3,Q"):
        ns = (cfg.n,) if cfg.n else (2, 3)
        for n in ns:
            if f == QQ:
                out.append(CheckSpec(f"tangent/Q/n{n}/random", chk_tangent_random,
                                     {"n": n, "count": count, "samples": samples}))
            else:
                out.append(CheckSpec(f"tangent/{_fname(f)}/n{n}/exhaustive", chk_tangent_exhaustive,
                                     {"field": _fname(f), "n": n, "samples": samples}))
    return out


def build_geometry_extras(cfg):
    return [
        CheckSpec("extras/flags/Q", chk_flags, {"field": "Q", "max_r": 6}),
        CheckSpec("extras/flags/gf2", chk_flags, {"field": "gf2", "max_r": 6}),
        CheckSpec("extras/flags/gf3", chk_flags, {"field": "gf3", "max_r": 6}),
        CheckSpec("extras/rho-preserves-Z/gf3/r2", chk_rho_z, {"field": "gf3", "r": 2}),
        CheckSpec("extras/stabilizer-z0/gf2/n3", chk_stabilizer, {"field": "gf2", "n": 3}),
        CheckSpec("extras/stabilizer-z0/gf3/n2", chk_stabilizer, {"field": "gf3", "n": 2}),
        CheckSpec("extras/slices/Q", chk_slices, {"n": cfg.n or 3, "count": 50}),
    ]


ACCEPTANCE = (
    ("qa-in-z", build_qa_in_z),
    ("direct-sum", build_direct_sum),
    ("trace-identity", build_trace),
    ("jordan-chevalley", build_jc),
    ("orbit-dimension", build_orbits),
    ("gtilde-axioms", build_gtilde),
    ("nu-laws", build_nu),
    ("fourier", build_fourier),
    ("homogeneity", build_homogeneity),
    ("metaplectic", build_metaplectic),
    ("weil-relations", build_weil),
    ("orthocomplement", build_orthocomplement),
)


def build_acceptance(cfg):
    # every criterion at its own defaults
    out = []
    for name, builder in ACCEPTANCE:
        out += builder(SuiteConfig(name, seed=cfg.seed))
    return out


SUITES: dict[str, Callable[[SuiteConfig], list[CheckSpec]]] = dict(ACCEPTANCE)
SUITES.update({
    "linalg-lemma": build_linalg,
    "raqa": build_raqa,
    "tangent": build_tangent,
    "geometry-extras": build_geometry_extras,
    "acceptance": build_acceptance,
})

# `sets --lemma` names
LEMMA_SUITES = {"linalg": "linalg-lemma", "qdirectsum": "direct-sum", "raqa": "raqa", "tangent": "tangent"}


def list_checks(cfg: SuiteConfig) -> list[CheckSpec]:
    cfg.validate()
    return SUITES[cfg.suite](cfg)


# ---------------------------------------------------------------------------
# running


def check_seed(seed: int, index: int) -> int:
    return seed ^ index


def _execute(spec: CheckSpec, seed: int) -> CheckResult:
    rng = random.Random(seed)
    t0 = time.perf_counter()
    out = spec.fn(rng, **spec.kwargs)
    ms = (time.perf_counter() - t0) * 1000
    status = "skipped" if out.ok is None else ("pass" if out.ok else "fail")
    return CheckResult(spec.check_id, status, out.witness, ms, out.cases, out.detail)


def _worker(args) -> CheckResult:
    cfg_json, index = args
    cfg = SuiteConfig.from_json(cfg_json)
    specs = SUITES[cfg.suite](cfg)
    return _execute(specs[index], check_seed(cfg.seed, index))


def worker_count(requested: int | None = None) -> int:
    n = requested if requested is not None else (os.cpu_count() or 1)
    env = os.environ.get("VERIFY_WORKERS")
    if env:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ValueError(f"VERIFY_WORKERS must be an integer, got {env!r}") from exc
        if cap < 1:
            raise ValueError("VERIFY_WORKERS must be at least 1")
        n = min(n, cap)
    return max(1, n)


@dataclass
class Report:
    suite: str
    config: dict
    results: list[CheckResult]
    total_ms: float = 0.0

    @property
    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for r in self.results:
            out[r.status] += 1
        out["cases"] = sum(r.cases for r in self.results)
        return out

    @property
    def exit_code(self) -> int:
        return 0 if self.summary["fail"] == 0 else 1

    def body(self) -> dict:
        return {"suite": self.suite, "config": self.config,
                "results": [r.body() for r in self.results], "summary": self.summary}

    def body_bytes(self) -> bytes:
        return json.dumps(self.body(), sort_keys=True, indent=2).encode()

    def to_json(self) -> dict:
        # timings vary between runs, so they live outside the body
        out = self.body()
        out["timing"] = {"total_ms": round(self.total_ms, 3),
                         "checks_ms": {r.check_id: round(r.runtime_ms, 3) for r in self.results}}
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Report":
        timing = obj.get("timing", {}).get("checks_ms", {})
        results = [CheckResult(r["id"], r["status"], r.get("witness"), timing.get(r["id"], 0.0),
                               r.get("cases", 0), r.get("detail", {})) for r in obj["results"]]
        rep = cls(obj["suite"], obj.get("config", {}), results, obj.get("timing", {}).get("total_ms", 0.0))
        if rep.summary != obj.get("summary", rep.summary):
            raise ValueError("report summary does not match its results")
        return rep


def emit_report(report: Report, path: str | None = None, markdown: str | None = None) -> dict:
    obj = report.to_json()
    if path:
        with open(path, "w") as fh:
            json.dump(obj, fh, sort_keys=True, indent=2)
            fh.write("\n")
    if markdown:
        from .report import render_markdown

        with open(markdown, "w") as fh:
            fh.write(render_markdown(report))
    return obj


def run_suite(cfg: SuiteConfig, workers: int | None = None) -> Report:
    specs = list_checks(cfg)
    nw = min(worker_count(workers), max(1, len(specs)))
    t0 = time.perf_counter()
    if nw == 1 or len(specs) <= 1:
        results = [_execute(s, check_seed(cfg.seed, i)) for i, s in enumerate(specs)]
    else:
        cj = cfg.body()
        with ProcessPoolExecutor(max_workers=nw) as ex:
            # map keeps submission order, so aggregation is by check index
            results = list(ex.map(_worker, [(cj, i) for i in range(len(specs))]))
    return Report(cfg.suite, cfg.body(), results, (time.perf_counter() - t0) * 1000)


# ---------------------------------------------------------------------------
# replaying witnesses


def replay_witness(w: dict) -> bool:
    """True iff the counterexample recorded in a witness still fails."""
    kind = w["kind"]
    if kind in ("qa-not-in-z",):
        f = field_from_spec(w["field"])
        v, phi = tuple(f(x) for x in w["v"]), tuple(f(x) for x in w["phi"])
        r = w["r"]
        return geo.in_QA(Matrix.jordan_block(r, f), v, phi) and not (geo.in_Y(v, phi) and geo.in_Z(v, phi, r, f))
    if kind == "qa-containment":
        A = Matrix.from_json(w["A"])
        f = A.field
        v, phi = tuple(f(x) for x in w["v"]), tuple(f(x) for x in w["phi"])
        bad_z = w["jordan_block"] and not geo.in_Z(v, phi, A.n, f)
        return geo.in_QA(A, v, phi) and (not geo.in_Y(v, phi) or bad_z)
    if kind == "direct-sum":
        A1, A2 = Matrix.from_json(w["A1"]), Matrix.from_json(w["A2"])
        f = A1.field
        v, phi = tuple(f(x) for x in w["v"]), tuple(f(x) for x in w["phi"])
        (v1, v2), (p1, p2) = block_split(v, A1.n), block_split(phi, A1.n)
        return geo.in_QA(direct_sum(A1, A2), v, phi) and not (geo.in_QA(A1, v1, p1) and geo.in_QA(A2, v2, p2))
    if kind == "projective":
        B = _form(w["form"], w["p"], w["d"])
        v = wl.projective_check(words_from_json(w["word1"]), words_from_json(w["word2"]), B,
                                hm.Level(*w["level"]), w["multiplier"])
        return not v.ok
    if kind == "trace":
        A, B = Matrix.from_json(w["A"]), Matrix.from_json(w["B"])
        P = A ** w["i"]
        return bool((P @ commutator(A, B)).trace() or commutator(A, P @ B).trace())
    if kind == "jc":
        A = Matrix.from_json(w["A"])
        jc = jordan_chevalley(A)
        S, N = jc.semisimple, jc.nilpotent
        return not (S + N == A and commutator(S, N).is_zero() and (N ** A.n).is_zero()
                    and is_squarefree(minimal_polynomial(S)))
    if kind == "homogeneity":
        return not chk_homogeneity(None, w["p"], w["d"], w["distribution"], *w["level"]).ok
    if kind == "metaplectic":
        out = chk_metaplectic(None, w["p"], w["level"][0], w["level"][1], w["member"], w["expect"], "literal")
        return not out.ok
    raise ValueError(f"no replay for witness kind {kind!r}")

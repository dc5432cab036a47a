"""Exact Pascal-matrix data: the characteristic polynomial and D(L, theta).

D(L, theta) = exp(-i theta L/2) det(B + exp(i theta) I), where B is the
symmetric Pascal matrix.  With c'_k the coefficients of det(B + z I) the
palindromic symmetry c'_k = c'_{L-k} turns D into a finite cosine series,
and from there into a polynomial in u = 2 cos(theta):

    even L:  D = P(u)
    odd L:   D = 2 cos(theta/2) P(u)

with integer P.  Everything downstream is evaluated from that
representation, so realness and evenness in theta hold by construction.
"""

from __future__ import annotations

import hashlib
import math
import os
import re
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Optional, Sequence

import mpmath
from mpmath import mpf

from .mpnum import PrecisionContext, PrecisionError

__all__ = [
    "ExactMatrix",
    "CharPolyRecord",
    "ThetaValue",
    "Sqrt3Multiple",
    "pascal_matrix",
    "bareiss_det",
    "char_poly",
    "shifted_coeffs",
    "cosine_coeffs",
    "chebyshev_poly",
    "phi_cosine_coeffs",
    "eval_D",
    "eval_D_derivatives",
    "eval_D_exact_special",
    "det_shifted",
    "path_counts",
    "path_weight_oracle",
    "CacheError",
    "CacheMissError",
    "CacheInvariantError",
    "CacheChecksumError",
    "cache_store",
    "cache_load",
    "get_char_poly",
    "MAX_DERIVATIVE_ORDER",
]

MAX_DERIVATIVE_ORDER = 8
MAX_ORACLE_L = 5


@dataclass(frozen=True)
class ExactMatrix:
    n: int
    entries: tuple

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def rows(self):
        return [list(r) for r in self.entries]


@dataclass(frozen=True)
class CharPolyRecord:
    """Coefficients of det(B - x I) = sum_k coeffs[k] x^k."""

    L: int
    coeffs: tuple

    def check(self) -> list:
        """Return the list of violated invariants (empty when valid)."""
        problems = []
        L, c = self.L, self.coeffs
        if len(c) != L + 1:
            problems.append(f"expected {L + 1} coefficients, found {len(c)}")
            return problems
        if c[0] != 1:
            problems.append(f"c_0 = {c[0]}, expected 1")
        if c[L] != (-1) ** L:
            problems.append(f"c_L = {c[L]}, expected {(-1) ** L}")
        sign = (-1) ** L
        bad = [j for j in range(L + 1) if c[L - j] != sign * c[j]]
        if bad:
            problems.append(f"symmetry c_(L-j) = (-1)^L c_j fails at j={bad[:5]}")
        return problems


@dataclass(frozen=True)
class ThetaValue:
    """theta = (p/q) pi, or a free real ``real`` in radians when given."""

    p: int = 0
    q: int = 1
    real: Optional[object] = None

    def __post_init__(self):
        if self.real is None:
            if self.q <= 0:
                raise ValueError("q must be positive")
            if math.gcd(abs(self.p), self.q) != 1:
                g = math.gcd(abs(self.p), self.q)
                object.__setattr__(self, "p", self.p // g)
                object.__setattr__(self, "q", self.q // g)

    @classmethod
    def pi_multiple(cls, frac) -> "ThetaValue":
        frac = Fraction(frac)
        return cls(frac.numerator, frac.denominator)

    @classmethod
    def parse(cls, text: str) -> "ThetaValue":
        """'P/Q' means (P/Q) pi; a bare integer N means N pi; decimals are radians."""
        text = text.strip()
        if re.fullmatch(r"[+-]?\d+/\d+", text):
            p, q = text.split("/")
            return cls(int(p), int(q))
        if re.fullmatch(r"[+-]?\d+", text):
            return cls(int(text), 1)
        mpf(text)  # validates the literal
        # keep the text so it is rounded at whatever precision is in force later
        return cls(real=text)

    @property
    def is_rational(self) -> bool:
        return self.real is None

    @property
    def over_pi(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("theta is not a rational multiple of pi")
        return Fraction(self.p, self.q)

    def value(self, ctx: PrecisionContext) -> mpf:
        with ctx.work():
            if self.is_rational:
                return mpf(self.p) * mpmath.pi / self.q
            return mpf(self.real)

    def cos_multiple(self, j, phase_quarter: int = 0) -> mpf:
        """cos(j theta + phase_quarter pi/2) at the current mpmath precision.

        For rational theta the argument is reduced exactly first, so the
        result is reproducible bit for bit.
        """
        if self.is_rational:
            t = Fraction(j) * Fraction(self.p, self.q) + Fraction(phase_quarter, 2)
            t = t - 2 * math.floor(t / 2)
            if t > 1:
                t = 2 - t
            return mpmath.cospi(mpf(t.numerator) / t.denominator)
        j = Fraction(j)
        arg = mpf(j.numerator) * mpf(self.real) / j.denominator
        return mpmath.cos(arg + phase_quarter * mpmath.pi / 2)

    def negated(self) -> "ThetaValue":
        if self.is_rational:
            return ThetaValue(-self.p, self.q)
        if isinstance(self.real, str):
            return ThetaValue(real=self.real[1:] if self.real.startswith("-") else "-" + self.real.lstrip("+"))
        return ThetaValue(real=-mpf(self.real))

    def canonical(self) -> str:
        if self.is_rational:
            return f"{self.p}/{self.q}"
        if isinstance(self.real, str):
            return self.real
        return mpmath.nstr(mpf(self.real), 30)


def _is_negative(theta: ThetaValue) -> bool:
    return theta.p < 0 if theta.is_rational else mpf(theta.real) < 0


def _nonneg(theta: ThetaValue) -> ThetaValue:
    # D is even in theta; folding the sign keeps that exact in floating point
    return theta.negated() if _is_negative(theta) else theta


def _as_theta(theta) -> ThetaValue:
    if isinstance(theta, ThetaValue):
        return theta
    if isinstance(theta, (Fraction, int)):
        return ThetaValue.pi_multiple(theta)
    if isinstance(theta, str):
        return ThetaValue.parse(theta)
    return ThetaValue(real=mpf(theta))


@dataclass(frozen=True)
class Sqrt3Multiple:
    """The exact number coeff * sqrt(3)**sqrt3_power (power 0 or 1)."""

    coeff: Fraction
    sqrt3_power: int = 0

    def to_mpf(self, ctx: PrecisionContext) -> mpf:
        with ctx.work():
            v = mpf(self.coeff.numerator) / self.coeff.denominator
            if self.sqrt3_power:
                v *= mpmath.sqrt(3)
            return v


def _check_size(L: int):
    if not isinstance(L, int) or L < 1:
        raise ValueError(f"matrix size must be a positive integer, got {L!r}")


def pascal_matrix(L: int) -> ExactMatrix:
    """Entries binomial(r+s-2, r-1) for 1 <= r, s <= L."""
    _check_size(L)
    return ExactMatrix(L, tuple(tuple(math.comb(r + s, r) for s in range(L))
                                for r in range(L)))


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination; exact for integer matrices."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[-1][-1]


def _interpolate(values: Sequence[int]) -> list:
    """Monomial coefficients of the degree-n polynomial through (x, values[x])."""
    n = len(values) - 1
    # Newton forward differences are integers for integer data
    diffs = []
    row = list(values)
    for _ in range(n + 1):
        diffs.append(row[0])
        row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
    # p(x) = sum_k diffs[k] * C(x, k); expand falling factorials
    coeffs = [Fraction(0)] * (n + 1)
    falling = [Fraction(1)]  # coefficients of x(x-1)...(x-k+1)
    fact = 1
    for k in range(n + 1):
        if k:
            fact *= k
            nxt = [Fraction(0)] * (len(falling) + 1)
            for i, c in enumerate(falling):
                nxt[i + 1] += c
                nxt[i] -= (k - 1) * c
            falling = nxt
        for i, c in enumerate(falling):
            coeffs[i] += diffs[k] * c / fact
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise ArithmeticError("interpolated characteristic polynomial is not integral")
        out.append(int(c))
    return out


@lru_cache(maxsize=256)
def char_poly(L: int) -> CharPolyRecord:
    """Exact coefficients of det(B - x I) for the L x L Pascal matrix.

    det(B - x I) is evaluated by Bareiss elimination at x = 0..L and the
    polynomial recovered by interpolation.
    """
    _check_size(L)
    b = pascal_matrix(L).rows()
    values = []
    for x in range(L + 1):
        m = [row[:] for row in b]
        for i in range(L):
            m[i][i] -= x
        values.append(bareiss_det(m))
    record = CharPolyRecord(L, tuple(_interpolate(values)))
    problems = record.check()
    if problems:
        raise ArithmeticError(f"char_poly({L}) failed invariants: {problems}")
    return record


def shifted_coeffs(record: CharPolyRecord) -> tuple:
    """Coefficients of det(B + z I): c'_k = (-1)^k c_k."""
    return tuple((-1) ** k * c for k, c in enumerate(record.coeffs))


def cosine_coeffs(record: CharPolyRecord):
    """D(L, theta) = sum a_j cos(j theta) as a list of (j, a_j), j >= 0.

    j runs over integers for even L and half-integers for odd L.
    """
    L = record.L
    cp = shifted_coeffs(record)
    out = []
    if L % 2 == 0:
        h = L // 2
        out.append((Fraction(0), cp[h]))
        for j in range(1, h + 1):
            out.append((Fraction(j), 2 * cp[h + j]))
    else:
        h = (L + 1) // 2
        for m in range(h):
            out.append((Fraction(2 * m + 1, 2), 2 * cp[h + m]))
    return out


def _lucas_polys(n: int, odd: bool) -> list:
    # even: V_j(u) = 2cos(j t), V_0 = 2, V_1 = u
    # odd:  W_m(u) = cos((m+1/2) t)/cos(t/2), W_0 = 1, W_1 = u - 1
    if odd:
        polys = [[1], [-1, 1]]
    else:
        polys = [[2], [0, 1]]
    while len(polys) <= n:
        a, b = polys[-1], polys[-2]
        nxt = [0] + a
        for i, c in enumerate(b):
            nxt[i] -= c
        polys.append(nxt)
    return polys[: n + 1]


@lru_cache(maxsize=256)
def _chebyshev(L: int) -> tuple:
    record = char_poly(L)
    cp = shifted_coeffs(record)
    if L % 2 == 0:
        h = L // 2
        polys = _lucas_polys(h, odd=False)
        out = [0] * (h + 1)
        out[0] += cp[h]
        for j in range(1, h + 1):
            for i, c in enumerate(polys[j]):
                out[i] += cp[h + j] * c
    else:
        h = (L + 1) // 2
        polys = _lucas_polys(h - 1, odd=True)
        out = [0] * h
        for m in range(h):
            for i, c in enumerate(polys[m]):
                out[i] += cp[h + m] * c
    return tuple(out)


def chebyshev_poly(L: int) -> tuple:
    """Integer coefficients of P with D = P(2cos t) (even L) or 2cos(t/2) P(2cos t) (odd L)."""
    _check_size(L)
    return _chebyshev(L)


@lru_cache(maxsize=256)
def phi_cosine_coeffs(L: int) -> tuple:
    """P(2cos t) written as sum_j b_j cos(j t) with integer j and b_j.

    This is A_HT(L)^2 phi(L, t) for both parities.
    """
    poly = chebyshev_poly(L)
    deg = len(poly) - 1
    # (2cos t)^m = sum_i C(m,i) cos((m-2i) t)
    acc = [0] * (deg + 1)
    for m, c in enumerate(poly):
        if not c:
            continue
        for i in range(m + 1):
            acc[abs(m - 2 * i)] += c * math.comb(m, i)
    return tuple((j, b) for j, b in enumerate(acc) if b)


def _cos_sum(terms, theta: ThetaValue, order: int, dps: int) -> tuple:
    """(value, sum of |terms|) of d^order/dt^order sum a_j cos(j t)."""
    with mpmath.workdps(dps):
        total = mpf(0)
        mag = mpf(0)
        for j, a in terms:
            if not a:
                continue
            jm = mpf(j.numerator) / j.denominator if isinstance(j, Fraction) else mpf(j)
            t = a * jm ** order * theta.cos_multiple(j, order)
            total += t
            mag += abs(t)
        return total, mag


def _eval_cos_series(terms, theta: ThetaValue, order: int, ctx: PrecisionContext) -> mpf:
    dps = ctx.dps
    val, mag = _cos_sum(terms, theta, order, dps)
    for _ in range(4):
        if mag == 0:
            break
        if val == 0:
            loss = dps
        else:
            with mpmath.workdps(dps):
                loss = max(0, int(mpmath.ceil(mpmath.log10(mag / abs(val)))))
        if dps - loss >= ctx.digits + ctx.guard // 2:
            break
        if val == 0 and dps > 2 * ctx.dps:
            break  # vanishes to twice the working precision: treat as zero
        dps = max(dps + ctx.guard, ctx.dps + loss + ctx.guard)
        val, mag = _cos_sum(terms, theta, order, dps)
    else:
        raise PrecisionError(
            f"cancellation of {loss} digits exceeds what {ctx.digits} digits can resolve")
    with ctx.work():
        return +val


def _exact_zero(L: int, theta: ThetaValue, order: int) -> bool:
    # odd L at theta = pi: D has the factor 2cos(theta/2)
    return (order == 0 and L % 2 == 1 and theta.is_rational
            and theta.q == 1 and theta.p % 2 == 1)


def eval_D(L: int, theta, ctx: PrecisionContext, record: Optional[CharPolyRecord] = None) -> mpf:
    """D(L, theta) to ``ctx.digits`` digits."""
    theta = _nonneg(_as_theta(theta))
    record = record or char_poly(L)
    if _exact_zero(record.L, theta, 0):
        with ctx.work():
            return mpf(0)
    return _eval_cos_series(cosine_coeffs(record), theta, 0, ctx)


def eval_D_derivatives(L: int, theta, max_order: int, ctx: PrecisionContext,
                       record: Optional[CharPolyRecord] = None) -> list:
    """[D, D', ..., D^(max_order)] in theta, by termwise differentiation."""
    if not 0 <= max_order <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"max_order must be in 0..{MAX_DERIVATIVE_ORDER}")
    theta = _as_theta(theta)
    flip = _is_negative(theta)
    if flip:
        theta = theta.negated()
    record = record or char_poly(L)
    terms = cosine_coeffs(record)
    out = []
    for r in range(max_order + 1):
        if _exact_zero(record.L, theta, r):
            with ctx.work():
                out.append(mpf(0))
            continue
        v = _eval_cos_series(terms, theta, r, ctx)
        out.append(-v if flip and r % 2 else v)
    return out


def eval_D_exact_special(L: int, p: int, record: Optional[CharPolyRecord] = None) -> Sqrt3Multiple:
    """D(L, p pi/3) as an exact number, from the integer Chebyshev form."""
    if p not in (0, 1, 2, 3):
        raise ValueError("p must be in {0, 1, 2, 3}")
    poly = chebyshev_poly(L) if record is None else _chebyshev(record.L)
    u = {0: 2, 1: 1, 2: -1, 3: -2}[p]
    val = sum(c * u ** i for i, c in enumerate(poly))
    if L % 2 == 0:
        return Sqrt3Multiple(Fraction(val))
    # 2cos(p pi/6) = 2, sqrt3, 1, 0
    if p == 0:
        return Sqrt3Multiple(Fraction(2 * val))
    if p == 1:
        return Sqrt3Multiple(Fraction(val), 1)
    if p == 2:
        return Sqrt3Multiple(Fraction(val))
    return Sqrt3Multiple(Fraction(0))


def det_shifted(L: int, theta, ctx: PrecisionContext,
                record: Optional[CharPolyRecord] = None) -> mpmath.mpc:
    """det(B + exp(i theta) I) as a complex number, without the cosine rewrite."""
    theta = _as_theta(theta)
    record = record or char_poly(L)
    with mpmath.workdps(ctx.dps + 10):
        total = mpmath.mpc(0)
        for k, c in enumerate(shifted_coeffs(record)):
            total += c * mpmath.mpc(theta.cos_multiple(k), theta.cos_multiple(k, -1))
    with ctx.work():
        return +total


# --------------------------------------------------------------------------
# lattice-path oracle

def _paths(k: int) -> list:
    """All right/down paths from (0, k) to (k, 0) as frozensets of vertices."""
    out = []

    def walk(x, y, seen):
        if x == k and y == 0:
            out.append(frozenset(seen))
            return
        if x < k:
            walk(x + 1, y, seen + [(x + 1, y)])
        if y > 0:
            walk(x, y - 1, seen + [(x, y - 1)])

    walk(0, k, [(0, k)])
    return out


@lru_cache(maxsize=None)
def path_counts(L: int) -> tuple:
    """N_s = number of nonintersecting families with s paths, s = 0..L."""
    if L < 1 or L > MAX_ORACLE_L:
        raise ValueError(f"path enumeration is limited to 1 <= L <= {MAX_ORACLE_L}")
    paths = {k: _paths(k) for k in range(L)}
    counts = [0] * (L + 1)

    def extend(starts, i, used):
        if i == len(starts):
            counts[len(starts)] += 1
            return
        for path in paths[starts[i]]:
            if used.isdisjoint(path):
                extend(starts, i + 1, used | path)

    for s in range(L + 1):
        for starts in combinations(range(L), s):
            extend(starts, 0, frozenset())
    return tuple(counts)


def path_weight_oracle(L: int, theta, ctx: PrecisionContext) -> mpmath.mpc:
    """sum over path families of exp(i theta (L - s)), by enumeration."""
    theta = _as_theta(theta)
    counts = path_counts(L)
    with mpmath.workdps(ctx.dps + 10):
        total = mpmath.mpc(0)
        for s, n in enumerate(counts):
            k = L - s
            total += n * mpmath.mpc(theta.cos_multiple(k), theta.cos_multiple(k, -1))
    with ctx.work():
        return +total


# --------------------------------------------------------------------------
# on-disk cache

class CacheError(Exception):
    pass


class CacheMissError(CacheError, KeyError):
    pass


class CacheInvariantError(CacheError):
    pass


class CacheChecksumError(CacheInvariantError):
    pass


_HEADER = "pascal-charpoly v1 L={L}"


def _cache_path(cache_dir, L: int) -> Path:
    return Path(cache_dir) / f"charpoly_L{L}.txt"


def _render(record: CharPolyRecord) -> str:
    body = _HEADER.format(L=record.L) + "\n" + "".join(f"{c}\n" for c in record.coeffs)
    digest = hashlib.sha256(body.encode("ascii")).hexdigest()
    return body + f"sha256={digest}\n"


def cache_store(record: CharPolyRecord, cache_dir) -> Path:
    """Write ``record`` atomically (temp file + rename)."""
    problems = record.check()
    if problems:
        raise CacheInvariantError(f"refusing to store invalid record: {problems}")
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = _cache_path(cache_dir, record.L)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, prefix=f".charpoly_L{record.L}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(_render(record))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def cache_load(L: int, cache_dir) -> CharPolyRecord:
    path = _cache_path(cache_dir, L)
    if not path.exists():
        raise CacheMissError(f"no cache entry for L={L} in {cache_dir}")
    text = path.read_text(encoding="ascii")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != L + 3:
        raise CacheInvariantError(f"{path}: expected {L + 3} lines, found {len(lines)}")
    body = "".join(line + "\n" for line in lines[:-1])
    m = re.fullmatch(r"sha256=([0-9a-f]{64})", lines[-1])
    if not m:
        raise CacheInvariantError(f"{path}: malformed checksum line")
    if hashlib.sha256(body.encode("ascii")).hexdigest() != m.group(1):
        raise CacheChecksumError(f"{path}: checksum mismatch")
    if lines[0] != _HEADER.format(L=L):
        raise CacheInvariantError(f"{path}: bad header {lines[0]!r}")
    try:
        coeffs = tuple(int(s) for s in lines[1:-1])
    except ValueError as exc:
        raise CacheInvariantError(f"{path}: non-integer coefficient") from exc
    record = CharPolyRecord(L, coeffs)
    problems = record.check()
    if problems:
        raise CacheInvariantError(f"{path}: {problems}")
    return record


def get_char_poly(L: int, cache_dir=None) -> CharPolyRecord:
    """Load from ``cache_dir`` when present, else compute (and store)."""
    if cache_dir is None:
        return char_poly(L)
    try:
        return cache_load(L, cache_dir)
    except CacheMissError:
        record = char_poly(L)
        cache_store(record, cache_dir)
        return record

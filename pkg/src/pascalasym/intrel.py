"""Exact-integer LLL reduction and integer-relation search.

Relations are found by embedding scaled floors of the constants into a
lattice (one extra coordinate per linear functional) and looking for a
short reduced vector whose tail coordinates are small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import mpmath
from mpmath import mpf

__all__ = [
    "LatticeBasis",
    "LLLResult",
    "lll_reduce",
    "RelationCandidate",
    "Rejection",
    "InsufficientPrecision",
    "find_relation",
    "find_function_relation",
]

TAIL_BOUND = 10 ** 3


class InsufficientPrecision(ValueError):
    """Too few digits to decide on a relation of the requested size."""


def _rank(rows) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][c]:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class LatticeBasis:
    rows: tuple

    def __init__(self, rows):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if not rows:
            raise ValueError("empty basis")
        d = len(rows[0])
        if any(len(r) != d for r in rows):
            raise ValueError("rows must share one dimension")
        if len(rows) > d:
            raise ValueError("more rows than the ambient dimension")
        if _rank(rows) != len(rows):
            raise ValueError("basis rows are linearly dependent")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        return len(self.rows[0])

    def norms_sq(self) -> list:
        return [sum(x * x for x in r) for r in self.rows]


@dataclass(frozen=True)
class LLLResult:
    basis: LatticeBasis
    transform: tuple      # U with U * input = output, |det U| = 1
    swaps: int


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def lll_reduce(basis: LatticeBasis, delta: Fraction = Fraction(3, 4)) -> LLLResult:
    """Integral LLL (Cohen, Algorithm 2.6.7) with a tracked transform."""
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise ValueError("delta must lie in (1/4, 1]")
    b = [list(r) for r in basis.rows]
    n = len(b)
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    d = [0] * (n + 1)
    lam = [[0] * n for _ in range(n)]
    d[0] = 1
    num, den = delta.numerator, delta.denominator
    swaps = 0

    def add_row(k, l, q):
        b[k] = [x - q * y for x, y in zip(b[k], b[l])]
        u[k] = [x - q * y for x, y in zip(u[k], u[l])]

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            add_row(k, l, q)
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def incgs(k):
        for j in range(k + 1):
            t = _dot(b[k], b[j])
            for i in range(j):
                t = (d[i + 1] * t - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = t
            else:
                d[k + 1] = t

    def swap(k):
        b[k], b[k - 1] = b[k - 1], b[k]
        u[k], u[k - 1] = u[k - 1], u[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lk = lam[k][k - 1]
        new_d = (d[k - 1] * d[k + 1] + lk * lk) // d[k]
        for i in range(k + 1, n):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lk * t) // d[k]
            lam[i][k - 1] = (new_d * t + lk * lam[i][k]) // d[k + 1]
        d[k] = new_d

    incgs(0)
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            incgs(k)
        red(k, k - 1)
        # Lovasz: d_{k+1} d_{k-1} < (delta d_k^2 - lam^2)  in scaled form
        if den * d[k + 1] * d[k - 1] < num * d[k] * d[k] - den * lam[k][k - 1] ** 2:
            swap(k)
            swaps += 1
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return LLLResult(LatticeBasis(b), tuple(tuple(r) for r in u), swaps)


def _det(m) -> Fraction:
    a = [[Fraction(x) for x in r] for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def check_reduction(inp: LatticeBasis, res: LLLResult, delta=Fraction(3, 4)) -> list:
    """Problems with an LLL result (empty if it is a valid reduction)."""
    problems = []
    out = res.basis.rows
    u = res.transform
    for i, row in enumerate(out):
        comb = [sum(u[i][j] * inp.rows[j][c] for j in range(inp.n)) for c in range(inp.dim)]
        if comb != list(row):
            problems.append(f"row {i} is not U*input")
    if abs(_det(u)) != 1:
        problems.append("transform is not unimodular")
    # Gram-Schmidt in exact rationals
    bstar, mu = [], []
    for i, row in enumerate(out):
        v = [Fraction(x) for x in row]
        mrow = []
        for j in range(i):
            m = Fraction(_dot(row, bstar[j])) / _dot(bstar[j], bstar[j]) if any(bstar[j]) else Fraction(0)
            mrow.append(m)
            v = [a - m * c for a, c in zip(v, bstar[j])]
        bstar.append(v)
        mu.append(mrow)
    for i in range(len(out)):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                problems.append(f"mu[{i}][{j}] = {mu[i][j]} not size-reduced")
    for i in range(1, len(out)):
        lhs = _dot(bstar[i], bstar[i])
        rhs = (Fraction(delta) - mu[i][i - 1] ** 2) * _dot(bstar[i - 1], bstar[i - 1])
        if lhs < rhs:
            problems.append(f"Lovasz condition fails at {i}")
    return problems


# --------------------------------------------------------------------------
# integer relations

Number = Union[mpf, Callable[[int], mpf]]


@dataclass(frozen=True)
class RelationCandidate:
    """sum_k coefficients[k] * y_k + coefficients[n] * x = 0 (up to quality)."""

    coefficients: tuple
    names: tuple
    quality: mpf          # |sum b_k y_k + b_{n+1} x| at the re-verification precision
    scale: int            # digits p used in the lattice
    verified_digits: int
    tail: tuple = ()

    @property
    def height(self) -> int:
        return max(abs(c) for c in self.coefficients)

    @property
    def rational_coefficients(self) -> tuple:
        """r_k with x = sum_k r_k y_k."""
        bx = self.coefficients[-1]
        return tuple(Fraction(-c, bx) for c in self.coefficients[:-1])

    def describe(self) -> str:
        parts = []
        for r, name in zip(self.rational_coefficients, self.names):
            if r:
                parts.append(f"({r})*{name}")
        return "x = " + (" + ".join(parts) if parts else "0")


@dataclass(frozen=True)
class Rejection:
    """No acceptable relation; carries what the search did achieve."""

    reason: str
    smallest_tail: int
    scale: int
    best: Optional[tuple] = None

    def __bool__(self):
        return False


def _value(v: Number, dps: int) -> mpf:
    with mpmath.workdps(dps):
        return +v(dps) if callable(v) else +mpf(v)


def _scaled_floor(v: mpf, p: int) -> int:
    with mpmath.workdps(p + 30):
        return int(mpmath.floor(v * mpf(10) ** p))


def _search(targets, cands, names, p, verify_dps):
    """Shared driver: targets is a list of m numbers, cands an n x m matrix."""
    n = len(cands)
    m = len(targets)
    if n == 0:
        raise ValueError("need at least one candidate constant")
    if p < 2 * (n + 1):
        raise InsufficientPrecision(f"p={p} digits cannot resolve {n + 1} integer coefficients")
    xs = [_scaled_floor(_value(t, p + 20), p) for t in targets]
    ys = [[_scaled_floor(_value(c, p + 20), p) for c in row] for row in cands]
    rows = []
    for i in range(n):
        rows.append([int(i == j) for j in range(n + 1)] + ys[i])
    rows.append([0] * n + [1] + xs)
    res = lll_reduce(LatticeBasis(rows))
    height_bound = max(10, int(10 ** (p / (2 * n))))
    smallest = None
    best = None
    for row in res.basis.rows:
        coeffs = row[: n + 1]
        tail = row[n + 1:]
        t = max(abs(x) for x in tail)
        if smallest is None or t < smallest:
            smallest, best = t, tuple(coeffs)
        if coeffs[n] == 0 or t > TAIL_BOUND or max(abs(c) for c in coeffs) > height_bound:
            continue
        g = 0
        for c in coeffs:
            g = math.gcd(g, c)
        coeffs = [c // g for c in coeffs]
        if coeffs[n] < 0:
            coeffs = [-c for c in coeffs]
        with mpmath.workdps(verify_dps + 10):
            worst = mpf(0)
            for r in range(m):
                s = sum(coeffs[k] * _value(cands[k][r], verify_dps + 10) for k in range(n))
                s += coeffs[n] * _value(targets[r], verify_dps + 10)
                worst = max(worst, abs(s))
            norm = mpmath.sqrt(sum(c * c for c in coeffs))
            bound = norm * mpf(10) ** (-p + n + 2)
            if worst >= bound:
                continue
            verified = int(-mpmath.log10(worst)) if worst else verify_dps
        return RelationCandidate(tuple(coeffs), tuple(names), worst, p, verified, tuple(tail))
    return Rejection("no short vector with small tail and nonzero x-coefficient",
                     smallest, p, best)


def find_relation(x: Number, ys: Sequence, p: int, names: Optional[Sequence[str]] = None):
    """Search for integers b with sum_k b_k y_k + b_{n+1} x = 0.

    ``ys`` holds numbers or ``(name, number)`` pairs; a number may be a
    callable ``dps -> mpf`` so that re-verification at p + 10 digits uses
    freshly computed values.  Returns a :class:`RelationCandidate` or a
    falsy :class:`Rejection`.
    """
    ys, names = _split_names(ys, names)
    return _search([x], [[y] for y in ys], names, p, p + 10)


def find_function_relation(targets: Sequence, candidates: Sequence[Sequence], p: int,
                           names: Optional[Sequence[str]] = None):
    """Integer relation between an unknown f and candidates g_k seen through m functionals.

    ``targets[r]`` is L_r f and ``candidates[k][r]`` is L_r g_k.
    """
    m = len(targets)
    if any(len(row) != m for row in candidates):
        raise ValueError("each candidate needs one value per functional")
    if len(candidates) < m:
        raise ValueError("need at least as many candidates as functionals")
    names = list(names) if names else [f"y{k + 1}" for k in range(len(candidates))]
    return _search(list(targets), [list(r) for r in candidates], names, p, p + 10)


def _split_names(ys, names):
    vals, auto = [], []
    for i, y in enumerate(ys):
        if isinstance(y, tuple) and len(y) == 2 and isinstance(y[0], str):
            auto.append(y[0])
            vals.append(y[1])
        else:
            auto.append(f"y{i + 1}")
            vals.append(y)
    return vals, list(names) if names else auto

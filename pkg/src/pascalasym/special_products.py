"""Product formulas for ASM counts and the loop-count distribution P(L, m)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mpf

from .exact_core import (Sqrt3Multiple, _as_theta, chebyshev_poly,
                         eval_D)
from .mpnum import PrecisionContext

__all__ = [
    "asm_count",
    "htsasm_count",
    "exact_special_value",
    "phi_exact",
    "LoopProbabilityVector",
    "loop_probabilities",
]


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return math.factorial(n)


def _integral(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise ArithmeticError(f"{what} evaluated to the non-integer {value}")
    return int(value)


@lru_cache(maxsize=None)
def asm_count(n: int) -> int:
    """Number of n x n alternating sign matrices, prod (3k+1)!/(k+n)!."""
    if n < 1:
        raise ValueError("n must be >= 1")
    value = Fraction(1)
    for k in range(n):
        value *= Fraction(_fact(3 * k + 1), _fact(k + n))
    return _integral(value, f"A({n})")


@lru_cache(maxsize=None)
def htsasm_count(L: int) -> int:
    """Number of L x L half-turn symmetric alternating sign matrices."""
    if L < 1:
        raise ValueError("L must be >= 1")
    value = Fraction(1)
    if L % 2 == 0:
        value = Fraction(2)
        for k in range(1, L // 2):
            value *= Fraction(
                3 * _fact(k - 1) * _fact(k) * _fact(3 * k - 1) * _fact(3 * k + 2),
                4 * _fact(2 * k - 1) ** 2 * _fact(2 * k + 1) ** 2)
    else:
        for j in range(1, (L - 1) // 2 + 1):
            value *= Fraction(4 * _fact(j) ** 2 * _fact(3 * j) ** 2,
                              3 * _fact(2 * j) ** 4)
    return _integral(value, f"A_HT({L})")


def exact_special_value(L: int, p: int) -> Sqrt3Multiple:
    """Closed form of D(L, p pi/3), p in {0, 1, 2, 3}."""
    if p not in (0, 1, 2, 3):
        raise ValueError(f"p must be in {{0, 1, 2, 3}}, got {p}")
    if L < 1:
        raise ValueError("L must be >= 1")
    if p == 0:
        return Sqrt3Multiple(Fraction(htsasm_count(2 * L), asm_count(L)))
    if p == 1:
        return Sqrt3Multiple(Fraction(htsasm_count(L) ** 2), L % 2)
    if p == 2:
        return Sqrt3Multiple(Fraction(asm_count(L)))
    if L % 2:
        return Sqrt3Multiple(Fraction(0))
    return Sqrt3Multiple(Fraction(asm_count(L // 2) ** 4))


def phi_exact(L: int, theta, ctx: PrecisionContext) -> mpf:
    """phi(L, theta) = D / A_HT^2, with the extra 1/(2cos(theta/2)) for odd L.

    For odd L the factor is cancelled symbolically, so theta = pi is fine
    here; use :func:`phi_exact_ratio` to see the raw quotient.
    """
    theta = _as_theta(theta)
    poly = chebyshev_poly(L)
    a2 = htsasm_count(L) ** 2
    with ctx.work():
        u = 2 * theta.cos_multiple(1)
        val = mpmath.polyval(list(reversed([mpf(c) for c in poly])), u)
        return val / a2


def phi_exact_ratio(L: int, theta, ctx: PrecisionContext) -> mpf:
    """D/(A_HT^2) or D/(2cos(theta/2) A_HT^2) computed literally from D."""
    theta = _as_theta(theta)
    d = eval_D(L, theta, ctx)
    with ctx.work():
        denom = mpf(htsasm_count(L)) ** 2
        if L % 2:
            c = theta.cos_multiple(Fraction(1, 2))
            if c == 0:
                raise ZeroDivisionError("phi for odd L has a pole at theta = pi (D vanishes there too)")
            denom *= 2 * c
        return d / denom


@dataclass(frozen=True)
class LoopProbabilityVector:
    """P(L, m) for m = 0..floor(L/2)."""

    L: int
    probs: tuple

    @property
    def negative(self) -> list:
        """Indices m with P(L, m) < 0 (should be empty)."""
        return [m for m, p in enumerate(self.probs) if p < 0]

    def total(self) -> Fraction:
        return sum(self.probs, Fraction(0))

    def to_strings(self) -> list:
        return [f"{p.numerator}/{p.denominator}" for p in self.probs]


@lru_cache(maxsize=256)
def loop_probabilities(L: int) -> LoopProbabilityVector:
    """Exact P(L, m) from the coefficients of phi in powers of 2cos(theta)."""
    poly = chebyshev_poly(L)
    a2 = htsasm_count(L) ** 2
    vec = LoopProbabilityVector(L, tuple(Fraction(c, a2) for c in poly))
    if vec.total() != 1:
        raise ArithmeticError(f"P({L}, m) sums to {vec.total()}, not 1")
    return vec

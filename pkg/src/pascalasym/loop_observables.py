"""Loop-model and percolation observables on the cylinder of circumference L.

N is the number of loops surrounding a point, distributed as P(L, m).
Exact values come from the rational P(L, m) (factorial moments in
u = 2 cos theta at u = 1); a second route differentiates phi in theta at
pi/3.  The asymptotic forms follow from the leading amplitude and its
derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from .exact_core import eval_D_derivatives
from .mpnum import PrecisionContext, constant, gamma_fn, polygamma
from .special_products import htsasm_count, loop_probabilities

__all__ = [
    "LoopStats",
    "loop_stats",
    "wrap_probability_asym",
    "wrap_probability_exact",
    "wrap_prefactor",
    "mean_loops_asym",
    "mean_loops_exact",
    "mean_loops_theta",
    "var_loops_asym",
    "var_loops_exact",
    "var_loops_theta",
]


def _parity(parity) -> int:
    if parity in (0, "even"):
        return 0
    if parity in (1, "odd"):
        return 1
    raise ValueError("parity must be 'even' or 'odd'")


@dataclass(frozen=True)
class LoopStats:
    L: int
    mean_N: object
    var_N: object
    wrap_prob: object
    parity: str


def wrap_prefactor(ctx: PrecisionContext) -> mpf:
    """2^(23/72) 3^(-5/48) pi^(1/4) exp(-zeta'(-1)/4) Gamma(1/4)^(-1/2)."""
    with ctx.work():
        return (mpf(2) ** (mpf(23) / 72) / mpf(3) ** (mpf(5) / 48)
                * constant("pi", ctx) ** (mpf(1) / 4)
                * mpmath.exp(-constant("zeta_prime_minus1", ctx) / 4)
                / mpmath.sqrt(gamma_fn(mpf(1) / 4, ctx)))


def wrap_probability_asym(L, parity, ctx: PrecisionContext) -> mpf:
    """Leading form of the wrapping (even L) or spanning (odd L) probability."""
    if L < 2:
        raise ValueError("L must be >= 2")
    p = _parity(parity)
    with ctx.work():
        val = wrap_prefactor(ctx) * mpf(L) ** (-mpf(5) / 48)
        return val * mpmath.sqrt(mpf(3) / 2) if p else val


def wrap_probability_exact(L: int) -> Fraction:
    """P(L, 0) = phi(L, pi/2)."""
    return loop_probabilities(L).probs[0]


def _log_4L(L, ctx):
    return constant("euler_gamma", ctx) + mpmath.log(4 * mpf(L))


def mean_loops_asym(L, parity, ctx: PrecisionContext) -> mpf:
    if L < 2:
        raise ValueError("L must be >= 2")
    p = _parity(parity)
    with ctx.work():
        val = _log_4L(L, ctx) / (2 * mpmath.sqrt(3) * constant("pi", ctx))
        return val - mpf(1) / 6 if p else val


def var_loops_asym(L, parity, ctx: PrecisionContext) -> mpf:
    if L < 2:
        raise ValueError("L must be >= 2")
    p = _parity(parity)
    with ctx.work():
        pi = constant("pi", ctx)
        pi2 = pi * pi
        const = (-(1 + mpmath.log(3)) / (2 * pi2)
                 + polygamma(1, mpf(1) / 6, ctx) / (18 * pi2))
        slope = 2 / (3 * mpmath.sqrt(3) * pi) - 1 / (2 * pi2)
        return const - mpf(1 + p) / 9 + slope * _log_4L(L, ctx)


def _factorial_moments(L: int):
    probs = loop_probabilities(L).probs
    m1 = sum((m * p for m, p in enumerate(probs)), Fraction(0))
    m2 = sum((m * (m - 1) * p for m, p in enumerate(probs)), Fraction(0))
    return m1, m2


def mean_loops_exact(L: int) -> Fraction:
    """E[N] as an exact rational."""
    return _factorial_moments(L)[0]


def var_loops_exact(L: int) -> Fraction:
    """Var N as an exact rational."""
    m1, m2 = _factorial_moments(L)
    return m2 + m1 - m1 * m1


def _phi_theta_derivs(L: int, ctx: PrecisionContext):
    """phi, phi', phi'' at theta = pi/3 from D and its derivatives."""
    d0, d1, d2 = eval_D_derivatives(L, Fraction(1, 3), 2, ctx)
    with ctx.work():
        a2 = mpf(htsasm_count(L)) ** 2
        if L % 2 == 0:
            return d0 / a2, d1 / a2, d2 / a2
        # c = 2 cos(theta/2) at pi/3, with c' = -sin(theta/2), c'' = -cos(theta/2)/2
        c = mpmath.sqrt(3)
        c1 = -mpf(1) / 2
        c2 = -mpmath.sqrt(3) / 4
        p0 = d0 / c
        p1 = (d1 * c - d0 * c1) / (c * c)
        p2 = d2 / c - 2 * d1 * c1 / c ** 2 - d0 * c2 / c ** 2 + 2 * d0 * c1 * c1 / c ** 3
        return p0 / a2, p1 / a2, p2 / a2


def mean_loops_theta(L: int, ctx: PrecisionContext) -> mpf:
    """E[N] = -phi'(L, pi/3)/sqrt(3)."""
    _, p1, _ = _phi_theta_derivs(L, ctx)
    with ctx.work():
        return -p1 / mpmath.sqrt(3)


def var_loops_theta(L: int, ctx: PrecisionContext) -> mpf:
    """Var N from phi', phi'' at pi/3 (u = 2 cos theta, u' = -sqrt3, u'' = -1)."""
    _, p1, p2 = _phi_theta_derivs(L, ctx)
    with ctx.work():
        pu = -p1 / mpmath.sqrt(3)
        puu = (p2 + pu) / 3
        return puu + pu - pu * pu


def loop_stats(L: int, ctx: PrecisionContext, exact: bool = True) -> LoopStats:
    parity = "odd" if L % 2 else "even"
    if exact:
        return LoopStats(L, mean_loops_exact(L), var_loops_exact(L),
                         wrap_probability_exact(L), parity)
    return LoopStats(L, mean_loops_asym(L, parity, ctx), var_loops_asym(L, parity, ctx),
                     wrap_probability_asym(L, parity, ctx), parity)

"""Large-L expansion of D(L, theta) and of phi(L, theta).

The building block is the sector amplitude

    f(L, t) = K_f (3 sqrt3/4)^(L^2) L^(7/36 - 3 t^2/(4 pi^2)) prod G(a +- t/(2 pi))
              * exp(sum_k R_2k(t) / L^(2k)),

with the six Barnes G factors at a = 1, 4/3, 2/3, and D is the winding sum
sum_n (-1)^(nL) f(L, theta + 2 pi n).  The leading amplitude of phi is
A0(theta), the same product of G factors with a different constant.

Besides the numerical evaluators this module assembles the expansion in 1/L
exactly at theta in (pi/3) Z: there the neighbouring-sector amplitude ratios
are rational (ratios of Gamma values whose arguments differ by integers) and
so is every coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath
from mpmath import mpf

from ._series import Series
from .exact_core import ThetaValue, _as_theta
from .mpnum import (PrecisionContext, bernoulli, constant, gamma_fn, hurwitz_zeta,
                    log_barnes_g, log_barnes_g_derivative, log_barnes_g_signed, log_gamma,
                    polygamma)

__all__ = [
    "AsymptoticParams",
    "RPolynomialTable",
    "R_TABLE",
    "SPECIAL_SERIES",
    "amplitude_A0",
    "log_abs_A0",
    "log_deriv_A0",
    "log_A0_derivative",
    "f_term",
    "WindingSum",
    "D_asym",
    "HTExpansion",
    "ht_expansion",
    "log_htsasm_exact_form",
    "phi_asym",
    "phi_series_exact",
    "sector_ratio_exact",
    "special_series",
    "special_leading_constant",
    "zero_sum_check",
]

# (a, s): the factor G(a + s x), x = theta / (2 pi)
G_FACTORS = ((Fraction(1), 1), (Fraction(1), -1),
             (Fraction(4, 3), 1), (Fraction(4, 3), -1),
             (Fraction(2, 3), 1), (Fraction(2, 3), -1))


@dataclass(frozen=True)
class AsymptoticParams:
    n_max: int = 6
    k_max: int = 7

    def __post_init__(self):
        if not 0 <= self.k_max <= 7:
            raise ValueError("k_max must be in 0..7 (R_2..R_14 are tabulated)")
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative")


@dataclass(frozen=True)
class RPolynomialTable:
    """R_2k(theta) = sum_j coeffs[k-1][j] (theta/pi)^(2j)."""

    coeffs: tuple

    def __len__(self):
        return len(self.coeffs)

    def exact(self, k: int, theta_over_pi: Fraction) -> Fraction:
        y = Fraction(theta_over_pi) ** 2
        return sum((c * y ** j for j, c in enumerate(self.coeffs[k - 1])), Fraction(0))

    def value(self, k: int, theta_over_pi: mpf) -> mpf:
        y = theta_over_pi * theta_over_pi
        total = mpf(0)
        for c in reversed(self.coeffs[k - 1]):
            total = total * y + mpf(c.numerator) / c.denominator
        return total

    def degree(self, k: int) -> int:
        return 2 * (len(self.coeffs[k - 1]) - 1)


def _fr(*pairs):
    return tuple(Fraction(n, d) for n, d in pairs)


R_TABLE = RPolynomialTable((
    _fr((77, 15552), (7, 144), (-11, 64)),
    _fr((-245, 559872), (-157, 12960), (-29, 1152), (181, 1280)),
    _fr((1103, 40310784), (-1349, 244944), (3599, 31104), (-989, 6912), (-3275, 14336)),
    _fr((793135, 4353564672), (116807, 2099520), (-101009, 279936), (-47479, 622080),
        (43171, 36864), (61621, 122880)),
    _fr((-93651593, 130606940160), (-3740009, 10392624), (1868083, 1399680),
        (301091, 93312), (-1858513, 276480), (-1239773, 184320), (-1184171, 901120)),
    _fr((2884889645, 940369969152), (68061091601, 23213342880), (-110018569, 22674816),
        (-754814143, 16796160), (454871621, 10450944), (931652293, 9953280),
        (31193731, 884736), (23057581, 5963776)),
    _fr((-2213492219141, 135413275557888), (-2471502605, 76527504),
        (-83019415531, 7142567040), (30869634919, 45349632), (-10100916773, 44789760),
        (-96936237491, 62705664), (-35619671389, 39813120), (-105293315, 589824),
        (-453005291, 36700160)),
))

# coefficients of L^(-2k), k = 0..7, of phi(L, theta) / (leading constant * L-power)
SPECIAL_SERIES = {
    "theta0": (Fraction(0), _fr(
        (1, 1), (127, 5184), (-2041055, 53747712), (107538127903, 835884417024),
        (-13294838545991999, 17332899271409664),
        (645434518069131955571, 89853749822987698176),
        (-272944577297197688875376083, 2794811034494209364066304),
        (26385460676926169502575757887765, 14488300402817981343319719936))),
    "thetapi3": (Fraction(1, 3), _fr((1, 1),) + (Fraction(0),) * 7),
    "theta2pi3": (Fraction(2, 3), _fr(
        (1, 1), (7, 576), (-23983, 663552), (16317695, 127401984),
        (-225307455655, 293534171136), (1215802858094435, 169075682574336),
        (-19038476800109154745, 194775186325635072),
        (204450994938396835527815, 112190507323565801472))),
    "thetapi": (Fraction(1), _fr(
        (1, 1), (-8, 81), (464, 6561), (-228352, 1594323), (77553152, 129140163),
        (-45379702784, 10460353203), (122234658136064, 2541865828329),
        (-156017791843041280, 205891132094649))),
}


def _m(x: Fraction) -> mpf:
    return mpf(x.numerator) / x.denominator


# --------------------------------------------------------------------------
# amplitude A0 and its logarithmic derivatives

def _x_of(theta: ThetaValue, n: int, dps: int):
    """|theta + 2 pi n| / (2 pi), exact when theta is a rational multiple of pi."""
    if theta.is_rational:
        return abs(Fraction(theta.p, 2 * theta.q) + n)
    with mpmath.workdps(dps):
        return abs(mpf(theta.real) / (2 * mpmath.pi) + n)


@lru_cache(maxsize=4096)
def _log_g_product(x, dps: int):
    """(sign, log|prod G(a +- x)|) for the six factors."""
    ctx = PrecisionContext(max(16, dps - 10), 10)
    sign = 1
    total = mpf(0)
    with mpmath.workdps(dps):
        xm = _m(x) if isinstance(x, Fraction) else mpf(x)
        for a, s in G_FACTORS:
            arg = (a + s * x) if isinstance(x, Fraction) else _m(a) + s * xm
            arg = _m(arg) if isinstance(arg, Fraction) else arg
            sg, lg = log_barnes_g_signed(arg, ctx)
            if sg == 0:
                return 0, mpmath.ninf
            sign *= sg
            total += lg
        return sign, total


def _log_A0_constant(ctx: PrecisionContext) -> mpf:
    # 2^(11/36) 3^(1/36) pi^(1/3) exp(-19 zeta'(-1)/3) Gamma(1/6)^(-2/3)
    with ctx.work():
        pi = constant("pi", ctx)
        return (mpf(11) / 36 * mpmath.log(2) + mpf(1) / 36 * mpmath.log(3)
                + mpmath.log(pi) / 3 - mpf(19) / 3 * constant("zeta_prime_minus1", ctx)
                - mpf(2) / 3 * log_gamma(mpf(1) / 6, ctx))


def _log_f_constant(ctx: PrecisionContext) -> mpf:
    # (2/3)^(1/12) exp(-5 zeta'(-1))
    with ctx.work():
        return mpmath.log(mpf(2) / 3) / 12 - 5 * constant("zeta_prime_minus1", ctx)


def log_abs_A0(theta, ctx: PrecisionContext):
    """(sign, log|A0(theta)|); sign 0 at a zero of A0."""
    theta = _as_theta(theta)
    sign, lg = _log_g_product(_x_of(theta, 0, ctx.dps), ctx.dps)
    if sign == 0:
        return 0, mpmath.ninf
    with ctx.work():
        return sign, lg + _log_A0_constant(ctx)


def amplitude_A0(theta, ctx: PrecisionContext) -> mpf:
    """Leading amplitude A0(theta) of phi(L, theta) (even L)."""
    sign, la = log_abs_A0(theta, ctx)
    with ctx.work():
        return mpf(0) if sign == 0 else sign * mpmath.exp(la)


def log_A0_derivative(theta, order: int, ctx: PrecisionContext) -> mpf:
    """d^order/dtheta^order log A0(theta), 1 <= order <= 7."""
    if not 1 <= order <= 7:
        raise ValueError("order must be in 1..7")
    theta = _as_theta(theta)
    with ctx.work():
        x = theta.value(ctx) / (2 * constant("pi", ctx))
        total = mpf(0)
        for a, s in G_FACTORS:
            arg = _m(a) + s * x
            if arg <= 0 and arg == mpmath.floor(arg):
                raise ZeroDivisionError(f"theta={theta.canonical()} is a zero of A0")
            total += s ** order * log_barnes_g_derivative(order, arg, ctx)
        return total / (2 * constant("pi", ctx)) ** order


def log_deriv_A0(theta, order: int, ctx: PrecisionContext) -> mpf:
    """A0'(theta)/A0(theta) (order 1) or A0''(theta)/A0(theta) (order 2)."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    d1 = log_A0_derivative(theta, 1, ctx)
    if order == 1:
        return d1
    d2 = log_A0_derivative(theta, 2, ctx)
    with ctx.work():
        return d2 + d1 * d1


# --------------------------------------------------------------------------
# sector terms and the winding sum

def _theta_over_pi(theta: ThetaValue, n: int, ctx: PrecisionContext):
    if theta.is_rational:
        return Fraction(theta.p, theta.q) + 2 * n
    with ctx.work():
        return mpf(theta.real) / constant("pi", ctx) + 2 * n


def _r_sum(top, L, k_max: int, ctx: PrecisionContext):
    """(sum_k R_2k / L^2k, |last term|)."""
    with ctx.work():
        t = _m(top) if isinstance(top, Fraction) else top
        inv2 = 1 / (mpf(L) * L)
        total = mpf(0)
        last = mpf(0)
        p = mpf(1)
        for k in range(1, k_max + 1):
            p *= inv2
            last = R_TABLE.value(k, t) * p
            total += last
        return total, abs(last)


def _log_f(L, theta: ThetaValue, n: int, params: AsymptoticParams, ctx: PrecisionContext):
    sign, lg = _log_g_product(_x_of(theta, n, ctx.dps), ctx.dps)
    if sign == 0:
        return 0, mpmath.ninf, mpf(0)
    top = _theta_over_pi(theta, n, ctx)
    with ctx.work():
        t = _m(top) if isinstance(top, Fraction) else top
        Lm = mpf(L)
        rs, last = _r_sum(abs(top), L, params.k_max, ctx)
        val = (_log_f_constant(ctx) + Lm * Lm * mpmath.log(3 * mpmath.sqrt(3) / 4)
               + (mpf(7) / 36 - 3 * t * t / 4) * mpmath.log(Lm) + lg + rs)
        return sign, val, last


def f_term(L, theta, params: AsymptoticParams = AsymptoticParams(),
           ctx: PrecisionContext = PrecisionContext()):
    """Single-sector amplitude f(L, theta) as (sign, log|f|)."""
    theta = _as_theta(theta)
    with ctx.work():
        if mpf(L) < 2:
            raise ValueError("f_term needs L >= 2")
    sign, val, _ = _log_f(L, theta, 0, params, ctx)
    return sign, val


@dataclass
class WindingSum:
    """Result of the winding sum: sign * exp(log_abs)."""

    sign: int
    log_abs: mpf
    last_pair_log10: mpf     # log10(|n = +-n_max terms| / |sum|)
    r_tail: mpf              # |R_2kmax(theta)| / L^2kmax in sector 0
    terms: list = field(default_factory=list)  # (n, sign, log|term|)

    @property
    def value(self) -> mpf:
        if self.sign == 0:
            return mpf(0)
        return self.sign * mpmath.exp(self.log_abs)


def D_asym(L, theta, params: AsymptoticParams = AsymptoticParams(),
           ctx: PrecisionContext = PrecisionContext(), parity: Optional[int] = None) -> WindingSum:
    """sum_{|n| <= n_max} (-1)^(nL) f(L, theta + 2 pi n).

    ``parity`` (0 or 1) is needed only when L is not an integer.
    """
    theta = _as_theta(theta)
    if parity is None:
        if int(L) != L:
            raise ValueError("non-integer L needs an explicit parity")
        parity = int(L) % 2
    with ctx.work():
        if mpf(L) < 2:
            raise ValueError("D_asym needs L >= 2")
    terms = []
    r_tail = mpf(0)
    window = list(range(-params.n_max, params.n_max + 1))
    if theta.is_rational and abs(theta.over_pi) == 1:
        # at theta = +-pi sectors n and -sgn-n coincide; keep mirror pairs whole
        sgn = 1 if theta.over_pi > 0 else -1
        window = sorted(set(window) | {-sgn - n for n in window})
    for n in window:
        sign, val, last = _log_f(L, theta, n, params, ctx)
        if n == 0:
            r_tail = last
        if sign and parity and n % 2:
            sign = -sign
        terms.append((n, sign, val))
    live = [(s, v) for _, s, v in terms if s]
    with ctx.work():
        if not live:
            return WindingSum(0, mpmath.ninf, mpmath.ninf, r_tail, terms)
        top = max(v for _, v in live)
        # accumulate in a fixed order so that mirror pairs cancel exactly
        acc = mpf(0)
        for _, s, v in sorted(terms, key=lambda t: (abs(t[0] + 0.5), t[0])):
            if s:
                acc += s * mpmath.exp(v - top)
        edge = mpf(0)
        for n, s, v in terms:
            if abs(n) >= params.n_max and s:
                edge += mpmath.exp(v - top)
        if acc == 0:
            return WindingSum(0, mpmath.ninf, mpmath.ninf, r_tail, terms)
        log_abs = top + mpmath.log(abs(acc))
        last = (mpmath.log10(edge) - mpmath.log10(abs(acc))) if edge else mpmath.ninf
        return WindingSum(1 if acc > 0 else -1, log_abs, last, r_tail, terms)


# --------------------------------------------------------------------------
# A_HT(L)^2 from Barnes G asymptotics

# log A_HT(L) = elementary(M) + sum_alpha mult * [log G(M+1+alpha) - log G(1+alpha)]
_HT_GAMMA = {
    0: {Fraction(1, 3): 1, Fraction(2, 3): 1, Fraction(4, 3): 1, Fraction(5, 3): 1,
        Fraction(1, 2): -2, Fraction(3, 2): -2},
    1: {Fraction(1, 3): 2, Fraction(2, 3): 2, Fraction(1, 2): -4},
}


def _ht_elementary(L: int, parity: int, ctx: PrecisionContext) -> mpf:
    with ctx.work():
        l2, l3 = mpmath.log(2), mpmath.log(3)
        slope = 6 * l3 - 8 * l2
        if parity == 0:
            m = L // 2 - 1
            return l2 + slope * m * (m + 1) / 2 + (mpmath.log(mpf(3) / 4) + 2 * l3 - 2 * l2) * m
        m = (L - 1) // 2
        return slope * m * (m + 1) / 2


def log_htsasm_exact_form(L: int, ctx: PrecisionContext) -> mpf:
    """log A_HT(L) through its Barnes G representation (no asymptotics)."""
    parity = L % 2
    m = L // 2 - 1 if parity == 0 else (L - 1) // 2
    with ctx.work():
        total = _ht_elementary(L, parity, ctx)
        for alpha, mult in _HT_GAMMA[parity].items():
            total += mult * (log_barnes_g(m + 1 + _m(alpha), ctx) - log_barnes_g(1 + _m(alpha), ctx))
        return total


@dataclass(frozen=True)
class HTExpansion:
    """log A_HT(L)^2 ~ l2 L^2 + l1 L + log_coeff log L + const + sum_j inv[j-1] L^-j."""

    parity: int
    l2: mpf
    l1: mpf
    log_coeff: Fraction
    const: mpf
    inv: tuple

    def log_value(self, L, order: Optional[int] = None) -> mpf:
        order = len(self.inv) if order is None else order
        Lm = mpf(L)
        val = self.l2 * Lm * Lm + self.l1 * Lm + _m(self.log_coeff) * mpmath.log(Lm) + self.const
        p = mpf(1)
        for j in range(order):
            p /= Lm
            val += _m(self.inv[j]) * p
        return val


def _log_g_expansion(c: Fraction, order: int):
    """log G(N + c + 1) ~ sum over N^p log N, N^p, plus log(2 pi), zeta'(-1) parts.

    Returns (nlog, poly, neg): nlog[p] is the coefficient of N^p log N
    (p = 0..2), poly[p] of N^p (p = 0..2, rational part only) and neg[j] of
    N^-j (j = 1..order).  The non-rational pieces (1/2) log(2 pi) (N + c)
    and zeta'(-1) are added by the caller.
    """
    ell = [Fraction(0)] + [Fraction((-1) ** (j + 1)) * c ** j / j for j in range(1, order + 3)]
    nlog = {2: Fraction(1, 2), 1: c, 0: c * c / 2 - Fraction(1, 12)}
    poly = {2: Fraction(-3, 4), 1: -3 * c / 2, 0: -3 * c * c / 4}
    neg = [Fraction(0)] * (order + 1)

    def add(power, val):
        if power >= 0:
            poly[power] = poly.get(power, Fraction(0)) + val
        elif -power <= order:
            neg[-power] += val

    # (1/2) z^2 log(1 + c/N) - (1/12) log(1 + c/N)
    for j in range(1, order + 3):
        add(2 - j, ell[j] / 2)
        add(1 - j, c * ell[j])
        add(-j, c * c * ell[j] / 2 - ell[j] / 12)
    # sum_k B_(2k+2) / (4k(k+1) (N+c)^(2k))
    for k in range(1, order // 2 + 1):
        b = bernoulli(2 * k + 2) / (4 * k * (k + 1))
        for i in range(0, order - 2 * k + 1):
            add(-(2 * k + i), b * (-1) ** i * math.comb(2 * k + i - 1, i) * c ** i)
    return nlog, poly, neg


@lru_cache(maxsize=32)
def _ht_expansion(parity: int, order: int, dps: int) -> HTExpansion:
    ctx = PrecisionContext(dps - 10, 10)
    nlog = {p: Fraction(0) for p in range(3)}
    poly = {p: Fraction(0) for p in range(3)}
    neg = [Fraction(0)] * (order + 1)
    weight = Fraction(0)   # sum of multiplicities times (N + c) for the log(2 pi) part
    weight1 = Fraction(0)
    mult_total = 0
    const_g = mpf(0)
    with mpmath.workdps(dps):
        for alpha, mult in _HT_GAMMA[parity].items():
            c = alpha - 1 if parity == 0 else alpha - Fraction(1, 2)
            a, b, ng = _log_g_expansion(c, order)
            for p in range(3):
                nlog[p] += mult * a[p]
                poly[p] += mult * b.get(p, Fraction(0))
            for j in range(1, order + 1):
                neg[j] += mult * ng[j]
            weight1 += mult
            weight += mult * c
            mult_total += mult
            const_g -= mult * log_barnes_g(1 + _m(alpha), ctx)
        if nlog[2] or nlog[1]:
            raise ArithmeticError("A_HT expansion has surviving L^2 log L or L log L terms")
        # N = L/2
        l2, l3 = mpmath.log(2), mpmath.log(2 * constant("pi", ctx)) / 2
        L2 = _m(poly[2]) / 4
        L1 = _m(poly[1]) / 2 + l3 * _m(weight1) / 2
        C0 = (_m(poly[0]) - _m(nlog[0]) * l2 + l3 * _m(weight)
              + mult_total * constant("zeta_prime_minus1", ctx) + const_g)
        inv = [neg[j] * 2 ** j for j in range(1, order + 1)]
        # elementary part: polynomial in L
        lg2, lg3 = mpmath.log(2), mpmath.log(3)
        slope = 6 * lg3 - 8 * lg2
        if parity == 0:
            # m = L/2 - 1: m(m+1)/2 = L^2/8 - L/4
            L2 += slope / 8
            L1 += -slope / 4 + (mpmath.log(mpf(3) / 4) + 2 * lg3 - 2 * lg2) / 2
            C0 += lg2 - (mpmath.log(mpf(3) / 4) + 2 * lg3 - 2 * lg2)
        else:
            # m = (L-1)/2: m(m+1)/2 = (L^2 - 1)/8
            L2 += slope / 8
            C0 -= slope / 8
        return HTExpansion(parity, 2 * L2, 2 * L1, 2 * nlog[0], 2 * C0,
                           tuple(2 * v for v in inv))


def ht_expansion(parity: int, ctx: PrecisionContext, order: int = 14) -> HTExpansion:
    """Asymptotic expansion of log A_HT(L)^2 for L of the given parity."""
    if parity not in (0, 1):
        raise ValueError("parity must be 0 or 1")
    return _ht_expansion(parity, order, ctx.dps)


def _log_ht2_asym(L, parity: int, params: AsymptoticParams, ctx: PrecisionContext) -> mpf:
    exp_ = ht_expansion(parity, ctx)
    with ctx.work():
        return exp_.log_value(L, 2 * params.k_max)


def phi_asym(L, theta, parity: Optional[int] = None, params: AsymptoticParams = AsymptoticParams(),
             ctx: PrecisionContext = PrecisionContext()) -> mpf:
    """phi(L, theta) from the winding sum divided by the A_HT^2 asymptotics."""
    theta = _as_theta(theta)
    if parity is None:
        if int(L) != L:
            raise ValueError("non-integer L needs an explicit parity")
        parity = int(L) % 2
    elif isinstance(L, int) and L % 2 != parity:
        raise ValueError(f"parity {parity} does not match L={L}")
    if parity == 1:
        with ctx.work():
            c = theta.cos_multiple(Fraction(1, 2))
        if c == 0:
            raise ZeroDivisionError("odd-L phi has a pole at theta = pi")
    ws = D_asym(L, theta, params, ctx, parity=parity)
    with ctx.work():
        if ws.sign == 0:
            return mpf(0)
        val = ws.sign * mpmath.exp(ws.log_abs - _log_ht2_asym(L, parity, params, ctx))
        if parity:
            val /= 2 * theta.cos_multiple(Fraction(1, 2))
        return val


# --------------------------------------------------------------------------
# exact assembly at theta in (pi/3) Z

def _gamma_rational(q: Fraction):
    """Gamma(q) = Gamma(frac) * r for the exact rational r; q not a pole."""
    if q.denominator == 1:
        if q <= 0:
            raise ZeroDivisionError
        return Fraction(1), Fraction(math.factorial(int(q) - 1))
    f = q - math.floor(q)
    m = int(q - f)
    r = Fraction(1)
    if m >= 0:
        for i in range(m):
            r *= f + i
    else:
        for i in range(1, -m + 1):
            r /= f - i
    return f, r


def sector_ratio_exact(theta_over_pi, n: int) -> Fraction:
    """A0(theta + 2 pi n) / A0(theta) exactly, for rational theta/pi.

    Raises ValueError when the ratio is not rational and ZeroDivisionError
    when A0(theta) itself vanishes but the shifted sector does not.
    """
    x = Fraction(theta_over_pi) / 2
    num, den = [], []
    for a, s in G_FACTORS:
        b = a + s * x
        d = s * n
        if d > 0:
            num.extend((b + j, s) for j in range(d))
        else:
            den.extend((b - j, s) for j in range(1, -d + 1))
    poles = 0
    value = Fraction(1)
    fracs = {}
    for items, sgn in ((num, 1), (den, -1)):
        for q, s in items:
            if q.denominator == 1 and q <= 0:
                k = -int(q)
                # Gamma(-k + s eps) ~ (-1)^k / (k! s eps)
                res = Fraction((-1) ** k * s, math.factorial(k))
                value *= res if sgn > 0 else 1 / res
                poles += sgn
                continue
            f, r = _gamma_rational(q)
            value *= r if sgn > 0 else 1 / r
            if f.denominator != 1:
                fracs[f] = fracs.get(f, 0) + sgn
    if any(fracs.values()):
        raise ValueError(f"sector ratio at theta/pi={theta_over_pi}, n={n} is not rational")
    if poles > 0:
        raise ZeroDivisionError("A0 vanishes at theta but not in the shifted sector")
    if poles < 0:
        return Fraction(0)
    return value


def phi_series_exact(theta_over_pi, parity: int = 0, order: int = 14,
                     k_max: int = 7, n_range: int = 6) -> Series:
    """Exact coefficients of phi(L, theta) / (leading constant * L-power) in 1/L.

    Assembled from the winding sum (sector ratios, R polynomials) and the
    Barnes-G expansion of A_HT(L)^2; normalized to constant term 1.
    """
    top = Fraction(theta_over_pi)
    terms = Series([0], order)
    for n in range(-n_range, n_range + 1):
        de = -3 * n * n - 3 * n * top
        if de.denominator != 1:
            raise ValueError("sector exponents are not integers at this theta")
        shift = -int(de)
        if shift > order:
            continue
        ratio = sector_ratio_exact(top, n)
        if not ratio:
            continue
        if parity and n % 2:
            ratio = -ratio
        tn = top + 2 * n
        r = Series([0], order)
        for k in range(1, k_max + 1):
            r = r + Series.monomial(2 * k, R_TABLE.exact(k, tn), order)
        terms = terms + (r.exp() * ratio).shift(shift)
    ht = ht_expansion(parity, PrecisionContext(30), order)
    h = Series([0] + list(ht.inv[:order]), order)
    return (terms * (-h).exp()).normalized()


def special_leading_constant(which: str, ctx: PrecisionContext) -> mpf:
    """Leading constant of the phi series at theta = 0, pi/3, 2pi/3, pi."""
    with ctx.work():
        pi = constant("pi", ctx)
        zp = constant("zeta_prime_minus1", ctx)
        g13 = gamma_fn(mpf(1) / 3, ctx)
        if which == "theta0":
            return mpf(3) ** (mpf(1) / 12) / mpf(2) ** (mpf(5) / 36) * mpmath.exp(-zp)
        if which == "thetapi3":
            return mpf(1)
        if which == "theta2pi3":
            return (mpf(2) ** (mpf(31) / 36) / mpf(3) ** (mpf(5) / 12) * pi / g13 ** 2
                    * mpmath.exp(-zp))
        if which == "thetapi":
            return mpf(2) ** (mpf(8) / 3) / 3 * pi ** 2 / g13 ** 4
    raise KeyError(f"unknown series {which!r}; choose from {sorted(SPECIAL_SERIES)}")


def special_series(which: str, L, order: int = 7, ctx: PrecisionContext = PrecisionContext()) -> mpf:
    """Tabulated expansion of phi(L, theta) at a special theta, through L^(-2 order).

    Includes the power L^(1/12 - 3 theta^2/(4 pi^2)) multiplying the series.
    """
    if which not in SPECIAL_SERIES:
        raise KeyError(f"unknown series {which!r}; choose from {sorted(SPECIAL_SERIES)}")
    if not 0 <= order <= 7:
        raise ValueError("order must be in 0..7")
    top, coeffs = SPECIAL_SERIES[which]
    lead = special_leading_constant(which, ctx)
    with ctx.work():
        Lm = mpf(L)
        inv2 = 1 / (Lm * Lm)
        s = mpf(0)
        for c in reversed(coeffs[: order + 1]):
            s = s * inv2 + _m(c)
        power = mpf(1) / 12 - 3 * _m(top) ** 2 / 4
        return lead * Lm ** power * s


# --------------------------------------------------------------------------
# sums over the zeros of A0

def _zero_family_sum(b: mpf, p: int, ctx: PrecisionContext) -> mpf:
    """sum_{n >= 1} n / (n + b)^p."""
    with ctx.work():
        n0 = 1
        head = mpf(0)
        while n0 + b <= 0:
            if n0 + b == 0:
                raise ZeroDivisionError("alpha coincides with a zero of A0")
            head += n0 / (n0 + b) ** p
            n0 += 1
        a = n0 + b
        return head + hurwitz_zeta(p - 1, a, ctx) - b * hurwitz_zeta(p, a, ctx)


def zero_sum_check(p: int, alpha, ctx: PrecisionContext):
    """(sum over zeros of m_n/(alpha_n - alpha)^p, -(1/(p-1)!) (log A0)^(p)(alpha)).

    Zeros are 2 pi n and 2 pi n +- 2 pi/3 for n != 0, each of multiplicity |n|.
    """
    if p not in (3, 4, 5, 6):
        raise ValueError("p must be in 3..6")
    alpha = _as_theta(alpha)
    with ctx.work():
        two_pi = 2 * constant("pi", ctx)
        a = alpha.value(ctx)
        lhs = mpf(0)
        for c in (mpf(0), two_pi / 3, -two_pi / 3):
            lhs += _zero_family_sum((c - a) / two_pi, p, ctx)
            lhs += (-1) ** p * _zero_family_sum((a - c) / two_pi, p, ctx)
        lhs /= two_pi ** p
        rhs = -log_A0_derivative(alpha, p, ctx) / math.factorial(p - 1)
        return lhs, rhs

"""Arbitrary-precision constants and special functions.

Everything here works on real, positive arguments (with a few internal
helpers that continue Gamma and Barnes G to the negative real axis).  Numbers
are ``mpmath.mpf`` values; mpmath supplies the floating-point arithmetic and
elementary functions only.  Every constant is produced by two routes that
must agree: an in-house series and mpmath's own implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mpf

__all__ = [
    "PrecisionContext",
    "PrecisionError",
    "ConstantMismatchError",
    "BernoulliTable",
    "bernoulli",
    "bernoulli_table",
    "constant",
    "gamma_fn",
    "log_gamma",
    "log_gamma_signed",
    "polygamma",
    "hurwitz_zeta",
    "log_barnes_g",
    "log_barnes_g_signed",
    "log_barnes_g_derivative",
]

BERNOULLI_CAP = 200


class PrecisionError(ArithmeticError):
    """Requested accuracy cannot be delivered at the working precision."""


class ConstantMismatchError(ArithmeticError):
    """The two independent evaluations of a constant disagree."""


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal working precision.

    ``digits`` is the accuracy promised to callers, ``guard`` the extra
    digits carried internally to absorb rounding.
    """

    digits: int = 50
    guard: int = 10

    def __post_init__(self):
        if self.digits < 16:
            raise ValueError(f"digits must be >= 16, got {self.digits}")
        if self.guard < 1:
            raise ValueError(f"guard must be positive, got {self.guard}")

    @property
    def dps(self) -> int:
        return self.digits + self.guard

    def work(self):
        """Context manager setting mpmath to the working precision."""
        return mpmath.workdps(self.dps)

    def eps(self, slack: int = 0) -> mpf:
        """``10**(-digits + slack)`` at working precision."""
        with self.work():
            return mpf(10) ** (-self.digits + slack)

    def scaled(self, factor: float = 2.0, extra: int = 0) -> "PrecisionContext":
        return PrecisionContext(int(math.ceil(self.digits * factor)) + extra, self.guard)


# --------------------------------------------------------------------------
# Bernoulli numbers

@dataclass(frozen=True)
class BernoulliTable:
    """Exact B_0, B_2, ..., B_2K (odd indices above 1 vanish)."""

    values: tuple

    def __getitem__(self, two_k: int) -> Fraction:
        if two_k % 2:
            raise ValueError("only even indices are stored")
        return self.values[two_k // 2]

    def __len__(self):
        return len(self.values)


@lru_cache(maxsize=None)
def _bernoulli_all(n: int) -> tuple:
    # B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
    b = [Fraction(1)]
    for m in range(1, n + 1):
        if m > 1 and m % 2:
            b.append(Fraction(0))
            continue
        s = Fraction(0)
        binom = 1
        for j in range(m):
            s += binom * b[j]
            binom = binom * (m + 1 - j) // (j + 1)
        b.append(-s / (m + 1))
    return tuple(b)


def bernoulli_table(two_k_max: int) -> BernoulliTable:
    if two_k_max < 0 or two_k_max % 2:
        raise ValueError("two_k_max must be an even nonnegative integer")
    allb = _bernoulli_all(max(two_k_max, 4))
    table = BernoulliTable(tuple(allb[i] for i in range(0, two_k_max + 1, 2)))
    if two_k_max >= 4 and (table[2] != Fraction(1, 6) or table[4] != Fraction(-1, 30)):
        raise AssertionError("Bernoulli recurrence failed its anchors")
    return table


def bernoulli(two_k: int, cap: int = BERNOULLI_CAP) -> Fraction:
    """Exact Bernoulli number B_{2k}."""
    if two_k < 0 or two_k % 2:
        raise ValueError(f"index must be even and nonnegative, got {two_k}")
    if two_k > cap:
        raise ValueError(f"B_{two_k} exceeds the configured cap {cap}")
    return _bernoulli_all(max(two_k, 4))[two_k]


@lru_cache(maxsize=64)
def _bernoulli_mpf(n_even: int, dps: int) -> tuple:
    allb = _bernoulli_all(n_even)
    with mpmath.workdps(dps):
        return tuple(mpf(allb[i].numerator) / allb[i].denominator
                     for i in range(0, n_even + 1, 2))


def _bern_mpf(count: int, dps: int) -> tuple:
    """B_0, B_2, ... as mpf; at least ``count`` entries."""
    n = 2 * max(count, 8)
    # round up so the cache is hit for nearby requests
    n = 1 << (n - 1).bit_length()
    return _bernoulli_mpf(n, dps)


# --------------------------------------------------------------------------
# constants

def _pi_machin(dps: int) -> mpf:
    # pi/4 = 4 arctan(1/5) - arctan(1/239), fixed-point integers
    guard = 10
    unity = 10 ** (dps + guard)

    def arccot(x):
        total = term = unity // x
        x2 = x * x
        n = 1
        sign = -1
        while term:
            term //= x2
            total += sign * (term // (2 * n + 1))
            sign = -sign
            n += 1
        return total

    val = 4 * (4 * arccot(5) - arccot(239))
    with mpmath.workdps(dps):
        return mpf(val) / unity


def _euler_brent_mcmillan(dps: int) -> mpf:
    # gamma = A/B - log n with error ~ exp(-4n)
    with mpmath.workdps(dps + 15):
        n = int(dps * math.log(10) / 4) + 2
        logn = mpmath.log(n)
        a = -logn
        b = mpf(1)
        u = a
        v = b
        k = 1
        eps = mpf(10) ** (-dps - 10)
        while True:
            v = v * n * n / (k * k)
            u = (u * n * n / k + v) / k
            a += u
            b += v
            if abs(u) < eps * abs(a) and abs(v) < eps * b:
                break
            k += 1
        return a / b


def _zeta3_apery(dps: int) -> mpf:
    # zeta(3) = 5/2 sum (-1)^(k-1) / (k^3 C(2k,k))
    with mpmath.workdps(dps + 10):
        s = mpf(0)
        eps = mpf(10) ** (-dps - 8)
        k = 1
        c = 2  # C(2k, k)
        while True:
            t = mpf(1) / (k ** 3 * c)
            s += t if k % 2 else -t
            if t < eps:
                break
            c = c * (2 * k + 1) * (2 * k + 2) // ((k + 1) * (k + 1))
            k += 1
        return 5 * s / 2


def _zeta_prime_2(dps: int) -> mpf:
    """zeta'(2) = -sum log(n)/n^2 by Euler-Maclaurin."""
    with mpmath.workdps(dps + 10):
        big_n = max(20, dps)
        s = mpf(0)
        for n in range(2, big_n):
            s += mpmath.log(n) / n ** 2
        x = mpf(big_n)
        lx = mpmath.log(x)
        s += (lx + 1) / x  # integral from N to infinity
        s += lx / x ** 2 / 2
        bern = _bern_mpf(dps, dps + 10)
        eps = mpf(10) ** (-dps - 8)
        # f^(m)(x) = (-1)^m (m+1)! x^(-m-2) (log x - H_{m+1} + 1)
        harmonic = Fraction(1)
        for m in range(1, 2 * len(bern)):
            harmonic += Fraction(1, m + 1)
            if m % 2 == 0:
                continue
            k = (m + 1) // 2
            if k >= len(bern):
                break
            deriv = (-1) ** m * mpmath.factorial(m + 1) / x ** (m + 2) * (
                lx - mpf(harmonic.numerator) / harmonic.denominator + 1)
            term = bern[k] / mpmath.factorial(2 * k) * deriv
            s -= term
            if abs(term) < eps:
                break
        return -s


def _zeta_prime_minus1_series(dps: int) -> mpf:
    # zeta'(-1) = (1 - gamma - log 2pi)/12 + zeta'(2)/(2 pi^2)
    with mpmath.workdps(dps + 10):
        pi = _pi_machin(dps + 10)
        g = _euler_brent_mcmillan(dps + 10)
        return (1 - g - mpmath.log(2 * pi)) / 12 + _zeta_prime_2(dps) / (2 * pi ** 2)


_OWN = {
    "pi": _pi_machin,
    "euler_gamma": _euler_brent_mcmillan,
    "zeta3": _zeta3_apery,
    "zeta_prime_minus1": _zeta_prime_minus1_series,
}

_REFERENCE = {
    "pi": lambda: +mpmath.pi,
    "euler_gamma": lambda: +mpmath.euler,
    "zeta3": lambda: mpmath.zeta(3),
    "zeta_prime_minus1": lambda: mpmath.zeta(-1, derivative=1),
}


@lru_cache(maxsize=None)
def _constant(name: str, dps: int) -> mpf:
    own = _OWN[name](dps + 5)
    with mpmath.workdps(dps + 5):
        ref = _REFERENCE[name]()
        tol = mpf(10) ** (-dps + 2)
        if abs(own - ref) > tol * max(1, abs(ref)):
            raise ConstantMismatchError(
                f"{name}: series route {mpmath.nstr(own, 20)} vs "
                f"reference route {mpmath.nstr(ref, 20)}")
    with mpmath.workdps(dps):
        return +own


def constant(name: str, ctx: PrecisionContext) -> mpf:
    """One of pi, euler_gamma, zeta3, zeta_prime_minus1 at ``ctx``."""
    if name not in _OWN:
        raise KeyError(f"unknown constant {name!r}; choose from {sorted(_OWN)}")
    return _constant(name, ctx.dps)


# --------------------------------------------------------------------------
# Gamma, polygamma, Hurwitz zeta

def _shift_for(dps: int) -> int:
    return max(12, int(0.9 * dps))


def _log_gamma_pos(z: mpf, dps: int) -> mpf:
    with mpmath.workdps(dps + 10):
        z = mpf(z)
        target = _shift_for(dps)
        shift = max(0, int(math.ceil(target - z)))
        w = z + shift
        prod = mpf(1)
        for j in range(shift):
            prod *= z + j
        half_log_2pi = mpmath.log(2 * _constant("pi", dps + 10)) / 2
        s = (w - mpf(1) / 2) * mpmath.log(w) - w + half_log_2pi
        bern = _bern_mpf(dps, dps + 10)
        eps = mpf(10) ** (-dps - 5)
        w2 = w * w
        wp = w
        for k in range(1, len(bern)):
            term = bern[k] / ((2 * k) * (2 * k - 1) * wp)
            s += term
            if abs(term) < eps:
                break
            wp *= w2
        else:
            raise PrecisionError("Stirling series did not converge")
        if shift:
            s -= mpmath.log(prod)
        return s


def log_gamma(z, ctx: PrecisionContext) -> mpf:
    """log Gamma(z) for real z > 0."""
    with ctx.work():
        z = mpf(z)
    if z <= 0:
        raise ValueError(f"log_gamma requires z > 0, got {z}")
    v = _log_gamma_pos(z, ctx.dps)
    with ctx.work():
        return +v


def gamma_fn(z, ctx: PrecisionContext) -> mpf:
    """Gamma(z) for real z > 0."""
    v = log_gamma(z, ctx)
    with ctx.work():
        return mpmath.exp(v)


def _is_nonpositive_integer(z: mpf) -> bool:
    return z <= 0 and z == mpmath.floor(z)


def log_gamma_signed(z, ctx: PrecisionContext):
    """(sign, log|Gamma(z)|) for real z; Gamma has poles at 0, -1, ..."""
    with ctx.work():
        z = mpf(z)
        if z > 0:
            return 1, log_gamma(z, ctx)
        if _is_nonpositive_integer(z):
            raise ValueError(f"Gamma has a pole at {z}")
        # Gamma(z) Gamma(1-z) = pi / sin(pi z)
        sn = mpmath.sinpi(z)
        val = (mpmath.log(constant("pi", ctx)) - mpmath.log(abs(sn))
               - log_gamma(1 - z, ctx))
        return (1 if sn > 0 else -1), val


def _hurwitz_pos(s: int, a: mpf, dps: int) -> mpf:
    with mpmath.workdps(dps + 10):
        a = mpf(a)
        target = _shift_for(dps)
        n_direct = max(0, int(math.ceil(target - a)))
        total = mpf(0)
        for n in range(n_direct):
            total += (a + n) ** (-s)
        w = a + n_direct
        total += w ** (1 - s) / (s - 1) + w ** (-s) / 2
        bern = _bern_mpf(dps, dps + 10)
        eps = mpf(10) ** (-dps - 5) * abs(total)
        # rising factorial s (s+1) ... (s+2k-2)
        rising = mpf(s)
        wpow = w ** (-s - 1)
        w2 = w * w
        fact = mpf(2)
        for k in range(1, len(bern)):
            term = bern[k] / fact * rising * wpow
            total += term
            if abs(term) < eps:
                break
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            fact *= (2 * k + 1) * (2 * k + 2)
            wpow /= w2
        else:
            raise PrecisionError("Euler-Maclaurin tail did not converge")
        return total


def hurwitz_zeta(s: int, a, ctx: PrecisionContext) -> mpf:
    """sum_{n>=0} (a+n)^(-s) for integer s >= 2 and real a > 0."""
    if s < 2:
        raise ValueError("hurwitz_zeta needs integer s >= 2")
    with ctx.work():
        a = mpf(a)
    if a <= 0:
        raise ValueError(f"hurwitz_zeta needs a > 0, got {a}")
    v = _hurwitz_pos(s, a, ctx.dps)
    with ctx.work():
        return +v


def _digamma_pos(z: mpf, dps: int) -> mpf:
    with mpmath.workdps(dps + 10):
        z = mpf(z)
        target = _shift_for(dps)
        shift = max(0, int(math.ceil(target - z)))
        w = z + shift
        s = mpmath.log(w) - 1 / (2 * w)
        bern = _bern_mpf(dps, dps + 10)
        eps = mpf(10) ** (-dps - 5)
        w2 = w * w
        wp = w2
        for k in range(1, len(bern)):
            term = bern[k] / (2 * k * wp)
            s -= term
            if abs(term) < eps:
                break
            wp *= w2
        for j in range(shift):
            s -= 1 / (z + j)
        return s


def polygamma(p: int, z, ctx: PrecisionContext) -> mpf:
    """psi_p(z), the p-th derivative of the digamma function, for z > 0."""
    if not 0 <= p <= 6:
        raise ValueError(f"polygamma order must be in 0..6, got {p}")
    with ctx.work():
        z = mpf(z)
    if z <= 0:
        raise ValueError(f"polygamma requires z > 0, got {z}")
    if p == 0:
        v = _digamma_pos(z, ctx.dps)
    else:
        h = _hurwitz_pos(p + 1, z, ctx.dps)
    with ctx.work():
        if p == 0:
            return +v
        return (-1) ** (p + 1) * math.factorial(p) * h


def _polygamma_real(p: int, z, ctx: PrecisionContext) -> mpf:
    # psi_p(z) = psi_p(z+1) - (-1)^p p! / z^(p+1), continued to z <= 0
    with ctx.work():
        z = mpf(z)
        if _is_nonpositive_integer(z):
            raise ValueError(f"polygamma has a pole at {z}")
        corr = mpf(0)
        while z <= 0:
            corr += (-1) ** p * math.factorial(p) / z ** (p + 1)
            z += 1
        return polygamma(p, z, ctx) - corr


# --------------------------------------------------------------------------
# Barnes G

def _barnes_series(w: mpf, dps: int):
    """log G(w+1) by the large-w expansion; returns (value, smallest term)."""
    with mpmath.workdps(dps + 10):
        lw = mpmath.log(w)
        pi = _constant("pi", dps + 10)
        s = (w * w * (lw / 2 - mpf(3) / 4) + mpmath.log(2 * pi) * w / 2
             - lw / 12 + _constant("zeta_prime_minus1", dps + 10))
        bern = _bern_mpf(int(3.5 * float(w)) + 8, dps + 10)
        eps = mpf(10) ** (-dps - 2)
        w2 = w * w
        wp = w2
        smallest = None
        for k in range(1, len(bern) - 1):
            term = bern[k + 1] / (4 * k * (k + 1) * wp)
            a = abs(term)
            if smallest is not None and a > smallest:
                break  # optimal truncation: stop before terms grow
            s += term
            smallest = a
            if a < eps:
                break
            wp *= w2
        return s, smallest


def log_barnes_g(z, ctx: PrecisionContext) -> mpf:
    """log G(z) for real z > 0.

    The argument is shifted upward with G(z+1) = Gamma(z) G(z) until the
    asymptotic expansion reaches the working precision at its smallest
    term.
    """
    with ctx.work():
        z = mpf(z)
    if z <= 0:
        raise ValueError(f"log_barnes_g requires z > 0, got {z}")
    dps = ctx.dps
    threshold = max(30, ctx.digits // 2)
    with mpmath.workdps(dps + 10):
        target = mpf(10) ** (-(ctx.digits + ctx.guard))
        while True:
            shift = max(0, int(math.ceil(threshold + 1 - z)))
            w = z + shift - 1
            val, smallest = _barnes_series(w, dps)
            if smallest is None or smallest <= target:
                break
            threshold *= 2
        if shift:
            # sum_{j<shift} log Gamma(z+j)
            #   = shift*log Gamma(z) + sum_i (shift-1-i) log(z+i)
            acc = shift * _log_gamma_pos(z, dps)
            prod = mpf(1)
            for i in range(shift - 1):
                prod *= (z + i) ** (shift - 1 - i)
            acc += mpmath.log(prod)
            val -= acc
    with ctx.work():
        return +val


def log_barnes_g_signed(z, ctx: PrecisionContext):
    """(sign, log|G(z)|) for any real z; sign 0 at the zeros 0, -1, -2, ..."""
    with ctx.work():
        z = mpf(z)
        if z > 0:
            return 1, log_barnes_g(z, ctx)
        if _is_nonpositive_integer(z):
            return 0, mpmath.ninf
        # G(z) = G(z+1) / Gamma(z)
        sign = 1
        acc = mpf(0)
        while z <= 0:
            sg, lg = log_gamma_signed(z, ctx)
            sign *= sg
            acc -= lg
            z += 1
        return sign, log_barnes_g(z, ctx) + acc


def log_barnes_g_derivative(order: int, z, ctx: PrecisionContext) -> mpf:
    """d^order/dz^order of log G(z) at real z not a zero of G."""
    if order < 1:
        raise ValueError("order must be >= 1")
    with ctx.work():
        z = mpf(z)
        if order == 1:
            pi = constant("pi", ctx)
            return ((z - 1) * _polygamma_real(0, z, ctx) - z
                    + (1 + mpmath.log(2 * pi)) / 2)
        val = (z - 1) * _polygamma_real(order - 1, z, ctx) + (order - 1) * _polygamma_real(order - 2, z, ctx)
        if order == 2:
            val -= 1
        return val

from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from pascalasym.asymptotics import (R_TABLE, SPECIAL_SERIES, AsymptoticParams, D_asym,
                                    amplitude_A0, f_term, ht_expansion, log_abs_A0,
                                    log_deriv_A0, log_htsasm_exact_form, phi_asym,
                                    phi_series_exact, special_leading_constant,
                                    special_series, zero_sum_check)
from pascalasym.exact_core import eval_D
from pascalasym.mpnum import PrecisionContext, constant
from pascalasym.special_products import htsasm_count, phi_exact


def _A0_oracle(theta, dps=40):
    """Closed form evaluated with mpmath's own Barnes G and zeta'."""
    with mpmath.workdps(dps + 10):
        x = theta / (2 * mpmath.pi)
        pref = (mpf(2) ** (mpf(11) / 36) * mpf(3) ** (mpf(1) / 36) * mpmath.pi ** (mpf(1) / 3)
                * mpmath.exp(-19 * mpmath.zeta(-1, derivative=1) / 3)
                * mpmath.gamma(mpf(1) / 6) ** (-mpf(2) / 3))
        g = mpf(1)
        for a in (1, mpf(4) / 3, mpf(2) / 3):
            g *= mpmath.barnesg(a + x) * mpmath.barnesg(a - x)
        return pref * g


def _pi(fr, dps=60):
    with mpmath.workdps(dps):
        return mpf(fr.numerator) / fr.denominator * mpmath.pi


# ---- R table -------------------------------------------------------------

def test_r_table_shape():
    assert len(R_TABLE) == 7
    assert R_TABLE.exact(1, 0) == Fraction(77, 15552)
    for k in range(1, 8):
        assert R_TABLE.degree(k) == 2 * k + 2
        assert R_TABLE.coeffs[k - 1][-1] != 0
        for t in (Fraction(1, 3), Fraction(5, 7)):
            assert R_TABLE.exact(k, t) == R_TABLE.exact(k, -t)


def test_params_validation():
    with pytest.raises(ValueError):
        AsymptoticParams(k_max=8)
    with pytest.raises(ValueError):
        AsymptoticParams(n_max=-1)


# ---- A0 ------------------------------------------------------------------

def test_A0_examples(ctx30):
    assert abs(amplitude_A0(Fraction(1, 3), ctx30) - 1) < mpf(10) ** -28
    with mpmath.workdps(40):
        want = mpf(3) ** (mpf(1) / 12) * mpf(2) ** (-mpf(5) / 36) * mpmath.exp(-mpmath.zeta(-1, derivative=1))
    assert abs(amplitude_A0(0, ctx30) - want) < mpf(10) ** -28
    assert amplitude_A0(2, ctx30) == 0


@pytest.mark.parametrize("t", [Fraction(0), Fraction(1, 5), Fraction(1, 2), Fraction(2, 3),
                               Fraction(1), Fraction(7, 5)])
def test_A0_against_mpmath_barnesg(t, ctx30):
    want = _A0_oracle(_pi(t))
    got = amplitude_A0(t, ctx30)
    assert abs(got - want) < mpf(10) ** -27 * max(1, abs(want))


def test_A0_even_and_zero_pattern(ctx30):
    for t in (Fraction(2, 7), "0.9", Fraction(5, 4)):
        neg = Fraction(t) * -1 if isinstance(t, Fraction) else "-" + t
        assert abs(amplitude_A0(t, ctx30) - amplitude_A0(neg, ctx30)) < mpf(10) ** -25
    for zero in (Fraction(2), Fraction(4, 3), Fraction(8, 3), Fraction(-4), Fraction(10, 3)):
        assert amplitude_A0(zero, ctx30) == 0
    assert amplitude_A0(Fraction(2, 3), ctx30) != 0


def test_log_deriv_examples(ctx60):
    g = constant("euler_gamma", ctx60)
    with ctx60.work():
        pi, l2, l3 = mpmath.pi, mpmath.log(2), mpmath.log(3)
        tol = mpf(10) ** -50
        v = log_deriv_A0(Fraction(1, 3), 1, ctx60)
        assert abs(v - (-g / (2 * pi) - l2 / pi)) < tol
        assert mpmath.nstr(v, 11) == "-0.31250232645"
        # sign-corrected form at 2pi/3 (the gamma term follows the -3 theta gamma/(2 pi^2) rule)
        assert abs(log_deriv_A0(Fraction(2, 3), 1, ctx60) + (2 * g + 3 * l3) / (2 * pi)) < tol
        second = (log_deriv_A0(0, 2, ctx60) - log_deriv_A0(0, 1, ctx60) ** 2)
        psi = lambda z: mpmath.psi(1, z)
        want = (-3 / (2 * pi ** 2) - 3 * g / (2 * pi ** 2) - 3 * l3 / (2 * pi ** 2)
                + psi(mpf(1) / 3) / (6 * pi ** 2) - psi(mpf(2) / 3) / (6 * pi ** 2))
        assert abs(second - want) < tol


def test_log_deriv_against_oracle_difference(ctx60):
    for t in (Fraction(1, 5), Fraction(1, 2), Fraction(4, 5)):
        d1 = log_deriv_A0(t, 1, ctx60)
        d2 = log_deriv_A0(t, 2, ctx60)
        with mpmath.workdps(90):
            th, h = _pi(t, 90), mpf(10) ** -20
            f = [_A0_oracle(th + i * h, 80) for i in (-1, 0, 1)]
            fd1 = (f[2] - f[0]) / (2 * h) / f[1]
            fd2 = (f[2] - 2 * f[1] + f[0]) / h ** 2 / f[1]
            assert abs(d1 - fd1) < mpf(10) ** -35
            assert abs(d2 - fd2) < mpf(10) ** -35


def test_log_deriv_rejects_zero(ctx30):
    with pytest.raises((ZeroDivisionError, ValueError)):
        log_deriv_A0(Fraction(2), 1, ctx30)


# ---- f and the winding sum -----------------------------------------------

def test_f_term_even(ctx30):
    assert f_term(16, "1.1", ctx=ctx30) == f_term(16, "-1.1", ctx=ctx30)


def test_f_term_against_exact(ctx30):
    sign, logf = f_term(32, Fraction(1, 2), ctx=ctx30)
    with mpmath.workdps(40):
        rel = abs(sign * mpmath.exp(logf) / eval_D(32, Fraction(1, 2), ctx30) - 1)
    # at pi/2 the n = -1 sector enters at relative order L^(-3/2)
    assert rel < mpf(32) ** -1.5
    with mpmath.workdps(40):
        full = abs(D_asym(32, Fraction(1, 2), ctx=ctx30).value / eval_D(32, Fraction(1, 2), ctx30) - 1)
    assert full < rel * 1e-10


def test_D_asym_odd_pi_cancels(ctx30):
    for L in (5, 9, 16 + 1):
        assert D_asym(L, 1, ctx=ctx30).value == 0


def test_D_asym_even_pi_sectors_equal(ctx30):
    res = D_asym(16, 1, ctx=ctx30)
    by_n = {n: (s, v) for n, s, v in res.terms}
    assert by_n[0] == by_n[-1]


@pytest.mark.parametrize("t", [Fraction(0), Fraction(1, 2), Fraction(2, 3)])
def test_D_asym_error_decreases(t):
    ctx = PrecisionContext(40)
    errs = []
    for L in (8, 12, 16, 24, 32):
        with mpmath.workdps(60):
            errs.append(abs(D_asym(L, t, ctx=ctx).value / eval_D(L, t, ctx) - 1))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_D_asym_2pi3_gain(ctx30):
    with mpmath.workdps(50):
        e8 = abs(D_asym(8, Fraction(2, 3), ctx=ctx30).value / eval_D(8, Fraction(2, 3), ctx30) - 1)
        e16 = abs(D_asym(16, Fraction(2, 3), ctx=ctx30).value / eval_D(16, Fraction(2, 3), ctx30) - 1)
    assert e8 / e16 >= 1e3


def test_D_asym_even_in_theta(ctx30):
    a = D_asym(12, "0.7", ctx=ctx30).value
    b = D_asym(12, "-0.7", ctx=ctx30).value
    assert abs(a - b) < mpf(10) ** -25 * abs(a)


def test_truncation_diagnostic_tiny(ctx30):
    res = D_asym(8, 1, ctx=ctx30)
    assert res.last_pair_log10 < -60


@pytest.mark.parametrize("t", [Fraction(1, 5), Fraction(1, 2)])
@pytest.mark.parametrize("n", [-2, -1, 0, 1])
def test_winding_ratio_L_exponent(t, n):
    """The L-exponent of |f_(n+1)|/|f_n| is -3(2n+1) - 3 theta/pi."""
    ctx = PrecisionContext(40)

    def log_ratio(L):
        terms = {m: (s, v) for m, s, v in D_asym(L, t, ctx=ctx).terms}
        return terms[n + 1][1] - terms[n][1]

    with mpmath.workdps(50):
        slope = (log_ratio(2048) - log_ratio(1024)) / mpmath.log(2)
        want = -3 * (2 * n + 1) - 3 * mpf(t.numerator) / t.denominator
        assert abs(slope - want) < mpf(10) ** -3


# ---- phi and the special series ------------------------------------------

def test_phi_asym_examples(ctx30):
    assert abs(phi_asym(16, Fraction(1, 3), ctx=ctx30) - 1) < 1e-2
    lead = special_leading_constant("theta0", ctx30)
    with mpmath.workdps(40):
        pred = lead * mpf(100) ** (mpf(1) / 12) * (1 + mpf(127) / (5184 * 100 ** 2))
        nxt = abs(lead * mpf(100) ** (mpf(1) / 12) * mpf(2041055) / 53747712 / mpf(100) ** 4)
        assert abs(phi_asym(100, 0, ctx=ctx30) - pred) < 2 * nxt
        ratio = phi_asym(mpf(10) ** 6, 0, parity=1, ctx=ctx30) / phi_asym(mpf(10) ** 6, 0, parity=0, ctx=ctx30)
        assert abs(ratio - mpmath.sqrt(3) / 2) < 1e-10


def test_phi_asym_parity_and_pole(ctx30):
    with pytest.raises(ValueError):
        phi_asym(8, 0, parity=1, ctx=ctx30)
    with pytest.raises(ZeroDivisionError):
        phi_asym(9, 1, ctx=ctx30)


@pytest.mark.parametrize("L", [8, 16, 32])
@pytest.mark.parametrize("t", [Fraction(0), Fraction(1, 5), Fraction(1, 2), Fraction(2, 3), "1.1"])
def test_phi_asym_against_exact(L, t):
    ctx = PrecisionContext(40)
    with mpmath.workdps(60):
        rel = abs(phi_asym(L, t, ctx=ctx) / phi_exact(L, t, ctx) - 1)
    assert rel < mpf(L) ** -6


def test_special_series_coefficients():
    assert SPECIAL_SERIES["theta0"][1][1] == Fraction(127, 5184)
    assert SPECIAL_SERIES["thetapi"][1][1] == Fraction(-8, 81)
    assert SPECIAL_SERIES["theta2pi3"][1][1] == Fraction(7, 576)


@pytest.mark.parametrize("which", ["theta0", "theta2pi3", "thetapi", "thetapi3"])
def test_special_series_reassembled(which):
    """The winding sum divided by the A_HT^2 expansion reproduces every coefficient."""
    top, coeffs = SPECIAL_SERIES[which]
    series = phi_series_exact(top)
    for k, c in enumerate(coeffs):
        assert series.c[2 * k] == c
        if 2 * k + 1 < len(series.c):
            assert series.c[2 * k + 1] == 0


def test_special_series_2pi3_vs_exact(ctx30):
    ctx = PrecisionContext(40)
    with mpmath.workdps(60):
        want = phi_exact(40, Fraction(2, 3), ctx)
        rel = abs(special_series("theta2pi3", 40, 7, ctx) / want - 1)
    assert rel < 1e-12


def test_special_leading_constants(ctx30):
    with mpmath.workdps(40):
        assert abs(special_leading_constant("thetapi", ctx30) - 2 * _A0_oracle(mpmath.pi)) < mpf(10) ** -27
        assert abs(special_leading_constant("theta0", ctx30) - _A0_oracle(mpf(0))) < mpf(10) ** -27
        assert special_leading_constant("thetapi3", ctx30) == 1
    with pytest.raises(KeyError):
        special_series("theta1", 10)


@pytest.mark.parametrize("which", ["theta0", "theta2pi3", "thetapi"])
def test_special_series_converges_to_exact(which):
    ctx = PrecisionContext(40)
    top = SPECIAL_SERIES[which][0]
    prev = None
    for L in (16, 32, 64):
        with mpmath.workdps(60):
            rel = abs(special_series(which, L, 7, ctx) / phi_exact(L, top, ctx) - 1)
        if prev is not None:
            assert rel < prev * 1e-3
        prev = rel


def test_ht_expansion_matches_exact_counts(ctx30):
    for parity, L in ((0, 80), (1, 81)):
        exp = ht_expansion(parity, ctx30)
        with mpmath.workdps(50):
            exact = 2 * mpmath.log(htsasm_count(L))
            assert abs(exp.log_value(L) - exact) < mpf(10) ** -24
            assert abs(2 * log_htsasm_exact_form(L, ctx30) - exact) < mpf(10) ** -25
    exp = ht_expansion(0, ctx30)
    with mpmath.workdps(50):
        e80 = exp.log_value(80) - 2 * mpmath.log(htsasm_count(80))
        e120 = exp.log_value(120) - 2 * mpmath.log(htsasm_count(120))
    # truncation after L^-14: the error scales as L^-16
    assert abs(e80 / e120 / mpf(1.5) ** 16 - 1) < 0.05
    assert ht_expansion(0, ctx30).inv[1] == Fraction(-19, 972)
    assert ht_expansion(1, ctx30).inv[1] == Fraction(35, 972)


# ---- zero sums -----------------------------------------------------------

def _brute_zero_sum(p, a, dps=50):
    with mpmath.workdps(dps):
        two_pi = 2 * mpmath.pi

        def term(n):
            n = int(n)
            s = mpf(0)
            for m in (n, -n):
                for c in (0, two_pi / 3, -two_pi / 3):
                    s += n / (two_pi * m + c - a) ** p
            return s

        return mpmath.nsum(term, [1, mpmath.inf])


@pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1, 3), Fraction(1, 2)])
def test_zero_sum_p4(alpha, ctx60):
    lhs, rhs = zero_sum_check(4, alpha, ctx60)
    assert abs(lhs - rhs) < mpf(10) ** (-60 + 8)
    assert abs(lhs - _brute_zero_sum(4, _pi(alpha))) < mpf(10) ** -30


def test_zero_sum_closed_form(ctx60):
    lhs, _ = zero_sum_check(4, 0, ctx60)
    with mpmath.workdps(70):
        pi4 = mpmath.pi ** 4
        want = (27 * mpmath.zeta(3) / (8 * pi4)
                + (mpmath.psi(3, mpf(2) / 3) - mpmath.psi(3, mpf(1) / 3)) / (144 * pi4))
    assert abs(lhs - want) < mpf(10) ** -55


def test_zero_sum_odd_power_vanishes(ctx60):
    lhs, rhs = zero_sum_check(5, 0, ctx60)
    assert abs(lhs) < mpf(10) ** -55 and abs(rhs) < mpf(10) ** -55


@pytest.mark.parametrize("p", [3, 5, 6])
def test_zero_sum_other_powers(p, ctx30):
    lhs, rhs = zero_sum_check(p, Fraction(1, 4), ctx30)
    assert abs(lhs - rhs) < mpf(10) ** -22


def test_zero_sum_rejects(ctx30):
    with pytest.raises(ValueError):
        zero_sum_check(2, 0, ctx30)
    with pytest.raises(ZeroDivisionError):
        zero_sum_check(4, 2, ctx30)

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mpf

from pascalasym.exact_core import (CacheChecksumError, CacheError, CacheInvariantError,
                                   CacheMissError, CharPolyRecord, ThetaValue, bareiss_det,
                                   cache_load, cache_store, char_poly, chebyshev_poly,
                                   det_shifted, eval_D, eval_D_derivatives, get_char_poly,
                                   pascal_matrix, path_counts, path_weight_oracle,
                                   shifted_coeffs)
from pascalasym.mpnum import PrecisionContext, PrecisionError


def _direct_det(L, z):
    """det(B + z I) by mpmath's own LU on the dense matrix."""
    m = mpmath.matrix(L, L)
    for r in range(L):
        for s in range(L):
            m[r, s] = math.comb(r + s, r) + (z if r == s else 0)
    return mpmath.det(m)


def test_pascal_matrix_small():
    assert pascal_matrix(1).rows() == [[1]]
    assert pascal_matrix(2).rows() == [[1, 1], [1, 2]]
    assert pascal_matrix(3).rows() == [[1, 1, 1], [1, 2, 3], [1, 3, 6]]
    with pytest.raises(ValueError):
        pascal_matrix(0)


def test_pascal_matrix_symmetric_unimodular():
    m = pascal_matrix(7)
    assert all(m[r, c] == m[c, r] for r in range(7) for c in range(7))
    assert bareiss_det(m.rows()) == 1


def test_bareiss_against_fraction_elimination():
    rows = [[2, -1, 3, 0], [4, 5, -2, 1], [0, 3, 3, 7], [1, 1, 1, -4]]
    a = [[Fraction(x) for x in r] for r in rows]
    det = Fraction(1)
    for c in range(4):
        p = next(i for i in range(c, 4) if a[i][c])
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, 4):
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    assert bareiss_det(rows) == det


def test_char_poly_small_cases():
    assert char_poly(1).coeffs == (1, -1)
    assert char_poly(2).coeffs == (1, -3, 1)
    c4 = char_poly(4).coeffs
    assert c4[0] == 1 and c4[4] == 1
    assert all(c4[4 - j] == c4[j] for j in range(5))


@pytest.mark.parametrize("L", range(1, 21))
def test_char_poly_invariants_and_samples(L):
    rec = char_poly(L)
    assert rec.check() == []
    # independent check at a sample point not used by the interpolation
    x = L + 3
    rows = pascal_matrix(L).rows()
    for i in range(L):
        rows[i][i] -= x
    assert bareiss_det(rows) == sum(c * x ** k for k, c in enumerate(rec.coeffs))


def test_char_poly_record_check_flags_violations():
    assert CharPolyRecord(2, (1, -3, 2)).check()
    assert CharPolyRecord(2, (2, -3, 1)).check()
    assert CharPolyRecord(2, (1, -3)).check()


def test_theta_parsing():
    assert ThetaValue.parse("1/3") == ThetaValue(1, 3)
    assert ThetaValue.parse("2/6") == ThetaValue(1, 3)
    assert ThetaValue.parse("1") == ThetaValue(1, 1)
    t = ThetaValue.parse("0.5")
    assert not t.is_rational
    assert ThetaValue(3, 3).canonical() == "1/1"


def test_theta_cos_reproducible():
    t = ThetaValue(1, 7)
    with mpmath.workdps(50):
        a = t.cos_multiple(123)
        b = t.cos_multiple(123)
        assert a == b
        assert abs(a - mpmath.cos(123 * mpmath.pi / 7)) < mpf(10) ** -45


def test_eval_D_hand_values(ctx30):
    assert eval_D(1, 0, ctx30) == 2
    assert abs(eval_D(2, Fraction(1, 2), ctx30) - 3) < ctx30.eps()
    assert eval_D(4, 1, ctx30) == 16
    assert eval_D(3, 1, ctx30) == 0


@given(theta=st.fractions(min_value=-3, max_value=3, max_denominator=50))
def test_eval_D_even_in_theta(theta):
    ctx = PrecisionContext(30)
    for L in (5, 8):
        assert eval_D(L, theta, ctx) == eval_D(L, -theta, ctx)


@given(x=st.floats(min_value=-3.1, max_value=3.1, allow_nan=False))
def test_eval_D_real_and_consistent_with_complex_det(x):
    ctx = PrecisionContext(30)
    L = 7
    with mpmath.workdps(60):
        theta = mpf(x)
        z = mpmath.expj(theta)
        d = det_shifted(L, theta, ctx) * mpmath.expj(-theta * L / 2)
        assert abs(d.imag) < mpf(10) ** -25 * max(1, abs(d))
        assert abs(d.real - eval_D(L, theta, ctx)) < mpf(10) ** -25 * max(1, abs(d))
        direct = _direct_det(L, z) * mpmath.expj(-theta * L / 2)
        assert abs(direct - d) < mpf(10) ** -25 * max(1, abs(d))


def test_eval_D_derivative_hand_values(ctx30):
    d = eval_D_derivatives(2, Fraction(1, 2), 2, ctx30)
    assert abs(d[0] - 3) < ctx30.eps() and abs(d[1] + 2) < ctx30.eps() and abs(d[2]) < ctx30.eps()
    d0 = eval_D_derivatives(2, 0, 2, ctx30)
    assert d0[0] == 5 and d0[1] == 0 and abs(d0[2] + 2) < ctx30.eps()
    for L in (3, 6, 11):
        assert eval_D_derivatives(L, 0, 1, ctx30)[1] == 0
    with pytest.raises(ValueError):
        eval_D_derivatives(2, 0, 9, ctx30)


@pytest.mark.parametrize("L", [3, 8, 13])
@pytest.mark.parametrize("theta", [Fraction(1, 5), Fraction(2, 3), "0.91"])
def test_eval_D_derivative_vs_finite_difference(L, theta):
    ctx = PrecisionContext(40)
    t = ThetaValue.parse(theta) if isinstance(theta, str) else ThetaValue.pi_multiple(theta)
    derivs = eval_D_derivatives(L, t, 3, ctx)
    with mpmath.workdps(120):
        x0 = t.value(PrecisionContext(110))
        h = mpf(10) ** (-ctx.digits // 4)
        hi = PrecisionContext(110)
        fd = (eval_D(L, x0 + h, hi) - eval_D(L, x0 - h, hi)) / (2 * h)
        assert abs(derivs[1] - fd) < mpf(10) ** (-ctx.digits // 4) * max(1, abs(fd))
        k = mpf(10) ** -20
        f = [eval_D(L, x0 + i * k, hi) for i in (-2, -1, 1, 2)]
        fd3 = (f[3] - 2 * f[2] + 2 * f[1] - f[0]) / (2 * k ** 3)
        assert abs(derivs[3] - fd3) < mpf(10) ** -30 * max(1, abs(fd3))


def test_cancellation_is_detected_or_resolved():
    # D(L, theta) near a deep cancellation must either be accurate or raise
    ctx = PrecisionContext(20)
    try:
        v = eval_D(30, "3.14159", ctx)
    except PrecisionError:
        return
    with mpmath.workdps(200):
        ref = eval_D(30, "3.14159", PrecisionContext(180))
        assert abs(v - ref) <= mpf(10) ** -18 * abs(ref)


def test_path_counts_match_char_poly():
    for L in range(1, 6):
        assert path_counts(L) == tuple(shifted_coeffs(char_poly(L)))
    assert path_counts(1) == (1, 1)
    assert path_counts(2) == (1, 3, 1)


def test_path_oracle_examples(ctx30):
    with mpmath.workdps(40):
        t = mpf("0.7")
        z = mpmath.expj(t)
        assert abs(path_weight_oracle(1, t, ctx30) - (1 + z)) < mpf(10) ** -28
        assert abs(path_weight_oracle(2, t, ctx30) - (z * z + 3 * z + 1)) < mpf(10) ** -28
        assert abs(path_weight_oracle(3, 0, ctx30) - _direct_det(3, 1)) < mpf(10) ** -28
    with pytest.raises(ValueError):
        path_weight_oracle(6, 0, ctx30)


def test_cache_roundtrip(tmp_path):
    rec = char_poly(2)
    path = cache_store(rec, tmp_path)
    assert path.name == "charpoly_L2.txt"
    assert path.read_text().splitlines()[:4] == ["pascal-charpoly v1 L=2", "1", "-3", "1"]
    assert cache_load(2, tmp_path) == rec
    assert get_char_poly(2, tmp_path) == rec


def test_cache_errors_are_distinct(tmp_path):
    with pytest.raises(CacheMissError):
        cache_load(5, tmp_path)
    path = cache_store(char_poly(4), tmp_path)
    text = path.read_text().replace("\n72\n", "\n73\n", 1)
    path.write_text(text)
    with pytest.raises(CacheInvariantError) as info:
        cache_load(4, tmp_path)
    assert isinstance(info.value, CacheChecksumError)
    assert not issubclass(CacheMissError, CacheInvariantError)
    assert issubclass(CacheMissError, CacheError)


def test_cache_rejects_structurally_bad_file(tmp_path):
    import hashlib
    body = "pascal-charpoly v1 L=2\n1\n-3\n2\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    (tmp_path / "charpoly_L2.txt").write_text(body + f"sha256={digest}\n")
    with pytest.raises(CacheInvariantError) as info:
        cache_load(2, tmp_path)
    assert not isinstance(info.value, CacheChecksumError)


def test_get_char_poly_populates_cache(tmp_path):
    rec = get_char_poly(6, tmp_path)
    assert (tmp_path / "charpoly_L6.txt").exists()
    assert cache_load(6, tmp_path) == rec


def test_chebyshev_form_matches_D(ctx30):
    for L in (4, 7):
        poly = chebyshev_poly(L)
        with mpmath.workdps(50):
            t = mpf("0.37")
            u = 2 * mpmath.cos(t)
            val = sum(c * u ** k for k, c in enumerate(poly))
            if L % 2:
                val *= 2 * mpmath.cos(t / 2)
            assert abs(val - eval_D(L, t, ctx30)) < mpf(10) ** -28 * abs(val)

"""Fitting amplitudes of the large-L expansion from exact (or synthetic) data.

The scaled quantity

    phi(L, theta) * L^(3 theta^2 / (4 pi^2) - 1/12)
        ~ sum_n sum_k A_k(theta + 2 pi n) L^(-3 n^2 - 3 n theta/pi - k)

is fitted on two staggered windows of L values by exactly determined solves;
the agreement between the two solves measures how far the estimates can be
trusted.  Theta-derivatives bring in powers of log L for the n != 0 sectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import mpmath
from mpmath import mpf

from .asymptotics import AsymptoticParams, phi_asym
from .exact_core import ThetaValue, _as_theta, cache_load, char_poly, eval_D_derivatives
from .intrel import RelationCandidate, Rejection, find_relation
from .mpnum import PrecisionContext
from .special_products import htsasm_count

__all__ = [
    "FitModel",
    "FitResult",
    "DegenerateModelError",
    "InsufficientStabilityError",
    "compute_lhs",
    "default_sectors",
    "fit_amplitudes",
    "recognize",
]


class DegenerateModelError(ValueError):
    """The model cannot be solved; ``collisions`` lists the offending keys."""

    def __init__(self, message, collisions=()):
        super().__init__(message)
        self.collisions = list(collisions)


class InsufficientStabilityError(ValueError):
    pass


def _key(n: int, k: int, j: int) -> str:
    return f"n={n},k={k},log={j}"


def _zero_multiplicity(theta_over_pi) -> int:
    """Order of the zero of A0 at theta (0 when A0(theta) != 0)."""
    if not isinstance(theta_over_pi, Fraction):
        return 0
    t = theta_over_pi / 2          # theta / (2 pi)
    for off in (Fraction(0), Fraction(1, 3), Fraction(-1, 3)):
        m = t - off
        if m.denominator == 1 and m != 0:
            return abs(int(m))
    return 0


def default_sectors(theta: ThetaValue) -> tuple:
    t = abs(theta.over_pi) if theta.is_rational else abs(mpf(theta.real) / mpmath.pi)
    if t <= Fraction(2, 3):
        return (0, -1, 1)
    return (0, -1, 1, -2)


@dataclass(frozen=True)
class FitModel:
    theta: ThetaValue
    derivative_order: int = 0
    sectors: Optional[tuple] = None
    k_terms: int = 8
    log_powers: Optional[int] = None
    parity: str = "even"
    even_only: bool = True
    scaled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "theta", _as_theta(self.theta))
        if not 0 <= self.derivative_order <= 2:
            raise ValueError("derivative_order must be 0, 1 or 2")
        if self.sectors is None:
            object.__setattr__(self, "sectors", default_sectors(self.theta))
        if self.log_powers is None:
            object.__setattr__(self, "log_powers", self.derivative_order)
        if self.parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd'")
        if self.k_terms < 1:
            raise ValueError("k_terms must be positive")

    def _over_pi(self):
        if self.theta.is_rational:
            return self.theta.over_pi
        return mpf(self.theta.real) / mpmath.pi

    def exponent(self, n: int, k: int):
        t = self._over_pi()
        if self.scaled:
            return -3 * n * n - 3 * n * t - k
        return Fraction(1, 12) - Fraction(3, 4) * (t + 2 * n) ** 2 - k if isinstance(t, Fraction) \
            else mpf(1) / 12 - 3 * (t + 2 * n) ** 2 / 4 - k

    def k_values(self) -> list:
        step = 2 if self.even_only else 1
        return [step * i for i in range(self.k_terms)]

    def basis(self):
        """Unknowns as [(exponent, log power, [member keys])] plus the merge list."""
        t = self._over_pi()
        slots = {}
        order = []
        merged = []
        for n in sorted(self.sectors, key=lambda n: (abs(n), n)):
            mult = _zero_multiplicity(t + 2 * n)
            if mult > self.derivative_order:
                continue
            top_j = self.log_powers - mult
            if self.scaled and n == 0:
                top_j = 0
            for k in self.k_values():
                e = self.exponent(n, k)
                ekey = e if isinstance(e, Fraction) else mpmath.nstr(e, 25)
                for j in range(top_j + 1):
                    sk = (ekey, j)
                    key = _key(n, k, j)
                    if sk in slots:
                        slots[sk][2].append(key)
                        merged.append((slots[sk][2][0], key))
                    else:
                        slots[sk] = (e, j, [key])
                        order.append(sk)
        return [slots[s] for s in order], merged


@dataclass
class FitResult:
    estimates: dict
    residual: mpf
    stability: int
    secondary: dict = field(default_factory=dict)
    digits: dict = field(default_factory=dict)
    merged: list = field(default_factory=list)
    windows: tuple = ()
    model: Optional[FitModel] = None

    def estimate(self, n: int = 0, k: int = 0, j: int = 0) -> mpf:
        return self.estimates[_key(n, k, j)]

    def to_json(self, digits: int = 30) -> dict:
        return {
            "estimates": {k: mpmath.nstr(v, digits) for k, v in self.estimates.items()},
            "stability": self.stability,
            "digits": dict(self.digits),
            "residual": mpmath.nstr(self.residual, 5),
            "merged": [list(m) for m in self.merged],
            "windows": [list(w) for w in self.windows],
        }


def _record(L: int, cache_dir):
    return cache_load(L, cache_dir) if cache_dir is not None else char_poly(L)


def _scale_derivs(L, theta: mpf, order: int) -> list:
    """s^(j)/s for s = L^(3 theta^2/(4 pi^2)) (the constant power drops out)."""
    c = 3 * mpmath.log(L) / (4 * mpmath.pi ** 2)
    # s^(j)/s = p_j(theta), p_{j+1} = p_j' + 2 c theta p_j
    polys = [[mpf(1)]]
    for _ in range(order):
        p = polys[-1]
        dp = [i * p[i] for i in range(1, len(p))] + [mpf(0), mpf(0)]
        nxt = [mpf(0)] * (len(p) + 1)
        for i, a in enumerate(dp[: len(p)]):
            nxt[i] += a
        for i, a in enumerate(p):
            nxt[i + 1] += 2 * c * a
        polys.append(nxt)
    return [mpmath.polyval(list(reversed(p)), theta) for p in polys]


def compute_lhs(L: int, theta, derivative_order: int, ctx: PrecisionContext,
                cache_dir=None, scaled: bool = True) -> mpf:
    """d^r/dtheta^r of phi(L, theta) L^(3 theta^2/(4 pi^2) - 1/12) from exact data.

    With ``cache_dir`` the characteristic polynomial must already be cached
    (a missing entry raises :class:`~pascalasym.exact_core.CacheMissError`).
    """
    if L < 2 or L % 2:
        raise ValueError("compute_lhs needs an even L >= 2")
    theta = _as_theta(theta)
    record = _record(L, cache_dir)
    d = eval_D_derivatives(L, theta, derivative_order, ctx, record=record)
    with ctx.work():
        a2 = mpf(htsasm_count(L)) ** 2
        phis = [x / a2 for x in d]
        if not scaled:
            return phis[derivative_order]
        th = theta.value(ctx)
        s = mpf(L) ** (3 * th * th / (4 * mpmath.pi ** 2) - mpf(1) / 12)
        sd = _scale_derivs(mpf(L), th, derivative_order)
        r = derivative_order
        return s * sum(math.comb(r, i) * phis[i] * sd[r - i] for i in range(r + 1))


def _synthetic(L, model: FitModel, ctx: PrecisionContext, params: AsymptoticParams) -> mpf:
    if model.derivative_order:
        raise ValueError("synthetic data supports derivative_order 0 only")
    parity = 0 if model.parity == "even" else 1
    v = phi_asym(L, model.theta, parity=parity, params=params, ctx=ctx)
    if not model.scaled:
        return v
    with ctx.work():
        th = model.theta.value(ctx)
        return v * mpf(L) ** (3 * th * th / (4 * mpmath.pi ** 2) - mpf(1) / 12)


def _solve(rows, rhs, dps):
    with mpmath.workdps(dps):
        try:
            return mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
        except ZeroDivisionError as exc:
            raise DegenerateModelError("singular fit system") from exc


def fit_amplitudes(theta, L_values: Sequence[int], model: Optional[FitModel] = None,
                   ctx: PrecisionContext = PrecisionContext(), source: str = "exact",
                   cache_dir=None, data: Optional[Callable] = None,
                   params: AsymptoticParams = AsymptoticParams()) -> FitResult:
    """Fit the amplitudes of ``model`` to data at the given L values.

    ``source`` is "exact" (characteristic-polynomial data) or "asym"
    (synthetic data from the winding sum); ``data`` overrides both with a
    callable ``(L, ctx) -> mpf``.
    """
    theta = _as_theta(theta)
    model = model or FitModel(theta)
    if model.theta != theta:
        raise ValueError("model theta differs from the requested theta")
    unknowns, merged = model.basis()
    n_unk = len(unknowns)
    Ls = sorted(set(int(L) for L in L_values))
    if len(Ls) < n_unk + 2:
        raise DegenerateModelError(
            f"{n_unk} unknowns need at least {n_unk + 2} L values, got {len(Ls)}", merged)
    wctx = PrecisionContext(2 * ctx.digits, ctx.guard)
    if data is None:
        if source == "exact":
            def data(L, c):
                return compute_lhs(L, theta, model.derivative_order, c, cache_dir, model.scaled)
        elif source == "asym":
            def data(L, c):
                return _synthetic(L, model, c, params)
        else:
            raise ValueError("source must be 'exact' or 'asym'")
    values = {L: data(L, wctx) for L in Ls}

    with wctx.work():
        def row(L):
            lg = mpmath.log(L)
            out = []
            for e, j, _ in unknowns:
                em = mpf(e.numerator) / e.denominator if isinstance(e, Fraction) else e
                out.append(mpf(L) ** em * lg ** j)
            return out

        primary = Ls[-n_unk:]
        shifted = Ls[-n_unk - 1:-1]
        sol_a = _solve([row(L) for L in primary], [values[L] for L in primary], wctx.dps)
        sol_b = _solve([row(L) for L in shifted], [values[L] for L in shifted], wctx.dps)
        keys = [u[2][0] for u in unknowns]
        est = {k: sol_a[i] for i, k in enumerate(keys)}
        sec = {k: sol_b[i] for i, k in enumerate(keys)}
        lead = abs(est[keys[0]]) if est[keys[0]] else mpf(1)
        digits = {}
        for k in keys:
            scale = max(abs(est[k]), lead)
            diff = abs(est[k] - sec[k])
            digits[k] = ctx.digits if diff == 0 else max(0, min(ctx.digits, int(-mpmath.log10(diff / scale))))
        residual = mpf(0)
        for L in Ls[: -n_unk]:
            model_val = sum(a * b for a, b in zip(row(L), sol_a))
            ref = abs(values[L]) or mpf(1)
            residual = max(residual, abs(model_val - values[L]) / ref)
        lead_key = _key(0, 0, 0) if _key(0, 0, 0) in est else keys[0]
    return FitResult(est, residual, digits[lead_key], sec, digits, merged,
                     (tuple(primary), tuple(shifted)), model)


def recognize(fit: FitResult, constant_basis: Sequence, ctx: PrecisionContext,
              key: str = "n=0,k=0,log=0", min_stability: int = 6):
    """Look for a rational combination of ``constant_basis`` equal to an estimate.

    ``constant_basis`` holds ``(name, value)`` pairs where a value may be a
    callable ``dps -> mpf``.  An accepted candidate is checked once more
    against the basis recomputed at twice the working precision.
    """
    stab = fit.digits.get(key, fit.stability)
    if stab < min_stability:
        raise InsufficientStabilityError(f"{key} is stable to {stab} digits, need {min_stability}")
    x = fit.estimates[key]
    n = len(constant_basis)
    p = max(stab - 1, 2 * (n + 1))
    cand = find_relation(x, list(constant_basis), p)
    if isinstance(cand, Rejection):
        return cand
    dps = 2 * ctx.dps
    with mpmath.workdps(dps):
        vals = [(v(dps) if callable(v) else mpf(v)) for _, v in constant_basis]
        recon = sum(mpf(r.numerator) / r.denominator * v
                    for r, v in zip(cand.rational_coefficients, vals))
        if abs(recon - x) > mpf(10) ** (-(stab - n - 2)) * max(1, abs(x)):
            return Rejection("relation does not survive re-verification at doubled precision",
                             0, p, cand.coefficients)
    return cand

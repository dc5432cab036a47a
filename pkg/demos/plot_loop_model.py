"""
Loop counts in the O(1) loop model on a cylinder
================================================

The coefficients of D / A_HT^2 in powers of 2cos(theta) give the exact
distribution P(L, m) of non-contractible loops.  Its moments approach the
asymptotic formulas; the wrapping probability decays like L^(-5/48).
"""

import mpmath

from pascalasym import PrecisionContext, loop_probabilities
from pascalasym.loop_observables import (mean_loops_asym, mean_loops_exact,
                                         wrap_prefactor, wrap_probability_exact)

ctx = PrecisionContext(30)

# the exact distribution for a small cylinder
print("P(6, m) =", loop_probabilities(6).to_strings())

# mean number of loops, exact against asymptotic
for L in (8, 16, 32, 64):
    exact = mean_loops_exact(L)
    with ctx.work():
        asym = mean_loops_asym(L, "even", ctx)
        print(f"L={L:3d}  <N>={mpmath.nstr(mpmath.mpf(exact.numerator) / exact.denominator, 15)}"
              f"  asym={mpmath.nstr(asym, 15)}")

# wrapping probability times L^(5/48) drifts toward the prefactor
print("\nprefactor:", mpmath.nstr(wrap_prefactor(ctx), 12))
for L in (16, 32, 64):
    w = wrap_probability_exact(L)
    with ctx.work():
        scaled = mpmath.mpf(w.numerator) / w.denominator * mpmath.mpf(L) ** (mpmath.mpf(5) / 48)
        print(f"L={L:3d}  P_wrap * L^(5/48) = {mpmath.nstr(scaled, 12)}")

"""
Exact determinants against the winding-sum asymptotics
=======================================================

D(L, theta) = det(B_L + e^{i theta} I) is computed exactly from the integer
characteristic polynomial of the Pascal matrix, then compared with the
large-L expansion built from Barnes G amplitudes.
"""

from fractions import Fraction

import mpmath

from pascalasym import AsymptoticParams, D_asym, PrecisionContext, char_poly, eval_D

ctx = PrecisionContext(60)
params = AsymptoticParams(n_max=6, k_max=7)

# the characteristic polynomial is exact; its coefficients are palindromic
rec = char_poly(6)
print("L=6 char poly:", rec.coeffs)

# relative error of the expansion shrinks quickly with L
for t in (Fraction(0), Fraction(1, 2), Fraction(2, 3)):
    print(f"\ntheta = {t} pi")
    for L in (8, 16, 24, 32):
        exact = eval_D(L, t, ctx)
        with ctx.work():
            err = abs(D_asym(L, t, params, ctx).value / exact - 1)
        print(f"  L={L:3d}  D={mpmath.nstr(exact, 12):>22}  rel.err={mpmath.nstr(err, 3)}")

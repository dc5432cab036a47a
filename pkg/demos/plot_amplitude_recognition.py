"""
Recovering an amplitude and naming it with LLL
==============================================

An exact linear solve over a window of L values extracts the
leading amplitude of phi and its theta-derivative.  An integer relation
search then expresses the derivative through gamma and log 2.
"""

from fractions import Fraction

import mpmath

from pascalasym import PrecisionContext, amplitude_A0
from pascalasym.asymptotics import log_deriv_A0
from pascalasym.extraction import FitModel, fit_amplitudes
from pascalasym.intrel import find_relation

ctx = PrecisionContext(40)

# synthetic data from the expansion itself: the fit returns A0 to many digits
s = Fraction(1, 5)
fit = fit_amplitudes(s, list(range(40, 193, 8)), FitModel(s, 0, k_terms=6), ctx, source="asym")
with ctx.work():
    print("fitted A0(pi/5) :", mpmath.nstr(fit.estimate(), 25))
    print("closed A0(pi/5) :", mpmath.nstr(amplitude_A0(s, ctx), 25))
    print("digits    :", fit.stability)


# A0(pi/3) = 1 exactly; its log-derivative there is a rational combination of gamma/pi and log(2)/pi
t = Fraction(1, 3)


def x(dps):
    return log_deriv_A0(t, 1, PrecisionContext(dps))


def over_pi(f):
    def at(dps):
        with mpmath.workdps(dps):
            return f() / mpmath.pi
    return at


rel = find_relation(x, [over_pi(lambda: mpmath.euler), over_pi(lambda: mpmath.log(2))], 40,
                    names=["gamma/pi", "log2/pi"])
print(rel.describe(), f"(verified to {rel.verified_digits} digits)")

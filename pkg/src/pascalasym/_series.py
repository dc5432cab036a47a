"""Truncated power series in t with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction


class Series:
    __slots__ = ("c", "order")

    def __init__(self, coeffs, order: int):
        c = [Fraction(x) for x in coeffs][: order + 1]
        c += [Fraction(0)] * (order + 1 - len(c))
        self.c = c
        self.order = order

    @classmethod
    def monomial(cls, power: int, coeff, order: int) -> "Series":
        c = [Fraction(0)] * (order + 1)
        if 0 <= power <= order:
            c[power] = Fraction(coeff)
        return cls(c, order)

    def __add__(self, other):
        if not isinstance(other, Series):
            other = Series([other], self.order)
        return Series([a + b for a, b in zip(self.c, other.c)], self.order)

    __radd__ = __add__

    def __neg__(self):
        return Series([-a for a in self.c], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series([a * other for a in self.c], self.order)
        n = self.order
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.c):
            if a:
                for j in range(n + 1 - i):
                    out[i + j] += a * other.c[j]
        return Series(out, n)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Series":
        """Multiply by t**k (k >= 0)."""
        return Series([Fraction(0)] * k + self.c, self.order)

    def exp(self) -> "Series":
        if self.c[0]:
            raise ValueError("exp needs a series without constant term")
        n = self.order
        # f' = g' f
        out = [Fraction(0)] * (n + 1)
        out[0] = Fraction(1)
        for m in range(1, n + 1):
            s = Fraction(0)
            for k in range(1, m + 1):
                s += k * self.c[k] * out[m - k]
            out[m] = s / m
        return Series(out, n)

    def log(self) -> "Series":
        if self.c[0] != 1:
            raise ValueError("log needs constant term 1")
        n = self.order
        out = [Fraction(0)] * (n + 1)
        # g' = f'/f
        for m in range(1, n + 1):
            s = m * self.c[m]
            for k in range(1, m):
                s -= k * out[k] * self.c[m - k]
            out[m] = s / m
        return Series(out, n)

    def normalized(self) -> "Series":
        return self * (1 / self.c[0])

    def __repr__(self):
        return f"Series({[str(x) for x in self.c]})"

"""Truncated Taylor jets in one variable over mpmath numbers.

A ``Jet`` at a point s0 stores c_0..c_n with f(s0 + h) = sum c_k h^k + O(h^{n+1}),
so the k-th derivative is k! * c_k.  All arithmetic is closed-form; these
are how analytic s-derivatives are carried through the tau-function code.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mp


def to_mpf(x):
    """Exact conversion of int/Fraction/str into the current mp context."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return x
    return mp.mpf(x)


def as_fraction(x) -> Fraction:
    """Exact rational value of an int, Fraction, decimal string or mpf."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        return Fraction(man) * Fraction(2) ** exp
    return Fraction(x)


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence):
        self.c = list(coeffs)

    @classmethod
    def constant(cls, value, order: int) -> Jet:
        return cls([to_mpf(value)] + [mp.zero] * order)

    @classmethod
    def variable(cls, s0, order: int) -> Jet:
        """The identity function s, expanded at s0."""
        c = [to_mpf(s0)] + [mp.zero] * order
        if order >= 1:
            c[1] = mp.one
        return cls(c)

    @classmethod
    def from_polynomial(cls, coeffs: Sequence, s0, order: int) -> Jet:
        """Expand sum_k coeffs[k] s^k around s0 (coefficients numeric or Fraction)."""
        x = cls.variable(s0, order)
        out = cls.constant(0, order)
        for a in reversed(coeffs):
            out = out * x + cls.constant(a, order)
        return out

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, n: int = 0):
        """n-th derivative at the expansion point."""
        return self.c[n] * mp.factorial(n)

    def derivatives(self) -> list:
        return [self.derivative(k) for k in range(len(self.c))]

    def truncate(self, order: int) -> Jet:
        return Jet(self.c[: order + 1])

    def _lift(self, other) -> Jet:
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def __add__(self, other) -> Jet:
        other = self._lift(other)
        n = min(len(self.c), len(other.c))
        return Jet([a + b for a, b in zip(self.c[:n], other.c[:n])])

    __radd__ = __add__

    def __neg__(self) -> Jet:
        return Jet([-a for a in self.c])

    def __sub__(self, other) -> Jet:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Jet:
        return self._lift(other) - self

    def __mul__(self, other) -> Jet:
        if not isinstance(other, Jet):
            k = to_mpf(other)
            return Jet([a * k for a in self.c])
        n = min(len(self.c), len(other.c))
        a, b = self.c, other.c
        return Jet([mp.fsum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)])

    __rmul__ = __mul__

    def reciprocal(self) -> Jet:
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("jet with zero constant term")
        inv0 = 1 / a[0]
        r = [inv0]
        for k in range(1, len(a)):
            r.append(-inv0 * mp.fsum(a[i] * r[k - i] for i in range(1, k + 1)))
        return Jet(r)

    def __truediv__(self, other) -> Jet:
        if not isinstance(other, Jet):
            return self * (1 / to_mpf(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> Jet:
        return self._lift(other) * self.reciprocal()

    def exp(self) -> Jet:
        a = self.c
        e = [mp.exp(a[0])]
        # e' = a' e  =>  k e_k = sum_{i=1..k} i a_i e_{k-i}
        for k in range(1, len(a)):
            e.append(mp.fsum(i * a[i] * e[k - i] for i in range(1, k + 1)) / k)
        return Jet(e)

    def log(self) -> Jet:
        a = self.c
        if a[0] <= 0:
            raise ValueError("log of a jet with nonpositive value")
        out = [mp.log(a[0])]
        # a l' = a'  =>  k a_0 l_k = k a_k - sum_{i=1..k-1} i l_i a_{k-i}
        for k in range(1, len(a)):
            acc = k * a[k] - mp.fsum(i * out[i] * a[k - i] for i in range(1, k))
            out.append(acc / (k * a[0]))
        return Jet(out)

    def deriv(self) -> Jet:
        """Jet of f' (one order lower)."""
        return Jet([k * self.c[k] for k in range(1, len(self.c))])

    def __repr__(self) -> str:
        return "Jet(" + ", ".join(mpmath.nstr(x, 8) for x in self.c) + ")"

"""Exact numbers of the form p + q*sqrt(D) with rational p, q, D.

Spectral radii of 2x2 rational matrices live here, so characteristic values
of finite profile families can be compared and powered without rounding.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering

from gmpy2 import isqrt, is_square


def _sign(v):
    return (v > 0) - (v < 0)


def sign_sqrt2(a: Fraction, b: Fraction, r: Fraction) -> int:
    """sign(a + b*sqrt(r)) for r >= 0."""
    sa, sb = _sign(a), _sign(b) if r else 0
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare squares
    return sa * _sign(a * a - b * b * r)


def sign_sqrt3(a, b, r1, c, r2) -> int:
    """sign(a + b*sqrt(r1) + c*sqrt(r2)) for r1, r2 >= 0."""
    if not b or not r1:
        return sign_sqrt2(a, c, r2)
    if not c or not r2:
        return sign_sqrt2(a, b, r1)
    s1, s2 = _sign(b), _sign(c)
    su = s1 if s1 == s2 else s1 * _sign(b * b * r1 - c * c * r2)
    sa = _sign(a)
    if su == 0:
        return sa
    if sa == 0 or sa == su:
        return su
    # opposite signs: the larger magnitude wins, u^2 = b^2 r1 + c^2 r2 + 2bc sqrt(r1 r2)
    d = sign_sqrt2(b * b * r1 + c * c * r2 - a * a, 2 * b * c, r1 * r2)
    return su if d > 0 else (sa if d < 0 else 0)


def _square_part(D: Fraction):
    """Return (k, r) with D = k^2 * r, r squarefree-ish; k rational."""
    if D == 0:
        return Fraction(0), Fraction(0)
    num = D.numerator * D.denominator
    den = D.denominator
    if is_square(num):
        return Fraction(int(isqrt(num)), den), Fraction(1)
    # pull out small square factors so equal radicals compare cheaply
    k = 1
    p = 2
    while p * p <= num and p < 64:
        while num % (p * p) == 0:
            num //= p * p
            k *= p
        p += 1
    return Fraction(k, den), Fraction(num)


@total_ordering
class Surd:
    __slots__ = ("p", "q", "D")

    def __init__(self, p=0, q=0, D=0):
        p, q, D = Fraction(p), Fraction(q), Fraction(D)
        if D < 0:
            raise ValueError("negative radicand")
        k, r = _square_part(D)
        if r == 1:
            p, q, r = p + q * k, Fraction(0), Fraction(0)
        else:
            q = q * k
        if q == 0:
            r = Fraction(0)
        self.p, self.q, self.D = p, q, r

    @classmethod
    def sqrt(cls, D):
        return cls(0, 1, D)

    @property
    def is_rational(self):
        return self.q == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return self.p

    def _coerce(self, other):
        if isinstance(other, Surd):
            return other
        if isinstance(other, (int, Fraction)):
            return Surd(other)
        return NotImplemented

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare Surd with {type(other).__name__}")
        if self.D == o.D:
            return sign_sqrt2(self.p - o.p, self.q - o.q, self.D)
        return sign_sqrt3(self.p - o.p, self.q, self.D, -o.q, o.D)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp(o) == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __hash__(self):
        return hash(self.p) if self.q == 0 else hash((self.p, self.q, self.D))

    def __neg__(self):
        return Surd(-self.p, -self.q, self.D)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.q and self.q and o.D != self.D:
            raise ValueError("sum of surds with different radicands")
        return Surd(self.p + o.p, self.q + o.q, self.D or o.D)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.q and self.q and o.D != self.D:
            raise ValueError("product of surds with different radicands")
        D = self.D or o.D
        return Surd(self.p * o.p + self.q * o.q * D, self.p * o.q + self.q * o.p, D)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.q:
            raise ValueError("division by an irrational surd is not supported")
        return Surd(self.p / o.p, self.q / o.p, self.D)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers not supported")
        out = Surd(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(self.D)

    def bracket(self, digits: int = 15):
        """Rational lo <= self <= hi with hi - lo <= 10**-digits."""
        if self.q == 0:
            return self.p, self.p
        scale = 10 ** (digits + 2) * max(1, abs(self.q).__ceil__())
        # sqrt(D) = sqrt(n/d) = sqrt(n*d)/d
        n, d = self.D.numerator, self.D.denominator
        s = int(isqrt(n * d * scale * scale))
        lo_r = Fraction(s, d * scale)
        hi_r = Fraction(s + 1, d * scale)
        a, b = self.p + self.q * lo_r, self.p + self.q * hi_r
        return (a, b) if a <= b else (b, a)

    def __repr__(self):
        if self.q == 0:
            return f"Surd({self.p})"
        return f"Surd({self.p} + {self.q}*sqrt({self.D}))"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        return f"{self.p}+{self.q}*sqrt({self.D})"

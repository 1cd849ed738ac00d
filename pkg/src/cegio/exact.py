"""Exact arithmetic for path lengths.

A path length is a sum of square roots of rationals. ``RootSum`` keeps such
values in the canonical form ``q0 + q1*sqrt(s1) + ... + qk*sqrt(sk)`` with
distinct squarefree integers ``s_i > 1``. Square roots of distinct squarefree
integers are linearly independent over the rationals, so a canonical value is
zero exactly when every coefficient is zero; otherwise its sign is found by
evaluating with increasing decimal precision until the error bound is beaten.
"""

from __future__ import annotations

import decimal
import functools
import math
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Number = Union[int, Fraction, Decimal, str, float]


def as_rational(value) -> Fraction:
    """Convert a numeric literal to an exact Fraction.

    Floats are read as their shortest decimal repr, so ``0.1`` becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a number here")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    return Fraction(value)


@functools.lru_cache(maxsize=65536)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(a, s)`` with ``n == a*a*s`` and ``s`` squarefree."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0, 1
    a, s = 1, 1
    rest = n
    p = 2
    # after removing primes up to the cube root, what is left has at most two
    # prime factors: it is 1, a prime, a product of two primes, or a square
    while p * p * p <= rest:
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            a *= p ** (e // 2)
            if e % 2:
                s *= p
        p += 1 if p == 2 else 2
    r = math.isqrt(rest)
    if r * r == rest:
        a *= r
    else:
        s *= rest
    return a, s


@functools.total_ordering
class RootSum:
    """Exact value ``rational + sum(coeff * sqrt(radicand))``."""

    __slots__ = ("rational", "roots")

    def __init__(self, rational: Number = 0, roots: Iterable[tuple[int, Fraction]] = ()):
        self.rational = as_rational(rational)
        merged: dict[int, Fraction] = {}
        for s, q in roots:
            if s == 1:
                self.rational += q
                continue
            merged[s] = merged.get(s, Fraction(0)) + q
        self.roots = tuple(sorted((s, q) for s, q in merged.items() if q != 0))

    @classmethod
    def sqrt(cls, value: Number) -> "RootSum":
        q = as_rational(value)
        if q < 0:
            raise ValueError(f"square root of negative value {q}")
        # sqrt(n/d) = sqrt(n*d) / d
        a, s = squarefree_split(q.numerator * q.denominator)
        coeff = Fraction(a, q.denominator)
        if s == 1:
            return cls(coeff)
        return cls(0, [(s, coeff)])

    @classmethod
    def coerce(cls, value) -> "RootSum":
        if isinstance(value, RootSum):
            return value
        return cls(as_rational(value))

    @property
    def is_rational(self) -> bool:
        return not self.roots

    def __add__(self, other):
        try:
            other = RootSum.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return RootSum(self.rational + other.rational, self.roots + other.roots)

    __radd__ = __add__

    def __neg__(self):
        return RootSum(-self.rational, [(s, -q) for s, q in self.roots])

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __sub__(self, other):
        try:
            other = RootSum.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RootSum):
            if other.is_rational:
                other = other.rational
            elif self.is_rational:
                return other * self.rational
            else:
                return NotImplemented
        if not isinstance(other, (Rational, Decimal, str)):
            return NotImplemented
        k = as_rational(other)
        return RootSum(self.rational * k, [(s, q * k) for s, q in self.roots])

    __rmul__ = __mul__

    def decimal(self, digits: int) -> tuple[Decimal, Decimal]:
        """Approximate value and an upper bound on its absolute error."""
        ctx = decimal.Context(prec=digits + 5)
        num = ctx.divide(Decimal(self.rational.numerator), Decimal(self.rational.denominator))
        err = abs(num) * Decimal(10) ** (-digits)
        for s, q in self.roots:
            root = ctx.sqrt(Decimal(s))
            term = ctx.divide(ctx.multiply(root, Decimal(q.numerator)), Decimal(q.denominator))
            num = ctx.add(num, term)
            err += abs(term) * Decimal(10) ** (-digits)
        return num, err + Decimal(10) ** (-digits)

    def sign(self) -> int:
        if not self.roots:
            return (self.rational > 0) - (self.rational < 0)
        if self.rational >= 0 and all(q > 0 for _, q in self.roots):
            return 1
        if self.rational <= 0 and all(q < 0 for _, q in self.roots):
            return -1
        digits = 30
        while True:
            approx, err = self.decimal(digits)
            if approx > err:
                return 1
            if approx < -err:
                return -1
            digits *= 2

    def __eq__(self, other):
        try:
            other = RootSum.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.rational == other.rational and self.roots == other.roots

    def __lt__(self, other):
        try:
            other = RootSum.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        if not self.roots:
            return hash(self.rational)
        return hash((self.rational, self.roots))

    def __float__(self):
        approx, _ = self.decimal(20)
        return float(approx)

    def quantize(self, places: int) -> Decimal:
        """Round to ``places`` decimal places (half-even)."""
        approx, _ = self.decimal(places + 30)
        return approx.quantize(Decimal(1).scaleb(-places), rounding=decimal.ROUND_HALF_EVEN)

    def __repr__(self):
        parts = []
        if self.rational or not self.roots:
            parts.append(str(self.rational))
        for s, q in self.roots:
            parts.append(f"{q}*sqrt({s})" if q != 1 else f"sqrt({s})")
        return "RootSum(" + " + ".join(parts) + ")"

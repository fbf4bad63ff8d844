"""Exact signed dyadic rationals ``numerator / 2**exponent``.

Every finite qubit-string state has a value of this form, so this type is
the currency used for value semantics and for brute-force oracles.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import functools


@functools.total_ordering
@dataclass(frozen=True)
class DyadicValue:
    """A value ``numerator / 2**exponent`` kept in lowest terms.

    The canonical form has an odd numerator, or ``numerator == 0`` with
    ``exponent == 0``. Use :meth:`make` to build from an arbitrary pair.
    """

    numerator: int = 0
    exponent: int = 0

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be nonnegative")
        if self.numerator == 0:
            if self.exponent != 0:
                raise ValueError("zero must have exponent 0")
        elif self.exponent > 0 and self.numerator % 2 == 0:
            raise ValueError("numerator must be odd when exponent > 0")

    @classmethod
    def make(cls, numerator: int, exponent: int = 0) -> "DyadicValue":
        """Normalize ``numerator * 2**-exponent``; ``exponent`` may be negative."""
        if numerator == 0:
            return cls(0, 0)
        if exponent < 0:
            return cls(numerator << -exponent, 0)
        tz = (numerator & -numerator).bit_length() - 1
        shift = min(tz, exponent)
        return cls(numerator >> shift, exponent - shift)

    @classmethod
    def from_fraction(cls, q: Fraction | int) -> "DyadicValue":
        q = Fraction(q)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return cls.make(q.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> "DyadicValue":
        """Parse a decimal or ``p/q`` literal whose value is dyadic."""
        return cls.from_fraction(Fraction(text.strip()))

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def _aligned(self, other: "DyadicValue") -> tuple[int, int, int]:
        k = max(self.exponent, other.exponent)
        return (self.numerator << (k - self.exponent),
                other.numerator << (k - other.exponent), k)

    def __add__(self, other):
        if not isinstance(other, DyadicValue):
            return NotImplemented
        a, b, k = self._aligned(other)
        return DyadicValue.make(a + b, k)

    def __sub__(self, other):
        if not isinstance(other, DyadicValue):
            return NotImplemented
        a, b, k = self._aligned(other)
        return DyadicValue.make(a - b, k)

    def __mul__(self, other):
        if not isinstance(other, DyadicValue):
            return NotImplemented
        return DyadicValue.make(self.numerator * other.numerator,
                                self.exponent + other.exponent)

    def __neg__(self):
        return DyadicValue(-self.numerator, self.exponent)

    def __abs__(self):
        return DyadicValue(abs(self.numerator), self.exponent)

    def __lt__(self, other):
        if not isinstance(other, DyadicValue):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a < b

    def sign(self) -> int:
        return (self.numerator > 0) - (self.numerator < 0)

    def decimal(self) -> str:
        """Exact decimal expansion; always terminates for a dyadic value."""
        n, k = self.numerator, self.exponent
        if k == 0:
            return str(n)
        digits = str(abs(n) * 5 ** k).rjust(k + 1, "0")
        head, tail = digits[:-k], digits[-k:].rstrip("0")
        return ("-" if n < 0 else "") + head + "." + tail

    def __str__(self) -> str:
        return self.decimal()

"""Exact coefficients in Q(i, sqrt2).

A coefficient is ``p0 + p1*i + p2*sqrt2 + p3*i*sqrt2`` with rational ``p*``.
This field is closed under every gate the symbolic simulator accepts, so
amplitudes never need floating point until an explicit ``complex(c)``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

_ZERO = mpq(0)
_ONE = mpq(1)
_SQRT2 = math.sqrt(2.0)


def to_rational(value) -> mpq:
    """Convert an int, Fraction, mpq or rational string ("3/4") to ``mpq``.

    Floats are rejected on purpose: they would silently smuggle rounding
    error into an exact expression.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a rational coefficient")
    if isinstance(value, (int, Rational)) or type(value).__name__ == "mpq":
        return mpq(value)
    if isinstance(value, str):
        return mpq(Fraction(value.strip()))
    raise TypeError(f"cannot convert {value!r} to an exact rational")


class Coeff:
    __slots__ = ("p0", "p1", "p2", "p3", "_hash")

    def __init__(self, p0=0, p1=0, p2=0, p3=0):
        self.p0 = to_rational(p0)
        self.p1 = to_rational(p1)
        self.p2 = to_rational(p2)
        self.p3 = to_rational(p3)
        self._hash = None

    @classmethod
    def _raw(cls, p0, p1, p2, p3) -> "Coeff":
        # trusted constructor for already-converted mpq values
        c = object.__new__(cls)
        c.p0, c.p1, c.p2, c.p3 = p0, p1, p2, p3
        c._hash = None
        return c

    @classmethod
    def coerce(cls, value) -> "Coeff":
        if isinstance(value, Coeff):
            return value
        if isinstance(value, complex):
            raise TypeError("complex floats are not exact; build a Coeff explicitly")
        return cls._raw(to_rational(value), _ZERO, _ZERO, _ZERO)

    # -- predicates -------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.p0 or self.p1 or self.p2 or self.p3)

    def is_rational(self) -> bool:
        return not (self.p1 or self.p2 or self.p3)

    def is_one(self) -> bool:
        return self.p0 == 1 and self.is_rational()

    def components(self) -> tuple:
        return (self.p0, self.p1, self.p2, self.p3)

    def nonzero_count(self) -> int:
        return (self.p0 != 0) + (self.p1 != 0) + (self.p2 != 0) + (self.p3 != 0)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Coeff):
            other = Coeff.coerce(other)
        return Coeff._raw(self.p0 + other.p0, self.p1 + other.p1,
                          self.p2 + other.p2, self.p3 + other.p3)

    __radd__ = __add__

    def __neg__(self):
        return Coeff._raw(-self.p0, -self.p1, -self.p2, -self.p3)

    def __sub__(self, other):
        if not isinstance(other, Coeff):
            other = Coeff.coerce(other)
        return Coeff._raw(self.p0 - other.p0, self.p1 - other.p1,
                          self.p2 - other.p2, self.p3 - other.p3)

    def __rsub__(self, other):
        return Coeff.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Coeff):
            other = Coeff.coerce(other)
        a0, a1, a2, a3 = self.p0, self.p1, self.p2, self.p3
        b0, b1, b2, b3 = other.p0, other.p1, other.p2, other.p3
        if not (b1 or b2 or b3):
            return Coeff._raw(a0 * b0, a1 * b0, a2 * b0, a3 * b0)
        if not (a1 or a2 or a3):
            return Coeff._raw(a0 * b0, a0 * b1, a0 * b2, a0 * b3)
        return Coeff._raw(
            a0 * b0 - a1 * b1 + 2 * (a2 * b2 - a3 * b3),
            a0 * b1 + a1 * b0 + 2 * (a2 * b3 + a3 * b2),
            a0 * b2 + a2 * b0 - a1 * b3 - a3 * b1,
            a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
        )

    __rmul__ = __mul__

    def conj(self) -> "Coeff":
        """Complex conjugate (i -> -i); sqrt2 is real."""
        return Coeff._raw(self.p0, -self.p1, self.p2, -self.p3)

    def sqrt2_conj(self) -> "Coeff":
        return Coeff._raw(self.p0, self.p1, -self.p2, -self.p3)

    def inverse(self) -> "Coeff":
        # z = x + y*sqrt2 with Gaussian rationals x, y;  1/z = (x - y sqrt2) / (x^2 - 2 y^2)
        if not self:
            raise ZeroDivisionError("Coeff division by zero")
        if self.is_rational():
            return Coeff._raw(1 / self.p0, _ZERO, _ZERO, _ZERO)
        conj2 = self.sqrt2_conj()
        w = self * conj2  # Gaussian rational: p2 = p3 = 0
        norm = w.p0 * w.p0 + w.p1 * w.p1
        winv = Coeff._raw(w.p0 / norm, -w.p1 / norm, _ZERO, _ZERO)
        return conj2 * winv

    def __truediv__(self, other):
        return self * Coeff.coerce(other).inverse()

    def __rtruediv__(self, other):
        return Coeff.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("Coeff exponent must be a nonnegative int")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def real_part(self) -> "Coeff":
        return Coeff._raw(self.p0, _ZERO, self.p2, _ZERO)

    def imag_part(self) -> "Coeff":
        return Coeff._raw(self.p1, _ZERO, self.p3, _ZERO)

    # -- comparisons / conversion ----------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Coeff):
            try:
                other = Coeff.coerce(other)
            except TypeError:
                return NotImplemented
        return (self.p0 == other.p0 and self.p1 == other.p1
                and self.p2 == other.p2 and self.p3 == other.p3)

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.p0)
            else:
                self._hash = hash(self.components())
        return self._hash

    def __complex__(self):
        re = float(self.p0) + float(self.p2) * _SQRT2
        im = float(self.p1) + float(self.p3) * _SQRT2
        return complex(re, im)

    def to_strings(self) -> list[str]:
        return [str(p) for p in self.components()]

    @classmethod
    def from_strings(cls, parts) -> "Coeff":
        if len(parts) != 4:
            raise ValueError("coefficient needs exactly four rational components")
        return cls(*parts)

    def __repr__(self):
        return f"Coeff({', '.join(self.to_strings())})"

    def __str__(self):
        pieces = []
        for value, unit in zip(self.components(), ("", "I", "sqrt2", "I*sqrt2")):
            if not value:
                continue
            if not unit:
                pieces.append(str(value))
            elif value == 1:
                pieces.append(unit)
            elif value == -1:
                pieces.append("-" + unit)
            else:
                pieces.append(f"{value}*{unit}")
        if not pieces:
            return "0"
        return " + ".join(pieces).replace("+ -", "- ")


ZERO = Coeff._raw(_ZERO, _ZERO, _ZERO, _ZERO)
ONE = Coeff._raw(_ONE, _ZERO, _ZERO, _ZERO)
I = Coeff._raw(_ZERO, _ONE, _ZERO, _ZERO)
SQRT2 = Coeff._raw(_ZERO, _ZERO, _ONE, _ZERO)
INV_SQRT2 = Coeff._raw(_ZERO, _ZERO, mpq(1, 2), _ZERO)

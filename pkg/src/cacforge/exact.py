"""Exact arithmetic over Q(sqrt(d)).

The modal decomposition of the 4- and 5-wire capacitance matrices produces
eigenvector entries and response coefficients of the form a + b*sqrt(d) with
rational a, b and d in {2, 5}.  Keeping these exact (instead of floating
point) lets pattern subclasses be grouped by literal coefficient identity and
lets golden-table comparisons be performed without tolerance juggling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

_Rat = Union[int, Fraction]


@dataclass(frozen=True)
class Quad:
    """Number a + b*sqrt(d), a and b rational, d a fixed squarefree radicand."""

    a: Fraction
    b: Fraction
    d: int

    def __init__(self, a: _Rat, b: _Rat = 0, d: int = 0) -> None:
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        # Normalise: a pure rational carries d = 0 so that e.g. Quad(1, 0, 5)
        # and Quad(1, 0, 2) compare equal.
        object.__setattr__(self, "d", 0 if b == 0 else int(d))
        if self.b != 0 and self.d <= 0:
            raise ValueError("irrational part requires a positive radicand d")

    def _join(self, other: "Quad") -> int:
        """Common radicand for a binary operation; 0 mixes with anything."""
        if self.d and other.d and self.d != other.d:
            raise ValueError(f"mixed radicands: {self.d} vs {other.d}")
        return self.d or other.d

    @staticmethod
    def _coerce(value: "Quad" | _Rat) -> "Quad":
        if isinstance(value, Quad):
            return value
        return Quad(value)

    def __add__(self, other: "Quad" | _Rat) -> "Quad":
        o = self._coerce(other)
        return Quad(self.a + o.a, self.b + o.b, self._join(o))

    __radd__ = __add__

    def __neg__(self) -> "Quad":
        return Quad(-self.a, -self.b, self.d)

    def __sub__(self, other: "Quad" | _Rat) -> "Quad":
        return self + (-self._coerce(other))

    def __rsub__(self, other: _Rat) -> "Quad":
        return self._coerce(other) + (-self)

    def __mul__(self, other: "Quad" | _Rat) -> "Quad":
        o = self._coerce(other)
        d = self._join(o)
        return Quad(self.a * o.a + d * self.b * o.b,
                    self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def __truediv__(self, other: "Quad" | _Rat) -> "Quad":
        o = self._coerce(other)
        d = self._join(o)
        # (a + b sqrt d)^-1 = (a - b sqrt d) / (a^2 - d b^2)
        norm = o.a * o.a - d * o.b * o.b
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        inv = Quad(o.a / norm, -o.b / norm, d)
        return self * inv

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __float__(self) -> float:
        if self.b == 0:
            return float(self.a)
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self) -> str:
        if self.b == 0:
            return f"Quad({self.a})"
        return f"Quad({self.a} + {self.b}*sqrt({self.d}))"

    def key(self) -> tuple[Fraction, Fraction]:
        """Hashable exact identity, radicand-context implied by the caller."""
        return (self.a, self.b)


ZERO = Quad(0)
ONE = Quad(1)


def quad_sqrt5(a: _Rat, b: _Rat) -> Quad:
    return Quad(a, b, 5)


def quad_sqrt2(a: _Rat, b: _Rat) -> Quad:
    return Quad(a, b, 2)

"""Exact Gaussian-rational arithmetic.

Every scalar in this package is an element of Q(i): a complex number whose
real and imaginary parts are rational.  Rank, isotropy and degree decisions
are exact at this field, so there is no tolerance management anywhere;
equality is equality.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .errors import InputError


def _coerce(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise InputError(f"expected int or Fraction, got {type(x).__name__}")


def fraction_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if none exists."""
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


class Scalar:
    """A Gaussian rational re + im*i.  Treat instances as immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _coerce(re)
        self.im = _coerce(im)

    def __add__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __mul__(self, other: "Scalar") -> "Scalar":
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "Scalar") -> "Scalar":
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Scalar")
        # z / w = z * conj(w) / |w|^2
        re = (self.re * other.re + self.im * other.im) / n
        im = (self.im * other.re - self.re * other.im) / n
        return Scalar(re, im)

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def norm(self) -> Fraction:
        """re^2 + im^2, a nonnegative rational."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return f"Scalar({self.re})"
        return f"Scalar({self.re}, {self.im})"

    def sqrt(self) -> "Scalar | None":
        """An exact square root in Q(i), or None when the element is not a square.

        For a + bi with b != 0, a root x + yi must satisfy x^2 = (a + N)/2 and
        y = b/(2x) where N = sqrt(a^2 + b^2); each step is an exact rational
        square-root test.
        """
        a, b = self.re, self.im
        if b == 0:
            r = fraction_sqrt(a)
            if r is not None:
                return Scalar(r)
            r = fraction_sqrt(-a)
            if r is not None:
                return Scalar(0, r)
            return None
        n = fraction_sqrt(a * a + b * b)
        if n is None:
            return None
        x = fraction_sqrt((a + n) / 2)
        if x is None or x == 0:
            return None
        y = b / (2 * x)
        root = Scalar(x, y)
        if root * root == self:
            return root
        return None


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)
HALF = Scalar(Fraction(1, 2))


def sc(re=0, im=0) -> Scalar:
    """Shorthand constructor, accepting ints or Fractions."""
    return Scalar(re, im)


def parse_fraction(text: str, path: str = "") -> Fraction:
    """Parse a rational written as 'p/q' or 'p' with decimal integer parts."""
    from .errors import ParseError

    if not isinstance(text, str):
        raise ParseError(path, f"expected a rational string, got {type(text).__name__}")
    parts = text.strip().split("/")
    try:
        if len(parts) == 1:
            return Fraction(int(parts[0]))
        if len(parts) == 2:
            num, den = int(parts[0]), int(parts[1])
            if den == 0:
                raise ParseError(path, "zero denominator")
            return Fraction(num, den)
    except ValueError:
        pass
    raise ParseError(path, f"malformed rational {text!r}")


def format_fraction(x: Fraction) -> str:
    """Canonical rendering: 'p' for integers, 'p/q' otherwise, q > 0."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"

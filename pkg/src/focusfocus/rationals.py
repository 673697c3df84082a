"""Exact complex rationals.

Coefficients of every formal series in this package live in Q(i).  A value
is stored as a triple of integers (num_re, num_im, den) over a single
positive denominator with gcd(num_re, num_im, den) = 1, which keeps the
ring operations in plain integer arithmetic (one gcd per produced value)
while `re` and `im` still expose canonical `Fraction`s.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _coerce(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot build an exact rational from {value!r}")


class GaussianRational:
    """An element of Q(i), exact and hashable."""

    __slots__ = ("num_re", "num_im", "den")

    def __init__(self, re=0, im=0):
        fre, fim = _coerce(re), _coerce(im)
        den = fre.denominator * fim.denominator // gcd(fre.denominator, fim.denominator)
        a = fre.numerator * (den // fre.denominator)
        b = fim.numerator * (den // fim.denominator)
        object.__setattr__(self, "num_re", a)
        object.__setattr__(self, "num_im", b)
        object.__setattr__(self, "den", den)

    @classmethod
    def _make(cls, a: int, b: int, d: int) -> "GaussianRational":
        """Build from raw integers a/d + (b/d)i, reducing to canonical form."""
        if d < 0:
            a, b, d = -a, -b, -d
        g = gcd(gcd(a, b), d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        out = object.__new__(cls)
        object.__setattr__(out, "num_re", a)
        object.__setattr__(out, "num_im", b)
        object.__setattr__(out, "den", d)
        return out

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- views ---------------------------------------------------------

    @property
    def re(self) -> Fraction:
        return Fraction(self.num_re, self.den)

    @property
    def im(self) -> Fraction:
        return Fraction(self.num_im, self.den)

    def is_zero(self) -> bool:
        return self.num_re == 0 and self.num_im == 0

    def is_real(self) -> bool:
        return self.num_im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __complex__(self) -> complex:
        return complex(self.num_re / self.den, self.num_im / self.den)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._make(self.num_re, -self.num_im, self.den)

    # -- ring operations -------------------------------------------------

    @staticmethod
    def _lift(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational._make(
            self.num_re * o.den + o.num_re * self.den,
            self.num_im * o.den + o.num_im * self.den,
            self.den * o.den,
        )

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._make(-self.num_re, -self.num_im, self.den)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational._make(
            self.num_re * o.den - o.num_re * self.den,
            self.num_im * o.den - o.num_im * self.den,
            self.den * o.den,
        )

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational._make(
            self.num_re * o.num_re - self.num_im * o.num_im,
            self.num_re * o.num_im + self.num_im * o.num_re,
            self.den * o.den,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        norm = o.num_re * o.num_re + o.num_im * o.num_im
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational._make(
            (self.num_re * o.num_re + self.num_im * o.num_im) * o.den,
            (self.num_im * o.num_re - self.num_re * o.num_im) * o.den,
            self.den * norm,
        )

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = ONE
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- comparisons / hashing -------------------------------------------

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return (self.num_re, self.num_im, self.den) == (o.num_re, o.num_im, o.den)

    def __hash__(self):
        if self.num_im == 0:
            return hash(Fraction(self.num_re, self.den))
        return hash((self.num_re, self.num_im, self.den))

    def __repr__(self):
        if self.num_im == 0:
            return str(Fraction(self.num_re, self.den))
        re = Fraction(self.num_re, self.den)
        im = Fraction(self.num_im, self.den)
        sign = "+" if im >= 0 else "-"
        return f"{re}{sign}{abs(im)}*I"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
HALF = GaussianRational(Fraction(1, 2))
MINUS_HALF_I = GaussianRational(0, Fraction(-1, 2))


def rational_str(value: Fraction) -> str:
    """Exact decimal-free string form, e.g. '-3/4'."""
    return str(value)


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' (or 'p') into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc

"""Certified intervals.

Two kinds are used. ``RationalInterval`` has exact Fraction endpoints and is
used wherever a verdict must be exact (root brackets, windows, continued
fractions). Logarithms go through mpmath's ``iv`` context, whose endpoints
are rounded outward at ``iv.prec`` bits.
"""

from __future__ import annotations

import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterator, Union

from mpmath import iv, libmp

from app.exceptions import IntervalDomainError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]


def _floor_div(p: int, q: int) -> int:
    return p // q


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


@dataclass(frozen=True, slots=True)
class RationalInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: Number) -> RationalInterval:
        v = Fraction(value)
        return cls(v, v)

    @classmethod
    def coerce(cls, value: RationalInterval | Number) -> RationalInterval:
        if isinstance(value, RationalInterval):
            return value
        return cls.point(value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: Number) -> bool:
        return self.lo <= value <= self.hi

    def encloses(self, other: RationalInterval) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def overlaps(self, other: RationalInterval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def sign(self) -> int | None:
        """+1 or -1 when the sign is certified, 0 for the point 0, else None."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def less_than(self, other: RationalInterval | Number) -> bool | None:
        """Tri-state ``self < other``: None when the intervals overlap."""
        o = RationalInterval.coerce(other)
        if self.hi < o.lo:
            return True
        if self.lo >= o.hi:
            return False
        return None

    def less_equal(self, other: RationalInterval | Number) -> bool | None:
        o = RationalInterval.coerce(other)
        if self.hi <= o.lo:
            return True
        if self.lo > o.hi:
            return False
        return None

    def __neg__(self) -> RationalInterval:
        return RationalInterval(-self.hi, -self.lo)

    def __add__(self, other: RationalInterval | Number) -> RationalInterval:
        o = RationalInterval.coerce(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other: RationalInterval | Number) -> RationalInterval:
        o = RationalInterval.coerce(other)
        return RationalInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other: Number) -> RationalInterval:
        return RationalInterval.coerce(other) - self

    def __mul__(self, other: RationalInterval | Number) -> RationalInterval:
        o = RationalInterval.coerce(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> RationalInterval:
        if not self.excludes_zero():
            raise IntervalDomainError(f"reciprocal of interval containing 0: [{self.lo}, {self.hi}]")
        return RationalInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: RationalInterval | Number) -> RationalInterval:
        return self * RationalInterval.coerce(other).reciprocal()

    def __rtruediv__(self, other: Number) -> RationalInterval:
        return RationalInterval.coerce(other) * self.reciprocal()

    def __abs__(self) -> RationalInterval:
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RationalInterval(Fraction(0), max(-self.lo, self.hi))

    def __pow__(self, exponent: int) -> RationalInterval:
        return interval_pow(self, exponent)

    def clamp_below(self, floor: Number) -> RationalInterval:
        """Image of the interval under t -> max(floor, t)."""
        f = Fraction(floor)
        return RationalInterval(max(f, self.lo), max(f, self.hi))

    def round_outward(self, bits: int) -> RationalInterval:
        """Enclose in the dyadic grid 2^-bits to keep denominators bounded."""
        scale = 1 << bits
        lo = _floor_div(self.lo.numerator * scale, self.lo.denominator)
        hi = _ceil_div(self.hi.numerator * scale, self.hi.denominator)
        return RationalInterval(Fraction(lo, scale), Fraction(hi, scale))


def interval_pow(x: RationalInterval, a: int) -> RationalInterval:
    """Exact enclosure of {t^a : t in x}."""
    if a == 0:
        return RationalInterval.point(1)
    if a < 0:
        return interval_pow(x.reciprocal(), -a)
    lo_p, hi_p = x.lo**a, x.hi**a
    if x.lo >= 0:
        return RationalInterval(lo_p, hi_p)
    if x.hi <= 0:
        return RationalInterval(min(lo_p, hi_p), max(lo_p, hi_p))
    if a % 2 == 0:
        return RationalInterval(Fraction(0), max(lo_p, hi_p))
    return RationalInterval(lo_p, hi_p)


@contextmanager
def interval_precision(bits: int) -> Iterator[None]:
    """Temporarily set ``iv.prec``; iv has no workprec of its own."""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def _iv_fraction(value: Fraction):
    return iv.mpf(value.numerator) / value.denominator


def to_iv(x: RationalInterval | Number):
    """Outward-rounded iv enclosure of a rational interval at the current iv.prec."""
    r = RationalInterval.coerce(x)
    return iv.mpf((_iv_fraction(r.lo), _iv_fraction(r.hi)))


def interval_log_abs(x: RationalInterval):
    """Certified enclosure of log|t| over t in x."""
    if not x.excludes_zero():
        raise IntervalDomainError(f"log of interval containing 0: [{x.lo}, {x.hi}]")
    return iv.ln(to_iv(abs(x)))


def iv_log(value: RationalInterval | Number):
    """Certified log of a positive rational or rational interval."""
    r = RationalInterval.coerce(value)
    if r.lo <= 0:
        raise IntervalDomainError(f"log of non-positive interval: [{r.lo}, {r.hi}]")
    return iv.ln(to_iv(r))


def iv_less_than(left, right) -> bool | None:
    """Tri-state comparison of two iv intervals (None when they overlap)."""
    left, right = iv.mpf(left), iv.mpf(right)
    if left.b < right.a:
        return True
    if left.a >= right.b:
        return False
    return None


def iv_overlaps(left, right) -> bool:
    left, right = iv.mpf(left), iv.mpf(right)
    return bool(left.a <= right.b) and bool(right.a <= left.b)


def iv_excludes_zero(x) -> bool:
    x = iv.mpf(x)
    return bool(x.a > 0) or bool(x.b < 0)


def _decimal_exponent(value: Fraction) -> int:
    """floor(log10 |value|) for nonzero value."""
    v = abs(value)
    e = len(str(v.numerator)) - len(str(v.denominator))
    if Fraction(10) ** e > v:
        e -= 1
    return e


def decimal_bound(value: Fraction, digits: int, upward: bool) -> str:
    """value rounded to ``digits`` significant digits toward +inf (upward) or -inf."""
    if value == 0:
        return "0"
    e = _decimal_exponent(value)
    shift = digits - 1 - e
    scaled = value * Fraction(10) ** shift
    k = math.ceil(scaled) if upward else math.floor(scaled)
    with localcontext() as ctx:
        ctx.prec = digits + 4
        d = Decimal(int(k)).scaleb(-shift)
    return format(d, "f") if -25 <= e <= 25 else str(d)


def rational_endpoints(x: RationalInterval, digits: int = 20) -> tuple[str, str]:
    """Decimal strings for a rational interval, rounded outward."""
    return decimal_bound(x.lo, digits, upward=False), decimal_bound(x.hi, digits, upward=True)


def iv_endpoints(x, digits: int = 20) -> tuple[str, str]:
    """Decimal strings for an iv interval, rounded outward."""
    return rational_endpoints(iv_to_rational(x), digits)


def iv_to_rational(x) -> RationalInterval:
    """Exact rational interval with the same (finite) endpoints as an iv interval."""
    lo, hi = iv.mpf(x)._mpi_
    return RationalInterval(Fraction(*libmp.to_rational(lo)), Fraction(*libmp.to_rational(hi)))


def iv_midpoint(x) -> Fraction:
    return iv_to_rational(x).midpoint

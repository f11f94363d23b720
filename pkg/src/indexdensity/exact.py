"""Exact rational intervals with directed dyadic rounding.

Long products and series over thousands of exact rational factors would
blow up denominator sizes if accumulated naively. Instead we keep a
[low, high] pair of Fractions and, after each exact operation, round the
endpoints outward to denominator 2^PRECISION_BITS. Every emitted interval
therefore still rigorously contains the true value, while arithmetic
stays fast. Decimal rendering rounds low down and high up.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

PRECISION_BITS = 128
_SCALE = 1 << PRECISION_BITS


def round_down(x: Fraction) -> Fraction:
    return Fraction(x.numerator * _SCALE // x.denominator, _SCALE)


def round_up(x: Fraction) -> Fraction:
    n = x.numerator * _SCALE
    d = x.denominator
    return Fraction(-((-n) // d), _SCALE)


@dataclass(frozen=True)
class Interval:
    """Closed interval [low, high] with nonnegative rational endpoints."""

    low: Fraction
    high: Fraction

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError(f"inverted interval [{self.low}, {self.high}]")
        if self.low < 0:
            raise ValueError("negative endpoints unsupported (not needed here)")

    @classmethod
    def exactly(cls, x) -> "Interval":
        f = Fraction(x)
        return cls(f, f)

    def squeeze(self) -> "Interval":
        """Round endpoints outward to the dyadic grid."""
        return Interval(round_down(self.low), round_up(self.high))

    def times(self, other: "Interval") -> "Interval":
        # all quantities in this package are >= 0, so corner analysis is trivial
        return Interval(
            round_down(self.low * other.low), round_up(self.high * other.high)
        )

    def times_exact(self, x: Fraction) -> "Interval":
        if x < 0:
            raise ValueError("negative scaling unsupported")
        return Interval(round_down(self.low * x), round_up(self.high * x))

    def plus(self, other: "Interval") -> "Interval":
        return Interval(
            round_down(self.low + other.low), round_up(self.high + other.high)
        )

    def widen(self, slack: Fraction) -> "Interval":
        """Extend both endpoints outward by slack >= 0 (floor at zero)."""
        if slack < 0:
            raise ValueError("slack must be nonnegative")
        lo = self.low - slack
        return Interval(lo if lo > 0 else Fraction(0), round_up(self.high + slack))

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    @property
    def midpoint(self) -> Fraction:
        return (self.low + self.high) / 2

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.low <= x <= self.high

    def overlaps(self, other: "Interval") -> bool:
        return self.low <= other.high and other.low <= self.high

    def decimal_bounds(self, places: int = 12) -> tuple[str, str]:
        """(low rounded down, high rounded up) as decimal strings."""
        scale = 10**places
        lo = self.low.numerator * scale // self.low.denominator
        hi = -((-self.high.numerator * scale) // self.high.denominator)
        return (_render(lo, places), _render(hi, places))


def _render(scaled: int, places: int) -> str:
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    return f"{sign}{scaled // 10**places}.{scaled % 10**places:0{places}d}"


def product(intervals) -> Interval:
    """Product of intervals (or exact Fractions), rounded outward as it goes."""
    acc = Interval.exactly(1)
    for item in intervals:
        if not isinstance(item, Interval):
            item = Interval.exactly(item)
        acc = acc.times(item)
    return acc


def series_sum(terms) -> tuple[Fraction, Fraction]:
    """Signed bounds on a sum of exact rational terms, rounded outward.

    Returned as a plain (low, high) pair rather than an Interval because
    partial sums of alternating series may dip below zero even when the
    limit is a density; callers clamp once they have added their tail.
    """
    lo = Fraction(0)
    hi = Fraction(0)
    for t in terms:
        t = Fraction(t)
        lo = round_down(lo + t)
        hi = round_up(hi + t)
    return (lo, hi)

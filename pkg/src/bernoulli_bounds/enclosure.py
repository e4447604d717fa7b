"""
Rigorous Enclosures
===================

Intervals with exact rational endpoints guaranteed to contain a
transcendental quantity (exp, log, sqrt of a rational). They let the
verification harness compare exact binomial ratios against thresholds such as
exp(2ε²n) without trusting floating point.

Endpoints come from mpmath's low-level ``libmp`` routines evaluated with
directed rounding (floor for the lower end, ceiling for the upper end) at a
working precision above the requested one, then widened outward by a few
units in the last place of the working precision.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from mpmath.libmp import (
    from_rational,
    mpf_exp,
    mpf_log,
    mpf_sqrt,
    round_ceiling,
    round_floor,
    to_rational,
)

from .errors import DomainError

logger = logging.getLogger(__name__)

# extra bits carried beyond the requested precision
GUARD_BITS = 8


@dataclass(frozen=True)
class Enclosure:
    """Closed interval [lower, upper] with exact rational endpoints."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError(f"empty enclosure [{self.lower}, {self.upper}]")

    @classmethod
    def exact(cls, value: Fraction) -> "Enclosure":
        return cls(value, value)

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return float((self.lower + self.upper) / 2)

    def contains(self, value: Fraction) -> bool:
        return self.lower <= value <= self.upper

    def __add__(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(self.lower + other.lower, self.upper + other.upper)

    def __sub__(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(self.lower - other.upper, self.upper - other.lower)

    def scale(self, factor: Fraction) -> "Enclosure":
        """Multiply by an exact rational factor."""
        if factor >= 0:
            return Enclosure(self.lower * factor, self.upper * factor)
        return Enclosure(self.upper * factor, self.lower * factor)


def _working_precision(x: Fraction, precision_bits: int) -> int:
    magnitude = abs(x.numerator) // x.denominator
    return precision_bits + GUARD_BITS + magnitude.bit_length()


def _to_fraction(raw) -> Fraction:
    p, q = to_rational(raw)
    return Fraction(p, q)


def _directed(
    func: Callable, x: Fraction, precision_bits: int
) -> Enclosure:
    wp = _working_precision(x, precision_bits)
    x_lo = from_rational(x.numerator, x.denominator, wp, round_floor)
    x_hi = from_rational(x.numerator, x.denominator, wp, round_ceiling)
    lower = _to_fraction(func(x_lo, wp, round_floor))
    upper = _to_fraction(func(x_hi, wp, round_ceiling))
    slack = Fraction(1, 1 << (wp - 2))
    return Enclosure(lower - abs(lower) * slack, upper + abs(upper) * slack)


def exp_enclosure(x: Fraction, precision_bits: int = 128) -> Enclosure:
    """Enclosure of exp(x); width at most 2^(2 - precision_bits)·exp(x)."""
    x = Fraction(x)
    if x == 0:
        return Enclosure.exact(Fraction(1))
    return _directed(mpf_exp, x, precision_bits)


def log_enclosure(x: Fraction, precision_bits: int = 128) -> Enclosure:
    """Enclosure of the natural log of a positive rational."""
    x = Fraction(x)
    if x <= 0:
        raise DomainError(f"log undefined for {x}")
    if x == 1:
        return Enclosure.exact(Fraction(0))
    wp = precision_bits + GUARD_BITS + max(x.numerator.bit_length(), x.denominator.bit_length()).bit_length()
    x_lo = from_rational(x.numerator, x.denominator, wp, round_floor)
    x_hi = from_rational(x.numerator, x.denominator, wp, round_ceiling)
    lower = _to_fraction(mpf_log(x_lo, wp, round_floor))
    upper = _to_fraction(mpf_log(x_hi, wp, round_ceiling))
    slack = Fraction(1, 1 << (wp - 2))
    return Enclosure(lower - abs(lower) * slack - slack, upper + abs(upper) * slack + slack)


def sqrt_enclosure(x: Fraction, precision_bits: int = 128) -> Enclosure:
    """Enclosure of the square root of a non-negative rational."""
    x = Fraction(x)
    if x < 0:
        raise DomainError(f"sqrt undefined for {x}")
    if x == 0:
        return Enclosure.exact(Fraction(0))
    return _directed(mpf_sqrt, x, precision_bits)


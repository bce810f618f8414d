"""Exact dyadic rationals, directed rounding, and certified enclosures.

Every certified quantity in this package is carried by `Dyadic`, an
exact mantissa * 2**exponent rational on Python bigints. Sums,
differences, products and comparisons of dyadics are computed exactly;
rounding happens in exactly two named places:

* `Dyadic.round_to` -- truncation of an exact value to a working
  precision, in a stated direction;
* `pow2_neg` -- the transcendental kernel 2**-x, delegated to MPFR's
  `exp2` (via gmpy2), which is correctly rounded in directed modes.

Because those are the only rounding sites, an `Enclosure` built by this
module is a genuine certificate: its bounds are true lower/upper bounds
of the exact real they were derived from, not floating-point estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

import gmpy2

__all__ = [
    "DOWN",
    "UP",
    "MIN_PRECISION",
    "Dyadic",
    "Enclosure",
    "pow2_neg",
    "pow2_neg_enclosure",
    "sum_enclosures",
    "as_fraction",
]

Direction = Literal["down", "up"]

DOWN: Direction = "down"
UP: Direction = "up"

# pow2_neg rejects anything narrower; below this MPFR results stop being
# useful and the solver's escalation logic would mask bugs.
MIN_PRECISION = 8


@dataclass(frozen=True, slots=True)
class Dyadic:
    """Exact binary rational mantissa * 2**exponent.

    Canonical form: mantissa is odd or zero; zero is (0, 0). Values are
    immutable and hashable, and all arithmetic defined here is exact;
    use `round_to` to shorten the mantissa in a chosen direction.
    """

    mantissa: int
    exponent: int

    def __post_init__(self):
        m, e = self.mantissa, self.exponent
        if m == 0:
            e = 0
        else:
            shift = (m & -m).bit_length() - 1
            if shift:
                m >>= shift
                e += shift
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_int(cls, n: int) -> "Dyadic":
        return cls(n, 0)

    @classmethod
    def from_fraction(cls, q: Fraction) -> "Dyadic":
        """Exact conversion; raises ValueError for non-dyadic rationals."""
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return cls(q.numerator, -(den.bit_length() - 1))

    @classmethod
    def from_mpfr(cls, x) -> "Dyadic":
        if not gmpy2.is_finite(x):
            raise ValueError(f"cannot represent {x!r} exactly")
        m, e = x.as_mantissa_exp()
        return cls(int(m), int(e))

    # -- exact arithmetic ------------------------------------------------

    def __add__(self, other: "Dyadic") -> "Dyadic":
        e = min(self.exponent, other.exponent)
        m = (self.mantissa << (self.exponent - e)) + (
            other.mantissa << (other.exponent - e)
        )
        return Dyadic(m, e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return self + (-other)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.mantissa, self.exponent)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.mantissa), self.exponent)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    def _cmp(self, other: "Dyadic") -> int:
        d = self - other
        return (d.mantissa > 0) - (d.mantissa < 0)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- rounding ---------------------------------------------------------

    def round_to(self, precision: int, direction: Direction) -> "Dyadic":
        """Round to at most `precision` mantissa bits, toward -inf (down)
        or +inf (up). Exact when the mantissa already fits."""
        if precision < 1:
            raise ValueError("precision must be positive")
        if direction not in (DOWN, UP):
            raise ValueError(f"bad rounding direction: {direction!r}")
        m = self.mantissa
        excess = abs(m).bit_length() - precision
        if excess <= 0:
            return self
        q = m >> excess if direction == DOWN else -((-m) >> excess)
        return Dyadic(q, self.exponent + excess)

    # -- views -------------------------------------------------------------

    @property
    def bit_length(self) -> int:
        return abs(self.mantissa).bit_length()

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def is_integer(self) -> bool:
        return self.exponent >= 0 or self.mantissa == 0

    def as_integer(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self} is not an integer")
        return self.mantissa << self.exponent if self.mantissa else 0

    def as_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def to_mpfr(self):
        """Exact conversion to an mpfr (no rounding)."""
        bits = max(self.bit_length, 2)
        with gmpy2.context(precision=bits, emin=gmpy2.get_emin_min(),
                           emax=gmpy2.get_emax_max()):
            x = gmpy2.mpfr(self.mantissa)
            if self.exponent >= 0:
                return gmpy2.mul_2exp(x, self.exponent)
            return gmpy2.div_2exp(x, -self.exponent)

    def __float__(self) -> float:
        try:
            return self.mantissa * 2.0 ** self.exponent
        except OverflowError:
            return float(self.as_fraction())

    def decimal(self, digits: int = 30) -> str:
        """Decimal string with `digits` fractional digits (round half even)."""
        q = self.as_fraction()
        scaled = q * 10**digits
        n = round(scaled)  # exact Fraction -> banker's rounding
        sign = "-" if n < 0 else ""
        n = abs(n)
        whole, frac = divmod(n, 10**digits)
        if digits == 0:
            return f"{sign}{whole}"
        return f"{sign}{whole}.{frac:0{digits}d}"

    def __repr__(self) -> str:
        return f"Dyadic({self.mantissa}, {self.exponent})"

    def __str__(self) -> str:
        return f"{self.mantissa}*2^{self.exponent}"


ZERO = Dyadic(0, 0)
ONE = Dyadic(1, 0)


def as_fraction(value) -> Fraction:
    """Coerce int/str/float/Fraction/Dyadic to an exact Fraction."""
    if isinstance(value, Dyadic):
        return value.as_fraction()
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def pow2_neg(x: Dyadic, direction: Direction, precision: int) -> Dyadic:
    """Directed-rounding 2**-x for x >= 0.

    Exact when x is an integer; otherwise the result is MPFR's correctly
    rounded exp2 at `precision` bits, so it is within 1 ulp of the true
    value and on the requested side of it.
    """
    if precision < MIN_PRECISION:
        raise ValueError(f"precision {precision} < minimum {MIN_PRECISION}")
    if direction not in (DOWN, UP):
        raise ValueError(f"bad rounding direction: {direction!r}")
    if x.mantissa < 0:
        raise ValueError(f"pow2_neg requires x >= 0, got {x}")
    if x.is_integer():
        return Dyadic(1, -x.as_integer())
    rnd = gmpy2.RoundDown if direction == DOWN else gmpy2.RoundUp
    arg = (-x).to_mpfr()
    with gmpy2.context(precision=precision, round=rnd,
                       emin=gmpy2.get_emin_min(), emax=gmpy2.get_emax_max()):
        y = gmpy2.exp2(arg)
    return Dyadic.from_mpfr(y)


@dataclass(frozen=True, slots=True)
class Enclosure:
    """Certified interval [lo, hi] containing an exact real value."""

    lo: Dyadic
    hi: Dyadic

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"inverted enclosure: {self.lo} > {self.hi}")

    @classmethod
    def point(cls, x: Dyadic) -> "Enclosure":
        return cls(x, x)

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Dyadic:
        s = self.lo + self.hi
        return Dyadic(s.mantissa, s.exponent - 1)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, value) -> bool:
        q = as_fraction(value)
        return self.lo.as_fraction() <= q <= self.hi.as_fraction()

    def overlaps(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def separation(self, other: "Enclosure") -> Dyadic:
        """Certified lower bound on |a - b| for a in self, b in other
        (zero when the enclosures overlap)."""
        if self.hi < other.lo:
            return other.lo - self.hi
        if other.hi < self.lo:
            return self.lo - other.hi
        return ZERO

    def __sub__(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(self.lo - other.hi, self.hi - other.lo)

    def __abs__(self) -> "Enclosure":
        if self.lo.mantissa >= 0:
            return self
        if self.hi.mantissa <= 0:
            return Enclosure(-self.hi, -self.lo)
        return Enclosure(ZERO, max(-self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Enclosure({self.lo!r}, {self.hi!r})"

    def __str__(self) -> str:
        return f"[{self.lo.decimal(12)}, {self.hi.decimal(12)}]"


def pow2_neg_enclosure(e: Enclosure, precision: int) -> Enclosure:
    """Enclosure of 2**-t over t in e. The kernel is decreasing, so the
    bound roles flip: the lower output bound comes from e.hi."""
    return Enclosure(
        pow2_neg(e.hi, DOWN, precision),
        pow2_neg(e.lo, UP, precision),
    )


def sum_enclosures(terms: Iterable[Enclosure], precision: int) -> Enclosure:
    """Sum of enclosures: exact bigint sums of each side, then one
    directed rounding per side."""
    lo = ZERO
    hi = ZERO
    for t in terms:
        lo = lo + t.lo
        hi = hi + t.hi
    return Enclosure(lo.round_to(precision, DOWN), hi.round_to(precision, UP))

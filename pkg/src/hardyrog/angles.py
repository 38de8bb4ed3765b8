"""Exact rational multiples of pi and trig evaluation at huge multipliers.

Angles are represented as theta = pi * p / q with arbitrary-precision
integers p, q.  Every trig call first folds the rational part with integer
arithmetic (so multipliers with hundreds of digits lose nothing) and only
then makes a single float sin/cos call on a small reduced argument.  Plain
double-precision argument reduction is meaningless once the multiplier
exceeds ~2**53, which is why all half-integer / scaled evaluations below go
through ``sinpi_frac`` / ``cospi_frac``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def sinpi_frac(a: int, b: int) -> float:
    """sin(pi * a / b) for integers a, b (b > 0), folded exactly.

    The fold into [0, 1/2] uses only integer arithmetic, so the relative
    accuracy is a few ulp even when a has thousands of digits or a/b sits
    next to a zero of the sine.
    """
    if b <= 0:
        raise ValueError("denominator must be positive")
    a %= 2 * b                # [0, 2b)
    sign = 1.0
    if a >= b:                # sin(pi + x) = -sin(x)
        a -= b
        sign = -1.0
    if 2 * a > b:             # sin(pi - x) = sin(x)
        a = b - a
    return sign * math.sin(math.pi * (a / b))


def cospi_frac(a: int, b: int) -> float:
    """cos(pi * a / b) for integers a, b (b > 0), folded exactly."""
    # cos(x) = sin(x + pi/2); shift by b/2 using the doubled denominator.
    return sinpi_frac(2 * a + b, 2 * b)


@dataclass(frozen=True)
class RationalAngle:
    """theta = pi * p / q, canonicalized so p/q is reduced and in (-1, 1].

    Canonicalization folds whole turns (p/q mod 2) and resolves the tie at
    +/- pi to +pi, making every downstream evaluation deterministic.  The
    canonical window keeps theta in (-pi, pi].
    """

    p: int
    q: int

    def __post_init__(self) -> None:
        p, q = self.p, self.q
        if q <= 0:
            raise ValueError("RationalAngle denominator must be positive")
        g = math.gcd(p, q)
        if g > 1:
            p //= g
            q //= g
        p %= 2 * q                     # p/q in [0, 2)
        if p > q:                      # (1, 2) -> (-1, 0); p == q stays +pi
            p -= 2 * q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def zero(cls) -> "RationalAngle":
        return cls(0, 1)

    @classmethod
    def from_fraction(cls, frac: Fraction) -> "RationalAngle":
        return cls(frac.numerator, frac.denominator)

    @property
    def radians(self) -> float:
        return math.pi * (self.p / self.q)

    @property
    def fraction_of_pi(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def is_zero(self) -> bool:
        return self.p == 0

    def __mul__(self, c: int) -> "RationalAngle":
        return RationalAngle(self.p * c, self.q)

    __rmul__ = __mul__

    def __add__(self, other: "RationalAngle") -> "RationalAngle":
        return RationalAngle(self.p * other.q + other.p * self.q, self.q * other.q)

    def __sub__(self, other: "RationalAngle") -> "RationalAngle":
        return RationalAngle(self.p * other.q - other.p * self.q, self.q * other.q)

    def __neg__(self) -> "RationalAngle":
        return RationalAngle(-self.p, self.q)

    def __abs__(self) -> "RationalAngle":
        # p == q (theta = pi) maps to itself; otherwise flip the sign of p.
        return RationalAngle(abs(self.p), self.q)

    def sin(self) -> float:
        return sinpi_frac(self.p, self.q)

    def cos(self) -> float:
        return cospi_frac(self.p, self.q)

    def sin_half(self) -> float:
        """sin(theta / 2)."""
        return sinpi_frac(self.p, 2 * self.q)

    def sin_scaled(self, num: int, den: int = 1) -> float:
        """sin(theta * num / den) with exact folding of the big multiplier."""
        return sinpi_frac(self.p * num, self.q * den)

    def cos_scaled(self, num: int, den: int = 1) -> float:
        """cos(theta * num / den) with exact folding of the big multiplier."""
        return cospi_frac(self.p * num, self.q * den)

    def sin_half_integer(self, m: int) -> float:
        """sin((m + 1/2) * theta) reduced exactly; m may be astronomically large."""
        return sinpi_frac(self.p * (2 * m + 1), 2 * self.q)

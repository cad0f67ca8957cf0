"""Wigner 3-j and 6-j symbols from the Racah closed-form sums.

Factorials are kept as exact integers (``fractions.Fraction`` for the
rational parts), with a single float square root at the end, so values
are exact to machine precision for the small angular momenta used here.
Condon-Shortley phases throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, sqrt
from numbers import Real


@dataclass(frozen=True)
class HalfInteger:
    """Exact half-integral quantum number, stored as twice its value."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int):
            raise TypeError(f"twice must be an int, got {self.twice!r}")

    @classmethod
    def of(cls, value) -> "HalfInteger":
        """Coerce an int, Fraction, float or HalfInteger; reject non-half-integral values."""
        if isinstance(value, HalfInteger):
            return value
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, Fraction):
            twice = 2 * value
            if twice.denominator != 1:
                raise ValueError(f"{value} is not half-integral")
            return cls(int(twice))
        if isinstance(value, Real):
            twice = 2 * float(value)
            if twice != round(twice):
                raise ValueError(f"{value} is not half-integral")
            return cls(round(twice))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __float__(self) -> float:
        return self.twice / 2.0


def _twice(x) -> int:
    return HalfInteger.of(x).twice


def _triangle_ok(tj1: int, tj2: int, tj3: int) -> bool:
    # arguments are doubled j's; parity must allow an integer perimeter
    if (tj1 + tj2 + tj3) % 2 != 0:
        return False
    return abs(tj1 - tj2) <= tj3 <= tj1 + tj2


def _fac2(twice_n: int) -> int:
    """factorial(n) for a doubled argument known to be an even non-negative int."""
    if twice_n % 2 != 0 or twice_n < 0:
        raise ValueError(f"factorial of non-integer or negative half-argument {twice_n}/2")
    return factorial(twice_n // 2)


def _triangle_coeff_sq(tj1: int, tj2: int, tj3: int) -> Fraction:
    """Squared triangle coefficient Delta(j1 j2 j3)^2 as an exact rational."""
    return Fraction(
        _fac2(tj1 + tj2 - tj3) * _fac2(tj1 - tj2 + tj3) * _fac2(-tj1 + tj2 + tj3),
        _fac2(tj1 + tj2 + tj3 + 2),
    )


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3-j symbol; 0 when any selection rule fails.

    Arguments may be ints, half-integral floats, Fractions or HalfInteger;
    inconsistent (non-half-integral) arguments raise ValueError.
    """
    tj1, tj2, tj3 = _twice(j1), _twice(j2), _twice(j3)
    tm1, tm2, tm3 = _twice(m1), _twice(m2), _twice(m3)
    if tj1 < 0 or tj2 < 0 or tj3 < 0:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0.0
    if (tj1 + tm1) % 2 or (tj2 + tm2) % 2 or (tj3 + tm3) % 2:
        # m not half-integral consistently with its j
        return 0.0
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if not _triangle_ok(tj1, tj2, tj3):
        return 0.0

    # Racah sum over k, with all factorial arguments doubled
    kmin = max(0, tj2 - tj3 - tm1, tj1 - tj3 + tm2)
    kmax = min(tj1 + tj2 - tj3, tj1 - tm1, tj2 + tm2)
    total = Fraction(0)
    for tk in range(kmin, kmax + 1, 2):
        term = Fraction(
            1,
            _fac2(tk)
            * _fac2(tj1 + tj2 - tj3 - tk)
            * _fac2(tj1 - tm1 - tk)
            * _fac2(tj2 + tm2 - tk)
            * _fac2(tj3 - tj2 + tm1 + tk)
            * _fac2(tj3 - tj1 - tm2 + tk),
        )
        if (tk // 2) % 2:
            term = -term
        total += term
    if total == 0:
        return 0.0

    norm_sq = _triangle_coeff_sq(tj1, tj2, tj3) * (
        _fac2(tj1 + tm1) * _fac2(tj1 - tm1)
        * _fac2(tj2 + tm2) * _fac2(tj2 - tm2)
        * _fac2(tj3 + tm3) * _fac2(tj3 - tm3)
    )
    sign = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    return sign * float(total) * sqrt(float(norm_sq))


def wigner6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}; 0 when any triad fails the triangle rule."""
    t = [_twice(j) for j in (j1, j2, j3, j4, j5, j6)]
    tj1, tj2, tj3, tj4, tj5, tj6 = t
    if any(x < 0 for x in t):
        return 0.0
    triads = (
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    )
    if not all(_triangle_ok(*tr) for tr in triads):
        return 0.0

    norm_sq = Fraction(1)
    for tr in triads:
        norm_sq *= _triangle_coeff_sq(*tr)

    kmin = max(
        tj1 + tj2 + tj3,
        tj1 + tj5 + tj6,
        tj4 + tj2 + tj6,
        tj4 + tj5 + tj3,
    )
    kmax = min(
        tj1 + tj2 + tj4 + tj5,
        tj2 + tj3 + tj5 + tj6,
        tj3 + tj1 + tj6 + tj4,
    )
    total = Fraction(0)
    for tk in range(kmin, kmax + 1, 2):
        num = _fac2(tk + 2)
        den = (
            _fac2(tk - tj1 - tj2 - tj3)
            * _fac2(tk - tj1 - tj5 - tj6)
            * _fac2(tk - tj4 - tj2 - tj6)
            * _fac2(tk - tj4 - tj5 - tj3)
            * _fac2(tj1 + tj2 + tj4 + tj5 - tk)
            * _fac2(tj2 + tj3 + tj5 + tj6 - tk)
            * _fac2(tj3 + tj1 + tj6 + tj4 - tk)
        )
        term = Fraction(num, den)
        if (tk // 2) % 2:
            term = -term
        total += term
    if total == 0:
        return 0.0
    return float(total) * sqrt(float(norm_sq))

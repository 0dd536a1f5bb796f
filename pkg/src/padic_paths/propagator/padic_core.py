"""
Exact arithmetic over the rationals viewed inside Q_p or R.

Valuations, norms, canonical digit expansions, fractional parts, the Legendre
symbol, the λ_v functions, additive characters and the exact complex value
type every kernel and Gauss integral is expressed in.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from sympy import isprime

from .errors import EvenPrime, NotPrime, ZeroInput

Rat = Fraction
Valuation = Union[int, float]

# valuation of zero
INFINITY: float = math.inf

RationalLike = Union[Fraction, int, str]

_RATIONAL_TEXT = re.compile(r"^[+-]?\d+(/\d+)?$")
_INFINITY_NAMES = {"inf", "infinity", "oo", "∞", "real"}


def parse_rational(text: str) -> Fraction:
    """Parse `num/den` or an integer literal; decimals are rejected."""
    cleaned = text.strip().replace(" ", "")
    if not _RATIONAL_TEXT.match(cleaned):
        raise ValueError(f"not a rational literal: {text!r} (expected num/den or an integer)")
    _, _, den = cleaned.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(cleaned)


def as_rational(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and `num/den` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


@dataclass(frozen=True)
class Place:
    """A valuation place: the real place (prime is None) or a prime p."""

    prime: Optional[int] = None

    def __post_init__(self) -> None:
        if self.prime is not None and (self.prime < 2 or not isprime(self.prime)):
            raise NotPrime(f"{self.prime} is not a prime")

    @classmethod
    def infinity(cls) -> Place:
        """Return the archimedean place."""
        return cls(None)

    @classmethod
    def parse(cls, text: Union[str, int]) -> Place:
        """Parse `inf` (or `oo`, `∞`, `real`) or a prime literal."""
        if isinstance(text, int):
            return cls(text)
        cleaned = text.strip().lower()
        if cleaned in _INFINITY_NAMES:
            return cls.infinity()
        if not cleaned.isdigit():
            raise ValueError(f"not a place: {text!r}")
        return cls(int(cleaned))

    @property
    def is_archimedean(self) -> bool:
        return self.prime is None

    @property
    def p(self) -> int:
        """The prime of a p-adic place; raises for the real place."""
        if self.prime is None:
            raise ValueError("the real place has no prime")
        return self.prime

    def __str__(self) -> str:
        return "inf" if self.prime is None else str(self.prime)


@dataclass(frozen=True)
class PadicDigits:
    """First digits of the canonical expansion x = p^ν(x₀ + x₁p + …)."""

    prime: int
    valuation: int
    digits: Tuple[int, ...]

    def reconstruct(self) -> Fraction:
        """Return p^ν·Σ xᵢpⁱ over the stored digits."""
        body = sum(d * self.prime**i for i, d in enumerate(self.digits))
        return Fraction(body) * Fraction(self.prime) ** self.valuation


@dataclass(frozen=True)
class ExactCircle:
    """Exact complex value √mag2·e^{2πi·phase}.

    The phase is reduced into [0, 1) on construction and a zero magnitude
    forces a zero phase, so structural equality is exact equality.
    """

    mag2: Fraction = Fraction(1)
    phase: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        mag2 = Fraction(self.mag2)
        if mag2 < 0:
            raise ValueError("mag2 must be nonnegative")
        phase = Fraction(self.phase) % 1 if mag2 else Fraction(0)
        object.__setattr__(self, "mag2", mag2)
        object.__setattr__(self, "phase", phase)

    @classmethod
    def unit(cls, phase: RationalLike) -> ExactCircle:
        """A point on the unit circle with the given phase."""
        return cls(Fraction(1), as_rational(phase))

    def __mul__(self, other: ExactCircle) -> ExactCircle:
        if not isinstance(other, ExactCircle):
            return NotImplemented
        return ExactCircle(self.mag2 * other.mag2, self.phase + other.phase)

    def conjugate(self) -> ExactCircle:
        """Complex conjugate: same modulus, negated phase."""
        return ExactCircle(self.mag2, -self.phase)

    def __complex__(self) -> complex:
        # centre the angle on zero so multiples of 1/4 land on exact axes
        angle = self.phase if self.phase <= Fraction(1, 2) else self.phase - 1
        return cmath.rect(math.sqrt(self.mag2), 2 * math.pi * float(angle))

    def __str__(self) -> str:
        return f"sqrt({self.mag2})*exp(2*pi*i*{self.phase})"


def circle_mul(a: ExactCircle, b: ExactCircle) -> ExactCircle:
    """Multiply componentwise: magnitudes multiply, phases add mod 1."""
    return a * b


def circle_conj(a: ExactCircle) -> ExactCircle:
    """Conjugate of `a`."""
    return a.conjugate()


def circle_eq(a: ExactCircle, b: ExactCircle) -> bool:
    """Exact equality of modulus and phase."""
    return a.mag2 == b.mag2 and a.phase == b.phase


def circle_to_float(a: ExactCircle) -> complex:
    """Floating-point rendering of `a`."""
    return complex(a)


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x: RationalLike, p: int) -> Valuation:
    """Return ν with x = p^ν·u/w, p ∤ uw, or INFINITY for x = 0."""
    x = as_rational(x)
    if x == 0:
        return INFINITY
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def unit_part(x: RationalLike, p: int) -> Tuple[int, Fraction]:
    """Split a nonzero rational as (ν, u) with x = p^ν·u and u a p-adic unit."""
    x = as_rational(x)
    if x == 0:
        raise ZeroInput("zero has no unit part")
    nu = int(valuation(x, p))
    return nu, x / Fraction(p) ** nu


def unit_residue(u: Fraction, p: int, k: int) -> int:
    """Return a unit (or integral) rational reduced modulo p^k."""
    modulus = p**k
    return u.numerator * pow(u.denominator, -1, modulus) % modulus


def residue(x: RationalLike, p: int) -> Tuple[int, int]:
    """Return (r, k) with {x}_p = r/p^k and 0 ≤ r < p^k."""
    x = as_rational(x)
    if x == 0:
        return 0, 0
    k = _int_valuation(x.denominator, p)
    if k == 0:
        return 0, 0
    modulus = p**k
    unit_den = x.denominator // modulus
    return x.numerator * pow(unit_den, -1, modulus) % modulus, k


def norm(x: RationalLike, v: Place) -> Fraction:
    """Return |x|_v as an exact rational."""
    x = as_rational(x)
    if v.is_archimedean:
        return abs(x)
    if x == 0:
        return Fraction(0)
    return Fraction(v.p) ** (-int(valuation(x, v.p)))


def digits(x: RationalLike, p: int, count: int) -> PadicDigits:
    """Return ν and the first `count` digits of the canonical expansion of x.

    Args:
        x: Nonzero rational.
        p: Prime.
        count: Number of digits, at least one.

    Raises:
        ZeroInput: For x = 0, whose expansion has no leading digit.
    """
    if count < 1:
        raise ValueError("count must be positive")
    nu, u = unit_part(x, p)
    r = unit_residue(u, p, count)
    out = []
    for _ in range(count):
        r, d = divmod(r, p)
        out.append(d)
    return PadicDigits(prime=p, valuation=nu, digits=tuple(out))


def frac_part(x: RationalLike, p: int) -> Fraction:
    """Return {x}_p, the rational in [0, 1) with p-power denominator congruent to x mod Z_p."""
    r, k = residue(x, p)
    return Fraction(r, p**k)


def legendre(a: int, p: int) -> int:
    """Return the Legendre symbol (a/p) by Euler's criterion."""
    if p == 2:
        raise EvenPrime("the Legendre symbol is defined for odd primes only")
    ls = pow(a, (p - 1) // 2, p)
    return -1 if ls == p - 1 else ls


def lambda_fn(x: RationalLike, v: Place) -> ExactCircle:
    """Return λ_v(x), the unit-modulus factor of the Gauss integral.

    Odd p follows the parity of ν and p mod 4 with the Legendre symbol of the
    leading digit; p = 2 reads the digits x₁, x₂ of the canonical expansion;
    the real place gives (1 − i·sign x)/√2.
    """
    x = as_rational(x)
    if x == 0:
        return ExactCircle()
    if v.is_archimedean:
        return ExactCircle.unit(Fraction(7, 8) if x > 0 else Fraction(1, 8))

    p = v.p
    expansion = digits(x, p, 3 if p == 2 else 1)
    odd = expansion.valuation % 2 == 1
    if p == 2:
        _, x1, x2 = expansion.digits
        # (1 + i)/√2 has phase 1/8, (1 − i)/√2 has phase 7/8
        phase = Fraction(1, 8) if x1 == 0 else Fraction(7, 8)
        if odd and (x1 + x2) % 2 == 1:
            phase += Fraction(1, 2)
        return ExactCircle.unit(phase)

    if not odd:
        return ExactCircle()
    symbol = legendre(expansion.digits[0], p)
    if p % 4 == 1:
        return ExactCircle.unit(0 if symbol == 1 else Fraction(1, 2))
    return ExactCircle.unit(Fraction(1, 4) if symbol == 1 else Fraction(3, 4))


def character(x: RationalLike, v: Place) -> ExactCircle:
    """Return χ_p(x) = e^{2πi{x}_p} or χ_∞(x) = e^{−2πix}."""
    x = as_rational(x)
    if v.is_archimedean:
        return ExactCircle.unit(-x)
    return ExactCircle.unit(frac_part(x, v.p))

"""Seeded random rationals and catalog parameter sets for the verification suites."""

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from ..propagator.padic_core import Place

# numerators and denominators of sampled units stay below this
UNIT_RANGE = 30


@dataclass(frozen=True)
class Split:
    """Times t′ < t < t″ of a two-piece split and the system parameters."""

    t0: Fraction
    t1: Fraction
    t2: Fraction
    params: Dict[str, Fraction]


class Sampler:
    """Draws reproducible rationals with controlled valuations."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def unit(self, p: Optional[int], positive: bool = False) -> Fraction:
        """A rational whose numerator and denominator are prime to p."""
        while True:
            num = self.rng.randint(1, UNIT_RANGE)
            den = self.rng.randint(1, UNIT_RANGE)
            if p is None or (num % p and den % p):
                break
        if not positive and self.rng.random() < 0.5:
            num = -num
        return Fraction(num, den)

    def rational(self, place: Place, low: int = -2, high: int = 2, positive: bool = False) -> Fraction:
        """A nonzero rational with p-adic valuation in [low, high].

        At the real place the power of a small prime still varies the size.
        """
        k = self.rng.randint(low, high)
        if place.is_archimedean:
            return self.unit(None, positive) * Fraction(2) ** k
        return self.unit(place.p, positive) * Fraction(place.p) ** k

    def integer(self, low: int, high: int) -> int:
        """A uniform integer in [low, high]."""
        return self.rng.randint(low, high)

    def split(self, place: Place, system: str) -> Split:
        """Two consecutive positive time intervals and parameters for `system`.

        Positive intervals keep t″ − t′ and the intermediate Gauss coefficient
        away from zero at every place.
        """
        t0 = self.rational(place, -1, 1)
        if system == "oscillator":
            # both slices stay inside the sine/cosine convergence disk
            p = place.p
            t1 = t0 + self.unit(p, positive=True)
            t2 = t1 + self.unit(p, positive=True)
            disk = 2 if p == 2 else 1
            omega = self.unit(p) * Fraction(p) ** (disk + self.rng.randint(0, 1))
            params = {"m": self.rational(place, -1, 1), "omega": omega}
        else:
            t1 = t0 + self.rational(place, -1, 1, positive=True)
            t2 = t1 + self.rational(place, -1, 1, positive=True)
            params = {"m": self.rational(place, -1, 1)}
            if system == "field":
                params["g"] = self.rational(place, -1, 1)
        return Split(t0, t1, t2, params)

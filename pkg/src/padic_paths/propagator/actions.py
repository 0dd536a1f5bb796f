"""
Quadratic classical actions S̄(x″,t″;x′,t′) = a·x″² + b·x″x′ + c·x′² + d·x″ + e·x′ + f.

Catalog systems (free particle, constant field, harmonic oscillator), their
second derivatives, composition over an intermediate point, and the p-adic
sine and cosine the oscillator is built from.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import structlog

from .errors import DegenerateComposition, OutsideDisk, PrecisionLoss, TimeMismatch, ZeroInterval, ZeroMass
from .padic_core import (
    INFINITY,
    ExactCircle,
    Place,
    RationalLike,
    Valuation,
    as_rational,
    lambda_fn,
    norm,
    unit_residue,
    valuation,
)

logger = structlog.get_logger(__name__)

DEFAULT_SERIES_TARGET = 24
SERIES_MARGIN = 5

FREE = "free"
FIELD = "field"
OSCILLATOR = "oscillator"
CATALOG = (FREE, FIELD, OSCILLATOR)


@dataclass(frozen=True)
class SeriesApprox:
    """A rational known modulo p^error_valuation.

    Arithmetic propagates a proven lower bound on the valuation of the
    difference between the stored value and the true one.
    """

    value: Fraction
    error_valuation: Valuation
    prime: int

    @classmethod
    def exact(cls, value: RationalLike, prime: int) -> SeriesApprox:
        return cls(as_rational(value), INFINITY, prime)

    def _lift(self, other: Union[SeriesApprox, RationalLike]) -> SeriesApprox:
        if isinstance(other, SeriesApprox):
            if other.prime != self.prime:
                raise ValueError("series approximants over different primes")
            return other
        return SeriesApprox.exact(other, self.prime)

    @property
    def leading(self) -> Valuation:
        """Lower bound on the valuation of the true value."""
        return min(valuation(self.value, self.prime), self.error_valuation)

    def determined_valuation(self, digits: int = 0) -> int:
        """Return the valuation of the true value, requiring `digits` more known digits."""
        v = valuation(self.value, self.prime)
        if self.value == 0 or self.error_valuation < v + max(digits, 1):
            raise PrecisionLoss(
                f"value known only to valuation {self.error_valuation}, leading valuation {v}"
            )
        return int(v)

    def __add__(self, other: Union[SeriesApprox, RationalLike]) -> SeriesApprox:
        other = self._lift(other)
        return SeriesApprox(self.value + other.value, min(self.error_valuation, other.error_valuation), self.prime)

    __radd__ = __add__

    def __neg__(self) -> SeriesApprox:
        return SeriesApprox(-self.value, self.error_valuation, self.prime)

    def __sub__(self, other: Union[SeriesApprox, RationalLike]) -> SeriesApprox:
        return self + (-self._lift(other))

    def __rsub__(self, other: RationalLike) -> SeriesApprox:
        return self._lift(other) - self

    def __mul__(self, other: Union[SeriesApprox, RationalLike]) -> SeriesApprox:
        other = self._lift(other)
        err = min(self.error_valuation + other.leading, other.error_valuation + self.leading)
        return SeriesApprox(self.value * other.value, err, self.prime)

    __rmul__ = __mul__

    def __truediv__(self, other: Union[SeriesApprox, RationalLike]) -> SeriesApprox:
        other = self._lift(other)
        v_den = other.determined_valuation()
        err = min(self.error_valuation - v_den, self.leading + other.error_valuation - 2 * v_den)
        return SeriesApprox(self.value / other.value, err, self.prime)

    def __rtruediv__(self, other: RationalLike) -> SeriesApprox:
        return self._lift(other) / self

    def reduced(self) -> SeriesApprox:
        """Replace the value by r·p^ν, 0 ≤ r < p^{e−ν}, congruent modulo p^e."""
        if self.error_valuation == INFINITY or self.value == 0:
            return self
        nu = int(valuation(self.value, self.prime))
        depth = int(self.error_valuation) - nu
        if depth <= 0:
            return SeriesApprox(Fraction(0), self.error_valuation, self.prime)
        unit = self.value / Fraction(self.prime) ** nu
        r = unit_residue(unit, self.prime, depth)
        return SeriesApprox(Fraction(r) * Fraction(self.prime) ** nu, self.error_valuation, self.prime)


Number = Union[Fraction, SeriesApprox]


def _value(x: Number) -> Fraction:
    return x.value if isinstance(x, SeriesApprox) else x


@dataclass(frozen=True)
class QuadraticAction:
    """Classical action on the classical path, quadratic in the endpoints."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    f: Fraction
    t_start: Fraction
    t_end: Fraction
    label: str = "custom"
    params: Tuple[Tuple[str, Fraction], ...] = ()
    # set for series-backed actions, whose coefficients are known modulo p^error_valuation
    prime: Optional[int] = None
    error_valuation: Valuation = INFINITY

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d", "e", "f", "t_start", "t_end"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.b == 0:
            raise ValueError("the mixed second derivative of a quadratic action must be nonzero")

    @property
    def interval(self) -> Fraction:
        return self.t_end - self.t_start

    @property
    def is_exact(self) -> bool:
        return self.error_valuation == INFINITY

    @property
    def parameters(self) -> Dict[str, Fraction]:
        return dict(self.params)

    def coefficients(self) -> Tuple[Fraction, ...]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    def terms(self, prime: Optional[int]) -> Tuple[Number, ...]:
        """Coefficients as Fractions, or as SeriesApprox over `prime`."""
        if prime is None:
            return self.coefficients()
        return tuple(SeriesApprox(q, self.error_valuation, prime) for q in self.coefficients())

    def __call__(self, x2: RationalLike, x1: RationalLike) -> Fraction:
        return evaluate(self, x2, x1)


def evaluate(action: QuadraticAction, x2: RationalLike, x1: RationalLike) -> Fraction:
    """Evaluate S̄(x2, t″; x1, t′) exactly."""
    x2, x1 = as_rational(x2), as_rational(x1)
    a, b, c, d, e, f = action.coefficients()
    return a * x2 * x2 + b * x2 * x1 + c * x1 * x1 + d * x2 + e * x1 + f


def from_evaluations(
    fn: Callable[[Fraction, Fraction], Fraction],
    t_start: RationalLike,
    t_end: RationalLike,
    label: str = "fitted",
) -> QuadraticAction:
    """Recover the six coefficients of a quadratic action from six evaluations."""
    one, zero = Fraction(1), Fraction(0)
    f = fn(zero, zero)
    plus_x2, minus_x2 = fn(one, zero), fn(-one, zero)
    plus_x1, minus_x1 = fn(zero, one), fn(zero, -one)
    a = (plus_x2 + minus_x2) / 2 - f
    d = (plus_x2 - minus_x2) / 2
    c = (plus_x1 + minus_x1) / 2 - f
    e = (plus_x1 - minus_x1) / 2
    b = fn(one, one) - a - c - d - e - f
    return QuadraticAction(a, b, c, d, e, f, as_rational(t_start), as_rational(t_end), label=label)


def shift(action: QuadraticAction, tau: RationalLike) -> QuadraticAction:
    """Translate both endpoint times; valid for Lagrangians without explicit time."""
    tau = as_rational(tau)
    return replace(action, t_start=action.t_start + tau, t_end=action.t_end + tau)


def _interval(m: Fraction, t_start: Fraction, t_end: Fraction) -> Fraction:
    if t_end == t_start:
        raise ZeroInterval("t_end must differ from t_start")
    if m == 0:
        raise ZeroMass("mass must be nonzero")
    return t_end - t_start


def free_particle(m: RationalLike, t_start: RationalLike, t_end: RationalLike) -> QuadraticAction:
    """S̄ = m(x″ − x′)²/(2T)."""
    m, t_start, t_end = as_rational(m), as_rational(t_start), as_rational(t_end)
    T = _interval(m, t_start, t_end)
    half = m / (2 * T)
    return QuadraticAction(
        half, -m / T, half, Fraction(0), Fraction(0), Fraction(0), t_start, t_end,
        label=FREE, params=(("m", m),),
    )


def constant_field(
    m: RationalLike, g: RationalLike, t_start: RationalLike, t_end: RationalLike
) -> QuadraticAction:
    """S̄ = m(x″ − x′)²/(2T) − gT(x″ + x′)/2 − g²T³/(24m) for L = mq̇²/2 − gq."""
    m, g = as_rational(m), as_rational(g)
    t_start, t_end = as_rational(t_start), as_rational(t_end)
    T = _interval(m, t_start, t_end)
    half = m / (2 * T)
    linear = -g * T / 2
    return QuadraticAction(
        half, -m / T, half, linear, linear, -g * g * T**3 / (24 * m), t_start, t_end,
        label=FIELD, params=(("m", m), ("g", g)),
    )


def _disk_valuation(p: int) -> int:
    return 2 if p == 2 else 1


def _series(x: Fraction, p: int, target_valuation: int, odd: bool) -> SeriesApprox:
    if x == 0:
        return SeriesApprox(Fraction(0 if odd else 1), INFINITY, p)
    nu = int(valuation(x, p))
    if nu < _disk_valuation(p):
        raise OutsideDisk(f"|x|_{p} = {p}^{-nu} lies outside the convergence disk")

    n = 1 if odd else 0
    term = x if odd else Fraction(1)
    total = Fraction(0)
    while True:
        # v(x^n/n!) >= n·v(x) − ⌊(n−1)/(p−1)⌋, non-decreasing in n on the disk
        bound = n * nu - (n - 1) // (p - 1) if n > 0 else 0
        if total != 0 and bound >= target_valuation:
            return SeriesApprox(total, bound, p)
        total += term
        term = -term * x * x / ((n + 1) * (n + 2))
        n += 2


def sin_p(x: RationalLike, p: int, target_valuation: int) -> SeriesApprox:
    """p-adic sine on |x|_p < 1 (|x|_2 ≤ 1/4), truncated past `target_valuation`."""
    return _series(as_rational(x), p, target_valuation, odd=True)


def cos_p(x: RationalLike, p: int, target_valuation: int) -> SeriesApprox:
    """p-adic cosine on the same disk as sin_p."""
    return _series(as_rational(x), p, target_valuation, odd=False)


def harmonic_oscillator(
    m: RationalLike,
    omega: RationalLike,
    t_start: RationalLike,
    t_end: RationalLike,
    p: int,
    target_valuation: int = DEFAULT_SERIES_TARGET,
) -> QuadraticAction:
    """S̄ = (mω / 2 sin ωT)·[(x″² + x′²) cos ωT − 2x″x′] over Q_p.

    Coefficients are series approximants whose declared error valuation is at
    least `target_valuation`. ω = 0 is the free particle.

    Raises:
        OutsideDisk: ωT lies outside the convergence disk of sin_p/cos_p.
        ZeroMass: m is zero.
        ZeroInterval: t_end equals t_start.
    """
    m, omega = as_rational(m), as_rational(omega)
    t_start, t_end = as_rational(t_start), as_rational(t_end)
    T = _interval(m, t_start, t_end)
    if omega == 0:
        return free_particle(m, t_start, t_end)
    theta = omega * T
    nu_theta = int(valuation(theta, p))
    if nu_theta < _disk_valuation(p):
        raise OutsideDisk(f"|omega*T|_{p} = {p}^{-nu_theta} lies outside the convergence disk")

    half = SeriesApprox.exact(m * omega / 2, p)
    series_target = target_valuation + 2 * nu_theta - int(valuation(half.value, p)) + SERIES_MARGIN
    while True:
        s, c = sin_p(theta, p, series_target), cos_p(theta, p, series_target)
        diagonal = half * c / s
        mixed = -2 * half / s
        err = min(diagonal.error_valuation, mixed.error_valuation)
        if err >= target_valuation:
            break
        series_target += int(target_valuation - err)
    logger.debug("oscillator_series", p=p, series_target=series_target, error_valuation=err)
    diagonal, mixed = diagonal.reduced(), mixed.reduced()
    return QuadraticAction(
        diagonal.value, mixed.value, diagonal.value, Fraction(0), Fraction(0), Fraction(0), t_start, t_end,
        label=OSCILLATOR, params=(("m", m), ("omega", omega)), prime=p, error_valuation=err,
    )


def build_action(
    label: str,
    params: Mapping[str, RationalLike],
    t_start: RationalLike,
    t_end: RationalLike,
    prime: Optional[int] = None,
    target_valuation: int = DEFAULT_SERIES_TARGET,
) -> QuadraticAction:
    """Construct a catalog action by name."""
    if label == FREE:
        return free_particle(params["m"], t_start, t_end)
    if label == FIELD:
        return constant_field(params["m"], params.get("g", 0), t_start, t_end)
    if label == OSCILLATOR:
        if prime is None:
            raise ValueError("the oscillator action is series-backed and needs a prime")
        return harmonic_oscillator(params["m"], params["omega"], t_start, t_end, prime, target_valuation)
    raise ValueError(f"unknown system {label!r}; expected one of {', '.join(CATALOG)}")


def rebuild(action: QuadraticAction, t_start: RationalLike, t_end: RationalLike) -> QuadraticAction:
    """The same catalog system over another interval, at the same declared precision."""
    target = DEFAULT_SERIES_TARGET if action.is_exact else int(action.error_valuation)
    return build_action(action.label, action.parameters, t_start, t_end, action.prime, target)


def second_derivatives(action: QuadraticAction) -> Tuple[Fraction, Fraction, Fraction]:
    """Return (∂²S̄/∂x″², ∂²S̄/∂x″∂x′, ∂²S̄/∂x′²)."""
    return 2 * action.a, action.b, 2 * action.c


def _shared_prime(first: QuadraticAction, second: QuadraticAction) -> Optional[int]:
    if first.prime is not None and second.prime is not None and first.prime != second.prime:
        raise ValueError("actions are series-backed over different primes")
    return first.prime if first.prime is not None else second.prime


def compose(
    later: QuadraticAction,
    earlier: QuadraticAction,
    v: Place,
    h: RationalLike = 1,
) -> Tuple[QuadraticAction, Fraction, ExactCircle]:
    """Integrate out the intermediate point of S̄(x″,t″;x,t) + S̄(x,t;x′,t′).

    Returns the induced action on (t′, t″), the Gauss coefficient
    α = −(∂²S̄₁/∂x² + ∂²S̄₂/∂x²)/2h and the x-independent Gauss factor
    λ_v(α)|2α|_v^{-1/2}. The factor χ_v(−β²/4α) depends on the endpoints and
    is carried by the induced action.

    Raises:
        TimeMismatch: later.t_start differs from earlier.t_end.
        DegenerateComposition: α vanishes.
    """
    h = as_rational(h)
    if later.t_start != earlier.t_end:
        raise TimeMismatch(f"intermediate times differ: {later.t_start} != {earlier.t_end}")
    prime = _shared_prime(later, earlier)
    if prime is not None and v.prime != prime:
        raise ValueError(f"series-backed actions over Q_{prime} cannot be composed at place {v}")

    a1, b1, c1, d1, e1, f1 = later.terms(prime)
    a2, b2, c2, d2, e2, f2 = earlier.terms(prime)
    quad = c1 + a2
    if _value(quad) == 0:
        raise DegenerateComposition("the quadratic coefficient of the intermediate point vanishes")
    if isinstance(quad, SeriesApprox):
        # λ_v(α) reads three digits at p = 2 and one otherwise
        quad.determined_valuation(3 if prime == 2 else 1)
    lin = e1 + d2
    coefficients = (
        a1 - b1 * b1 / (4 * quad),
        -(b1 * b2) / (2 * quad),
        c2 - b2 * b2 / (4 * quad),
        d1 - b1 * lin / (2 * quad),
        e2 - b2 * lin / (2 * quad),
        f1 + f2 - lin * lin / (4 * quad),
    )
    err: Valuation = INFINITY
    if prime is not None:
        coefficients = tuple(q.reduced() for q in coefficients)
        err = min(q.error_valuation for q in coefficients)

    same = later.label == earlier.label and later.params == earlier.params
    total = QuadraticAction(
        *(_value(q) for q in coefficients),
        t_start=earlier.t_start,
        t_end=later.t_end,
        label=later.label if same else "composite",
        params=later.params if same else (),
        prime=prime,
        error_valuation=err,
    )
    alpha = -_value(quad) / h
    factor = lambda_fn(alpha, v) * ExactCircle(1 / norm(2 * alpha, v))
    return total, alpha, factor

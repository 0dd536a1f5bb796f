"""
Exact propagator K_v(x″,t″;x′,t′) = λ_v(−b/2h)|b/h|_v^{1/2}·χ_v(−S̄/h) for quadratic actions.

Normalization, point evaluation, the group property, time slicing, the
unitarity relations and brute-force evolution of locally constant wave
functions.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import structlog

from ..config.schemas import CheckStatus, VerificationReport
from .actions import (
    QuadraticAction,
    SeriesApprox,
    build_action,
    compose,
    evaluate,
    rebuild,
    second_derivatives,
)
from .errors import DegenerateRelation, PrecisionLoss
from .gauss import DEFAULT_TERM_BUDGET, ball_sum, min_mesh
from .padic_core import (
    INFINITY,
    ExactCircle,
    Place,
    RationalLike,
    as_rational,
    character,
    lambda_fn,
    norm,
    valuation,
)

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class KernelSpec:
    """A quadratic action viewed at one place with a rational Planck constant."""

    action: QuadraticAction
    place: Place
    h: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", as_rational(self.h))
        if self.h == 0:
            raise ValueError("h must be nonzero")
        if self.action.prime is not None and self.place.prime != self.action.prime:
            raise ValueError(f"a series-backed action over Q_{self.action.prime} cannot be read at place {self.place}")


@dataclass(frozen=True)
class BallTerm:
    """coefficient × indicator of center + p^γ·Z_p."""

    coefficient: complex
    center: Fraction
    gamma: int


@dataclass(frozen=True)
class BallFunction:
    """Finite sum of ball indicators, a locally constant function on Q_p."""

    p: int
    terms: Tuple[BallTerm, ...] = field(default_factory=tuple)

    @classmethod
    def indicator(cls, p: int, center: RationalLike = 0, gamma: int = 0, coefficient: complex = 1) -> BallFunction:
        return cls(p, (BallTerm(complex(coefficient), as_rational(center), gamma),))

    def __add__(self, other: BallFunction) -> BallFunction:
        if other.p != self.p:
            raise ValueError("ball functions over different primes")
        return BallFunction(self.p, self.terms + other.terms)

    def scale(self, c: complex) -> BallFunction:
        return BallFunction(self.p, tuple(BallTerm(t.coefficient * c, t.center, t.gamma) for t in self.terms))

    def __call__(self, x: RationalLike) -> complex:
        x = as_rational(x)
        return sum(
            (t.coefficient for t in self.terms if valuation(x - t.center, self.p) >= t.gamma),
            complex(0),
        )


def _require_precision(spec: KernelSpec, points: Iterable[Fraction] = ()) -> None:
    """Raise PrecisionLoss unless a series-backed kernel is exact at these points."""
    action = spec.action
    if action.is_exact:
        return
    p = action.prime
    assert p is not None
    SeriesApprox(action.b, action.error_valuation, p).determined_valuation(3 if p == 2 else 1)
    low = min([0] + [int(valuation(x, p)) for x in points if x != 0])
    err = action.error_valuation + 2 * low - int(valuation(spec.h, p))
    if err < 0:
        raise PrecisionLoss(f"action known to valuation {action.error_valuation}, character needs {-2 * low}")


def normalization(spec: KernelSpec) -> ExactCircle:
    """N_v = λ_v(−b/2h)·|b/h|_v^{1/2}, so mag2 = |b/h|_v."""
    _require_precision(spec)
    b, h = spec.action.b, spec.h
    return lambda_fn(-b / (2 * h), spec.place) * ExactCircle(norm(b / h, spec.place))


def kernel_at(spec: KernelSpec, x2: RationalLike, x1: RationalLike) -> ExactCircle:
    """K_v(x2, t″; x1, t′) as an exact circle value."""
    x2, x1 = as_rational(x2), as_rational(x1)
    _require_precision(spec, (x2, x1))
    action_value = evaluate(spec.action, x2, x1)
    return normalization(spec) * character(-action_value / spec.h, spec.place)


def textbook_kernel(spec: KernelSpec, x2: RationalLike, x1: RationalLike) -> complex:
    """Real-place propagator (i·∂²S̄/∂x″∂x′ / h)^{1/2}·exp(2πi·S̄/h) in floating point."""
    if not spec.place.is_archimedean:
        raise ValueError("the textbook propagator is defined at the real place")
    x2, x1 = as_rational(x2), as_rational(x1)
    ratio = spec.action.b / spec.h
    # phase reduced exactly so large actions keep full float precision
    angle = (evaluate(spec.action, x2, x1) / spec.h) % 1
    return cmath.sqrt(1j * float(ratio)) * cmath.exp(2j * cmath.pi * float(angle))


def _direct_action(later: QuadraticAction, earlier: QuadraticAction, direct: Optional[QuadraticAction]) -> QuadraticAction:
    if direct is not None:
        return direct
    if later.label != earlier.label or later.params != earlier.params:
        raise ValueError("the direct action can only be rebuilt for two pieces of one catalog system")
    return rebuild(later, earlier.t_start, later.t_end)


def _coefficients_agree(got: QuadraticAction, expected: QuadraticAction) -> bool:
    precision = min(got.error_valuation, expected.error_valuation)
    if precision == INFINITY:
        return got.coefficients() == expected.coefficients()
    p = got.prime or expected.prime
    return all(valuation(g - e, p) >= precision for g, e in zip(got.coefficients(), expected.coefficients()))


def _action_payload(action: QuadraticAction) -> Dict[str, Any]:
    names = ("a", "b", "c", "d", "e", "f")
    payload: Dict[str, Any] = dict(zip(names, action.coefficients()))
    payload.update(t_start=action.t_start, t_end=action.t_end, error_valuation=action.error_valuation)
    return payload


def verify_group(
    later: KernelSpec, earlier: KernelSpec, direct: Optional[QuadraticAction] = None
) -> VerificationReport:
    """Check ∫ K(x″,t″;x,t)·K(x,t;x′,t′) dx = K(x″,t″;x′,t′) in exact arithmetic.

    The integral is done by compose, which completes the square in x. The
    normalizations must match in modulus and phase, and the induced action
    must equal the direct one, which makes the characters agree at every
    pair of endpoints. Catalog actions rebuild the direct action themselves.
    """
    if later.place != earlier.place or later.h != earlier.h:
        raise ValueError("group composition needs one place and one h")
    v, h = later.place, later.h
    total, alpha, factor = compose(later.action, earlier.action, v, h)
    expected = _direct_action(later.action, earlier.action, direct)
    composed_norm = normalization(later) * normalization(earlier) * factor
    direct_norm = normalization(KernelSpec(expected, v, h))

    ok = composed_norm == direct_norm and _coefficients_agree(total, expected)
    return VerificationReport(
        check=f"group/{later.action.label}/{v}",
        inputs={
            "times": [earlier.action.t_start, later.action.t_start, later.action.t_end],
            "params": later.action.parameters,
            "h": h,
            "alpha": alpha,
        },
        expected={"normalization": direct_norm, "action": _action_payload(expected)},
        got={"normalization": composed_norm, "action": _action_payload(total)},
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
    )


def time_sliced(
    label: str,
    params: Dict[str, RationalLike],
    n: int,
    t_start: RationalLike,
    t_end: RationalLike,
    place: Place,
    h: RationalLike,
    x2: RationalLike,
    x1: RationalLike,
    target_valuation: Optional[int] = None,
) -> ExactCircle:
    """Kernel of a catalog system reduced from n equal time slices.

    Adjacent slices are merged one at a time by composition; the Gauss factor
    of every merge multiplies the running normalization.
    """
    if n < 1:
        raise ValueError("n must be positive")
    t_start, t_end, h = as_rational(t_start), as_rational(t_end), as_rational(h)
    extra = {} if target_valuation is None else {"target_valuation": target_valuation}
    times = [t_start + (t_end - t_start) * Fraction(i, n) for i in range(n + 1)]
    pieces = [build_action(label, params, times[i], times[i + 1], place.prime, **extra) for i in range(n)]

    total = pieces[0]
    circle = normalization(KernelSpec(total, place, h))
    for piece in pieces[1:]:
        total, _, factor = compose(piece, total, place, h)
        circle = circle * normalization(KernelSpec(piece, place, h)) * factor
    logger.debug("time_sliced", label=label, n=n, place=str(place), error_valuation=total.error_valuation)
    spec = KernelSpec(total, place, h)
    x2, x1 = as_rational(x2), as_rational(x1)
    _require_precision(spec, (x2, x1))
    return circle * character(-evaluate(total, x2, x1) / h, place)


def evolve(
    spec: KernelSpec,
    psi: BallFunction,
    sample_points: Sequence[RationalLike],
    budget: int = DEFAULT_TERM_BUDGET,
    workers: int = 1,
) -> List[complex]:
    """Sample (Uψ)(x″) = ∫ K(x″,t″;x′,t′)·ψ(x′) dx′ by brute force over the balls of ψ.

    On the ball center + p^γZ_p the substitution x′ = center + y turns the
    exponent −S̄/h into α'y² + β'y + const with α' = −c/h and
    β' = −(b·x″ + 2c·center + e)/h, summed over y ∈ p^γZ_p.

    Raises:
        SumTooLarge: A ball needs more terms than the budget allows.
    """
    if spec.place.is_archimedean:
        raise ValueError("evolve integrates over Q_p; the real place has no brute-force sum")
    p = spec.place.p
    if psi.p != p:
        raise ValueError(f"wave function over Q_{psi.p} evolved at place {p}")
    action, h = spec.action, spec.h
    n_complex = complex(normalization(spec))
    alpha = -action.c / h

    out: List[complex] = []
    for point in sample_points:
        x2 = as_rational(point)
        value = complex(0)
        for term in psi.terms:
            _require_precision(spec, (x2, term.center, Fraction(p) ** term.gamma))
            beta = -(action.b * x2 + 2 * action.c * term.center + action.e) / h
            offset = character(-evaluate(action, x2, term.center) / h, spec.place)
            gamma = -term.gamma
            delta = min_mesh(alpha, beta, p, gamma)
            value += term.coefficient * complex(offset) * ball_sum(alpha, beta, p, gamma, delta, budget, workers)
        out.append(n_complex * value)
    logger.debug("evolve", p=p, samples=len(out), balls=len(psi.terms))
    return out


def unitarity_threshold(spec: KernelSpec, x2: RationalLike, z: RationalLike) -> int:
    """γ₀ = max(0, v(b(x2 − z)/h)); off-diagonal sums over B_γ vanish for γ > γ₀."""
    x2, z = as_rational(x2), as_rational(z)
    if x2 == z:
        raise ValueError("the threshold is defined off the diagonal")
    beta = spec.action.b * (x2 - z) / spec.h
    return max(0, int(valuation(beta, spec.place.p)))


def off_diagonal_unitarity(
    spec: KernelSpec,
    x2: RationalLike,
    z: RationalLike,
    gamma: int,
    budget: int = DEFAULT_TERM_BUDGET,
    workers: int = 1,
) -> complex:
    """∫_{B_γ} conj(K(x2,t″;x′,t′))·K(z,t″;x′,t′) dx′ by brute force.

    The integrand is |N|²·χ(κ + βx′) with β = b(x2 − z)/h and
    κ = (a(x2² − z²) + d(x2 − z))/h. On the diagonal the integral is the ball
    volume |N|²·p^γ.
    """
    if spec.place.is_archimedean:
        raise ValueError("off-diagonal sums are evaluated over Q_p")
    p = spec.place.p
    x2, z = as_rational(x2), as_rational(z)
    _require_precision(spec, (x2, z, Fraction(p) ** -gamma))
    action, h = spec.action, spec.h
    beta = action.b * (x2 - z) / h
    kappa = (action.a * (x2 * x2 - z * z) + action.d * (x2 - z)) / h
    prefactor = ExactCircle(normalization(spec).mag2 ** 2) * character(kappa, spec.place)
    delta = min_mesh(0, beta, p, gamma)
    return complex(prefactor) * ball_sum(0, beta, p, gamma, delta, budget, workers)


def _is_trivial_unit(x: Fraction, place: Place) -> bool:
    """λ_v(x·y) = λ_v(y) for every y: x ≡ 1 mod p (mod 8 at p = 2), or x > 0 at the real place."""
    if place.is_archimedean:
        return x > 0
    depth = 3 if place.p == 2 else 1
    return x == 1 or valuation(x - 1, place.p) >= depth


def relations_uv(
    later: QuadraticAction,
    earlier: QuadraticAction,
    place: Place,
    direct: Optional[QuadraticAction] = None,
) -> Tuple[Fraction, Fraction, VerificationReport]:
    """Solve the u and v relations between second derivatives of a split action.

    u = −(∂²S̄₁/∂x² + ∂²S̄₂/∂x²)/(∂²S̄₁/∂x″∂x + ∂²S̄₂/∂x∂x′) and
    v = ∂²S̄/∂x″∂x′·(1/∂²S̄₁/∂x″∂x + 1/∂²S̄₂/∂x∂x′) with S̄ the direct action.
    The report passes when both are trivial units at `place`.

    Raises:
        DegenerateRelation: b₁ + b₂ or 1/b₁ + 1/b₂ vanishes.
    """
    expected = _direct_action(later, earlier, direct)
    prime = later.prime or earlier.prime
    _, b1, dxx1 = second_derivatives(later)
    dxx2, b2, _ = second_derivatives(earlier)
    b_direct = second_derivatives(expected)[1]
    if b1 + b2 == 0:
        raise DegenerateRelation("b1 + b2 vanishes")
    if 1 / b1 + 1 / b2 == 0:
        raise DegenerateRelation("1/b1 + 1/b2 vanishes")

    if prime is None:
        u = -(dxx1 + dxx2) / (b1 + b2)
        v = b_direct * (1 / b1 + 1 / b2)
    else:
        def lift(q: Fraction, action: QuadraticAction) -> SeriesApprox:
            return SeriesApprox(q, action.error_valuation, prime)

        u_approx = -(lift(dxx1, later) + lift(dxx2, earlier)) / (lift(b1, later) + lift(b2, earlier))
        v_approx = lift(b_direct, expected) * (1 / lift(b1, later) + 1 / lift(b2, earlier))
        depth = 3 if prime == 2 else 1
        for approx in (u_approx, v_approx):
            if approx.error_valuation < depth:
                raise PrecisionLoss(f"u/v known only modulo {prime}^{approx.error_valuation}")
        u, v = u_approx.value, v_approx.value

    ok = _is_trivial_unit(u, place) and _is_trivial_unit(v, place)
    report = VerificationReport(
        check=f"uv/{later.label}/{place}",
        inputs={"times": [earlier.t_start, later.t_start, later.t_end], "params": later.parameters},
        expected={"u": "1 mod p" if not place.is_archimedean else "> 0", "v": "1 mod p" if not place.is_archimedean else "> 0"},
        got={"u": u, "v": v},
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
    )
    return u, v, report

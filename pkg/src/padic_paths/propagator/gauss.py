"""
Gauss integrals ∫ χ_v(αx² + βx) dx.

The closed form λ_v(α)|2α|_v^{-1/2}χ_v(−β²/4α) is evaluated exactly; the
p-adic side is checked independently by brute-force character sums over
balls B_γ = p^{-γ}Z_p discretized modulo p^δZ_p.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List

import numpy as np
import structlog

from .errors import MeshTooCoarse, NoStabilization, SumTooLarge, ZeroAlpha
from .padic_core import (
    ExactCircle,
    Place,
    RationalLike,
    as_rational,
    character,
    lambda_fn,
    norm,
    residue,
    valuation,
)

logger = structlog.get_logger(__name__)

DEFAULT_TERM_BUDGET = 10**7
MESH_MARGIN = 2
MAX_STABILIZATION_STEPS = 40
CHUNK_SIZE = 1 << 20
# int64 headroom for (c·j² + c'·j) with every factor below the period
_MAX_PERIOD = 1 << 31


@dataclass(frozen=True)
class BallSpec:
    """Ball B_γ = p^{-γ}Z_p with representatives modulo p^δZ_p."""

    p: int
    gamma: int
    delta: int

    def __post_init__(self) -> None:
        if self.delta < -self.gamma:
            raise ValueError(f"empty mesh: delta={self.delta} < -gamma={-self.gamma}")

    @property
    def terms(self) -> int:
        """Number of coset representatives, p^{γ+δ}."""
        return self.p ** (self.gamma + self.delta)


def gauss_closed(alpha: RationalLike, beta: RationalLike, v: Place) -> ExactCircle:
    """Return λ_v(α)·|2α|_v^{-1/2}·χ_v(−β²/4α) exactly.

    Raises:
        ZeroAlpha: The quadratic form is degenerate.
    """
    alpha, beta = as_rational(alpha), as_rational(beta)
    if alpha == 0:
        raise ZeroAlpha("alpha must be nonzero in a Gauss integral")
    modulus = ExactCircle(1 / norm(2 * alpha, v))
    return lambda_fn(alpha, v) * modulus * character(-beta * beta / (4 * alpha), v)


def min_mesh(alpha: RationalLike, beta: RationalLike, p: int, gamma: int) -> int:
    """Return a δ on which x ↦ χ_p(αx² + βx) is constant on cosets inside B_γ."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    bounds: List[int] = []
    if alpha != 0:
        a = -int(valuation(alpha, p))
        bounds += [a + gamma, -((-a) // 2)]
    if beta != 0:
        bounds.append(-int(valuation(beta, p)))
    return max(max(bounds, default=0) + MESH_MARGIN, -gamma)


def _phase_histogram(c2: int, c1: int, period: int, count: int, workers: int) -> np.ndarray:
    """Count j in [0, count) by (c2·j² + c1·j) mod period, in fixed chunks."""

    def chunk(start: int) -> np.ndarray:
        j = np.arange(start, min(start + CHUNK_SIZE, count), dtype=np.int64)
        r = (c2 * (j * j % period) + c1 * j) % period
        return np.bincount(r, minlength=period)

    starts = range(0, count, CHUNK_SIZE)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk, starts))
    else:
        parts = [chunk(s) for s in starts]
    counts = parts[0]
    for part in parts[1:]:
        counts = counts + part
    return counts


def ball_sum(
    alpha: RationalLike,
    beta: RationalLike,
    p: int,
    gamma: int,
    delta: int,
    budget: int = DEFAULT_TERM_BUDGET,
    workers: int = 1,
) -> complex:
    """Sum χ_p(αx² + βx)·p^{-δ} over representatives x of B_γ modulo p^δZ_p.

    With x = j·p^{-γ} the phase is a polynomial in j with period p^k, so the
    p^{γ+δ} representatives are folded onto one exhaustive period and weighted
    by its multiplicity. Phases are histogrammed as integers and reduced with
    math.fsum, which makes chunked, threaded and serial runs agree bit for bit.

    Raises:
        SumTooLarge: The enumerated period exceeds the term budget.
    """
    alpha, beta = as_rational(alpha), as_rational(beta)
    spec = BallSpec(p, gamma, delta)
    r2, k2 = residue(alpha * Fraction(p) ** (-2 * gamma), p)
    r1, k1 = residue(beta * Fraction(p) ** (-gamma), p)
    k = max(k2, k1)
    period = p**k
    enumerated = min(period, spec.terms)
    if enumerated > budget or period > _MAX_PERIOD:
        logger.warning("term_budget_exceeded", p=p, gamma=gamma, delta=delta, terms=enumerated, budget=budget)
        raise SumTooLarge(f"{enumerated} terms exceed the budget of {budget}")
    c2, c1 = r2 * p ** (k - k2), r1 * p ** (k - k1)
    logger.debug("ball_sum", p=p, gamma=gamma, delta=delta, period=period, terms=enumerated)

    counts = _phase_histogram(c2, c1, period, enumerated, workers)
    residues = np.nonzero(counts)[0]
    weights = counts[residues].astype(np.float64)
    angles = 2.0 * np.pi * residues / period
    re = math.fsum((weights * np.cos(angles)).tolist())
    im = math.fsum((weights * np.sin(angles)).tolist())
    scale = float(Fraction(spec.terms, enumerated) * Fraction(p) ** (-delta))
    return complex(re, im) * scale


def gauss_brute(
    alpha: RationalLike,
    beta: RationalLike,
    spec: BallSpec,
    budget: int = DEFAULT_TERM_BUDGET,
    workers: int = 1,
) -> complex:
    """Brute-force ∫_{B_γ} χ_p(αx² + βx) dx at the mesh of `spec`.

    Raises:
        MeshTooCoarse: spec.delta is below min_mesh.
        SumTooLarge: The sum exceeds the term budget.
    """
    needed = min_mesh(alpha, beta, spec.p, spec.gamma)
    if spec.delta < needed:
        raise MeshTooCoarse(f"delta={spec.delta} below the local constancy mesh {needed}")
    return ball_sum(alpha, beta, spec.p, spec.gamma, spec.delta, budget, workers)


def start_gamma(alpha: RationalLike, beta: RationalLike, p: int) -> int:
    """First ball radius that holds the stationary point −β/2α and the quadratic scale."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    two = 1 if p == 2 else 0
    nu_alpha = int(valuation(alpha, p))
    gamma = max(0, -((-(2 + two + nu_alpha)) // 2))
    if beta != 0:
        gamma = max(gamma, nu_alpha - int(valuation(beta, p)) + two)
    return gamma


def period_terms(alpha: RationalLike, beta: RationalLike, p: int, gamma: int) -> int:
    """Number of terms ball_sum enumerates for B_γ at the minimal mesh."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    k = 0
    if alpha != 0:
        k = max(k, 2 * gamma - int(valuation(alpha, p)))
    if beta != 0:
        k = max(k, gamma - int(valuation(beta, p)))
    return p**k


def stabilization_terms(alpha: RationalLike, beta: RationalLike, p: int) -> int:
    """Largest enumeration gauss_stabilized performs when it stops as early as possible."""
    return period_terms(alpha, beta, p, start_gamma(alpha, beta, p) + 2)


def gauss_stabilized(
    alpha: RationalLike,
    beta: RationalLike,
    p: int,
    tol: float = 1e-9,
    budget: int = DEFAULT_TERM_BUDGET,
    workers: int = 1,
) -> complex:
    """Full-space Gauss integral as the stabilized limit of ball integrals.

    γ grows from start_gamma until two successive increments change the value
    by less than `tol`.

    Raises:
        ZeroAlpha: alpha is zero.
        NoStabilization: The budget or step limit ran out first.
    """
    alpha, beta = as_rational(alpha), as_rational(beta)
    if alpha == 0:
        raise ZeroAlpha("alpha must be nonzero in a Gauss integral")
    gamma = start_gamma(alpha, beta, p)
    values: List[complex] = []
    for _ in range(MAX_STABILIZATION_STEPS):
        delta = min_mesh(alpha, beta, p, gamma)
        try:
            values.append(ball_sum(alpha, beta, p, gamma, delta, budget, workers))
        except SumTooLarge as exc:
            raise NoStabilization(f"no stabilization before gamma={gamma}: {exc}") from exc
        logger.debug("stabilization_step", p=p, gamma=gamma, value=str(values[-1]))
        if len(values) >= 3 and abs(values[-1] - values[-2]) < tol and abs(values[-2] - values[-3]) < tol:
            return values[-1]
        gamma += 1
    raise NoStabilization(f"no stabilization within {MAX_STABILIZATION_STEPS} radii")

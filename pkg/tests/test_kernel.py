from __future__ import annotations

import random
from fractions import Fraction

import pytest

from padic_paths.propagator.actions import (
    QuadraticAction,
    build_action,
    constant_field,
    free_particle,
    harmonic_oscillator,
    shift,
)
from padic_paths.propagator.errors import DegenerateRelation, PrecisionLoss
from padic_paths.propagator.gauss import ball_sum, min_mesh
from padic_paths.propagator.kernel import (
    BallFunction,
    KernelSpec,
    evolve,
    kernel_at,
    normalization,
    off_diagonal_unitarity,
    relations_uv,
    textbook_kernel,
    time_sliced,
    unitarity_threshold,
    verify_group,
)
from padic_paths.propagator.padic_core import ExactCircle, Place, character, norm, valuation

INF = Place.infinity()
PLACES = (Place(2), Place(3), Place(5), Place(7), INF)
TOL = 1e-9


def _rat(rng: random.Random, positive: bool = False) -> Fraction:
    sign = 1 if positive else rng.choice([-1, 1])
    return Fraction(sign * rng.randint(1, 12), rng.randint(1, 12))


def test_kernel_spec_invariants() -> None:
    with pytest.raises(ValueError):
        KernelSpec(free_particle(1, 0, 1), Place(3), Fraction(0))
    with pytest.raises(ValueError):
        KernelSpec(harmonic_oscillator(1, 3, 0, 1, 3), Place(5))


def test_normalization_examples() -> None:
    assert normalization(KernelSpec(free_particle(1, 0, 1), Place(5))) == ExactCircle()
    # b = −1/3: |b|_3 = 3 and λ_3(1/6) = −i
    assert normalization(KernelSpec(free_particle(1, 0, 3), Place(3))) == ExactCircle(Fraction(3), Fraction(3, 4))
    assert normalization(KernelSpec(free_particle(1, 0, 1), INF)) == ExactCircle(Fraction(1), Fraction(7, 8))


def test_normalization_modulus_is_mixed_derivative() -> None:
    rng = random.Random(1)
    for place in PLACES:
        for _ in range(30):
            action = constant_field(_rat(rng), _rat(rng), 0, _rat(rng, positive=True))
            h = _rat(rng, positive=True)
            assert normalization(KernelSpec(action, place, h)).mag2 == norm(action.b / h, place)


def test_kernel_factorizes() -> None:
    rng = random.Random(2)
    for place in PLACES:
        for _ in range(30):
            action = constant_field(_rat(rng), _rat(rng), 0, _rat(rng, positive=True))
            spec = KernelSpec(action, place, _rat(rng, positive=True))
            x2, x1 = _rat(rng), _rat(rng)
            expected = normalization(spec) * character(-action(x2, x1) / spec.h, place)
            assert kernel_at(spec, x2, x1) == expected


def test_kernel_on_the_diagonal_is_the_normalization() -> None:
    spec = KernelSpec(free_particle(2, 0, 5), Place(3))
    assert kernel_at(spec, Fraction(7, 3), Fraction(7, 3)) == normalization(spec)


def test_kernel_fractional_displacement() -> None:
    spec = KernelSpec(free_particle(1, 0, 1), Place(3))
    # S = 1/18 and {−1/18}_3 = 4/9
    assert kernel_at(spec, Fraction(1, 3), 0) == ExactCircle(Fraction(1), Fraction(4, 9))


def test_real_place_matches_textbook_propagator() -> None:
    rng = random.Random(3)
    for _ in range(50):
        t0 = _rat(rng)
        action = constant_field(_rat(rng), _rat(rng), t0, t0 + _rat(rng, positive=True))
        spec = KernelSpec(action, INF, _rat(rng, positive=True))
        x2, x1 = _rat(rng), _rat(rng)
        assert abs(complex(kernel_at(spec, x2, x1)) - textbook_kernel(spec, x2, x1)) < 1e-12


def test_kernel_depends_on_elapsed_time_only() -> None:
    rng = random.Random(4)
    for place in PLACES:
        action = constant_field(_rat(rng), _rat(rng), 0, _rat(rng, positive=True))
        moved = shift(action, _rat(rng))
        x2, x1 = _rat(rng), _rat(rng)
        assert kernel_at(KernelSpec(moved, place), x2, x1) == kernel_at(KernelSpec(action, place), x2, x1)


@pytest.mark.parametrize("place", PLACES, ids=str)
@pytest.mark.parametrize("system", ["free", "field"])
def test_group_property_polynomial_systems(place, system) -> None:
    rng = random.Random(f"{place}-{system}")
    for _ in range(25):
        params = {"m": _rat(rng), "g": _rat(rng)}
        t0 = _rat(rng)
        t1 = t0 + _rat(rng, positive=True)
        t2 = t1 + _rat(rng, positive=True)
        h = _rat(rng, positive=True)
        later = KernelSpec(build_action(system, params, t1, t2), place, h)
        earlier = KernelSpec(build_action(system, params, t0, t1), place, h)
        report = verify_group(later, earlier)
        assert report.passed, report


@pytest.mark.parametrize("p, omega", [(2, 4), (3, 3), (5, 5), (7, Fraction(7, 3))])
def test_group_property_oscillator(p, omega) -> None:
    params = {"m": 1, "omega": omega}
    later = KernelSpec(build_action("oscillator", params, 1, 3, p), Place(p))
    earlier = KernelSpec(build_action("oscillator", params, 0, 1, p), Place(p))
    report = verify_group(later, earlier)
    assert report.passed, report


def test_group_property_needs_direct_action_for_custom_pieces() -> None:
    later = KernelSpec(QuadraticAction(1, -2, 1, 0, 0, 0, 1, 2), Place(3))
    earlier = KernelSpec(free_particle(2, 0, 1), Place(3))
    with pytest.raises(ValueError):
        verify_group(later, earlier)


@pytest.mark.parametrize("place", PLACES, ids=str)
@pytest.mark.parametrize("n", [1, 2, 3, 4, 8, 16])
def test_time_slicing_is_exact(place, n) -> None:
    for system, params in (("free", {"m": Fraction(3, 2)}), ("field", {"m": Fraction(2, 5), "g": Fraction(-7, 3)})):
        direct = kernel_at(KernelSpec(build_action(system, params, 1, 4), place, Fraction(1, 2)), Fraction(5, 7), -2)
        sliced = time_sliced(system, params, n, 1, 4, place, Fraction(1, 2), Fraction(5, 7), -2)
        assert sliced == direct


@pytest.mark.parametrize("n", [1, 2, 4])
def test_time_slicing_oscillator(n) -> None:
    params = {"m": 1, "omega": 3**3}
    direct = kernel_at(KernelSpec(build_action("oscillator", params, 0, 1, 3), Place(3)), 2, -1)
    assert time_sliced("oscillator", params, n, 0, 1, Place(3), 1, 2, -1) == direct


def test_precision_loss_at_far_endpoints() -> None:
    spec = KernelSpec(harmonic_oscillator(1, 3, 0, 1, 3, target_valuation=4), Place(3))
    kernel_at(spec, 1, 2)
    with pytest.raises(PrecisionLoss):
        kernel_at(spec, Fraction(1, 3**20), 0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_evolve_indicator_is_weak_delta(k) -> None:
    spec = KernelSpec(free_particle(1, 0, 3**k), Place(3))
    psi = BallFunction.indicator(3)
    inside = evolve(spec, psi, [0, 1, 5, Fraction(3, 2), -4])
    outside = evolve(spec, psi, [Fraction(1, 3), Fraction(2, 9), Fraction(-5, 3)])
    assert all(abs(abs(u) - 1) < TOL for u in inside)
    assert all(abs(u) < TOL for u in outside)


def test_evolve_is_linear() -> None:
    spec = KernelSpec(constant_field(Fraction(1, 3), 2, 0, 1), Place(3))
    psi = BallFunction.indicator(3) + BallFunction.indicator(3, Fraction(1, 3), 1, 2j)
    samples = [0, Fraction(1, 3), 2]
    c = 0.5 - 1.5j
    base = evolve(spec, psi, samples)
    scaled = evolve(spec, psi.scale(c), samples)
    assert all(abs(s - c * b) < TOL for s, b in zip(scaled, base))


def test_evolve_agrees_with_finer_mesh() -> None:
    action = free_particle(Fraction(1, 3), 0, 1)
    spec = KernelSpec(action, Place(3))
    for x2 in (Fraction(0), Fraction(1), Fraction(2, 3)):
        (value,) = evolve(spec, BallFunction.indicator(3), [x2])
        alpha = -action.c
        beta = -action.b * x2
        fine = ball_sum(alpha, beta, 3, 0, min_mesh(alpha, beta, 3, 0) + 3)
        offset = complex(character(-action(x2, 0), Place(3)))
        assert abs(value - complex(normalization(spec)) * offset * fine) < TOL


def test_ball_function_evaluation() -> None:
    psi = BallFunction.indicator(3, 1, 1, 2) + BallFunction.indicator(3)
    assert psi(4) == 3
    assert psi(2) == 1
    assert psi(Fraction(1, 3)) == 0


def test_off_diagonal_vanishes_past_threshold() -> None:
    rng = random.Random(6)
    for p in (3, 5):
        for _ in range(25):
            spec = KernelSpec(free_particle(_rat(rng), 0, _rat(rng, positive=True)), Place(p), _rat(rng, positive=True))
            x2 = _rat(rng)
            z = x2 + _rat(rng)
            gamma = unitarity_threshold(spec, x2, z) + 1
            assert abs(off_diagonal_unitarity(spec, x2, z, gamma)) < TOL


def test_off_diagonal_below_threshold_and_on_diagonal() -> None:
    spec = KernelSpec(free_particle(1, 0, 1), Place(3))
    assert unitarity_threshold(spec, 1, 0) == 0
    assert abs(off_diagonal_unitarity(spec, 1, 0, 0)) == pytest.approx(1.0)
    assert off_diagonal_unitarity(spec, 1, 1, 2) == pytest.approx(9.0)
    with pytest.raises(ValueError):
        unitarity_threshold(spec, 1, 1)


@pytest.mark.parametrize("place", PLACES, ids=str)
def test_uv_relations_polynomial_systems(place) -> None:
    rng = random.Random(9)
    for _ in range(20):
        params = {"m": _rat(rng), "g": _rat(rng)}
        t1 = _rat(rng, positive=True)
        t2 = t1 + _rat(rng, positive=True)
        for system in ("free", "field"):
            u, v, report = relations_uv(build_action(system, params, t1, t2), build_action(system, params, 0, t1), place)
            assert (u, v) == (1, 1)
            assert report.passed


@pytest.mark.parametrize("p, omega", [(2, 4), (3, 3), (5, 10), (7, 7)])
def test_uv_relations_oscillator(p, omega) -> None:
    params = {"m": 1, "omega": omega}
    later = build_action("oscillator", params, 1, 3, p)
    earlier = build_action("oscillator", params, 0, 1, p)
    u, v, report = relations_uv(later, earlier, Place(p))
    assert report.passed
    depth = 3 if p == 2 else 1
    assert valuation(u - 1, p) >= depth and valuation(v - 1, p) >= depth


def test_uv_relations_degenerate() -> None:
    later = QuadraticAction(1, 1, 1, 0, 0, 0, 1, 2)
    earlier = QuadraticAction(1, -1, 1, 0, 0, 0, 0, 1)
    with pytest.raises(DegenerateRelation):
        relations_uv(later, earlier, Place(3), direct=free_particle(1, 0, 2))


def test_off_diagonal_carries_the_squared_normalization() -> None:
    # b = −3: |b|_3 = 1/3, so |N|² = 1/3 rather than 1
    spec = KernelSpec(free_particle(1, 0, Fraction(1, 3)), Place(3))
    assert normalization(spec).mag2 == Fraction(1, 3)
    assert off_diagonal_unitarity(spec, 1, 1, 2) == pytest.approx(3.0)
    assert unitarity_threshold(spec, 1, 0) == 1
    assert abs(off_diagonal_unitarity(spec, 1, 0, 0)) == pytest.approx(1 / 3)
    assert abs(off_diagonal_unitarity(spec, 1, 0, 2)) < TOL


def test_diagonal_mass_is_mag2_times_volume() -> None:
    rng = random.Random(12)
    for p in (3, 5):
        for _ in range(20):
            spec = KernelSpec(free_particle(_rat(rng), 0, _rat(rng, positive=True)), Place(p), _rat(rng, positive=True))
            x2 = _rat(rng)
            gamma = rng.randint(0, 2)
            volume = float(normalization(spec).mag2 * Fraction(p) ** gamma)
            assert off_diagonal_unitarity(spec, x2, x2, gamma) == pytest.approx(volume)

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from padic_paths.propagator.errors import MeshTooCoarse, NoStabilization, SumTooLarge, ZeroAlpha
from padic_paths.propagator.gauss import (
    BallSpec,
    ball_sum,
    gauss_brute,
    gauss_closed,
    gauss_stabilized,
    min_mesh,
    period_terms,
    stabilization_terms,
)
from padic_paths.propagator.padic_core import ExactCircle, Place, lambda_fn, norm

TOL = 1e-9


def test_closed_form_unit_coefficient() -> None:
    assert gauss_closed(1, 0, Place(5)) == ExactCircle()
    assert gauss_closed(3, 0, Place(7)) == lambda_fn(3, Place(7))


def test_closed_form_examples() -> None:
    assert gauss_closed(Fraction(1, 3), 0, Place(3)) == ExactCircle(Fraction(1, 3), Fraction(1, 4))
    # {−β²/4α}_5 = {−1/2}_5 = 0
    assert gauss_closed(Fraction(1, 2), 1, Place(5)) == ExactCircle()


def test_closed_form_rejects_zero_alpha() -> None:
    with pytest.raises(ZeroAlpha):
        gauss_closed(0, 1, Place(3))


@pytest.mark.parametrize(
    "alpha, beta, p, gamma, expected",
    [(1, 1, 3, 0, 2), (Fraction(1, 9), 0, 3, 1, 5), (1, Fraction(1, 25), 5, 0, 4)],
)
def test_min_mesh(alpha, beta, p, gamma, expected) -> None:
    assert min_mesh(alpha, beta, p, gamma) == expected


def test_ball_spec_rejects_empty_mesh() -> None:
    with pytest.raises(ValueError):
        BallSpec(3, 0, -1)
    assert BallSpec(3, 1, 2).terms == 27


def test_ball_sum_integral_integrand_is_the_volume() -> None:
    assert abs(ball_sum(1, 1, 3, 0, 2) - 1) < 1e-12
    assert abs(ball_sum(0, 0, 5, 2, 2) - 25) < 1e-12


def test_ball_sum_full_period_character_vanishes() -> None:
    for p in (2, 3, 5):
        assert abs(ball_sum(0, Fraction(1, p), p, 0, 2)) < 1e-12


def test_ball_sum_is_deterministic_across_workers(monkeypatch) -> None:
    monkeypatch.setattr("padic_paths.propagator.gauss.CHUNK_SIZE", 7)
    serial = ball_sum(Fraction(1, 27), Fraction(2, 9), 3, 2, 3)
    threaded = ball_sum(Fraction(1, 27), Fraction(2, 9), 3, 2, 3, workers=4)
    assert serial == threaded


def test_ball_sum_budget() -> None:
    with pytest.raises(SumTooLarge):
        ball_sum(Fraction(1, 3), 0, 3, 6, 9, budget=10)


def test_gauss_brute_rejects_coarse_mesh() -> None:
    with pytest.raises(MeshTooCoarse):
        gauss_brute(Fraction(1, 9), 0, BallSpec(3, 1, 3))


def test_gauss_brute_on_a_ball() -> None:
    spec = BallSpec(3, 1, min_mesh(Fraction(1, 3), 0, 3, 1))
    assert abs(gauss_brute(Fraction(1, 3), 0, spec) - complex(gauss_closed(Fraction(1, 3), 0, Place(3)))) < TOL


@pytest.mark.parametrize(
    "alpha, beta, p",
    [
        (Fraction(1, 3), 0, 3),
        (1, 0, 5),
        (Fraction(3, 2), Fraction(1, 2), 2),
        (Fraction(1, 2), 1, 5),
        (Fraction(5, 4), Fraction(3, 8), 2),
        (Fraction(2, 49), Fraction(1, 7), 7),
    ],
)
def test_stabilized_matches_closed_form(alpha, beta, p) -> None:
    closed = complex(gauss_closed(alpha, beta, Place(p)))
    assert abs(gauss_stabilized(alpha, beta, p, TOL) - closed) < TOL


def test_stabilized_matches_closed_form_on_random_coefficients() -> None:
    rng = random.Random(2024)
    checked = 0
    for p in (2, 3, 5, 7):
        for _ in range(40):
            alpha = Fraction(rng.choice([-1, 1]) * rng.randint(1, 20), rng.randint(1, 20)) * Fraction(p) ** rng.randint(-3, 3)
            beta = Fraction(rng.randint(-20, 20), rng.randint(1, 20)) * Fraction(p) ** rng.randint(-3, 3)
            if alpha == 0 or stabilization_terms(alpha, beta, p) > 10**5:
                continue
            closed = complex(gauss_closed(alpha, beta, Place(p)))
            assert abs(gauss_stabilized(alpha, beta, p, TOL) - closed) < TOL
            checked += 1
    assert checked >= 40


def test_stabilized_budget_exhaustion() -> None:
    with pytest.raises(NoStabilization):
        gauss_stabilized(Fraction(1, 3**5), 0, 3, TOL, budget=10)
    with pytest.raises(ZeroAlpha):
        gauss_stabilized(0, 1, 3)


def test_period_terms_counts_the_exhaustive_period() -> None:
    assert period_terms(Fraction(1, 3), 0, 3, 1) == 27
    assert period_terms(0, Fraction(1, 9), 3, 0) == 9
    assert period_terms(0, 0, 3, 4) == 1


def test_scaling_law() -> None:
    rng = random.Random(8)
    for place in (Place(2), Place(3), Place(5), Place.infinity()):
        for _ in range(50):
            alpha = Fraction(rng.randint(1, 30), rng.randint(1, 30))
            beta = Fraction(rng.randint(-30, 30), rng.randint(1, 30))
            a = Fraction(rng.choice([-1, 1]) * rng.randint(1, 30), rng.randint(1, 30))
            scaled = gauss_closed(alpha * a * a, beta * a, place) * ExactCircle(norm(a, place) ** 2)
            assert scaled == gauss_closed(alpha, beta, place)

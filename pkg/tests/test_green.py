from __future__ import annotations

import numpy as np
import pytest

from kdvlab.errors import NearEigenvalueError
from kdvlab.spectral.eigen import find_eigenvalues
from kdvlab.spectral.green import GreenKernel, green_coefficients, green_eval


def _random_lams(rng, n):
    return rng.uniform(-20, 20, n) + 1j * rng.uniform(-200, 200, n)


def test_vanishes_at_left_end(rng):
    for lam, xi in zip(_random_lams(rng, 50), rng.uniform(0, 1, 50)):
        assert abs(green_eval(0.0, xi, lam, 1.0)) <= 1e-12 * max(1.0, np.max(np.abs(GreenKernel(lam, 1.0).matrix(
            np.linspace(0, 1, 11), [xi]))))


def test_right_end_conditions(rng):
    for lam, xi in zip(_random_lams(rng, 20), rng.uniform(0.05, 0.95, 20)):
        k = GreenKernel(lam, 1.0)
        scale = np.max(np.abs(k.matrix(np.linspace(0, 1, 101), [xi], m=2)))
        assert abs(k(1.0, xi, 1)) <= 1e-10 * scale
        assert abs(k(1.0, xi, 2)) <= 1e-10 * scale


def test_second_derivative_jump_by_finite_differences():
    h = 1e-3
    for lam, xi in [(1 + 1j, 0.4), (-3 + 20j, 0.7), (5.0, 0.25)]:
        g = lambda y: green_eval(np.asarray(y), xi, lam, 1.0)  # noqa: E731
        right = (2 * g(xi) - 5 * g(xi + h) + 4 * g(xi + 2 * h) - g(xi + 3 * h)) / h**2
        left = (2 * g(xi) - 5 * g(xi - h) + 4 * g(xi - 2 * h) - g(xi - 3 * h)) / h**2
        assert abs((right - left) - 1.0) <= 1e-4


def test_continuity_of_value_and_slope_at_source():
    k = GreenKernel(2 - 5j, 1.0)
    xi, e = 0.6, 1e-9
    for m in (0, 1):
        assert abs(k(xi + e, xi, m) - k(xi - e, xi, m)) < 1e-6


def test_amplitude_decays_like_b_to_minus_two():
    x = np.linspace(0.0, 1.0, 401)
    bs = np.array([5.0, 10.0, 20.0, 40.0])
    peaks = np.array([np.max(np.abs(GreenKernel(1j * b**3, 1.0).matrix(x, x))) for b in bs])
    scaled = peaks * bs**2
    M = scaled.max()
    assert np.all(peaks <= M * bs**-2.0)
    assert scaled.max() / scaled.min() < 2.0
    slope = np.polyfit(np.log(bs), np.log(peaks), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.15)


def test_stable_form_matches_closed_form(rng):
    y = np.linspace(0, 1, 41)
    for lam, xi in zip(_random_lams(rng, 10) / 10, rng.uniform(0.05, 0.95, 10)):
        closed = green_coefficients(lam, xi, 1.0)(y)
        stable = green_eval(y, xi, lam, 1.0)
        np.testing.assert_allclose(stable, closed, rtol=0, atol=1e-9 * np.max(np.abs(closed)))


def test_near_eigenvalue_raises():
    lam1 = find_eigenvalues(1.0, 1)[0].lam
    with pytest.raises(NearEigenvalueError):
        GreenKernel(lam1, 1.0)

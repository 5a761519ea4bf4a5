from __future__ import annotations

import numpy as np
import pytest

from kdvlab.analysis.decay import fit_decay
from kdvlab.discretization.grid import Grid
from kdvlab.errors import DecayFitError
from kdvlab.evolution.initial import eigenmode
from kdvlab.evolution.stepping import simulate_linear


def test_exact_exponential():
    t = np.linspace(0, 3, 61)
    fit = fit_decay(t, 4.0 * np.exp(-2 * t))
    assert fit.rate == pytest.approx(2.0, abs=1e-10)
    assert fit.amplitude == pytest.approx(4.0, rel=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-10)
    assert fit.n_points == 61


def test_noisy_exponential(rng):
    t = np.linspace(0, 3, 200)
    y = np.exp(-2 * t) * (1 + 0.01 * rng.standard_normal(t.size))
    assert fit_decay(t, y).rate == pytest.approx(2.0, abs=0.05)


def test_accepts_pairs_and_window():
    t = np.linspace(0, 4, 81)
    y = np.where(t < 1, 1.0, np.exp(-3 * (t - 1)))
    pairs = np.column_stack([t, y])
    fit = fit_decay(pairs, window=(1.0, 4.0))
    assert fit.rate == pytest.approx(3.0, abs=1e-10)
    assert fit_decay(pairs.T, window=(1.0, 4.0)).rate == pytest.approx(3.0, abs=1e-10)


def test_floor_excludes_underflowed_points():
    t = np.linspace(0, 10, 101)
    y = np.exp(-5 * t)
    y[t > 6] = 0.0
    fit = fit_decay(t, y)
    assert fit.rate == pytest.approx(5.0, abs=1e-9)
    assert fit.n_points == int(np.sum(y > 1e-12))


def test_growth_gives_negative_rate():
    t = np.linspace(0, 1, 20)
    assert fit_decay(t, np.exp(0.5 * t)).rate == pytest.approx(-0.5, abs=1e-10)


def test_linear_trajectory_rate(lambda1):
    grid = Grid(1.0, 128)
    traj = simulate_linear(eigenmode(grid), None, 2.0, grid)
    assert fit_decay(traj, window=(0.2, 2.0)).rate == pytest.approx(abs(lambda1), rel=0.05)


def test_errors():
    t = np.linspace(0, 1, 20)
    with pytest.raises(DecayFitError):
        fit_decay(t, np.zeros(20))
    with pytest.raises(DecayFitError):
        fit_decay(t[:5], np.exp(-t[:5]))
    with pytest.raises(DecayFitError):
        fit_decay(t, np.exp(-t), window=(2.0, 3.0))

from __future__ import annotations

import numpy as np
import pytest

from kdvlab.analysis.decay import fit_decay
from kdvlab.discretization.banded import BandedLU
from kdvlab.discretization.grid import BcVariant, Grid
from kdvlab.discretization.norms import l2_norm, y_norm_windows
from kdvlab.discretization.operator import build_operator
from kdvlab.errors import ConfigurationError, StepSizeError
from kdvlab.evolution.initial import eigenmode, make_initial
from kdvlab.evolution.signals import BoundarySignal
from kdvlab.evolution.stepping import (
    simulate_linear,
    simulate_nonlinear,
    simulate_varcoef,
    step_linear,
    unknowns_from,
)


def test_step_linear_zero_stays_zero(grid64):
    op = build_operator(grid64)
    u = np.zeros(op.size)
    for _ in range(10):
        u = step_linear(u, op, (np.zeros(3), np.zeros(3)), 0.01)
    assert np.all(u == 0)


def test_step_linear_is_discretely_dissipative():
    for N in (64, 128):
        grid = Grid(1.0, N)
        op = build_operator(grid)
        dt = grid.dx
        lu = BandedLU(op, 1.0, 0.5 * dt)
        u = unknowns_from(make_initial("random_smooth", grid, 1.0, np.random.default_rng(N)), grid)
        zero = (np.zeros(3), np.zeros(3))
        for _ in range(200):
            nxt = step_linear(u, op, zero, dt, lu)
            a = l2_norm(op.reconstruct(u), grid.dx)
            b = l2_norm(op.reconstruct(nxt), grid.dx)
            assert b <= a * (1 + 10 * grid.dx**2)
            u = nxt


def test_step_linear_rejects_bad_dt(grid64):
    op = build_operator(grid64)
    with pytest.raises(ConfigurationError):
        step_linear(np.zeros(op.size), op, (np.zeros(3), np.zeros(3)), 0.0)


def test_step_composition_matches_simulation(grid64):
    phi = make_initial("sine", grid64)
    dt = 0.01
    traj = simulate_linear(phi, None, 0.05, grid64, dt=dt, store_every=1)
    op = build_operator(grid64)
    lu = BandedLU(op, 1.0, 0.5 * dt)
    u = unknowns_from(phi, grid64)
    for _ in range(5):
        u = step_linear(u, op, (np.zeros(3), np.zeros(3)), dt, lu)
    np.testing.assert_array_equal(op.reconstruct(u), traj.states[-1])


@pytest.mark.parametrize("flow", ["linear", "nonlinear"])
def test_semigroup_restart_is_exact(grid64, flow):
    sim = simulate_linear if flow == "linear" else simulate_nonlinear
    phi = make_initial("sine", grid64, 0.5)
    h = BoundarySignal.general(lambda t: np.stack([0.1 * np.sin(t), 0 * t, 0 * t], axis=-1))
    whole = sim(phi, h, 0.4, grid64, dt=0.01)
    first = sim(phi, h, 0.2, grid64, dt=0.01)
    second = sim(None, h, 0.2, grid64, resume=first)
    np.testing.assert_array_equal(second.states[-1], whole.states[-1])
    assert second.times[-1] == pytest.approx(0.4)


def test_simulate_zero_data_stays_zero(grid64):
    for sim in (simulate_linear, simulate_nonlinear):
        traj = sim(np.zeros(grid64.n_nodes), None, 0.3, grid64)
        assert np.all(traj.states == 0)
        assert np.all(traj.l2_series == 0)


def test_linear_eigenmode_decays_at_spectral_rate(lambda1):
    grid = Grid(1.0, 256)
    traj = simulate_linear(eigenmode(grid), None, 2.0, grid)
    fit = fit_decay(traj, window=(0.2, 2.0))
    assert fit.rate == pytest.approx(abs(lambda1), rel=0.05)


def test_rough_data_is_smoothed():
    grid = Grid(1.0, 128)
    phi = make_initial("random_rough", grid, 1.0, np.random.default_rng(3))
    traj = simulate_linear(phi, None, 0.5, grid, startup_steps=2)
    i1 = np.argmin(np.abs(traj.times - 0.1))
    i5 = np.argmin(np.abs(traj.times - 0.5))
    assert np.isfinite(traj.h1_series[i5])
    assert traj.h1_series[i5] < traj.h1_series[i1]


def test_boundary_forcing_gives_bounded_y_norm():
    grid = Grid(1.0, 64)

    def sig(a):
        return BoundarySignal.general(lambda t: np.stack([a * np.sin(t), 0 * t, 0 * t], axis=-1))

    traj = simulate_linear(np.zeros(grid.n_nodes), sig(1.0), 12.0, grid, dt=0.01)
    reps = y_norm_windows(traj, 1.0, stride=50)
    y = np.array([r.y_norm for r in reps])
    b = np.array([r.boundary_b_norm for r in reps])
    active = b > 0.2 * b.max()
    C_T = np.max(y[active] / b[active])
    assert np.all(np.isfinite(y))
    assert np.all(y[active] <= C_T * b[active])
    assert y.max() <= C_T * b.max()
    # linear in h
    traj2 = simulate_linear(np.zeros(grid.n_nodes), sig(2.0), 12.0, grid, dt=0.01)
    y2 = np.array([r.y_norm for r in y_norm_windows(traj2, 1.0, stride=50)])
    np.testing.assert_allclose(y2, 2 * y, rtol=1e-9)


def test_varcoef_with_zero_coefficient_is_linear_path(grid64):
    phi = make_initial("random_smooth", grid64, 1.0, np.random.default_rng(1))
    lin = simulate_linear(phi, None, 0.3, grid64, dt=0.01)
    var = simulate_varcoef(lambda x, t: 0 * x, phi, None, 0.3, grid64, dt=0.01)
    np.testing.assert_array_equal(var.states, lin.states)
    np.testing.assert_array_equal(var.l2_series, lin.l2_series)


def test_varcoef_small_coefficient_decays(lambda1):
    grid = Grid(1.0, 128)
    a_amp = 0.05
    traj = simulate_varcoef(lambda x, t: a_amp * np.sin(np.pi * x) * np.cos(t), eigenmode(grid), None, 3.0, grid)
    fit = fit_decay(traj, window=(0.5, 3.0))
    assert fit.rate > 0
    assert fit.rate == pytest.approx(abs(lambda1), rel=0.1)


def test_varcoef_step_size_guard(grid64):
    with pytest.raises(StepSizeError):
        simulate_varcoef(lambda x, t: 100.0 + 0 * x, np.zeros(grid64.n_nodes), None, 0.1, grid64, dt=0.01)


def test_varcoef_accepts_trajectory_coefficient(grid64):
    a = simulate_linear(make_initial("sine", grid64, 0.1), None, 0.2, grid64, dt=0.01, store_every=1)
    traj = simulate_varcoef(a, make_initial("sine", grid64), None, 0.2, grid64, dt=0.01)
    assert np.all(np.isfinite(traj.l2_series))


def test_small_data_nonlinear_stays_below_initial_norm():
    grid = Grid(1.0, 64)
    phi = make_initial("random_smooth", grid, 0.01, np.random.default_rng(5))
    traj = simulate_nonlinear(phi, None, 10.0, grid, startup_steps=2)
    assert not traj.blown_up
    assert traj.l2_series[1:].max() <= traj.l2_series[0] * (1 + 1e-12)


def test_dirichlet_variant_is_nonincreasing():
    grid = Grid(1.0, 128)
    phi = make_initial("bump", grid, 1.0)
    traj = simulate_nonlinear(phi, None, 0.5, grid, bc=BcVariant.DIRICHLET)
    inc = np.diff(traj.l2_series)
    slack = 10 * (grid.dx**2 + traj.dt**2)
    assert np.all(inc <= slack * traj.l2_series[:-1])


def test_blowup_guard_trips():
    grid = Grid(1.0, 32)
    phi = make_initial("sine", grid, 5000.0)
    traj = simulate_nonlinear(phi, None, 1.0, grid)
    assert traj.blown_up
    assert traj.blowup_time is not None and traj.blowup_time < 1.0


def test_unknowns_from_shapes(grid64):
    assert unknowns_from(lambda x: x, grid64).shape == (grid64.N - 1,)
    with pytest.raises(ConfigurationError):
        unknowns_from(np.zeros(5), grid64)

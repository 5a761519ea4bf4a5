"""One function per experiment: config in, files under ``out`` and a report dict back.

Reports carry ``summary`` (scalars, used by sweeps) and ``checks``
(named pass/fail verdicts copied into the manifest).  Nothing time-dependent
goes into the CSV or report files, so reruns reproduce them byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..analysis.contraction import contraction_audit
from ..analysis.decay import fit_decay
from ..analysis.iteration import IterationConfig, iteration_check
from ..discretization.grid import Grid
from ..errors import BlowUpError
from ..evolution.diagnostics import energy_audit
from ..evolution.initial import make_initial
from ..evolution.manufactured import mms_study
from ..evolution.periodic import period_map
from ..evolution.signals import BoundarySignal
from ..evolution.stepping import simulate_linear, simulate_nonlinear, simulate_varcoef
from ..evolution.trajectory import Trajectory
from ..spectral.eigen import find_eigenvalues
from ..spectral.resolvent import resolvent_norm_profile
from .config import ExperimentConfig
from .io import write_csv, write_json, write_table

ORDER_TARGET = 1.8


def make_grid(cfg: ExperimentConfig, N: int | None = None) -> Grid:
    return Grid(cfg.grid.L, int(N or cfg.grid.N))


def make_signal(cfg: ExperimentConfig) -> BoundarySignal:
    b = cfg.boundary
    a = np.array([b.h1, b.h2, b.h3])
    if b.kind == "zero" or not np.any(a):
        return BoundarySignal.zero()
    if b.kind == "periodic":
        w = 2 * np.pi / b.tau
        return BoundarySignal.periodic(lambda t: np.sin(w * t)[:, None] * a, b.tau,
                                       derivative=lambda t: (w * np.cos(w * t))[:, None] * a)
    if b.kind == "decaying":
        g = float(np.linalg.norm(a))
        return BoundarySignal.decaying(lambda t: np.exp(-b.nu * t)[:, None] * a, b.nu,
                                       lambda t: np.full_like(t, g),
                                       derivative=lambda t: (-b.nu * np.exp(-b.nu * t))[:, None] * a)
    return BoundarySignal.general(lambda t: np.ones_like(t)[:, None] * a,
                                  derivative=lambda t: np.zeros((t.size, 3)))


def make_phi(cfg: ExperimentConfig, grid: Grid, rng: np.random.Generator) -> np.ndarray:
    d = cfg.data
    return make_initial(d.family, grid, d.amplitude, rng=rng, bc=cfg.bc_variant, k=d.k, m=d.m,
                        cutoff=d.cutoff, center=d.center, width=d.width)


def simulate(cfg: ExperimentConfig, flow: str, rng: np.random.Generator, grid: Grid | None = None,
             store_every: int | None = None) -> Trajectory:
    grid = grid or make_grid(cfg)
    t = cfg.time
    phi = make_phi(cfg, grid, rng)
    h = make_signal(cfg)
    kw = dict(dt=t.dt, store_every=store_every or t.store_every, startup_steps=t.startup_steps)
    if flow == "linear":
        return simulate_linear(phi, h, t.T_end, grid, cfg.bc_variant, **kw)
    if flow == "varcoef":
        amp, L = float(cfg.params.get("a_amplitude", 0.1)), grid.L
        a = lambda x, tt: amp * np.sin(np.pi * x / L)  # noqa: E731
        return simulate_varcoef(a, phi, h, t.T_end, grid, cfg.bc_variant, a_sup=abs(amp), **kw)
    return simulate_nonlinear(phi, h, t.T_end, grid, cfg.bc_variant, **kw)


def _trajectory_summary(tr: Trajectory) -> dict:
    l2 = tr.l2_series[np.isfinite(tr.l2_series)]
    return {
        "initial_l2": float(tr.l2_series[0]),
        "final_l2": float(l2[-1]) if l2.size else float("nan"),
        "max_l2": float(l2.max()) if l2.size else float("nan"),
        "blown_up": bool(tr.blown_up),
        "blowup_time": tr.blowup_time,
        "n_steps": int(tr.n_steps),
        "dt": float(tr.dt),
    }


def write_trajectory(tr: Trajectory, out: Path, save_states: bool) -> None:
    cols, data = tr.series_table()
    write_table(out / "series.csv", cols, data)
    if save_states:
        x = tr.grid.nodes
        cols = ["t"] + [f"u_{i}" for i in range(x.size)]
        write_table(out / "states.csv", cols, np.column_stack([tr.state_times, tr.states]))
        write_table(out / "nodes.csv", ["i", "x"], np.column_stack([np.arange(x.size), x]))


def _finish_simulation(tr: Trajectory, out: Path, save_states: bool, report: dict) -> dict:
    write_trajectory(tr, out, save_states)
    write_json(out / "report.json", report)
    if tr.blown_up:
        raise BlowUpError(tr.blowup_time)
    return report


def run_spectrum(cfg, out: Path, rng) -> dict:
    K = int(cfg.params["K"])
    recs = find_eigenvalues(cfg.grid.L, K)
    cols = ["k", "re", "im", "residual", "relative_residual", "seed_re", "seed_im", "asymptotic", "relative_deviation",
            "winding", "suspect", "iterations"]
    rows = [[r.index, r.lam.real, r.lam.imag, r.residual, r.relative_residual, complex(r.seed).real,
             complex(r.seed).imag, r.asymptotic_prediction,
             r.relative_deviation, r.winding, r.suspect, r.iterations] for r in recs]
    write_csv(out / "eigenvalues.csv", cols, rows)
    neg = all(r.lam.real < 0 for r in recs)
    report = {"summary": {"count": len(recs), "max_re": max(r.lam.real for r in recs)},
              "checks": {"count_matches_K": len(recs) == K, "all_re_negative": neg,
                         "all_winding_one": all(r.winding == 1 for r in recs)}}
    write_json(out / "report.json", report)
    return report


def run_resolvent(cfg, out: Path, rng) -> dict:
    p = cfg.params
    omegas = np.geomspace(p["omega_min"], p["omega_max"], int(p["n_omegas"]))
    prof = resolvent_norm_profile(cfg.grid.L, omegas, N=cfg.grid.N, seed=cfg.seed, include_fd=p["include_fd"])
    fd = prof.fd_norms if prof.fd_norms is not None else np.full(omegas.size, np.nan)
    write_table(out / "resolvent.csv", ["omega", "norm", "hs_norm", "fd_norm", "svd_fallback"],
                np.column_stack([prof.omegas, prof.norms, prof.hs_norms, fd, prof.svd_fallback]))
    report = {"summary": {"fitted_slope": prof.fitted_slope, "fd_slope": prof.fd_slope, "N": prof.N},
              "checks": {"slope_near_minus_two_thirds": abs(prof.fitted_slope + 2 / 3) <= 0.1,
                         "norm_below_hs": bool(np.all(prof.norms <= prof.hs_norms * (1 + 1e-6)))}}
    write_json(out / "report.json", report)
    return report


def _run_sim(flow: str):
    def run(cfg, out: Path, rng) -> dict:
        tr = simulate(cfg, flow, rng)
        report = {"summary": _trajectory_summary(tr), "checks": {"no_blowup": not tr.blown_up}}
        return _finish_simulation(tr, out, bool(cfg.params.get("save_states", False)), report)
    return run


def run_energy_audit(cfg, out: Path, rng) -> dict:
    p = cfg.params
    flow = p["flow"]
    sim = simulate_nonlinear if flow == "nonlinear" else simulate_linear
    rows, res, dxs = [], [], []
    for N in p["levels"]:
        grid = make_grid(cfg, N)
        phi = make_phi(cfg, grid, rng)
        tr = sim(phi, None, cfg.time.T_end, grid, cfg.bc_variant, dt=p["dt_over_dx"] * grid.dx)
        if tr.blown_up:
            raise BlowUpError(tr.blowup_time)
        au = energy_audit(tr)
        write_table(out / f"audit_N{N}.csv", ["t_mid", "residual", "variant_residual"],
                    np.column_stack([au.times, au.residual, au.variant_residual]))
        res.append(au.max_residual)
        dxs.append(grid.dx)
        rows.append([N, grid.dx, tr.dt, au.max_residual, float(np.max(np.abs(au.variant_residual)))])
    res, dxs = np.array(res), np.array(dxs)
    orders = np.log(res[:-1] / res[1:]) / np.log(dxs[:-1] / dxs[1:])
    for i, r in enumerate(rows):
        r.append(orders[i - 1] if i else float("nan"))
    write_csv(out / "energy_audit.csv", ["N", "dx", "dt", "max_residual", "max_variant_residual", "order"], rows)
    report = {"summary": {"min_order": float(orders.min()), "orders": orders},
              "checks": {"order_at_least_1.8": bool(orders.min() >= ORDER_TARGET)}}
    write_json(out / "report.json", report)
    return report


def run_decay_fit(cfg, out: Path, rng) -> dict:
    flow = cfg.params["flow"]
    tr = simulate(cfg, flow, rng)
    if tr.blown_up:
        write_trajectory(tr, out, False)
        raise BlowUpError(tr.blowup_time)
    fit = fit_decay(tr, window=(cfg.params["t_from"], float(tr.times[-1])))
    lam1 = find_eigenvalues(cfg.grid.L, 1)[0].lam.real
    rel = abs(fit.rate - abs(lam1)) / abs(lam1)
    write_csv(out / "decay_fit.csv", ["rate", "amplitude", "r_squared", "t_start", "t_end", "n_points", "lambda1_re"],
              [[fit.rate, fit.amplitude, fit.r_squared, fit.window[0], fit.window[1], fit.n_points, lam1]])
    write_trajectory(tr, out, False)
    checks = {"r_squared_at_least_0.99": fit.r_squared >= 0.99}
    if flow == "linear" and make_signal(cfg).is_zero:
        checks["rate_within_5pct_of_lambda1"] = rel <= 0.05
    report = {"summary": {**_trajectory_summary(tr), "rate": fit.rate, "r_squared": fit.r_squared,
                          "lambda1_re": lam1, "relative_to_lambda1": rel}, "checks": checks}
    write_json(out / "report.json", report)
    return report


def run_forced_oscillation(cfg, out: Path, rng) -> dict:
    p = cfg.params
    grid = make_grid(cfg)
    res = period_map(make_signal(cfg), grid, int(p["max_iters"]), cfg.bc_variant, dt=cfg.time.dt,
                     delta=p["delta"], return_periods=int(p["return_periods"]), seed=cfg.seed)
    write_table(out / "period_map.csv", ["period", "distance"],
                np.column_stack([np.arange(1, res.distances.size + 1), res.distances]))
    if res.fixed_point is not None:
        write_table(out / "fixed_point.csv", ["x", "u"], np.column_stack([grid.nodes, res.fixed_point]))
    report = {"summary": {"converged": res.converged, "diverged": res.diverged, "amplitude": res.amplitude,
                          "contraction_ratio": res.contraction_ratio, "periodic_residual": res.periodic_residual,
                          "stability_rate": res.stability_rate, "tau": res.tau, "dt": res.dt},
              "checks": {"converged": res.converged,
                         "contraction_ratio_below_1": res.converged and res.contraction_ratio < 1,
                         "periodic_residual_below_1e-8": res.periodic_residual is not None and res.periodic_residual < 1e-8,
                         "positive_return_rate": res.stability_rate is not None and res.stability_rate > 0}}
    write_json(out / "report.json", report)
    return report


def run_iteration_check(cfg, out: Path, rng) -> dict:
    p = cfg.params
    if p["variant"] == "geometric_b":
        ic = IterationConfig(p["gamma"], p["beta"], p["y0"], variant="geometric_b", delta=p["delta"], c=p["c"])
    else:
        ic = IterationConfig(p["gamma"], p["beta"], p["y0"], p["b"])
    tr = iteration_check(ic, int(p["n_max"]))
    n = np.arange(tr.worst_case.size)
    nan = np.full(n.size, np.nan)
    pick = lambda a: a if a is not None else nan  # noqa: E731
    write_table(out / "iteration.csv", ["n", "worst_case", "bound_i", "bound_ii", "bound_i_effective", "bound_ii_corrected"],
                np.column_stack([n, tr.worst_case, tr.bound_i, pick(tr.bound_ii), pick(tr.bound_i_effective),
                                 pick(tr.bound_ii_corrected)]))
    key, corr = ("ii", "ii_corr") if p["variant"] == "geometric_b" else ("i", "i_eff")
    report = {"summary": {"hypothesis_ok": tr.hypothesis_ok, "effective_ok": tr.effective_ok, "nu": tr.nu,
                          "level": tr.level, "final_worst_case": float(tr.worst_case[-1])},
              "checks": {"stated_bound_holds": tr.holds(key), "corrected_bound_holds": tr.holds(corr)}}
    write_json(out / "report.json", report)
    return report


def run_contraction_audit(cfg, out: Path, rng) -> dict:
    T = cfg.time.window_T
    dt = cfg.time.dt or (0.25 if cfg.params["flow"] == "nonlinear" else 1.0) * make_grid(cfg).dx
    store = cfg.time.store_every or max(1, int(T / dt / 50))
    tr = simulate(cfg, cfg.params["flow"], rng, store_every=store)
    if tr.blown_up:
        write_trajectory(tr, out, False)
        raise BlowUpError(tr.blowup_time)
    rep = contraction_audit(tr, T)
    m = rep.b_norms.size
    write_table(out / "slices.csv", ["n", "t", "y_norm", "b_norm"],
                np.column_stack([np.arange(m + 1), rep.slice_times, rep.y_norms, np.append(rep.b_norms, np.nan)]))
    write_csv(out / "contraction.csv", ["coefficient", "value", "ci_low", "ci_high"],
              [[name, val, rep.ci_low[i], rep.ci_high[i]] for i, (name, val) in
               enumerate(zip(("r", "c2", "c3"), (rep.r, rep.c2, rep.c3)))])
    write_trajectory(tr, out, False)
    report = {"summary": {"r": rep.r, "c2": rep.c2, "c3": rep.c3, "margin": rep.margin, "active": list(rep.active),
                          "c2_ci_contains_zero": rep.c2_contains_zero()},
              "checks": {"fitted_r_below_1": rep.contracting}}
    write_json(out / "report.json", report)
    return report


def run_mms(cfg, out: Path, rng) -> dict:
    p = cfg.params
    rows, worst = [], np.inf
    for flow in p["flows"]:
        r = mms_study(flow, cfg.bc_variant, cfg.grid.L, cfg.time.T_end, p["levels"], p["dt_over_dx"])
        for i, N in enumerate(r.levels):
            rows.append([flow, N, r.dx[i], r.errors[i], r.orders[i - 1] if i else float("nan")])
        worst = min(worst, r.min_order)
    write_csv(out / "mms.csv", ["flow", "N", "dx", "error", "order"], rows)
    report = {"summary": {"min_order": worst}, "checks": {"order_at_least_1.8": bool(worst >= ORDER_TARGET)}}
    write_json(out / "report.json", report)
    return report


RUNNERS = {
    "spectrum": run_spectrum,
    "resolvent": run_resolvent,
    "simulate-linear": _run_sim("linear"),
    "simulate-varcoef": _run_sim("varcoef"),
    "simulate-nonlinear": _run_sim("nonlinear"),
    "energy-audit": run_energy_audit,
    "decay-fit": run_decay_fit,
    "forced-oscillation": run_forced_oscillation,
    "iteration-check": run_iteration_check,
    "contraction-audit": run_contraction_audit,
    "mms-convergence": run_mms,
}


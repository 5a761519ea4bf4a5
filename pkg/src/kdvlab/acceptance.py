"""The twelve acceptance checks, shared by the test suite and the CLI.

Each ``criterion_<n>()`` runs its experiment at the stated tolerance and
returns a CriterionResult; nothing here loosens a target to make it pass.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .analysis.contraction import contraction_audit
from .analysis.decay import fit_decay
from .analysis.dissipativity import dissipativity_study
from .analysis.iteration import IterationConfig, iteration_check
from .discretization.banded import banded_solve
from .discretization.grid import BcVariant, Grid
from .discretization.norms import l2_norm
from .discretization.operator import build_operator
from .evolution.diagnostics import energy_audit
from .evolution.initial import make_initial
from .evolution.manufactured import mms_study
from .evolution.periodic import period_map
from .evolution.signals import BoundarySignal
from .evolution.stepping import simulate_linear, simulate_nonlinear
from .spectral.contour import Box, count_zeros
from .spectral.determinant import char_function
from .spectral.eigen import find_eigenvalues
from .spectral.resolvent import resolvent_apply, resolvent_norm_profile

TITLES = {
    1: "eigenvalue law",
    2: "no imaginary spectrum",
    3: "resolvent power law",
    4: "Green's function oracle equivalence",
    5: "dissipativity",
    6: "linear decay and smoothing",
    7: "energy audits",
    8: "small-data global behavior",
    9: "decaying forcing",
    10: "forced oscillation",
    11: "iteration bounds",
    12: "MMS convergence",
}
RUNTIME_LIMITS = {1: 10.0, 2: 60.0, 3: 300.0, 4: 60.0, 10: 300.0, 12: 300.0}


@dataclass
class CriterionResult:
    number: int
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def title(self) -> str:
        return TITLES[self.number]

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} criterion {self.number:2d} ({self.title}): {self.summary} [{self.runtime:.1f} s]"

    def as_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": bool(self.passed),
                "summary": self.summary, "runtime_s": self.runtime, "details": _plain(self.details)}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _timed(number: int, fn) -> CriterionResult:
    t0 = time.perf_counter()
    passed, summary, details = fn()
    res = CriterionResult(number, bool(passed), summary, details, time.perf_counter() - t0)
    limit = RUNTIME_LIMITS.get(number)
    if limit is not None and res.runtime > limit:
        res.passed = False
        res.summary += f"; runtime {res.runtime:.1f} s exceeds {limit:g} s"
    return res


def criterion_1() -> CriterionResult:
    def run():
        recs = find_eigenvalues(np.pi, 20)
        dev = np.array([r.relative_deviation for r in recs])
        neg = all(r.lam.real < 0 for r in recs)
        dec = bool(np.all(np.diff(dev[9:20]) < 0))
        ok = neg and dev[9] <= 0.15 and dec and len(recs) == 20
        return ok, f"all Re<0={neg}, dev(k=10)={dev[9]:.4f} (<=0.15), decreasing to k=20={dec}", {
            "relative_deviation": dev, "eigenvalues_re": [r.lam.real for r in recs]}
    return _timed(1, run)


def criterion_2() -> CriterionResult:
    def run():
        near = np.arange(-10.0, 10.0 + 1e-9, 0.01)
        far = np.geomspace(10.0, 1e4, 4000)
        w = np.unique(np.concatenate([near, far, -far]))
        v, _ = char_function(1j * w, 1.0)
        amin = float(np.min(np.abs(v)))
        edges = np.concatenate([-np.geomspace(1e4, 10, 8), [-5.0, 0.0, 5.0], np.geomspace(10, 1e4, 8)])
        counts = [count_zeros(1.0, Box(-1.0, 1.0, a, b)) for a, b in zip(edges[:-1], edges[1:])]
        ok = amin > 0 and all(c == 0 for c in counts)
        return ok, f"min |Delta/V|(i w)={amin:.3g} over {w.size} points, axis boxes with zeros={sum(counts)}", {
            "min_abs": amin, "counts": counts}
    return _timed(2, run)


def criterion_3() -> CriterionResult:
    def run():
        omegas = np.geomspace(1e2, 1e5, 13)
        slopes = {}
        for N in (256, 512):
            prof = resolvent_norm_profile(1.0, omegas, N=N, include_fd=False)
            slopes[N] = prof.fitted_slope
        ok = all(abs(s + 2 / 3) <= 0.1 for s in slopes.values())
        return ok, "slopes " + ", ".join(f"N={n}: {s:.4f}" for n, s in slopes.items()) + " (target -2/3 +- 0.1)", {
            "slopes": {str(k): v for k, v in slopes.items()}}
    return _timed(3, run)


def criterion_4(seed: int = 4) -> CriterionResult:
    def run():
        rng = np.random.default_rng(seed)
        L, N = 1.0, 512
        grid = Grid(L, N)
        op = build_operator(grid)
        x = grid.nodes
        errs = []
        for _ in range(20):
            k = np.arange(1, 7)
            a, b = rng.standard_normal(6) / k, rng.standard_normal(6) / k
            f = np.sin(np.pi * np.outer(x, k) / L) @ a + np.cos(np.pi * np.outer(x, k) / L) @ b
            lam = complex(rng.uniform(0.5, 20.0), rng.uniform(-200.0, 200.0))
            w_g = resolvent_apply(f, lam, L)
            w_h = banded_solve(op, lam, f[1:N].astype(complex))
            errs.append(l2_norm(np.abs(w_g[1:N] - w_h), grid.dx) / l2_norm(np.abs(w_g[1:N]), grid.dx))
        worst = float(max(errs))
        return worst <= 1e-3, f"max relative L2 difference {worst:.3g} over 20 pairs (<= 1e-3)", {"errors": errs}
    return _timed(4, run)


def criterion_5(seed: int = 5, corrected: bool = False) -> CriterionResult:
    """Literal identity int g A g + g'(0)^2/2 -> 0; ``corrected`` adds g(L)^2/2."""
    def run():
        st = dissipativity_study(1.0, (64, 128, 256, 512), 20, np.random.default_rng(seed), corrected)
        mo = st.min_order
        label = "corrected" if corrected else "literal"
        return mo >= 1.8, f"{label} defect min observed order {mo:.3f} (>= 1.8); finest max |defect| {st.defects[:, -1].max():.3g}", {
            "orders": st.orders, "finest_defects": st.defects[:, -1]}
    return _timed(5, run)


def criterion_6() -> CriterionResult:
    def run():
        lam1 = find_eigenvalues(1.0, 1)[0].lam.real
        grid = Grid(1.0, 256)
        phi = make_initial("eigenmode", grid, 1.0)
        tr = simulate_linear(phi, None, 2.0, grid)
        fit = fit_decay(tr, window=(0.2, 2.0))
        rel = abs(fit.rate - abs(lam1)) / abs(lam1)
        rough = make_initial("random_rough", grid, 1.0, rng=np.random.default_rng(6))
        tr2 = simulate_linear(rough, None, 0.5, grid, startup_steps=2)
        i1, i5 = np.argmin(np.abs(tr2.times - 0.1)), np.argmin(np.abs(tr2.times - 0.5))
        h_a, h_b = tr2.h1_series[i1], tr2.h1_series[i5]
        ok = rel <= 0.05 and h_b < h_a
        return ok, f"rate {fit.rate:.4f} vs |Re l1| {abs(lam1):.4f} (rel {rel:.2%} <= 5%); rough H1 {h_a:.3g} -> {h_b:.3g}", {
            "rate": fit.rate, "lambda1": lam1, "h1_t01": h_a, "h1_t05": h_b}
    return _timed(6, run)


def energy_orders(bc, flow: str, levels=(128, 256, 512), T_end: float = 0.5, amplitude: float = 0.5):
    sim = simulate_nonlinear if flow == "nonlinear" else simulate_linear
    res, dxs = [], []
    for N in levels:
        grid = Grid(1.0, N)
        phi = make_initial("eigenmode", grid, amplitude, bc=bc)
        tr = sim(phi, None, T_end, grid, bc, dt=0.25 * grid.dx)
        res.append(energy_audit(tr).max_residual)
        dxs.append(grid.dx)
    res, dxs = np.array(res), np.array(dxs)
    return res, np.log(res[:-1] / res[1:]) / np.log(dxs[:-1] / dxs[1:])


def criterion_7() -> CriterionResult:
    def run():
        out, worst = {}, np.inf
        for bc in (BcVariant.CG, BcVariant.DIRICHLET):
            for flow in ("linear", "nonlinear"):
                r, o = energy_orders(bc, flow)
                out[f"{bc.value}/{flow}"] = {"max_residual": r, "orders": o}
                worst = min(worst, float(o.min()))
        txt = ", ".join(f"{k}: {v['orders'].min():.3f}" for k, v in out.items())
        return worst >= 1.8, f"min observed orders {txt} (>= 1.8)", out
    return _timed(7, run)


def criterion_8(seed: int = 8) -> CriterionResult:
    def run():
        grid = Grid(1.0, 256)
        phi = make_initial("random_smooth", grid, 0.01, rng=np.random.default_rng(seed))
        # normalise the datum as the solver represents it (boundary nodes eliminated)
        phi = build_operator(grid).reconstruct(phi[1 : grid.N])
        phi *= 0.01 / l2_norm(phi, grid.dx)
        tr = simulate_nonlinear(phi, None, 100.0, grid, startup_steps=2)
        bounded = (not tr.blown_up) and float(np.nanmax(tr.l2_series)) <= tr.l2_series[0] * (1 + 1e-12)
        fit = fit_decay(tr, window=(0.5, 100.0))
        ca = contraction_audit(tr, 0.5)
        ok = bounded and fit.r_squared >= 0.99 and ca.r < 1
        return ok, (f"bounded={bounded}, decay rate {fit.rate:.3f} r^2={fit.r_squared:.5f} (>= 0.99), "
                    f"contraction r={ca.r:.4f} (< 1)"), {"rate": fit.rate, "r_squared": fit.r_squared, "r": ca.r,
                                                          "sup_l2": float(np.nanmax(tr.l2_series))}
    return _timed(8, run)


def criterion_9() -> CriterionResult:
    def run():
        nu, amp = 0.2, 0.01
        lam1 = abs(find_eigenvalues(1.0, 1)[0].lam.real)
        h = BoundarySignal.decaying(lambda t: np.stack([amp * np.exp(-nu * t), 0 * t, 0 * t], -1), nu,
                                    lambda t: np.full_like(t, amp))
        grid = Grid(1.0, 128)
        tr = simulate_nonlinear(np.zeros(grid.n_nodes), h, 30.0, grid, startup_steps=2)
        h.check(tr.times)
        fit = fit_decay(tr, window=(5.0, 30.0))
        target = min(lam1, nu) - 0.05
        return fit.rate >= target, f"fitted rate {fit.rate:.4f} >= {target:.3f}", {"rate": fit.rate,
                                                                                   "r_squared": fit.r_squared}
    return _timed(9, run)


def criterion_10() -> CriterionResult:
    def run():
        h = BoundarySignal.periodic(lambda t: np.stack([0.01 * np.sin(2 * np.pi * t), 0 * t, 0 * t], -1), 1.0)
        res = period_map(h, Grid(1.0, 128), max_iters=50)
        ok = (res.converged and 0 < res.contraction_ratio < 1 and res.periodic_residual is not None
              and res.periodic_residual < 1e-8 and res.stability_rate is not None and res.stability_rate > 0)
        return ok, (f"contraction ratio {res.contraction_ratio:.3g}, periodic residual {res.periodic_residual:.3g}, "
                    f"return rate {res.stability_rate:.4f}"), {"distances": res.distances,
                                                               "ratio": res.contraction_ratio,
                                                               "rate": res.stability_rate}
    return _timed(10, run)


def iteration_sweep(seed: int = 11, n_configs: int = 1000, n_max: int = 200, corrected: bool = False):
    """Canonical example, the uniform sweep and the geometric sweep.

    Returns (canonical_ok, uniform failures, geometric failures).
    """
    rng = np.random.default_rng(seed)
    canon = iteration_check(IterationConfig(0.5, 0.0, 1.0, 0.1), n_max)
    canonical_ok = canon.holds("i_eff" if corrected else "i") and abs(canon.worst_case[-1] - 0.2) < 1e-12
    fail_u = fail_g = 0
    for _ in range(n_configs):
        g = rng.uniform(0.01, 0.9)
        beta = rng.uniform(0.0, 2.0)
        y0 = rng.uniform(0.0, min(5.0, (1 - g) / (10 * beta))) if beta > 0 else rng.uniform(0.0, 5.0)
        b_star = rng.uniform(0.0, (1 - g) ** 2 / (10 * beta + 1))
        b = rng.uniform(0.0, b_star, n_max)
        tu = iteration_check(IterationConfig(g, beta, y0, b), n_max)
        fail_u += not tu.holds("i_eff" if corrected else "i")
        d = rng.uniform(0.0, 0.95)
        tg = iteration_check(IterationConfig(g, beta, y0, variant="geometric_b", delta=d, c=b_star), n_max)
        fail_g += not tg.holds("ii_corr" if corrected else "ii")
    return canonical_ok, fail_u, fail_g


def criterion_11(corrected: bool = False) -> CriterionResult:
    def run():
        canon, fu, fg = iteration_sweep(corrected=corrected)
        label = "corrected" if corrected else "stated"
        ok = canon and fu == 0 and fg == 0
        return ok, (f"{label} bounds: canonical ok={canon}, uniform-b violations {fu}/1000, "
                    f"geometric-b violations {fg}/1000"), {"canonical": canon, "uniform_failures": fu,
                                                           "geometric_failures": fg}
    return _timed(11, run)


def criterion_12() -> CriterionResult:
    def run():
        orders = {}
        for flow in ("linear", "nonlinear"):
            r = mms_study(flow, BcVariant.CG)
            orders[flow] = r.orders
        worst = min(float(o.min()) for o in orders.values())
        txt = ", ".join(f"{k}: {', '.join(f'{x:.3f}' for x in v)}" for k, v in orders.items())
        return worst >= 1.8, f"observed orders {txt} (>= 1.8)", {"orders": orders}
    return _timed(12, run)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


def run_all(numbers=None) -> list[CriterionResult]:
    return [CRITERIA[i]() for i in (numbers or sorted(CRITERIA))]

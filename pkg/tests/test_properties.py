"""Hypothesis property tests for invariants that must hold for any input."""

from __future__ import annotations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from kdvlab.analysis.decay import fit_decay
from kdvlab.analysis.iteration import worst_case_sequence
from kdvlab.discretization.grid import Grid
from kdvlab.discretization.norms import gagliardo_seminorm, l2_norm
from kdvlab.spectral.cubic import cubic_roots

finite = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(finite, finite)
def test_cubic_roots_satisfy_vieta(re, im):
    lam = complex(re, im)
    s = cubic_roots(lam).roots
    scale = max(1.0, abs(lam) ** (1 / 3))
    assert abs(s.sum()) <= 1e-12 * scale
    assert abs(s[0] * s[1] + s[0] * s[2] + s[1] * s[2] - 1) <= 1e-12 * scale ** 2
    assert abs(np.prod(s) + lam) <= 1e-12 * scale ** 3
    assert np.all(np.diff(s.real) <= 1e-12 * scale)


@settings(max_examples=100, deadline=None)
@given(finite, finite)
def test_cubic_roots_conjugate_symmetry(re, im):
    a = cubic_roots(complex(re, im)).roots
    b = np.conj(cubic_roots(complex(re, -im)).roots)
    tol = 1e-10 * max(1.0, abs(complex(re, im)) ** (1 / 3))
    # multiset match: every root pairs with a distinct partner
    d = np.abs(a[:, None] - b[None, :])
    assert all(np.sort(row)[0] <= tol for row in d) and all(np.sort(col)[0] <= tol for col in d.T)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 10), st.floats(1e-6, 1e6), st.floats(-5, 5))
def test_decay_rate_invariant_under_scaling_and_shift(rate, c, shift):
    t = np.linspace(0, 2, 41)
    base = fit_decay(t, np.exp(-rate * t))
    moved = fit_decay(t + shift, c * np.exp(-rate * t), floor=0.0)
    assert abs(base.rate - rate) <= 1e-9 * rate
    assert abs(moved.rate - base.rate) <= 1e-8 * rate


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.9), st.floats(0, 2), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_worst_case_is_monotone_in_data(gamma, beta, y0, b, extra):
    n = 30
    lo = worst_case_sequence(gamma, beta, y0, np.full(n, b))
    hi_y = worst_case_sequence(gamma, beta, y0 + extra, np.full(n, b))
    hi_b = worst_case_sequence(gamma, beta, y0, np.full(n, b + extra))
    assert np.all(lo <= hi_y) and np.all(lo <= hi_b)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(-10, 10), st.floats(0.1, 10))
def test_gagliardo_shift_invariant_and_homogeneous(theta, offset, c):
    t = np.linspace(0, 1, 64)
    h = np.sin(2 * np.pi * t) + 0.3 * t
    dt = t[1] - t[0]
    base = gagliardo_seminorm(h, theta, dt)
    assert np.isclose(gagliardo_seminorm(h + offset, theta, dt), base, rtol=1e-9)
    assert np.isclose(gagliardo_seminorm(c * h, theta, dt), c * base, rtol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(16, 200), st.floats(0.1, 10))
def test_l2_norm_of_constant(N, L):
    g = Grid(L, N)
    assert np.isclose(l2_norm(np.ones(g.nodes.size), g.dx), np.sqrt(L), rtol=1e-12)

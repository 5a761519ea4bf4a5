from __future__ import annotations

import numpy as np

from kdvlab.spectral.determinant import char_det, char_det_array
from kdvlab.spectral.eigen import asymptotic_seed, newton_polish


def test_conjugate_symmetry(rng):
    lams = rng.uniform(-50, 50, 100) + 1j * rng.uniform(-50, 50, 100)
    for lam in lams:
        d = char_det(lam, 1.0, normalized=True).value
        dc = char_det(np.conj(lam), 1.0, normalized=True).value
        assert abs(dc - np.conj(d)) <= 1e-9 * max(abs(d), 1e-300)


def test_no_zero_on_imaginary_axis_dense_scan():
    near = np.arange(-10.0, 10.0 + 1e-9, 0.01)
    far = np.logspace(1, 4, 4000)
    omegas = np.concatenate([-far[::-1], near, far])
    vals = np.abs(char_det_array(1j * omegas, 1.0, normalized=True)[0])
    assert np.all(np.isfinite(vals))
    assert vals.min() > 0


def test_seed_nearly_annihilates_delta_k20():
    # literal unit-circle form; the seed sits ~139 from the zero at k=20
    L = 1.0
    seed = asymptotic_seed(20, L)
    at_seed = char_det(seed, L).log_abs
    ring = [char_det(seed + np.exp(2j * np.pi * j / 64), L).log_abs for j in range(64)]
    assert np.exp(at_seed - max(ring)) <= 0.1


def test_seed_is_relatively_close_to_its_zero():
    for k in (1, 5, 10, 20):
        seed = asymptotic_seed(k, 1.0)
        lam, converged, _ = newton_polish(1.0, seed)
        assert converged
        # relative seed error decays like 1/k^2
        assert abs(lam - seed) / abs(seed) <= 0.25 / k**2


def test_polished_seed_is_a_zero():
    lam, converged, _ = newton_polish(1.0, asymptotic_seed(1, 1.0))
    assert converged
    assert abs(lam.real + 6.68021) < 1e-4
    assert abs(lam.imag) < 1e-8


def test_scaled_value_consistent_with_log_scale():
    d = char_det(-3.0 + 2.0j, 1.0)
    assert np.isfinite(d.log_abs)
    assert abs(np.log(abs(d.value)) - d.log_abs) < 1e-10

"""Roots of the characteristic cubic s**3 + s + lam = 0."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEGENERATE_DISCRIMINANT = 1e-12
_OMEGA = np.exp(2j * np.pi / 3)


@dataclass(frozen=True)
class CubicRoots:
    """The three roots for one spectral parameter.

    Roots are ordered by descending real part; real parts that agree to
    rounding are ordered by descending imaginary part.
    """

    lam: complex
    s1: complex
    s2: complex
    s3: complex
    discriminant: complex
    degenerate: bool

    @property
    def roots(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3])

    def residuals(self) -> np.ndarray:
        s = self.roots
        return np.abs(s**3 + s + self.lam)


def discriminant(lam):
    """Discriminant -4 - 27 lam**2 of s**3 + s + lam."""
    lam = np.asarray(lam, dtype=complex)
    return -4.0 - 27.0 * lam * lam


def _cardano(lam: np.ndarray) -> np.ndarray:
    q = lam
    root = np.sqrt(q * q / 4.0 + 1.0 / 27.0)
    # pick the branch with the larger |u**3| so u never vanishes
    a = -q / 2.0 + root
    b = -q / 2.0 - root
    u3 = np.where(np.abs(a) >= np.abs(b), a, b)
    u = u3 ** (1.0 / 3.0)
    s = np.empty(lam.shape + (3,), dtype=complex)
    for k in range(3):
        uk = u * _OMEGA**k
        s[..., k] = uk - 1.0 / (3.0 * uk)
    return s


def _polish(s: np.ndarray, lam: np.ndarray) -> np.ndarray:
    p = s**3 + s + lam[..., None]
    dp = 3.0 * s * s + 1.0
    ok = np.abs(dp) > 1e-8
    step = np.where(ok, p / np.where(ok, dp, 1.0), 0.0)
    return s - step


def _greater(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    tol = 1e-12 * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    dre = a.real - b.real
    return (dre > tol) | ((np.abs(dre) <= tol) & (a.imag > b.imag))


def _order(s: np.ndarray) -> np.ndarray:
    s = s.copy()
    for i, j in ((0, 1), (1, 2), (0, 1)):
        swap = _greater(s[..., j], s[..., i])
        si = np.where(swap, s[..., j], s[..., i])
        sj = np.where(swap, s[..., i], s[..., j])
        s[..., i] = si
        s[..., j] = sj
    return s


def roots_array(lam) -> np.ndarray:
    """Vectorised roots: returns an array of shape ``lam.shape + (3,)``."""
    lam = np.asarray(lam, dtype=complex)
    s = _polish(_cardano(lam), lam)
    return _order(s)


def cubic_roots(lam: complex) -> CubicRoots:
    """Roots of s**3 + s + lam via Cardano's formula plus one Newton step.

    Examples
    --------
    >>> r = cubic_roots(0.0)
    >>> [round(z.imag, 12) for z in sorted(r.roots.tolist(), key=lambda z: z.imag)]
    [-1.0, 0.0, 1.0]
    """
    lam = complex(lam)
    if not (np.isfinite(lam.real) and np.isfinite(lam.imag)):
        raise ValueError(f"lambda must be finite, got {lam!r}")
    s = roots_array(np.array(lam))
    disc = complex(discriminant(lam))
    return CubicRoots(
        lam=lam,
        s1=complex(s[0]),
        s2=complex(s[1]),
        s3=complex(s[2]),
        discriminant=disc,
        degenerate=abs(disc) < DEGENERATE_DISCRIMINANT,
    )


def companion_roots(lam: complex) -> np.ndarray:
    """Independent check: eigenvalues of the companion matrix of the cubic."""
    c = np.array([[0.0, -1.0, -complex(lam)], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], dtype=complex)
    return np.linalg.eigvals(c)

"""Boundary data (h1, h2, h3)(t)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import ConfigurationError

KINDS = ("zero", "decaying", "periodic", "general")


@dataclass(frozen=True)
class BoundarySignal:
    """Boundary triple as a function of time.

    ``func`` maps an array of times (shape (n,)) to an (n, 3) array.  For
    purely sampled data give ``times``/``samples`` instead; values between
    samples are linearly interpolated.
    """

    kind: str = "zero"
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    nu: Optional[float] = None
    envelope: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    tau: Optional[float] = None
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    times: Optional[np.ndarray] = field(default=None, repr=False)
    samples: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown boundary signal kind {self.kind!r}")
        if self.kind == "periodic" and not (self.tau and self.tau > 0):
            raise ConfigurationError("periodic boundary signal needs a positive period tau")
        if self.kind == "decaying" and (self.nu is None or self.envelope is None):
            raise ConfigurationError("decaying boundary signal needs nu and an envelope g")
        if self.func is None and self.kind != "zero" and self.samples is None:
            raise ConfigurationError("boundary signal needs func or samples")

    @classmethod
    def zero(cls) -> "BoundarySignal":
        return cls("zero")

    @classmethod
    def periodic(cls, func, tau: float, derivative=None) -> "BoundarySignal":
        return cls("periodic", func=func, tau=float(tau), derivative=derivative)

    @classmethod
    def decaying(cls, func, nu: float, envelope, derivative=None) -> "BoundarySignal":
        return cls("decaying", func=func, nu=float(nu), envelope=envelope, derivative=derivative)

    @classmethod
    def general(cls, func, derivative=None) -> "BoundarySignal":
        return cls("general", func=func, derivative=derivative)

    @classmethod
    def sampled(cls, times, samples) -> "BoundarySignal":
        times = np.asarray(times, dtype=float)
        samples = np.asarray(samples, dtype=float).reshape(times.size, 3)
        return cls("general", times=times, samples=samples)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    def at(self, t) -> np.ndarray:
        """Values at times ``t``; returns shape t.shape + (3,)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "zero":
            return np.zeros(t.shape + (3,))
        if self.func is not None:
            flat = np.asarray(self.func(t.reshape(-1)), dtype=float)
            return flat.reshape(t.shape + (3,))
        out = np.stack([np.interp(t, self.times, self.samples[:, j]) for j in range(3)], axis=-1)
        return out

    def derivative_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "zero":
            return np.zeros(t.shape + (3,))
        if self.derivative is None:
            raise ConfigurationError("boundary signal has no derivative samples")
        return np.asarray(self.derivative(t.reshape(-1)), dtype=float).reshape(t.shape + (3,))

    def check(self, t) -> None:
        """Verify the kind-specific invariant on the sample times ``t``."""
        t = np.asarray(t, dtype=float)
        h = self.at(t)
        if self.kind == "decaying":
            bound = np.asarray(self.envelope(t), dtype=float) * np.exp(-self.nu * t)
            mag = np.linalg.norm(h, axis=-1)
            if np.any(mag > bound * (1 + 1e-12) + 1e-300):
                raise ConfigurationError("decaying boundary signal exceeds g(t) exp(-nu t)")
        elif self.kind == "periodic":
            err = np.max(np.abs(self.at(t + self.tau) - h)) if t.size else 0.0
            if err > 1e-12:
                raise ConfigurationError(f"periodic boundary signal not tau-periodic (error {err:.2e})")

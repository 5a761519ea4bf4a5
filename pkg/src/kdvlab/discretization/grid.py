"""Uniform grid on [0, L] and the two boundary-condition families."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import ConfigurationError

MIN_NODES = 16


class BcVariant(str, Enum):
    """Boundary rows imposed at the ends of the interval.

    CG: u(0)=h1, u_x(L)=h2, u_xx(L)=h3.
    DIRICHLET: u(0)=h1, u(L)=h2, u_x(L)=h3.
    """

    CG = "CG"
    DIRICHLET = "Dirichlet"

    @classmethod
    def parse(cls, tag) -> "BcVariant":
        if isinstance(tag, cls):
            return tag
        for v in cls:
            if str(tag).lower() == v.value.lower():
                return v
        raise ConfigurationError(f"unknown boundary variant {tag!r}; expected CG or Dirichlet")


@dataclass(frozen=True)
class Grid:
    """Nodes x_0=0 < x_1 < ... < x_{N+1}=L with spacing L/(N+1)."""

    L: float
    N: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise ConfigurationError(f"interval length L must be positive, got {self.L!r}")
        if int(self.N) != self.N or self.N < MIN_NODES:
            raise ConfigurationError(f"interior node count N must be an integer >= {MIN_NODES}, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        x = np.linspace(0.0, self.L, self.N + 2)
        x.setflags(write=False)
        object.__setattr__(self, "nodes", x)

    @property
    def dx(self) -> float:
        return self.L / (self.N + 1)

    @property
    def n_nodes(self) -> int:
        return self.N + 2

    @property
    def evolving(self) -> np.ndarray:
        """Indices of nodes carried as unknowns (1..N-1)."""
        return np.arange(1, self.N)

    @property
    def boundary(self) -> np.ndarray:
        """Indices fixed by the three boundary rows."""
        return np.array([0, self.N, self.N + 1])

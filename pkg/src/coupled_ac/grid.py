"""Discretization containers: the space-time grid, the cutoff Λ and trajectories.

A field is a plain ``numpy`` array of length ``grid.nx``; a trajectory
component is an array of shape ``(nt + 1, nx)`` whose row ``k`` is the field
at time ``k * dt``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[-L, L)`` with ``nx`` cells and ``nt`` time steps.

    Grid points are ``x_j = -L + j * dx`` for ``j = 0 .. nx-1``.
    """

    half_width: float
    nx: int
    dt: float
    nt: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise ConfigurationError(f"half_width must be > 0, got {self.half_width}")
        if self.nx < 2:
            raise ConfigurationError(f"nx must be >= 2, got {self.nx}")
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be > 0, got {self.dt}")
        if self.nt < 0:
            raise ConfigurationError(f"nt must be >= 0, got {self.nt}")

    @classmethod
    def from_spacing(cls, half_width, dx, dt, horizon):
        """Build a grid from a target spacing and a time horizon."""
        nx = int(round(2 * half_width / dx))
        nt = int(round(horizon / dt))
        if not math.isclose(nt * dt, horizon, rel_tol=1e-9, abs_tol=1e-12):
            raise ConfigurationError(f"horizon {horizon} is not a multiple of dt={dt}")
        return cls(half_width, nx, dt, nt)

    @property
    def dx(self):
        return 2 * self.half_width / self.nx

    @property
    def x(self):
        return -self.half_width + self.dx * np.arange(self.nx)

    @property
    def times(self):
        return self.dt * np.arange(self.nt + 1)

    @property
    def horizon(self):
        return self.nt * self.dt

    def with_time(self, dt=None, nt=None):
        return Grid(self.half_width, self.nx, self.dt if dt is None else dt,
                    self.nt if nt is None else nt)

    def index_of(self, x):
        """Nearest grid index to position ``x``."""
        j = int(round((x + self.half_width) / self.dx))
        if not 0 <= j < self.nx:
            raise IndexError(f"x={x} is outside the grid")
        return j

    def time_index(self, t):
        k = int(round(t / self.dt))
        if not 0 <= k <= self.nt:
            raise IndexError(f"t={t} is outside [0, {self.horizon}]")
        return k


@dataclass(frozen=True)
class CutoffSpec:
    """Raised-cosine cutoff: 1 on ``[-a, a]``, 0 for ``|x| >= a + w``."""

    plateau: float
    ramp: float

    def __post_init__(self):
        if self.plateau < 0:
            raise ConfigurationError(f"plateau must be >= 0, got {self.plateau}")
        if not self.ramp > 0:
            raise ConfigurationError(f"ramp must be > 0, got {self.ramp}")

    @property
    def support_radius(self):
        return self.plateau + self.ramp

    def __call__(self, x):
        r = np.abs(np.asarray(x, dtype=float))
        s = np.clip((r - self.plateau) / self.ramp, 0.0, 1.0)
        return 0.5 * (1.0 + np.cos(np.pi * s))

    def values(self, grid):
        return self(grid.x)

    def distance(self, x):
        """Distance from ``x`` to the support ``[-(a+w), a+w]``."""
        return np.maximum(np.abs(np.asarray(x, dtype=float)) - self.support_radius, 0.0)


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed pair of fields ``(m1, m2)`` on one grid."""

    grid: Grid
    m1: np.ndarray
    m2: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        shape = (self.m1.shape[0], self.grid.nx)
        if self.m1.shape != shape or self.m2.shape != shape:
            raise ConfigurationError(
                f"trajectory arrays {self.m1.shape}, {self.m2.shape} do not match grid nx={self.grid.nx}")

    @property
    def times(self):
        return self.grid.dt * np.arange(self.m1.shape[0])

    @property
    def components(self):
        return self.m1, self.m2

    def swapped(self):
        return Trajectory(self.grid, self.m2, self.m1, dict(self.meta))

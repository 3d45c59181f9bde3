"""Space-time white noise on the grid and its stochastic convolution.

Each realization draws from a Philox counter-based generator keyed by
``SeedSequence(seed, spawn_key=(component,))``, so components never share a
stream and replicas can be generated in any order or in parallel.  Rows are
drawn one time step at a time; drawing the whole ``(nt, nx)`` block at once
consumes the stream identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import persist
from .errors import DomainError
from .grid import Grid
from .kernel import apply_heat, trapezoid_weights


def _generator(seed, component):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(component),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class NoiseRealization:
    """Cell increments ``w[k, j]`` ~ N(0, dx*dt) for time step k and cell j."""

    seed: int
    component: int
    grid: Grid
    increments: np.ndarray

    def __post_init__(self):
        self.increments.setflags(write=False)


def sample_white_noise(grid: Grid, seed, component=1):
    if component not in (1, 2):
        raise DomainError(f"component must be 1 or 2, got {component}")
    rng = _generator(seed, component)
    w = rng.standard_normal((grid.nt, grid.nx)) * math.sqrt(grid.dx * grid.dt)
    return NoiseRealization(int(seed), component, grid, w)


def zero_noise(grid: Grid, component=1):
    return NoiseRealization(0, component, grid, np.zeros((grid.nt, grid.nx)))


def _advance(z, w, grid):
    # the step's increment is a density w/dx over its cell, smoothed by half a step
    return apply_heat(z, grid.dt, grid) + apply_heat(w / grid.dx, grid.dt / 2, grid, cells=True)


def stochastic_convolution(noise: NoiseRealization):
    """``Z_t = ∫_0^t H_{t-s} dW_s`` on the grid, shape ``(nt + 1, nx)``, ``Z_0 = 0``."""
    grid = noise.grid
    z = np.zeros((grid.nt + 1, grid.nx))
    for k in range(grid.nt):
        z[k + 1] = _advance(z[k], noise.increments[k], grid)
    return z


def sample_Z_slices(seeds, grid: Grid, t_indices, component=1):
    """Values of ``Z`` at the requested time indices for many seeds.

    Evolves all replicas together (row-for-row identical to
    :func:`stochastic_convolution`) without storing whole trajectories.
    Returns an array of shape ``(len(t_indices), len(seeds), nx)``.
    """
    t_indices = [int(k) for k in t_indices]
    if any(k < 0 or k > grid.nt for k in t_indices):
        raise IndexError("time index outside grid")
    gens = [_generator(s, component) for s in seeds]
    scale = math.sqrt(grid.dx * grid.dt)
    z = np.zeros((len(gens), grid.nx))
    out = np.empty((len(t_indices), len(gens), grid.nx))
    last = max(t_indices)
    for k in range(last + 1):
        for i, kk in enumerate(t_indices):
            if kk == k:
                out[i] = z
        if k < last:
            w = np.stack([g.standard_normal(grid.nx) for g in gens]) * scale
            z = _advance(z, w, grid)
    return out


def estimate_Z_covariance(seeds, grid: Grid, t, x, x_prime, component=1, with_stderr=False):
    """Monte Carlo estimate of ``Cov(Z_t(x), Z_t(x'))`` over independent seeds."""
    seeds = list(seeds)
    if len(seeds) < 2:
        raise DomainError("need at least 2 seeds for a covariance estimate")
    k = grid.time_index(t)
    z = sample_Z_slices(seeds, grid, [k], component)[0]
    a = z[:, grid.index_of(x)]
    b = z[:, grid.index_of(x_prime)]
    prod = (a - a.mean()) * (b - b.mean())
    n = len(seeds)
    cov = prod.sum() / (n - 1)
    if with_stderr:
        return float(cov), float(prod.std(ddof=1) / math.sqrt(n))
    return float(cov)


def isometry_variance(t):
    """``Var Z_t(x) = ∫_0^t ∫ H_s(x,y)^2 dy ds = sqrt(t / pi)``."""
    return math.sqrt(t / math.pi)


def discrete_Z_variance(grid: Grid, t, x=0.0):
    """Exact variance of the discrete ``Z_t(x)`` produced by :func:`stochastic_convolution`.

    Sweeps the adjoint of the recursion backwards from ``(t, x)``; the gap to
    :func:`isometry_variance` is the deterministic discretization bias.
    """
    n = grid.time_index(t)
    u = np.zeros(grid.nx)
    u[grid.index_of(x)] = 1.0
    w = trapezoid_weights(grid.nx, grid.dx)
    total = 0.0
    for _ in range(n):
        v = apply_heat(u, grid.dt / 2, grid, cells=True)
        total += float(v @ v) * grid.dt / grid.dx
        # adjoint of apply_heat(., dt) = conv(w * .) is w * conv(.)
        u = w * apply_heat(u / w, grid.dt, grid)
    return total


def write_binary(path, z, grid: Grid, seed):
    """Dump a ``Z`` trajectory in the shared binary layout (see :mod:`coupled_ac.persist`)."""
    persist.write_binary(path, z, grid, seed)


def read_binary(path):
    """Inverse of :func:`write_binary`: returns ``(header_dict, array)``."""
    return persist.read_binary(path)

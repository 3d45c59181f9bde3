"""Gaussian heat kernel of ``∂_t - ½∂_xx`` and its discrete actions on a grid.

Space integrals use the trapezoid rule on the uniform grid and treat data
outside ``[-L, L)`` as zero.  Kernel taps are cut at ``|x - y| > 8 √t``,
where the Gaussian tail is below ``1e-14``, so every application is a banded
(direct-sum) convolution along the last axis.
"""
from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np
from scipy import ndimage, special

from .errors import DomainError

TAIL_SIGMAS = 8.0


def eval_kernel(t, x, y):
    """``H_t(x, y) = exp(-(x-y)^2 / 2t) / sqrt(2 pi t)``; broadcasts over arrays."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("heat kernel needs t > 0")
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    out = np.exp(-d * d / (2 * t)) / np.sqrt(2 * np.pi * t)
    return out if out.ndim else float(out)


@lru_cache(maxsize=512)
def _taps(t, dx, cells, nx):
    full = int(math.ceil(TAIL_SIGMAS * math.sqrt(t) / dx))
    m = min(full, nx - 1)
    offsets = dx * np.arange(-m, m + 1)
    if cells:
        # exact integral of H_t over each cell of width dx
        s = math.sqrt(2 * t)
        taps = 0.5 * (special.erf((offsets + dx / 2) / s) - special.erf((offsets - dx / 2) / s))
    else:
        taps = np.exp(-offsets**2 / (2 * t)) / math.sqrt(2 * math.pi * t)
        # unit discrete mass before truncation to the domain; a no-op once
        # sqrt(t) >~ dx, and it keeps constants fixed when the kernel is coarse
        wide = dx * np.arange(-full, full + 1)
        taps /= dx * np.sum(np.exp(-wide**2 / (2 * t)) / math.sqrt(2 * math.pi * t))
    taps.setflags(write=False)
    return taps


def heat_taps(t, dx, cells=False, nx=1 << 30):
    """Symmetric convolution taps for ``H_t`` at spacing ``dx``.

    With ``cells=False`` the taps are point samples of the kernel scaled to
    unit discrete mass (multiply by quadrature weights before convolving).  With ``cells=True`` they are the
    kernel mass of each cell, i.e. the exact action of ``H_t`` on a
    piecewise-constant density.
    """
    if not t > 0:
        raise DomainError(f"heat kernel needs t > 0, got {t}")
    return _taps(float(t), float(dx), bool(cells), int(nx))


def trapezoid_weights(n, h):
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


def apply_heat(f, t, grid, cells=False):
    """Discrete ``(H_t f)(x_j) = ∫ H_t(x_j, y) f(y) dy`` at every grid point.

    ``f`` may carry leading batch axes; the last axis is space.  With
    ``cells=True``, ``f`` is read as a piecewise-constant density over cells
    and the kernel is integrated exactly over each cell.
    """
    if not t > 0:
        raise DomainError(f"apply_heat needs t > 0, got {t}")
    dx = grid.dx
    f = np.asarray(f, dtype=float)
    if not cells and math.sqrt(t) < 0.5 * dx:
        warnings.warn(f"H_t with sqrt(t)={math.sqrt(t):.3g} is under-resolved at dx={dx:.3g}",
                      RuntimeWarning, stacklevel=2)
    taps = heat_taps(t, dx, cells, grid.nx)
    if cells:
        src = f
    else:
        src = f * trapezoid_weights(grid.nx, dx)
    return ndimage.convolve1d(src, taps, axis=-1, mode="constant", cval=0.0)


def spacetime_convolve_all(g, grid):
    """``∫_0^{t_n} H_{t_n - s} g_s ds`` for every time index ``n``.

    Left-endpoint rule in time with the kernel taken at the right end of each
    subinterval: ``dt * sum_{k<n} H_{(n-1-k) dt} g_k``, where ``H_0`` is the
    identity.  ``g`` has shape ``(N + 1, nx)`` (rows beyond ``N - 1`` unused);
    the result has the same shape and a zero first row.
    """
    g = np.asarray(g, dtype=float)
    n_rows = g.shape[0]
    out = np.zeros_like(g)
    dt = grid.dt
    for lag in range(n_rows - 1):
        block = g[: n_rows - 1 - lag]
        if lag:
            block = apply_heat(block, lag * dt, grid)
        out[lag + 1:] += dt * block
    return out


def spacetime_convolve(g, grid, t_index):
    """Single time slice of :func:`spacetime_convolve_all`."""
    g = np.asarray(g, dtype=float)
    if not 0 <= t_index < g.shape[0]:
        raise IndexError(f"t_index {t_index} outside trajectory of length {g.shape[0]}")
    out = np.zeros(g.shape[-1])
    for k in range(t_index):
        lag = t_index - 1 - k
        term = g[k] if lag == 0 else apply_heat(g[k], lag * grid.dt, grid)
        out += grid.dt * term
    return out


def kernel_lp_norm(p, T):
    """``(∫_0^T ∫ H_t(x,y)^p dy dt)^{1/p}``, or ``inf`` when it diverges (p >= 3).

    Uses ``∫ H_t^p dy = (2πt)^{(1-p)/2} / sqrt(p)``.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if not T > 0:
        raise DomainError(f"T must be > 0, got {T}")
    if p >= 3:
        return math.inf
    e = (3 - p) / 2
    integral = (2 * math.pi) ** ((1 - p) / 2) / math.sqrt(p) * T**e / e
    return integral ** (1 / p)

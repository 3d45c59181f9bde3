"""Exponentially weighted norms and measures on ``R x R+``.

The measure family is ``mu(dx, dt) = exp(-alpha^2 t / 2 - alpha |x|) dx dt``,
optionally restricted to ``[0, T]`` and/or multiplied by a cutoff ``Λ(x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate, special

from .errors import DomainError
from .grid import CutoffSpec, Grid
from .kernel import trapezoid_weights

#: infinite integrals are cut where the weight falls below this fraction of its peak
WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class WeightedMeasure:
    alpha: float
    horizon: Optional[float] = None
    cutoff: Optional[CutoffSpec] = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if self.horizon is not None and not self.horizon > 0:
            raise DomainError(f"horizon must be > 0, got {self.horizon}")

    def space_weight(self, x):
        w = np.exp(-self.alpha * np.abs(x))
        if self.cutoff is not None:
            w = w * self.cutoff(x)
        return w

    def time_weight(self, t):
        return np.exp(-self.alpha**2 * np.asarray(t) / 2)


def _phi(z):
    return 0.5 * special.erfc(-z / math.sqrt(2))


def norm_c_alpha_space(f, grid: Grid, alpha):
    """``max_j exp(-alpha |x_j|) |f(x_j)|``."""
    return float(np.max(np.exp(-alpha * np.abs(grid.x)) * np.abs(f)))


def norm_c_alpha_spacetime(m, grid: Grid, alpha):
    """``max_{k,j} exp(-alpha^2 t_k / 2 - alpha |x_j|) |m(x_j, t_k)|``."""
    m = np.asarray(m, dtype=float)
    t = grid.dt * np.arange(m.shape[0])
    w = np.exp(-alpha**2 * t / 2)[:, None] * np.exp(-alpha * np.abs(grid.x))[None, :]
    return float(np.max(w * np.abs(m)))


def norm_lp_mu(m, grid: Grid, p, mu: WeightedMeasure):
    """Trapezoid approximation of ``(∫∫ |m|^p dmu)^{1/p}``.

    The time integral runs over the rows of ``m`` (row k at ``k*dt``), cut at
    ``mu.horizon`` when that is shorter than the trajectory.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    m = np.asarray(m, dtype=float)
    rows = m.shape[0]
    if mu.horizon is not None:
        rows = min(rows, int(math.floor(mu.horizon / grid.dt + 1e-9)) + 1)
    if rows < 2:
        return 0.0
    t = grid.dt * np.arange(rows)
    wt = trapezoid_weights(rows, grid.dt) * mu.time_weight(t)
    wx = trapezoid_weights(grid.nx, grid.dx) * mu.space_weight(grid.x)
    total = np.einsum("k,kj,j->", wt, np.abs(m[:rows]) ** p, wx)
    return float(total ** (1 / p))


class OperatorBound(NamedTuple):
    """Value of a bounding integral and where its infinite ranges were cut."""

    value: float
    truncation_time: float
    truncation_radius: float

    @property
    def diverges(self):
        return math.isinf(self.value)


def bound_heat_operator_norm(p, alpha, mode, horizon=None):
    """Young/Hölder bounding integral for the heat operator on weighted spaces.

    ``mode="into_lp"``: ``∫_0^∞ ∫ H_t(z) exp(alpha|z|/p - alpha^2 t/(2p)) dz dt``,
    the L^1 norm of the weighted kernel, which bounds ``H: L^p(mu) -> L^p(mu)``;
    finite iff ``p > 1``.

    ``mode="into_c_alpha"``: ``∫_0^∞ ∫ H_t(z)^q exp((q-1)(alpha|z| - alpha^2 t/2)) dz dt``
    with ``q = p/(p-1)``; its ``1/q`` power bounds ``H: L^p(mu) -> C^alpha``.
    Finite iff ``q < 3``, i.e. ``p > 3/2``.

    The inner space integral is done in closed form, the time integral by
    adaptive quadrature up to ``horizon`` (or to where the weight drops below
    ``WEIGHT_FLOOR``).  Divergent cases return ``value = inf``.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    log_floor = -math.log(WEIGHT_FLOOR)
    if mode == "into_lp":
        if p <= 1:
            return OperatorBound(math.inf, math.inf, math.inf)
        c = alpha / p
        rate = alpha**2 * (p - 1) / (2 * p * p)

        def integrand(t):
            return 2 * _phi(c * math.sqrt(t)) * math.exp(-rate * t)

        def radius(t):
            return c * t + math.sqrt(2 * t * log_floor)
    elif mode == "into_c_alpha":
        if p <= 1.5:
            return OperatorBound(math.inf, math.inf, math.inf)
        q = p / (p - 1)
        c = (q - 1) * alpha
        rate = (q - 1) * alpha**2 / (2 * q)

        def integrand(t):
            return (2 / math.sqrt(q) * (2 * math.pi * t) ** ((1 - q) / 2)
                    * _phi(c * math.sqrt(t / q)) * math.exp(-rate * t))

        def radius(t):
            return c * t / q + math.sqrt(2 * t * log_floor / q)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    t_max = log_floor / rate
    if horizon is not None:
        t_max = min(t_max, float(horizon))
    value, _ = integrate.quad(integrand, 0.0, t_max, limit=400, epsabs=1e-12, epsrel=1e-10)
    return OperatorBound(value, t_max, radius(t_max))

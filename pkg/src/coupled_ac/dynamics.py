"""Finite-volume coupled Allen-Cahn system: drift, Picard solver and time stepper.

The finite-volume mild equation for component ``i`` is::

    m_i(t) = -∫_0^t H_{t-s} Λ [V'(m_i) + λ (m_i - m_j)](s) ds + Λ F_i(t),
    F_i(t) = H_t m_i(0) + Z_i(t),      V'(m) = m^3 - m.

``picard_solve`` iterates this map on a short window; ``simulate`` advances it
with exponential Euler steps.  The two use different time quadratures of the
drift integral, so comparing them is a genuine consistency check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InvariantViolationError, NonConvergenceError
from .grid import CutoffSpec, Grid, Trajectory
from .kernel import apply_heat, spacetime_convolve_all
from .noise import NoiseRealization, sample_white_noise, stochastic_convolution

BALL_SLACK = 1e-12


def V_prime(m):
    return m * m * m - m


def drift(m1, m2, lam):
    """``(V'(m1) + λ(m1 - m2), V'(m2) + λ(m2 - m1))``, the term subtracted in the mild form."""
    return V_prime(m1) + lam * (m1 - m2), V_prime(m2) + lam * (m2 - m1)


@dataclass
class ModelParams:
    lam: float
    cutoff: CutoffSpec
    m1_0: np.ndarray
    m2_0: np.ndarray
    beta: float = 1.0

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigurationError(f"coupling lambda must be >= 0, got {self.lam}")
        if self.beta < 0:
            raise ConfigurationError(f"beta must be >= 0, got {self.beta}")
        self.m1_0 = np.asarray(self.m1_0, dtype=float)
        self.m2_0 = np.asarray(self.m2_0, dtype=float)
        if not (np.all(np.isfinite(self.m1_0)) and np.all(np.isfinite(self.m2_0))):
            raise ConfigurationError("initial data must be finite")

    @classmethod
    def constant(cls, grid, lam, cutoff, m1, m2, beta=1.0):
        return cls(lam, cutoff, np.full(grid.nx, float(m1)), np.full(grid.nx, float(m2)), beta)


def heat_flow(m0, grid: Grid, rows):
    """``H_{t_k} m0`` for ``k = 0 .. rows-1`` (row 0 is ``m0`` itself)."""
    out = np.empty((rows, grid.nx))
    out[0] = m0
    for k in range(1, rows):
        out[k] = apply_heat(m0, k * grid.dt, grid)
    return out


def forcing(m0, grid: Grid, noise: NoiseRealization | None = None):
    """``F = H_t m0 + Z`` on every time row of ``grid``."""
    f = heat_flow(m0, grid, grid.nt + 1)
    if noise is not None:
        f += stochastic_convolution(noise)
    return f


def compute_K(F1, F2, cutoff_values, grid: Grid | None = None, T=None):
    """``K = sup |Λ F1| + sup |Λ F2|`` over space and the rows with ``t <= T``."""
    rows = F1.shape[0]
    if T is not None:
        if grid is None:
            raise ValueError("a grid is needed to locate the horizon T")
        rows = min(rows, int(math.floor(T / grid.dt + 1e-9)) + 1)
    return float(np.max(np.abs(cutoff_values * F1[:rows])) + np.max(np.abs(cutoff_values * F2[:rows])))


def compute_T0(K, lam):
    """Existence window ``min(1 / (8(K² + 1/8 + λ/4)), 1 / (2(12K² + 1 + 2λ)))``."""
    if K < 0 or lam < 0:
        raise ValueError("K and lambda must be nonnegative")
    return min(1.0 / (8.0 * (K * K + 0.125 + lam / 4.0)),
               1.0 / (2.0 * (12.0 * K * K + 1.0 + 2.0 * lam)))


def contraction_bound(K, lam, T):
    """Lipschitz constant ``T (12K² + 1 + 2λ)`` of the Picard map on the 2K ball."""
    return T * (12.0 * K * K + 1.0 + 2.0 * lam)


@dataclass
class PicardResult:
    trajectory: Trajectory
    iterations: int
    residual_history: list
    K: float
    T0: float
    T: float
    lam: float
    ratios: list = field(default_factory=list)
    windows: int = 1
    #: ``T (12K² + 1 + 2λ)``; for chained windows the largest per-window value
    contraction_bound: float | None = None

    def __post_init__(self):
        if self.contraction_bound is None:
            self.contraction_bound = contraction_bound(self.K, self.lam, self.T)


def _successive_ratios(history):
    return [b / a for a, b in zip(history, history[1:]) if a > 0]


def _picard_core(G1, G2, lam, lam_vals, grid, tol, max_iter, init, radius):
    """Fixed point of ``m_i = -dt Σ H Λ drift_i(m) + G_i`` on one window."""
    if init is None:
        m1, m2 = np.zeros_like(G1), np.zeros_like(G2)
    else:
        m1, m2 = (np.array(a, dtype=float, copy=True) for a in init)
    history = []
    limit = radius * (1 + BALL_SLACK)
    for it in range(1, max_iter + 1):
        d1, d2 = drift(m1, m2, lam)
        n1 = G1 - spacetime_convolve_all(lam_vals * d1, grid)
        n2 = G2 - spacetime_convolve_all(lam_vals * d2, grid)
        sup = max(np.max(np.abs(n1)), np.max(np.abs(n2)))
        if sup > limit:
            raise InvariantViolationError(
                f"Picard iterate {it} has sup norm {sup:.6g} outside the ball of radius {radius:.6g}")
        change = max(np.max(np.abs(n1 - m1)), np.max(np.abs(n2 - m2)))
        history.append(float(change))
        m1, m2 = n1, n2
        if change <= tol:
            return m1, m2, it, history
    raise NonConvergenceError(
        f"Picard iteration did not reach tol={tol} in {max_iter} iterations", history)


def picard_solve(F1, F2, params: ModelParams, grid: Grid, T=None, tol=1e-8, max_iter=200,
                 init=None, enforce_window=True):
    """Solve the finite-volume system on ``[0, T]`` by Picard iteration.

    ``F1, F2`` are the free fields ``H_t m_0 + Z`` on the grid's time rows.
    The map is applied to whole space-time trajectories; every iterate must
    stay in the ball ``|m_i| <= 2K`` and, when ``enforce_window`` is set,
    ``T`` may not exceed ``compute_T0(K, λ)``.
    """
    T = grid.horizon if T is None else T
    rows = int(round(T / grid.dt)) + 1
    if rows > F1.shape[0]:
        raise ConfigurationError(f"forcing covers {F1.shape[0] - 1} steps, T needs {rows - 1}")
    lam_vals = params.cutoff.values(grid)
    G1, G2 = lam_vals * F1[:rows], lam_vals * F2[:rows]
    K = compute_K(F1[:rows], F2[:rows], lam_vals)
    T0 = compute_T0(K, params.lam)
    if enforce_window and T > T0 * (1 + 1e-12):
        raise ConfigurationError(f"T={T:.6g} exceeds the contraction window T0={T0:.6g} (K={K:.6g})")
    if init == "forcing":
        init = (G1, G2)
    m1, m2, it, hist = _picard_core(G1, G2, params.lam, lam_vals, grid.with_time(nt=rows - 1),
                                    tol, max_iter, init, 2 * K)
    return PicardResult(Trajectory(grid.with_time(nt=rows - 1), m1, m2), it, hist, K, T0, T,
                        params.lam, _successive_ratios(hist))


def picard_continue(F1, F2, params: ModelParams, grid: Grid, T=None, tol=1e-8, max_iter=200):
    """Chain Picard windows up to ``T``, recomputing ``K`` and ``T0`` per window.

    Each window restarts the mild equation from the last computed state:
    its free term is ``H_r (m(s) - ΛF(s)) + ΛF(s + r)``.
    """
    T = grid.horizon if T is None else T
    total = int(round(T / grid.dt))
    lam_vals = params.cutoff.values(grid)
    G1, G2 = lam_vals * F1[: total + 1], lam_vals * F2[: total + 1]
    out1 = np.empty_like(G1)
    out2 = np.empty_like(G2)
    out1[0], out2[0] = G1[0], G2[0]
    start, iterations, windows, history, ratios = 0, 0, 0, [], []
    K_max, T0_min, bound = 0.0, math.inf, 0.0
    while start < total:
        s1 = out1[start] - G1[start]
        s2 = out2[start] - G2[start]
        # window length from a bound on K over the remaining horizon, refined once
        steps = total - start
        while True:
            h1 = heat_flow(s1, grid, steps + 1) + G1[start: start + steps + 1]
            h2 = heat_flow(s2, grid, steps + 1) + G2[start: start + steps + 1]
            K = float(np.max(np.abs(h1)) + np.max(np.abs(h2)))
            fit = int(math.floor(compute_T0(K, params.lam) / grid.dt + 1e-9))
            if fit < 1:
                raise ConfigurationError(f"dt={grid.dt} exceeds the Picard window T0 at K={K:.4g}")
            if fit >= steps:
                break
            steps = fit
        wgrid = grid.with_time(nt=steps)
        m1, m2, it, hist = _picard_core(h1, h2, params.lam, lam_vals, wgrid, tol, max_iter, None, 2 * K)
        K_max, T0_min = max(K_max, K), min(T0_min, compute_T0(K, params.lam))
        bound = max(bound, contraction_bound(K, params.lam, steps * grid.dt))
        out1[start: start + steps + 1] = m1
        out2[start: start + steps + 1] = m2
        iterations += it
        windows += 1
        history.extend(hist)
        ratios.extend(_successive_ratios(hist))
        start += steps
    return PicardResult(Trajectory(grid.with_time(nt=total), out1, out2), iterations, history,
                        K_max, T0_min, T, params.lam, ratios, windows, bound)


def stability_bound(M, lam):
    """Largest admissible step ``0.5 / (3M² + 1 + 2λ)`` at state sup-norm ``M``."""
    return 0.5 / (3.0 * M * M + 1.0 + 2.0 * lam)


def _check_step(state, dt, lam):
    M = max(float(np.max(np.abs(s))) for s in state)
    if dt > stability_bound(M, lam):
        raise ConfigurationError(
            f"dt={dt:.4g} exceeds the stability bound {stability_bound(M, lam):.4g} at sup|m|={M:.4g}")


def step_mild(state, grid: Grid, lam, cutoff_values, increments):
    """One exponential-Euler step of the finite-volume system.

    ``m <- H_dt(m - dt Λ drift(m)) + increment`` where the increment is the
    change of the free term, ``ΛF(t + dt) - H_dt ΛF(t)``.
    """
    dt = grid.dt
    _check_step(state, dt, lam)
    d = drift(state[0], state[1], lam)
    return tuple(apply_heat(m - dt * (cutoff_values * di), dt, grid) + inc
                 for m, di, inc in zip(state, d, increments))


def _free_increment(G, k, grid):
    return G[k + 1] - apply_heat(G[k], grid.dt, grid)


def _resolve_noise(grid, seeds, noise):
    if noise is not None:
        if seeds is not None:
            raise ValueError("pass either seeds or noise, not both")
        for n in noise:
            if n is not None and n.grid != grid:
                raise ConfigurationError("noise realization was sampled on a different grid")
        return tuple(noise)
    if seeds is None:
        return None, None
    return sample_white_noise(grid, seeds[0], 1), sample_white_noise(grid, seeds[1], 2)


def simulate(params: ModelParams, grid: Grid, T=None, seeds=None, noise=None):
    """Integrate the finite-volume system to ``T`` (default: the grid horizon).

    Noise is taken from ``noise=(n1, n2)`` if given, else sampled from
    ``seeds=(s1, s2)`` on streams 1 and 2, else omitted.
    """
    if T is not None and T > grid.horizon + 1e-12:
        raise ConfigurationError(f"T={T} exceeds grid horizon {grid.horizon}")
    n1, n2 = _resolve_noise(grid, seeds, noise)
    steps = grid.nt if T is None else int(round(T / grid.dt))
    lam_vals = params.cutoff.values(grid)
    G1 = lam_vals * forcing(params.m1_0, grid, n1)
    G2 = lam_vals * forcing(params.m2_0, grid, n2)
    m1 = np.empty((steps + 1, grid.nx))
    m2 = np.empty((steps + 1, grid.nx))
    m1[0], m2[0] = G1[0], G2[0]
    for k in range(steps):
        inc = (_free_increment(G1, k, grid), _free_increment(G2, k, grid))
        m1[k + 1], m2[k + 1] = step_mild((m1[k], m2[k]), grid, params.lam, lam_vals, inc)
    meta = dict(lam=params.lam, beta=params.beta, plateau=params.cutoff.plateau,
                ramp=params.cutoff.ramp,
                seeds=tuple(None if n is None else n.seed for n in (n1, n2)))
    return Trajectory(grid.with_time(nt=steps), m1, m2, meta)


def simulate_single(m0, cutoff: CutoffSpec, grid: Grid, noise: NoiseRealization | None = None):
    """Single finite-volume Allen-Cahn equation, same scheme with ``λ`` absent."""
    lam_vals = cutoff.values(grid)
    G = lam_vals * forcing(np.asarray(m0, dtype=float), grid, noise)
    m = np.empty((grid.nt + 1, grid.nx))
    m[0] = G[0]
    dt = grid.dt
    for k in range(grid.nt):
        _check_step((m[k],), dt, 0.0)
        m[k + 1] = apply_heat(m[k] - dt * (lam_vals * V_prime(m[k])), dt, grid) + _free_increment(G, k, grid)
    return m

"""Empirical checks of the estimates behind existence and uniqueness.

Each study returns plain numbers or arrays; pass/fail thresholds are applied
by callers (``verify`` and the test suite).
"""
from __future__ import annotations

import dataclasses
from typing import Callable, NamedTuple

import numpy as np

from .dynamics import ModelParams, V_prime, forcing, picard_solve, simulate
from .errors import ConfigurationError, DomainError
from .grid import CutoffSpec, Grid, Trajectory
from .kernel import spacetime_convolve_all, trapezoid_weights
from .noise import sample_white_noise
from .spaces import WeightedMeasure, norm_c_alpha_spacetime, norm_lp_mu


# -- positivity of ∫∫ f^{2n+1} (∂_t - ½∂_xx) f ------------------------------------


class TestField(NamedTuple):
    """Closed-form ``f(x, t)`` with its derivatives ``∂_t f`` and ``∂_xx f``."""

    name: str
    f: Callable
    f_t: Callable
    f_xx: Callable


def _separable(name, a, da, b, d2b):
    return TestField(name,
                     lambda x, t: a(t) * b(x),
                     lambda x, t: da(t) * b(x),
                     lambda x, t: a(t) * d2b(x))


def _gauss(s, c=0.0):
    b = lambda x: np.exp(-(x - c) ** 2 / s)
    d2b = lambda x: b(x) * (4 * (x - c) ** 2 / s**2 - 2 / s)
    return b, d2b


def _x_gauss(x):
    return x * np.exp(-x * x)


def _x_gauss_xx(x):
    return (4 * x**3 - 6 * x) * np.exp(-x * x)


def _cos_gauss(x):
    return np.exp(-x * x) * np.cos(2 * x)


def _cos_gauss_xx(x):
    return np.exp(-x * x) * ((4 * x * x - 6) * np.cos(2 * x) + 8 * x * np.sin(2 * x))


def _build_family():
    g1, g1xx = _gauss(1.0)
    g2, g2xx = _gauss(2.0)
    g4, g4xx = _gauss(4.0)
    gs, gsxx = _gauss(1.0, 1.0)
    gn, gnxx = _gauss(0.5, -0.5)
    return [
        _separable("t*exp(-x^2)", lambda t: t, lambda t: np.ones_like(t), g1, g1xx),
        _separable("sin(t)*exp(-x^2/2)", np.sin, np.cos, g2, g2xx),
        _separable("t^2*exp(-x^2)", lambda t: t * t, lambda t: 2 * t, g1, g1xx),
        _separable("(1-exp(-t))*exp(-x^2/4)", lambda t: 1 - np.exp(-t), lambda t: np.exp(-t), g4, g4xx),
        _separable("t*x*exp(-x^2)", lambda t: t, lambda t: np.ones_like(t), _x_gauss, _x_gauss_xx),
        _separable("sin(2t)*exp(-(x-1)^2)", lambda t: np.sin(2 * t), lambda t: 2 * np.cos(2 * t), gs, gsxx),
        _separable("t*exp(-x^2)*cos(2x)", lambda t: t, lambda t: np.ones_like(t), _cos_gauss, _cos_gauss_xx),
        _separable("t(1-t)*exp(-x^2/2)", lambda t: t * (1 - t), lambda t: 1 - 2 * t, g2, g2xx),
        _separable("t*exp(-2(x+0.5)^2)", lambda t: t, lambda t: np.ones_like(t), gn, gnxx),
        _separable("(exp(t)-1)*x*exp(-x^2)", lambda t: np.expm1(t), np.exp, _x_gauss, _x_gauss_xx),
    ]


POSITIVITY_FAMILY = _build_family()


def check_positivity_lemma(field: TestField, n, T=1.0, mu: WeightedMeasure | None = None,
                           half_width=8.0, nx=1600, nt=800):
    """Trapezoid value of ``∫_0^T ∫ f^{2n+1} (∂_t - ½∂_xx) f dmu``.

    ``mu=None`` is plain ``dx dt``; otherwise the weight of ``mu`` is used with
    its horizon (default ``T``) and cutoff.  Raises if ``f(., 0) != 0``.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    if mu is not None and mu.horizon is not None:
        T = mu.horizon
    x = np.linspace(-half_width, half_width, nx + 1)
    t = np.linspace(0.0, T, nt + 1)
    if np.max(np.abs(field.f(x, 0.0))) > 1e-12:
        raise DomainError(f"test field {field.name!r} does not vanish at t = 0")
    X, Tt = np.meshgrid(x, t)
    f = field.f(X, Tt)
    integrand = f ** (2 * n + 1) * (field.f_t(X, Tt) - 0.5 * field.f_xx(X, Tt))
    wx = trapezoid_weights(x.size, x[1] - x[0])
    wt = trapezoid_weights(t.size, t[1] - t[0])
    if mu is not None:
        wx = wx * mu.space_weight(x)
        wt = wt * mu.time_weight(t)
    return float(wt @ integrand @ wx)


# -- monotonicity constant of V' + β id -------------------------------------------


def check_monotonicity(beta, sample_range=(-5.0, 5.0), sample_count=401):
    """Smallest sampled ``(V'(x)+βx - V'(y)-βy)(x-y) / (x-y)^4`` over pairs ``x != y``."""
    if beta < 1:
        raise DomainError(f"the k = 1/4 estimate needs beta >= 1, got {beta}")
    s = np.linspace(sample_range[0], sample_range[1], sample_count)
    x, y = np.meshgrid(s, s)
    mask = x != y
    x, y = x[mask], y[mask]
    lhs = (V_prime(x) + beta * x - V_prime(y) - beta * y) * (x - y)
    return float(np.min(lhs / (x - y) ** 4))


# -- decay away from supp Λ ------------------------------------------------------


def decay_profile(traj: Trajectory, cutoff: CutoffSpec, times=None, margin_widths=4.0):
    """Running sup of ``|m_i|`` against distance ``d`` from ``supp Λ``.

    Returns an array of rows ``(d, sup_{t in times} max_i |m_i(x, t)|)`` for
    each grid distance ``d > 0``; points at equal distance on either side
    share a bucket.
    """
    grid = traj.grid
    R = cutoff.support_radius
    if grid.half_width - R < margin_widths * 2 * R:
        raise ConfigurationError(
            f"grid half width {grid.half_width} leaves less than {margin_widths} support widths past supp Λ")
    rows = slice(None) if times is None else [grid.time_index(t) for t in times]
    amp = np.maximum(np.abs(traj.m1[rows]), np.abs(traj.m2[rows])).max(axis=0)
    d = cutoff.distance(grid.x)
    outside = d > 0
    bucket = np.rint(d[outside] / grid.dx).astype(int)
    sup = np.zeros(bucket.max() + 1)
    np.maximum.at(sup, bucket, amp[outside])
    present = np.unique(bucket)
    return np.column_stack([present * grid.dx, sup[present]])


def fit_decay_slope(profile, d_min, d_max, floor=1e-12):
    """Least-squares slope of ``log sup|m|`` against ``d^2`` on ``[d_min, d_max]``."""
    d, s = profile[:, 0], profile[:, 1]
    sel = (d >= d_min) & (d <= d_max) & (s > floor)
    if sel.sum() < 3:
        raise ValueError("too few points above the noise floor to fit a slope")
    slope, _ = np.polyfit(d[sel] ** 2, np.log(s[sel]), 1)
    return float(slope)


def decay_bound_shape(d, T):
    """``T^{3/2} exp(-d^2 / 2T) / d^2``, the profile of the far-field bound."""
    d = np.asarray(d, dtype=float)
    return T**1.5 * np.exp(-d * d / (2 * T)) / (d * d)


def fit_decay_constant(profile, T, d_min, d_max):
    """Smallest ``C`` with ``sup|m| <= C * decay_bound_shape(d, T)`` on ``[d_min, d_max]``."""
    d, s = profile[:, 0], profile[:, 1]
    sel = (d >= d_min) & (d <= d_max)
    return float(np.max(s[sel] / decay_bound_shape(d[sel], T)))


# -- empirical heat-operator norms ------------------------------------------------


def random_smooth_fields(grid: Grid, count, seed):
    """``count`` sums of 1-3 random Gaussian bumps in ``(t, x)``, shape ``(nt + 1, nx)`` each."""
    rng = np.random.default_rng(seed)
    X = grid.x[None, :]
    t = grid.times[:, None]
    T, L = grid.horizon, grid.half_width
    out = []
    for _ in range(count):
        g = np.zeros((grid.nt + 1, grid.nx))
        for _ in range(rng.integers(1, 4)):
            x0, sx = rng.uniform(-L / 3, L / 3), rng.uniform(0.3, 2.0)
            t0, st = rng.uniform(0, T), rng.uniform(0.2, T / 2)
            g += rng.normal() * np.exp(-((X - x0) / sx) ** 2 - ((t - t0) / st) ** 2)
        out.append(g)
    return out


def empirical_operator_norms(p, alpha, count=20, seed=0, half_width=12.0, dx=0.2, dt=0.1, horizon=6.0):
    """Output norms of ``g -> ∫_0^t H_{t-s} g_s ds`` on random ``g`` with unit ``L^p(mu_T)`` norm.

    Returns rows ``(||Hg||_{L^p(mu_T)}, ||Hg||_{C^alpha})``; the bounding
    integrals of :func:`bound_heat_operator_norm` must dominate both columns.
    """
    grid = Grid.from_spacing(half_width, dx, dt, horizon)
    mu = WeightedMeasure(alpha, horizon)
    rows = []
    for g in random_smooth_fields(grid, count, seed):
        g = g / norm_lp_mu(g, grid, p, mu)
        Hg = spacetime_convolve_all(g, grid)
        rows.append((norm_lp_mu(Hg, grid, p, mu), norm_c_alpha_spacetime(Hg, grid, alpha)))
    return np.array(rows)


# -- families of finite-volume solutions ------------------------------------------


def _check_nested(cutoffs):
    probe = np.linspace(0.0, max(c.support_radius for c in cutoffs) + 1.0, 4001)
    for a, b in zip(cutoffs, cutoffs[1:]):
        if np.any(a(probe) > b(probe) + 1e-15):
            raise ConfigurationError(f"cutoffs are not nested: {a} then {b}")


def solve_family(params: ModelParams, cutoffs, grid: Grid, noise=None):
    """One trajectory per cutoff, all driven by the same noise realization."""
    return [simulate(dataclasses.replace(params, cutoff=c), grid, noise=noise) for c in cutoffs]


def uniform_lp_study(cutoffs, p, mu: WeightedMeasure, params: ModelParams, grid: Grid, noise=None,
                     trajectories=None):
    """``norm_lp_mu(m_{i,Λ_n}, p, mu)`` for each cutoff (rows) and component (columns)."""
    _check_nested(cutoffs)
    trajs = trajectories or solve_family(params, cutoffs, grid, noise)
    return np.array([[norm_lp_mu(m, grid, p, mu) for m in tr.components] for tr in trajs])


def cutoff_cauchy_study(cutoffs, p, beta, mu: WeightedMeasure, params: ModelParams, grid: Grid,
                        noise=None, trajectories=None):
    """Distances ``|| e^{-βt} (Λ_{n+1} m_{Λ_{n+1}} - Λ_n m_{Λ_n}) ||_{L^p(mu)}``.

    Returns an array of shape ``(len(cutoffs) - 1, 2)``, one column per component.
    """
    if beta < 1:
        raise DomainError(f"beta must be >= 1, got {beta}")
    _check_nested(cutoffs)
    trajs = trajectories or solve_family(params, cutoffs, grid, noise)
    damp = np.exp(-beta * grid.times)[:, None]
    out = []
    for (ca, ta), (cb, tb) in zip(zip(cutoffs, trajs), zip(cutoffs[1:], trajs[1:])):
        la, lb = ca.values(grid), cb.values(grid)
        out.append([norm_lp_mu(damp * (lb * mb - la * ma), grid, p, mu)
                    for ma, mb in zip(ta.components, tb.components)])
    return np.array(out)


# -- uniqueness ------------------------------------------------------------------


def uniqueness_check(first: Trajectory, second: Trajectory, beta, mu: WeightedMeasure, n=0, T=None):
    """``max_i || e^{-βt} (m_i' - m_i) ||_{L^{2n+4}(mu_T)}`` for two solutions on one grid."""
    if first.grid.dx != second.grid.dx or first.grid.nx != second.grid.nx or first.grid.dt != second.grid.dt:
        raise ConfigurationError("solutions live on different grids")
    sa, sb = first.meta.get("seeds"), second.meta.get("seeds")
    if sa is not None and sb is not None and sa != sb:
        raise ConfigurationError(f"solutions were driven by different noise seeds {sa} vs {sb}")
    rows = min(first.m1.shape[0], second.m1.shape[0])
    if T is not None:
        rows = min(rows, first.grid.time_index(T) + 1)
    damp = np.exp(-beta * first.grid.dt * np.arange(rows))[:, None]
    horizon = (rows - 1) * first.grid.dt
    meas = dataclasses.replace(mu, horizon=horizon) if horizon > 0 else mu
    return max(norm_lp_mu(damp * (b[:rows] - a[:rows]), first.grid, 2 * n + 4, meas)
               for a, b in zip(first.components, second.components))


class ConsistencyRow(NamedTuple):
    dt: float
    distance: float
    C: float
    weighted: float


def solver_consistency_study(params_for_grid: Callable[[Grid], ModelParams], half_width, dx, dts, T,
                             noise_seeds=None, tol=1e-8, mu: WeightedMeasure | None = None, n=0):
    """Gap between ``picard_solve`` and ``simulate`` on ``[0, T]`` for each ``dt``.

    ``params_for_grid`` builds the model on each grid (initial data depend on
    ``nx`` only, so they agree across ``dt``).  Rows are ``(dt, sup gap,
    gap/dt, weighted gap)``; the weighted gap is :func:`uniqueness_check`
    with ``mu`` (default ``alpha = 1``) and the model's ``beta``.
    """
    mu = mu or WeightedMeasure(1.0)
    rows = []
    for dt in dts:
        grid = Grid.from_spacing(half_width, dx, dt, T)
        params = params_for_grid(grid)
        noise = None
        if noise_seeds is not None:
            noise = (sample_white_noise(grid, noise_seeds[0], 1), sample_white_noise(grid, noise_seeds[1], 2))
        n1, n2 = noise if noise else (None, None)
        F1, F2 = forcing(params.m1_0, grid, n1), forcing(params.m2_0, grid, n2)
        pic = picard_solve(F1, F2, params, grid, T=T, tol=tol)
        step = simulate(params, grid, noise=noise)
        gap = max(float(np.max(np.abs(a - b))) for a, b in
                  zip(pic.trajectory.components, step.components))
        weighted = uniqueness_check(pic.trajectory, step, params.beta, mu, n=n)
        rows.append(ConsistencyRow(dt, gap, gap / dt, weighted))
    return rows

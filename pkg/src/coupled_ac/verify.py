"""Verification suites behind the CLI subcommands.

Each suite takes a :class:`~coupled_ac.config.RunConfig` and returns a
:class:`Report`: one line per check, each naming the result it tests, plus
CSV tables of the underlying numbers.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import analysis, dynamics, kernel, noise, spaces
from .config import RunConfig
from .errors import ConfigurationError, NonConvergenceError, InvariantViolationError
from .grid import CutoffSpec, Grid
from .persist import table_csv
from .spaces import WeightedMeasure


@dataclass(frozen=True)
class Check:
    lemma: str
    name: str
    value: float
    target: str
    passed: bool

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  [{self.lemma}] {self.name}: {self.value:.6g} (target {self.target})"


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def check(self, lemma, name, value, passed, target):
        self.checks.append(Check(lemma, name, float(value), target, bool(passed)))

    def table(self, name, header, rows):
        self.tables[name] = table_csv(header, rows)

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    def text(self):
        head = f"# {self.suite}: {'PASS' if self.passed else 'FAIL'} " \
               f"({sum(c.passed for c in self.checks)}/{len(self.checks)} checks)"
        return "\n".join([head, *self.notes, *(c.line() for c in self.checks)]) + "\n"

    def summary_csv(self):
        return table_csv(["suite", "lemma", "check", "value", "target", "status"],
                         [(self.suite, c.lemma, c.name, c.value, c.target, "PASS" if c.passed else "FAIL")
                          for c in self.checks])


# -- kernel -------------------------------------------------------------------------


def kernel_suite(cfg: RunConfig):
    r = Report("verify-kernel")
    lab = "heat kernel of d_t - 1/2 d_xx"
    for (t, x, y), want in (((1.0, 0.0, 0.0), 1 / math.sqrt(2 * math.pi)),
                            ((0.5, 1.0, 1.0), 1 / math.sqrt(math.pi)),
                            ((2.0, 3.0, 0.0), math.exp(-9 / 4) / math.sqrt(4 * math.pi))):
        got = kernel.eval_kernel(t, x, y)
        r.check(lab, f"H_{t}({x},{y}) error", abs(got - want), abs(got - want) <= 1e-12, "<= 1e-12")
    big = Grid(30.0, 6000, 1.0, 0)
    i0 = big.index_of(0.0)
    for t in (0.1, 1.0, 10.0):
        mass = kernel.apply_heat(np.ones(big.nx), t, big)[i0]
        r.check(lab, f"unit mass at t={t}", abs(mass - 1), abs(mass - 1) <= 1e-6, "|mass-1| <= 1e-6")
    g = Grid(10.0, 2000, 1.0, 0)
    f = kernel.eval_kernel(0.5, g.x, 0.0)
    err = np.max(np.abs(kernel.apply_heat(f, 0.5, g) - kernel.eval_kernel(1.0, g.x, 0.0)))
    r.check(lab, "semigroup H_0.5 H_0.5 = H_1 (L=10, dx=0.01)", err, err <= 1e-6, "<= 1e-6")
    gauss = np.exp(-g.x**2)
    err = np.max(np.abs(kernel.apply_heat(kernel.apply_heat(gauss, 0.3, g), 0.7, g)
                        - kernel.apply_heat(gauss, 1.0, g))[np.abs(g.x) <= 5])
    r.check(lab, "semigroup on exp(-x^2), s=0.3, t=0.7", err, err <= 1e-6, "<= 1e-6")
    lab = "kernel lemma, finite for T < inf and p < 3"
    v = kernel.kernel_lp_norm(2, 1.0) ** 2
    r.check(lab, "kernel_lp_norm(2, 1)^2 - 1/sqrt(pi)", abs(v - 1 / math.sqrt(math.pi)),
            abs(v - 1 / math.sqrt(math.pi)) <= 1e-3, "<= 1e-3")
    quad = integrate.quad(lambda t: (2 * math.pi * t) ** -0.5 / math.sqrt(2), 0, 1)[0]
    r.check(lab, "closed form vs quadrature at p=2", abs(quad - v), abs(quad - v) <= 1e-8, "<= 1e-8")
    v = kernel.kernel_lp_norm(1, 2.0)
    r.check(lab, "kernel_lp_norm(1, 2) - 2", abs(v - 2), abs(v - 2) <= 1e-12, "<= 1e-12")
    for p in (1.0, 2.0, 2.9):
        vals = [kernel.kernel_lp_norm(p, T) for T in (0.5, 1.0, 2.0)]
        ok = all(math.isfinite(a) for a in vals) and vals[0] < vals[1] < vals[2]
        r.check(lab, f"p={p} finite and increasing in T", vals[-1], ok, "finite, increasing")
    for p in (3.0, 4.0):
        v = kernel.kernel_lp_norm(p, 1.0)
        r.check(lab, f"p={p} divergence signaled", v, math.isinf(v), "inf")
    return r


# -- noise --------------------------------------------------------------------------


def noise_suite(cfg: RunConfig):
    r = Report("verify-noise")
    times = sorted(cfg.noise_times)
    grid = cfg.grid(horizon=max(times))
    lab = "white noise cell increments"
    a = noise.sample_white_noise(grid, cfg.seed, 1)
    b = noise.sample_white_noise(grid, cfg.seed, 1)
    r.check(lab, "same seed reproduces increments", 0.0 if np.array_equal(a.increments, b.increments) else 1.0,
            np.array_equal(a.increments, b.increments), "bit-identical")
    N = a.increments.size
    ratio = float(np.mean(a.increments**2) / (grid.dx * grid.dt))
    tol = 3 * math.sqrt(2 / N)
    r.check(lab, "mean w^2/(dx dt)", ratio, abs(ratio - 1) <= tol, f"1 +- {tol:.3g}")
    c = noise.sample_white_noise(grid, cfg.seed, 2)
    corr = float(np.corrcoef(a.increments.ravel(), c.increments.ravel())[0, 1])
    r.check(lab, "component 1 vs 2 correlation", abs(corr), abs(corr) <= 3 / math.sqrt(N),
            f"<= {3 / math.sqrt(N):.3g}")

    lab = "Ito isometry Var Z_t = sqrt(t/pi)"
    seeds = [cfg.seed * 1_000_003 + i for i in range(cfg.replicas)]
    idx = [grid.time_index(t) for t in times]
    z1 = noise.sample_Z_slices(seeds, grid, idx, 1)
    z2 = noise.sample_Z_slices(seeds, grid, idx, 2)
    interior = np.abs(grid.x) <= grid.half_width - 6 * math.sqrt(max(times))
    if interior.sum() < 1:
        raise ConfigurationError("half_width too small for an interior noise window")
    rows = []
    for t, s1, s2 in zip(times, z1, z2):
        q = np.mean(s1[:, interior] ** 2, axis=1)
        est, se = float(q.mean()), float(q.std(ddof=1) / math.sqrt(len(q)))
        want = noise.isometry_variance(t)
        disc = noise.discrete_Z_variance(grid, t)
        rel = est / want - 1
        r.check(lab, f"pooled interior variance at t={t}, relative error", rel, abs(rel) <= 0.05, "|rel| <= 0.05")
        cross = np.mean(s1[:, interior] * s2[:, interior], axis=1)
        cse = float(cross.std(ddof=1) / math.sqrt(len(cross)))
        r.check("independent noises", f"Cov(Z1, Z2) at t={t}", cross.mean(),
                abs(cross.mean()) <= 3 * cse, f"|.| <= 3 SE = {3 * cse:.3g}")
        rows.append((t, est, se, want, disc, rel))
    r.table("noise_variance", ["t", "mc_variance", "mc_stderr", "isometry", "discrete_exact", "rel_error"], rows)
    return r


# -- Picard -------------------------------------------------------------------------


def _picard_window(cfg: RunConfig):
    """Grid with ``picard_steps`` steps over ``T0`` for the configured data and noise.

    ``K`` is first taken over the whole configured horizon, then re-measured on
    the window grid; the window shrinks until ``T <= T0(K)`` holds there.
    """
    probe = cfg.grid()
    params = cfg.model(probe)
    n1, n2 = _noise_pair(cfg, probe)
    lam_vals = params.cutoff.values(probe)
    K = dynamics.compute_K(dynamics.forcing(params.m1_0, probe, n1),
                           dynamics.forcing(params.m2_0, probe, n2), lam_vals)
    T = min(dynamics.compute_T0(K, cfg.lam), cfg.horizon)
    for _ in range(20):
        grid = Grid(cfg.half_width, probe.nx, T / cfg.picard_steps, cfg.picard_steps)
        n1, n2 = _noise_pair(cfg, grid)
        F1, F2 = dynamics.forcing(params.m1_0, grid, n1), dynamics.forcing(params.m2_0, grid, n2)
        T0 = dynamics.compute_T0(dynamics.compute_K(F1, F2, lam_vals), cfg.lam)
        if T <= T0:
            return grid, params, F1, F2
        T = T0 * (1 - 1e-9)
    raise ConfigurationError("could not fit a Picard window inside T0")


def _noise_pair(cfg, grid):
    if not cfg.noise:
        return None, None
    return noise.sample_white_noise(grid, cfg.seed, 1), noise.sample_white_noise(grid, cfg.seed, 2)


def picard_suite(cfg: RunConfig):
    r = Report("verify-picard")
    lab = "Picard proposition, T0 = min(1/(8(K^2+1/8+lam/4)), 1/(2(12K^2+1+2lam)))"
    for (K, lam), want in (((0, 0), 0.5), ((1, 1), 1 / 30), ((0, 1), 1 / 6)):
        got = dynamics.compute_T0(K, lam)
        r.check(lab, f"T0(K={K}, lam={lam}) - {want:.6g}", abs(got - want), abs(got - want) <= 1e-15, "exact")
    grid, params, F1, F2 = _picard_window(cfg)
    zero = dynamics.picard_solve(np.zeros_like(F1), np.zeros_like(F2), params, grid, tol=cfg.tol)
    ok = zero.iterations == 1 and not np.any(zero.trajectory.m1) and not np.any(zero.trajectory.m2)
    r.check("Picard proposition, P(0,0) = (0,0) for F = 0", "iterations for F = 0", zero.iterations, ok, "1, solution 0")
    try:
        res = dynamics.picard_solve(F1, F2, params, grid, tol=cfg.tol, max_iter=cfg.max_iter)
    except (NonConvergenceError, InvariantViolationError) as exc:
        r.check("Picard proposition", f"solve on the window failed: {exc}", math.nan, False, "converges")
        return r
    r.notes.append(f"# K = {res.K:.10g}, lam = {cfg.lam}, T0 = {res.T0:.10g}, T = {res.T:.10g}, "
                   f"steps = {grid.nt}, iterations = {res.iterations}")
    r.check(lab, "configured T0", res.T0, res.T <= res.T0 * (1 + 1e-12), f"T = {res.T:.6g} <= T0")
    sup = max(np.max(np.abs(res.trajectory.m1)), np.max(np.abs(res.trajectory.m2)))
    r.check("Picard proposition, ball |m_i| <= 2K", "sup of fixed point", sup,
            sup <= 2 * res.K * (1 + dynamics.BALL_SLACK), f"<= 2K = {2 * res.K:.6g} (every iterate checked)")
    worst = max(res.ratios) if res.ratios else 0.0
    target = res.contraction_bound + 0.05
    r.check("Picard contraction, T(12K^2+1+2lam) < 1", "max successive-change ratio", worst,
            worst <= target, f"<= {target:.6g}")
    r.check("Picard proposition", "final change", res.residual_history[-1],
            res.residual_history[-1] <= cfg.tol, f"<= tol = {cfg.tol:g}")
    r.table("picard_residuals", ["iteration", "change", "ratio"],
            [(i + 1, h, (h / res.residual_history[i - 1]) if i else math.nan)
             for i, h in enumerate(res.residual_history)])
    return r


# -- lemmas -------------------------------------------------------------------------


def lemma_suite(cfg: RunConfig):
    r = Report("verify-lemmas")
    lab = "positivity lemma, int f^(2n+1) (d_t - 1/2 d_xx) f >= 0"
    weighted = WeightedMeasure(cfg.alpha, 2.0, CutoffSpec(4.0, 1.0))
    rows = []
    for fld in analysis.POSITIVITY_FAMILY:
        for n in (0, 1, 2):
            plain = analysis.check_positivity_lemma(fld, n, T=1.0)
            wval = analysis.check_positivity_lemma(fld, n, mu=weighted)
            rows.append((fld.name, n, plain, wval))
    lo_p, lo_w = min(x[2] for x in rows), min(x[3] for x in rows)
    r.check(lab, "min over family, dx dt on [0,1]", lo_p, lo_p >= -1e-6, ">= -1e-6")
    r.check(lab + " weighted", "min over family, mu_{T,Lambda} with T=2", lo_w, lo_w >= -1e-6, ">= -1e-6")
    r.table("positivity", ["field", "n", "plain", "weighted"], rows)

    lab = "monotonicity (V'(x)+bx-V'(y)-by)(x-y) >= k(x-y)^4"
    ks = [analysis.check_monotonicity(b) for b in (1, 2, 5, 10)]
    for b, k in zip((1, 2, 5, 10), ks):
        r.check(lab, f"k at beta={b}", k, k >= 0.25 - 1e-9, ">= 0.25")
    r.check(lab, "k nondecreasing in beta", min(np.diff(ks)), all(np.diff(ks) >= 0), ">= 0")

    lab = "exponential vanishing, |m| <= C T^1.5 exp(-d^2/2T)/d^2"
    cut = CutoffSpec(cfg.decay_plateau, cfg.decay_ramp)
    T = cfg.decay_horizon
    grid = cfg.grid(horizon=T)
    params = dynamics.ModelParams.constant(grid, cfg.lam, cut, 0.0, 0.0, cfg.beta)
    traj = dynamics.simulate(params, grid, seeds=(cfg.seed, cfg.seed))
    prof = analysis.decay_profile(traj, cut)
    slope = analysis.fit_decay_slope(prof, 1.0, 4.0)
    need = -0.8 / (2 * T)
    r.check(lab, "fitted slope of log sup|m| vs d^2 on d in [1,4]", slope, slope <= need, f"<= {need:.4g}")
    C = analysis.fit_decay_constant(prof, T, 1.0, 2.0)
    at3 = float(np.interp(3.0, prof[:, 0], prof[:, 1]))
    bound3 = C * float(analysis.decay_bound_shape(3.0, T))
    r.check(lab, "sup|m| at d=3 vs bound with C fitted on [1,2]", at3, at3 <= bound3, f"<= {bound3:.3g}")
    s2, s4 = (float(np.interp(d, prof[:, 0], prof[:, 1])) for d in (2.0, 4.0))
    drop = math.log(s2) - math.log(max(s4, 1e-300))
    need_drop = (16 - 4) / (2 * T) * 0.8
    r.check(lab, "log drop from d=2 to d=4", drop, drop >= need_drop or s4 < 1e-12, f">= {need_drop:.4g} or below 1e-12")
    r.table("decay_profile", ["d", "sup_abs_m"], [tuple(row) for row in prof])

    lab = "uniform L^p(mu) bound, C independent of Lambda"
    cuts = [CutoffSpec(a, cfg.cauchy_ramp) for a in cfg.cauchy_plateaus]
    grid = cfg.grid()
    _check_room(cfg, grid, cuts)
    params = cfg.model(grid)
    nz = _noise_pair(cfg, grid)
    trajs = analysis.solve_family(params, cuts, grid, noise=nz)
    mu = WeightedMeasure(cfg.alpha)
    sat = 4 * math.sqrt(grid.horizon)
    rows = []
    for p in sorted({cfg.p, 2.0}):
        norms = analysis.uniform_lp_study(cuts, p, mu, params, grid, trajectories=trajs).max(axis=1)
        med = float(np.median(norms))
        r.check(lab, f"p={p:g} max over plateaus vs 2 x median", norms.max(), norms.max() <= 2 * med,
                f"<= {2 * med:.6g}")
        late = [v for a, v in zip(cfg.cauchy_plateaus, norms) if a >= sat]
        if len(late) >= 2:
            r.check(lab, f"p={p:g} last vs first past a >= 4 sqrt(T)", late[-1], late[-1] <= 1.5 * late[0],
                    f"<= {1.5 * late[0]:.6g}")
        rows += [(p, a, v) for a, v in zip(cfg.cauchy_plateaus, norms)]
    r.table("uniform_lp", ["p", "plateau", "norm"], rows)

    lab_lp = "heat operator bounded L^p(mu) -> L^p(mu) for p > 1"
    lab_c = "heat operator bounded L^p(mu) -> C^alpha for p > 3/2"
    b = spaces.bound_heat_operator_norm(2.0, 1.0, "into_lp")
    r.check(lab_lp, "p=2, alpha=1 bounding integral finite", b.value, not b.diverges, "finite")
    r.check(lab_lp, "p=2, alpha=1 bounding integral vs 2p^2/(alpha^2 (p-1))", b.value, b.value <= 8.0, "<= 8")
    oracle = _bound_oracle_2d(2.0, 1.0)
    r.check(lab_lp, "p=2, alpha=1 bound vs 2-D quadrature", abs(b.value - oracle),
            abs(b.value - oracle) <= 1e-6 * oracle, "relative <= 1e-6")
    d1 = spaces.bound_heat_operator_norm(1.0, 1.0, "into_lp")
    r.check(lab_lp, "p=1 divergence flagged", d1.value, d1.diverges, "inf")
    d2 = spaces.bound_heat_operator_norm(1.5, 1.0, "into_c_alpha")
    r.check(lab_c, "p=3/2 divergence flagged", d2.value, d2.diverges, "inf")
    emp = analysis.empirical_operator_norms(2.0, 1.0, count=20, seed=cfg.seed)
    bc = spaces.bound_heat_operator_norm(2.0, 1.0, "into_c_alpha").value ** 0.5
    r.check(lab_lp, "20 random g, max ||Hg|| at unit norm", emp[:, 0].max(), emp[:, 0].max() <= b.value + 1e-3,
            f"<= {b.value + 1e-3:.6g}")
    r.check(lab_c, "20 random g, max ||Hg||_C^alpha at unit norm", emp[:, 1].max(),
            emp[:, 1].max() <= bc * (1 + 1e-3), f"<= {bc * (1 + 1e-3):.6g}")
    return r


def _bound_oracle_2d(p, alpha):
    """Brute-force 2-D quadrature of the L^p -> L^p bounding integral."""
    rate = alpha * alpha / (2 * p)

    def inner(t):
        s = math.sqrt(t)
        f = lambda z: 2 * math.exp(-z * z / (2 * t) + alpha * z / p) / math.sqrt(2 * math.pi * t)
        return integrate.quad(f, 0, alpha * t / p + 40 * s, limit=200)[0] * math.exp(-rate * t)

    t_max = math.log(1e12) / (alpha * alpha * (p - 1) / (2 * p * p))
    return integrate.quad(inner, 0, t_max, limit=400, epsabs=1e-12, epsrel=1e-10)[0]


def _check_room(cfg, grid, cuts):
    R = max(c.support_radius for c in cuts)
    if grid.half_width <= R:
        raise ConfigurationError(f"L > a+w violated for cutoff support {R} at half_width {grid.half_width}")


# -- Cauchy -------------------------------------------------------------------------


def cauchy_suite(cfg: RunConfig):
    r = Report("cauchy-study")
    lab = "Cauchy lemma, e^(-bt) Lambda m_Lambda Cauchy in L^p(mu) as Lambda -> 1"
    cuts = [CutoffSpec(a, cfg.cauchy_ramp) for a in cfg.cauchy_plateaus]
    grid = cfg.grid()
    _check_room(cfg, grid, cuts)
    params = cfg.model(grid)
    mu = WeightedMeasure(cfg.alpha)
    dist = analysis.cutoff_cauchy_study(cuts, cfg.p, max(cfg.beta, 1.0), mu, params, grid,
                                        noise=_noise_pair(cfg, grid))
    d = dist.max(axis=1)
    r.notes.append(f"# alpha = {cfg.alpha}, p = {cfg.p:g}, beta = {max(cfg.beta, 1.0)}, noise = {cfg.noise}, "
                   f"plateaus = {', '.join(f'{a:g}' for a in cfg.cauchy_plateaus)}")
    r.check(lab, "final consecutive distance", d[-1], d[-1] <= 1e-3, "<= 1e-3")
    sat = 4 * math.sqrt(grid.horizon)
    late = [v for a, v in zip(cfg.cauchy_plateaus[1:], d) if a > sat]
    worst = max((b / a for a, b in zip(late, late[1:]) if a > 0), default=0.0)
    r.check(lab, "largest growth factor past saturation", worst, worst <= 1.1, "<= 1.1")
    r.table("cauchy", ["plateau_from", "plateau_to", "distance_m1", "distance_m2"],
            [(a, b, *row) for a, b, row in zip(cfg.cauchy_plateaus, cfg.cauchy_plateaus[1:], dist)])
    return r


# -- uniqueness ---------------------------------------------------------------------


def uniqueness_suite(cfg: RunConfig):
    r = Report("uniqueness")
    mu = WeightedMeasure(cfg.alpha)
    beta = max(cfg.beta, 1.0)
    grid, params, F1, F2 = _picard_window(cfg)
    lab = "uniqueness, e^(-bt) m = e^(-bt) m' in L^(2n+4)(mu)"
    a = dynamics.picard_solve(F1, F2, params, grid, tol=cfg.tol, max_iter=cfg.max_iter)
    b = dynamics.picard_solve(F1, F2, params, grid, tol=cfg.tol, max_iter=cfg.max_iter, init="forcing")
    dist = analysis.uniqueness_check(a.trajectory, b.trajectory, beta, mu, n=cfg.n)
    r.check(lab, "Picard from (0,0) vs from (Lambda F1, Lambda F2)", dist, dist <= 10 * cfg.tol,
            f"<= 10 tol = {10 * cfg.tol:g}")

    T = min(a.T0, 0.1)
    dts = sorted(cfg.consistency_dts, reverse=True)
    fit = [dt for dt in dts if dt <= T]
    if len(fit) < 2:
        r.check(lab, f"Picard vs stepper: fewer than two dt fit the window {T:.4g}", len(fit), False, ">= 2 step sizes")
        return r
    T = math.floor(T / fit[0] + 1e-9) * fit[0]
    seeds = (cfg.seed, cfg.seed) if cfg.noise else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rows = analysis.solver_consistency_study(lambda g: cfg.model(g), cfg.half_width, cfg.dx, fit, T,
                                                 noise_seeds=seeds, tol=cfg.tol, mu=mu, n=cfg.n)
    Cs = [row.C for row in rows]
    r.notes.append(f"# Picard vs stepper on [0, {T:.6g}], dt from {fit[0]:g} to {fit[-1]:g}")
    r.check(lab, "Picard vs stepper, C = sup gap / dt at finest dt", Cs[-1], Cs[-1] <= 2 * Cs[0],
            f"<= 2 C(coarsest) = {2 * Cs[0]:.6g}")
    W = [row.weighted / row.dt for row in rows]
    r.check(lab, "Picard vs stepper, weighted gap / dt at finest dt", W[-1], W[-1] <= 2 * W[0],
            f"<= {2 * W[0]:.6g}")
    r.table("consistency", ["dt", "sup_gap", "C", "weighted_gap"], [tuple(row) for row in rows])
    return r


SUITES = {
    "verify-kernel": kernel_suite,
    "verify-noise": noise_suite,
    "verify-picard": picard_suite,
    "verify-lemmas": lemma_suite,
    "cauchy-study": cauchy_suite,
    "uniqueness": uniqueness_suite,
}

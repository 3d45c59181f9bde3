import numpy as np
import pytest
from scipy import integrate

from coupled_ac.analysis import (POSITIVITY_FAMILY, TestField, check_monotonicity, check_positivity_lemma,
                                 cutoff_cauchy_study, decay_bound_shape, decay_profile, fit_decay_constant,
                                 fit_decay_slope, solve_family, solver_consistency_study, uniform_lp_study,
                                 uniqueness_check)
from coupled_ac.dynamics import ModelParams, V_prime, simulate, simulate_single
from coupled_ac.errors import ConfigurationError, DomainError
from coupled_ac.grid import CutoffSpec, Grid
from coupled_ac.noise import sample_white_noise
from coupled_ac.spaces import WeightedMeasure, norm_lp_mu

TestField.__test__ = False  # a NamedTuple, not a test class

# -- positivity lemma ------------------------------------------------------------


def test_family_has_ten_members_vanishing_at_t0():
    assert len(POSITIVITY_FAMILY) == 10
    x = np.linspace(-5, 5, 101)
    for fld in POSITIVITY_FAMILY:
        assert np.max(np.abs(fld.f(x, 0.0))) == 0.0


@pytest.mark.parametrize("fld", POSITIVITY_FAMILY, ids=lambda f: f.name)
def test_family_derivatives_match_finite_differences(fld):
    x = np.linspace(-3, 3, 13)
    t, h = 0.6, 1e-4
    ft = (fld.f(x, t + h) - fld.f(x, t - h)) / (2 * h)
    fxx = (fld.f(x + h, t) - 2 * fld.f(x, t) + fld.f(x - h, t)) / h**2
    assert np.allclose(fld.f_t(x, t), ft, atol=1e-6)
    assert np.allclose(fld.f_xx(x, t), fxx, atol=1e-4)


def test_zero_field_gives_zero():
    zero = TestField("zero", lambda x, t: 0 * x * t, lambda x, t: 0 * x * t, lambda x, t: 0 * x * t)
    assert check_positivity_lemma(zero, 0) == 0.0


def test_positivity_matches_high_resolution_oracle():
    fld = POSITIVITY_FAMILY[0]
    assert fld.name.startswith("t*exp(-x^2)")
    got = check_positivity_lemma(fld, 0, T=1.0)
    want = integrate.dblquad(lambda x, t: fld.f(x, t) * (fld.f_t(x, t) - 0.5 * fld.f_xx(x, t)),
                             0, 1, -8, 8, epsabs=1e-12)[0]
    assert want > 0
    assert got == pytest.approx(want, rel=1e-5)
    assert got >= -1e-6


def test_weighted_positivity_example():
    fld = next(f for f in POSITIVITY_FAMILY if f.name.startswith("sin(t)"))
    mu = WeightedMeasure(1.0, horizon=2.0, cutoff=CutoffSpec(4.0, 1.0))
    assert check_positivity_lemma(fld, 1, mu=mu) >= -1e-6


@pytest.mark.parametrize("n", [0, 1, 2])
def test_positivity_whole_family(n):
    mu = WeightedMeasure(1.0, horizon=2.0, cutoff=CutoffSpec(4.0, 1.0))
    for fld in POSITIVITY_FAMILY:
        assert check_positivity_lemma(fld, n, T=1.0) >= -1e-6, fld.name
        assert check_positivity_lemma(fld, n, mu=mu) >= -1e-6, fld.name


def test_positivity_preconditions():
    bad = TestField("one", lambda x, t: 1 + 0 * x * t, lambda x, t: 0 * x, lambda x, t: 0 * x)
    with pytest.raises(DomainError):
        check_positivity_lemma(bad, 0)
    with pytest.raises(DomainError):
        check_positivity_lemma(POSITIVITY_FAMILY[0], -1)


# -- monotonicity -----------------------------------------------------------------


def test_monotonicity_constant():
    ks = [check_monotonicity(b) for b in (1, 2, 5, 10)]
    assert all(k >= 0.25 - 1e-9 for k in ks)
    assert all(a <= b for a, b in zip(ks, ks[1:]))
    with pytest.raises(DomainError):
        check_monotonicity(0.5)


def test_monotonicity_pointwise_identity():
    # (x²+xy+y²-1+β) - ¼(x-y)² - (β-1) = ¾(x+y)² >= 0
    s = np.linspace(-5, 5, 201)
    x, y = np.meshgrid(s, s)
    beta = 2.0
    lhs = (V_prime(x) + beta * x - V_prime(y) - beta * y) * (x - y)
    assert np.all(lhs >= (x - y) ** 2 * (0.25 * (x - y) ** 2 + 1) - 1e-9)


def test_monotonicity_skips_diagonal():
    # with only two sample points the diagonal pairs would give 0/0
    assert np.isfinite(check_monotonicity(1.0, sample_count=2))


# -- decay ------------------------------------------------------------------------


@pytest.fixture(scope="module")
def decay_run():
    cut = CutoffSpec(1.0, 0.5)
    grid = Grid.from_spacing(14.0, 0.04, 0.005, 0.5)
    params = ModelParams.constant(grid, 1.0, cut, 0.0, 0.0)
    return cut, simulate(params, grid, seeds=(11, 11))


def test_decay_zero_run():
    cut = CutoffSpec(1.0, 0.5)
    grid = Grid.from_spacing(14.0, 0.1, 0.01, 0.5)
    traj = simulate(ModelParams.constant(grid, 1.0, cut, 0.0, 0.0), grid)
    assert not np.any(decay_profile(traj, cut)[:, 1])


def test_decay_grid_too_small():
    cut = CutoffSpec(1.0, 0.5)
    grid = Grid.from_spacing(6.0, 0.1, 0.01, 0.1)
    traj = simulate(ModelParams.constant(grid, 1.0, cut, 0.0, 0.0), grid)
    with pytest.raises(ConfigurationError):
        decay_profile(traj, cut)


def test_decay_slope_and_bound(decay_run):
    cut, traj = decay_run
    T = traj.grid.horizon
    prof = decay_profile(traj, cut)
    assert np.all(np.diff(prof[:, 0]) > 0)
    assert fit_decay_slope(prof, 1.0, 4.0) <= -0.8 / (2 * T)
    C = fit_decay_constant(prof, T, 1.0, 2.0)
    at3 = np.interp(3.0, prof[:, 0], prof[:, 1])
    assert at3 <= C * decay_bound_shape(3.0, T)
    s2, s4 = np.interp([2.0, 4.0], prof[:, 0], prof[:, 1])
    assert s4 < 1e-12 or np.log(s2) - np.log(s4) >= (16 - 4) / (2 * T) * 0.8


def test_decay_profile_at_selected_times(decay_run):
    cut, traj = decay_run
    full = decay_profile(traj, cut)
    last = decay_profile(traj, cut, times=[traj.grid.horizon])
    assert np.all(last[:, 1] <= full[:, 1])


# -- families of cutoffs -------------------------------------------------------------


@pytest.fixture(scope="module")
def family_setup():
    grid = Grid.from_spacing(12.0, 0.05, 0.01, 0.5)
    params = ModelParams.constant(grid, 1.0, CutoffSpec(1.0, 1.0), 0.0, 0.0)
    noise = (sample_white_noise(grid, 5, 1), sample_white_noise(grid, 6, 2))
    cuts = [CutoffSpec(a, 1.0) for a in (1.0, 2.0, 4.0, 8.0)]
    return grid, params, noise, cuts


def test_uniform_lp_zero_and_bounded(family_setup):
    grid, params, noise, cuts = family_setup
    mu = WeightedMeasure(1.0)
    assert not np.any(uniform_lp_study(cuts, 4, mu, params, grid))
    for p in (2, 4):
        norms = uniform_lp_study(cuts, p, mu, params, grid, noise=noise).max(axis=1)
        assert norms.max() <= 2 * np.median(norms)
        assert norms[-1] <= 1.5 * norms[2]


def test_non_nested_cutoffs_rejected(family_setup):
    grid, params, noise, _ = family_setup
    cuts = [CutoffSpec(4.0, 1.0), CutoffSpec(2.0, 1.0)]
    with pytest.raises(ConfigurationError):
        uniform_lp_study(cuts, 4, WeightedMeasure(1.0), params, grid)
    with pytest.raises(ConfigurationError):
        cutoff_cauchy_study(cuts, 4, 1.0, WeightedMeasure(1.0), params, grid)


def test_cauchy_identical_cutoffs_and_beta(family_setup):
    grid, params, noise, _ = family_setup
    cuts = [CutoffSpec(2.0, 1.0)] * 2
    d = cutoff_cauchy_study(cuts, 4, 1.0, WeightedMeasure(1.0), params, grid, noise=noise)
    assert d.shape == (1, 2) and not np.any(d)
    with pytest.raises(DomainError):
        cutoff_cauchy_study(cuts, 4, 0.5, WeightedMeasure(1.0), params, grid)


def test_cauchy_distances_decay_geometrically_under_noise(family_setup):
    grid, params, noise, cuts = family_setup
    d = cutoff_cauchy_study(cuts, 4, 1.0, WeightedMeasure(1.0), params, grid, noise=noise).max(axis=1)
    assert np.all(np.diff(d) < 0)
    # the gap sits where Λ_n ramps down, so it carries the weight e^{-α a_n / p}
    ratio = d[2] / d[1]
    assert ratio == pytest.approx(np.exp(-(4.0 - 2.0) / 4), rel=0.3)


def test_cauchy_localized_data_converges():
    grid = Grid.from_spacing(16.0, 0.05, 0.01, 1.0)
    params = ModelParams(1.0, CutoffSpec(1.0, 1.0), 0.5 * np.exp(-grid.x**2), -0.3 * np.exp(-grid.x**2))
    cuts = [CutoffSpec(a, 1.0) for a in (2.0, 4.0, 6.0, 8.0)]
    d = cutoff_cauchy_study(cuts, 4, 1.0, WeightedMeasure(1.0), params, grid).max(axis=1)
    assert d[-1] <= 1e-3
    assert np.all(np.diff(d) < 0)


def test_cauchy_decoupled_matches_single_equation(family_setup):
    grid, _, noise, cuts = family_setup
    m0 = 0.3 * np.exp(-grid.x**2)
    params = ModelParams(0.0, cuts[0], m0, np.zeros(grid.nx))
    mu = WeightedMeasure(1.0)
    d = cutoff_cauchy_study(cuts[:2], 4, 1.0, mu, params, grid, noise=noise)
    singles = [c.values(grid) * simulate_single(m0, c, grid, noise[0]) for c in cuts[:2]]
    damp = np.exp(-grid.times)[:, None]
    assert d[0, 0] == norm_lp_mu(damp * (singles[1] - singles[0]), grid, 4, mu)


# -- uniqueness ----------------------------------------------------------------------


def test_uniqueness_identical_source(family_setup):
    grid, params, noise, cuts = family_setup
    traj = solve_family(params, cuts[:1], grid, noise)[0]
    assert uniqueness_check(traj, traj, 1.0, WeightedMeasure(1.0)) == 0.0


def test_uniqueness_rejects_mismatch(family_setup):
    grid, params, _, _ = family_setup
    a = simulate(params, grid, seeds=(1, 1))
    b = simulate(params, grid, seeds=(2, 2))
    with pytest.raises(ConfigurationError):
        uniqueness_check(a, b, 1.0, WeightedMeasure(1.0))
    other = Grid.from_spacing(12.0, 0.1, 0.01, 0.5)
    c = simulate(ModelParams.constant(other, 1.0, CutoffSpec(1.0, 1.0), 0.0, 0.0), other)
    with pytest.raises(ConfigurationError):
        uniqueness_check(a, c, 1.0, WeightedMeasure(1.0))


def test_solver_consistency_is_first_order():
    cut = CutoffSpec(2.0, 1.0)
    make = lambda g: ModelParams(1.0, cut, 0.2 * np.exp(-g.x**2), -0.2 * np.exp(-g.x**2 / 2))
    rows = solver_consistency_study(make, 8.0, 0.02, [2**-6, 2**-7, 2**-8, 2**-9], 2**-4)
    C = [r.C for r in rows]
    assert max(C) <= 2 * min(C)
    assert all(r.weighted <= r.distance * 10 for r in rows)
    assert rows[-1].distance < rows[0].distance / 4

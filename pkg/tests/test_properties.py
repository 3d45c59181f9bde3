import numpy as np
from hypothesis import given, settings, strategies as st

from coupled_ac.config import RunConfig, emit_config, parse_config
from coupled_ac.dynamics import V_prime, compute_T0, contraction_bound, drift, stability_bound
from coupled_ac.grid import Grid
from coupled_ac.kernel import apply_heat, eval_kernel
from coupled_ac.spaces import WeightedMeasure, norm_lp_mu

finite = st.floats(-20, 20, allow_nan=False)
positive = st.floats(1e-3, 10, allow_nan=False)
GRID = Grid(6.0, 120, 0.05, 4)


@given(positive, finite, finite)
def test_kernel_symmetric_and_positive(t, x, y):
    assert eval_kernel(t, x, y) == eval_kernel(t, y, x)
    assert eval_kernel(t, x, y) >= 0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 2.0), st.lists(st.floats(-3, 3), min_size=120, max_size=120))
def test_heat_cells_is_sup_contractive(t, values):
    f = np.array(values)
    out = apply_heat(f, t, GRID, cells=True)
    assert np.max(np.abs(out)) <= np.max(np.abs(f)) + 1e-12


@given(finite, finite, st.floats(1, 50))
def test_monotonicity_identity(x, y, beta):
    lhs = (V_prime(x) + beta * x - V_prime(y) - beta * y) * (x - y)
    # the gap to the bound is (β-1)(x-y)² + ¾(x+y)²(x-y)²
    rhs = (x - y) ** 2 * (0.25 * (x - y) ** 2 + beta - 1)
    assert lhs >= rhs - 1e-9 * (1 + abs(lhs))


@given(finite, finite, st.floats(0, 10))
def test_drift_swap_symmetry(a, b, lam):
    d1, d2 = drift(a, b, lam)
    e1, e2 = drift(b, a, lam)
    assert d1 == e2 and d2 == e1


@given(st.floats(0, 100), st.floats(0, 100))
def test_T0_contracts_by_half(K, lam):
    T0 = compute_T0(K, lam)
    assert 0 < T0 and contraction_bound(K, lam, T0) <= 0.5 + 1e-12


@given(st.floats(0, 50), st.floats(0, 10))
def test_stability_bound_decreasing(M, lam):
    assert stability_bound(M + 1, lam) < stability_bound(M, lam)
    assert stability_bound(M, lam + 1) < stability_bound(M, lam)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3), st.floats(1, 6), st.floats(1e-3, 5) | st.floats(-5, -1e-3) | st.just(0.0),
       st.integers(0, 2**32 - 1))
def test_lp_mu_homogeneous_and_monotone(alpha, p, c, seed):
    m = np.random.default_rng(seed).normal(size=(GRID.nt + 1, GRID.nx))
    mu = WeightedMeasure(alpha)
    base = norm_lp_mu(m, GRID, p, mu)
    assert np.isclose(norm_lp_mu(c * m, GRID, p, mu), abs(c) * base, rtol=1e-10, atol=0)
    assert norm_lp_mu(2 * np.abs(m) + 1, GRID, p, mu) >= base


@given(st.floats(0, 10, allow_nan=False), st.integers(0, 2**63), st.booleans(),
       st.lists(st.floats(0.5, 20, allow_nan=False), min_size=1, max_size=5))
def test_config_round_trip(lam, seed, noise, plateaus):
    cfg = RunConfig.defaults().replace(lam=lam, seed=seed, noise=noise, cauchy_plateaus=tuple(plateaus))
    assert parse_config(emit_config(cfg)) == cfg

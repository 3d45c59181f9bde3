import math

import numpy as np
import pytest
from scipy import integrate

from coupled_ac.errors import DomainError
from coupled_ac.grid import Grid
from coupled_ac.kernel import (apply_heat, eval_kernel, heat_taps, kernel_lp_norm, spacetime_convolve,
                               spacetime_convolve_all)


@pytest.mark.parametrize("t, x, y, want", [
    (1.0, 0.0, 0.0, 0.398942280401),
    (0.5, 1.0, 1.0, 0.564189583548),
    (2.0, 3.0, 0.0, 0.029732),
])
def test_eval_kernel_values(t, x, y, want):
    assert eval_kernel(t, x, y) == pytest.approx(want, abs=1e-6)


def test_eval_kernel_matches_formula_and_is_symmetric():
    x = np.linspace(-3, 3, 13)
    y = 0.37
    assert np.allclose(eval_kernel(0.7, x, y), np.exp(-(x - y) ** 2 / 1.4) / np.sqrt(1.4 * np.pi))
    assert np.array_equal(eval_kernel(0.7, x, y), eval_kernel(0.7, y, x))


@pytest.mark.parametrize("t", [0.0, -1.0])
def test_eval_kernel_rejects_nonpositive_time(t):
    with pytest.raises(DomainError):
        eval_kernel(t, 0.0, 0.0)


def test_kernel_semigroup_by_quadrature():
    # H_2(3, 0) = ∫ H_1(3, z) H_1(z, 0) dz
    val = integrate.quad(lambda z: eval_kernel(1.0, 3.0, z) * eval_kernel(1.0, z, 0.0), -np.inf, np.inf)[0]
    assert val == pytest.approx(eval_kernel(2.0, 3.0, 0.0), rel=1e-10)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_unit_mass(t):
    grid = Grid(30.0, 6000, 1.0, 0)
    out = apply_heat(np.ones(grid.nx), t, grid)
    assert abs(out[grid.index_of(0.0)] - 1) <= 1e-6


def test_apply_heat_zero_and_errors():
    grid = Grid(5.0, 200, 0.1, 1)
    assert not np.any(apply_heat(np.zeros(grid.nx), 0.3, grid))
    with pytest.raises(DomainError):
        apply_heat(np.ones(grid.nx), 0.0, grid)


def test_apply_heat_semigroup_point_source():
    grid = Grid(10.0, 2000, 1.0, 0)
    f = eval_kernel(0.5, grid.x, 0.0)
    err = np.max(np.abs(apply_heat(f, 0.5, grid) - eval_kernel(1.0, grid.x, 0.0)))
    assert err <= 1e-6


def test_apply_heat_semigroup_composition():
    grid = Grid(10.0, 1000, 1.0, 0)
    f = np.exp(-grid.x**2) * np.cos(grid.x)
    two = apply_heat(apply_heat(f, 0.25, grid), 0.5, grid)
    one = apply_heat(f, 0.75, grid)
    assert np.max(np.abs(two - one)[np.abs(grid.x) < 6]) <= 1e-6


def test_apply_heat_batches_over_leading_axes():
    grid = Grid(4.0, 80, 0.1, 1)
    rng = np.random.default_rng(0)
    f = rng.normal(size=(3, grid.nx))
    batched = apply_heat(f, 0.2, grid)
    for row, out in zip(f, batched):
        assert np.array_equal(apply_heat(row, 0.2, grid), out)


def test_cell_taps_are_kernel_mass():
    taps = heat_taps(0.01, 0.05, cells=True)
    assert taps.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.all(taps >= 0)
    assert taps[len(taps) // 2] == taps.max()


def test_under_resolved_kernel_warns():
    grid = Grid(1.0, 20, 0.1, 1)
    with pytest.warns(RuntimeWarning):
        apply_heat(np.ones(grid.nx), 1e-4, grid)


def test_spacetime_convolve_zero_and_constant():
    grid = Grid.from_spacing(10.0, 0.05, 0.01, 1.0)
    g = np.zeros((grid.nt + 1, grid.nx))
    assert not np.any(spacetime_convolve(g, grid, grid.nt))
    g[:] = 1.0
    out = spacetime_convolve(g, grid, grid.nt)
    assert abs(out[grid.index_of(0.0)] - 1.0) <= grid.dt


def test_spacetime_convolve_gaussian_against_quadrature():
    # H_τ e^{-y²} = e^{-x²/(1+2τ)} / sqrt(1+2τ), then integrate τ over [0, 1/2]
    grid = Grid.from_spacing(6.0, 0.02, 2.5e-4, 0.5)
    g = np.tile(np.exp(-grid.x**2), (grid.nt + 1, 1))
    out = spacetime_convolve(g, grid, grid.nt)
    for x in (0.0, 0.5, 1.3):
        want = integrate.quad(lambda s: np.exp(-x * x / (1 + 2 * s)) / np.sqrt(1 + 2 * s), 0, 0.5)[0]
        assert abs(out[grid.index_of(x)] - want) <= 1e-4


def test_spacetime_convolve_all_matches_single_slices():
    grid = Grid.from_spacing(5.0, 0.1, 0.05, 0.5)
    rng = np.random.default_rng(1)
    g = rng.normal(size=(grid.nt + 1, grid.nx))
    full = spacetime_convolve_all(g, grid)
    assert not np.any(full[0])
    for k in (1, 4, grid.nt):
        assert np.allclose(full[k], spacetime_convolve(g, grid, k), atol=1e-13)
    with pytest.raises(IndexError):
        spacetime_convolve(g, grid, grid.nt + 1)


def test_kernel_lp_norm_values():
    assert kernel_lp_norm(2, 1.0) == pytest.approx(0.751126, abs=1e-6)
    assert kernel_lp_norm(2, 1.0) ** 2 == pytest.approx(1 / math.sqrt(math.pi), abs=1e-12)
    assert kernel_lp_norm(1, 2.0) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("p", [1.3, 2.0, 2.5])
def test_kernel_lp_norm_against_quadrature(p):
    T = 0.8

    def inner(t):
        return integrate.quad(lambda z: eval_kernel(t, z, 0.0) ** p, -np.inf, np.inf)[0]

    val = integrate.quad(inner, 0, T, limit=200)[0]
    assert kernel_lp_norm(p, T) == pytest.approx(val ** (1 / p), rel=1e-6)


@pytest.mark.parametrize("p", [1.0, 2.0, 2.9])
def test_kernel_lp_norm_finite_and_increasing(p):
    vals = [kernel_lp_norm(p, T) for T in (0.1, 1.0, 10.0)]
    assert all(math.isfinite(v) for v in vals)
    assert vals[0] < vals[1] < vals[2]


@pytest.mark.parametrize("p", [3.0, 4.0])
def test_kernel_lp_norm_diverges(p):
    assert math.isinf(kernel_lp_norm(p, 1.0))


def test_kernel_lp_norm_domain():
    with pytest.raises(DomainError):
        kernel_lp_norm(0.5, 1.0)
    with pytest.raises(DomainError):
        kernel_lp_norm(2.0, 0.0)

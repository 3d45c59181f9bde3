"""
Variance of the stochastic convolution
======================================

``Z_t = ∫_0^t H_{t-s} dW_s`` has ``Var Z_t(x) = sqrt(t / pi)`` on the line.
We estimate it from independent replicas away from the domain edges and show
the discretization bias shrinking as the grid is refined.
"""
import numpy as np

from coupled_ac import Grid, isometry_variance
from coupled_ac.noise import discrete_Z_variance, sample_Z_slices

times = (0.25, 0.5, 1.0)
seeds = range(400)

for dx, dt in ((0.05, 0.005), (0.025, 0.00125)):
    grid = Grid.from_spacing(10.0, dx, dt, 1.0)
    idx = [grid.time_index(t) for t in times]
    z = sample_Z_slices(list(seeds), grid, idx, component=1)
    inner = np.abs(grid.x) <= 4.0
    print(f"\ndx = {dx}, dt = {dt}")
    print(" t      Monte Carlo  exact discrete  sqrt(t/pi)")
    for t, zt in zip(times, z):
        mc = np.mean(zt[:, inner] ** 2)
        print(f" {t:<6g} {mc:.5f}      {discrete_Z_variance(grid, t):.5f}         {isometry_variance(t):.5f}")

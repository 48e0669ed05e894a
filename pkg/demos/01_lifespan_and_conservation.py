"""Smooth data: lifespan, size estimate and the two Hamiltonians.

Runs u0 = v0 = 0.3 cos x + 0.1 sin 2x up to the guaranteed lifespan and then
keeps going (override) to see how far the size bound is from being sharp.
Smooth data of this kind steepen and break near t = 1.8, which the blow-up
monitor reports.

    python demos/01_lifespan_and_conservation.py
"""

import numpy as np

from peakon_lab import BlowUpError, SolveConfig, lifespan, size_estimate_check, solve, sobolev_norm
from peakon_lab.integrator import standard_data
from peakon_lab.spectral import PeriodicGrid

grid = PeriodicGrid(128)
u0, v0 = standard_data(grid)
cfg = SolveConfig()

T = lifespan(sobolev_norm(u0, cfg.s), sobolev_norm(v0, cfg.s), cfg.c_s, cfg.delta0)
print(f"|u0|_H3 = {sobolev_norm(u0, 3):.4f}, guaranteed lifespan T = {T:.5f} (C_s = {cfg.c_s})")

traj = solve(u0, v0, cfg)
rep = size_estimate_check(traj, cfg)
h1, h2 = traj["H1"], traj["H2"]
print(f"on [0, T]: size ratio max {rep.max_ratio:.3f}, "
      f"H1 drift {np.ptp(h1) / abs(h1[0]):.1e}, H2 drift {np.ptp(h2) / abs(h2[0]):.1e}")

# Past the lifespan nothing is guaranteed; watch the H^(s-1) norm grow.
long = SolveConfig(t_final=2.5, override_lifespan=True, record_every=10)
try:
    traj = solve(u0, v0, long)
except BlowUpError as exc:
    print(f"blow-up flagged at t = {exc.time:.3f}: {exc}")
    traj = exc.trajectory
for t, n in zip(traj.times[::5], traj["norm_UV_Hs1"][::5]):
    print(f"  t = {t:5.2f}   |(U, V)|_H2 = {n:9.3f}")

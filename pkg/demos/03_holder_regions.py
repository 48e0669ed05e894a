"""Hoelder exponents across the (s, r) plane and a few empirical slopes.

Prints a coarse text map of the regions A1..A6, then runs one sweep per
representative point. The runs last half of the uniform lifespan, which is
short, so measured slopes sit near 1 everywhere; they are lower-bound checks,
not sharpness tests.

    python demos/03_holder_regions.py
"""

import numpy as np

from peakon_lab import SolveConfig, classify_gamma, holder_sweep
from peakon_lab.integrator import standard_data
from peakon_lab.spectral import PeriodicGrid

print("region map (rows: r from high to low, columns: s in (2.5, 4])")
svals = np.linspace(2.55, 4.0, 30)
for r in np.linspace(3.8, -1.0, 17):
    row = ""
    for s in svals:
        row += classify_gamma(s, r).region[1] if r < s else "."
    print(f"r = {r:5.2f}  {row}")

grid = PeriodicGrid(128)
u0, v0 = standard_data(grid)
for s, r in ((3.0, 1.75), (2.75, 2.0), (2.6, 0.2), (2.9, 1.45)):
    res = holder_sweep(u0, v0, s, r, np.logspace(-4, -1, 4), SolveConfig())
    print(f"(s, r) = ({s}, {r}): {res.predicted.region}, gamma = {res.predicted.exponent:.3f}, "
          f"slope = {res.slope:.4f}, horizon = {res.horizon:.4f}")

"""
Hypervolume two ways
====================

The exact sweep and the random-scalarization estimate should agree to a
few Monte Carlo standard errors.
"""

import numpy as np

from comboo import cm_constant, hypervolume_exact, hypervolume_mc, pareto_front

rng = np.random.default_rng(1)
Y = rng.uniform(0, 1, (25, 3))
z = np.zeros(3)

front = pareto_front(Y)
print(f"{len(front)} of {len(Y)} points are non-dominated")

exact = hypervolume_exact(Y, z)
est, se = hypervolume_mc(Y, z, 100_000, rng, return_stderr=True)
print(f"exact {exact:.5f}   mc {est:.5f} +/- {se:.5f}   ({abs(est - exact) / se:.2f} SE)")

# the scaling constant is the volume of the unit ball in the positive orthant
for m in (1, 2, 3, 4):
    print(f"c_{m} = {cm_constant(m):.6f}")

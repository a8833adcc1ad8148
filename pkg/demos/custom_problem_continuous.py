"""
A user-defined problem in discretized-continuous mode
=====================================================

Any callable returning ``(F, G)`` can be wrapped as a problem. In
discretized-continuous mode the confidence bounds are read off a lattice
that refines with the round index.
"""

import numpy as np

from comboo import Matern, RunConfig, make_problem, run
from comboo.engine import round_grid


def evaluator(X):
    F = np.stack([-(X[:, 0] - 0.2) ** 2 - X[:, 1], -(X[:, 0] - 0.8) ** 2 - (1 - X[:, 1])], axis=1)
    G = (0.9 - X.sum(axis=1) * 0.5)[:, None]  # feasible below the anti-diagonal
    return F, G


problem = make_problem("bowl", evaluator, d=2, m=2, c=1, bounds=[[0, 1], [0, 1]],
                       noise_sd_f=0.02, noise_sd_g=0.02, known_feasible=True)

for t in (1, 5, 20):
    print(f"round {t}: lattice of {len(round_grid(problem, t))} points")

kern = Matern(2.5, 0.3)
config = RunConfig(T=15, z=(-1.5, -1.5), kernels_f=[kern] * 2, kernels_g=[kern],
                   n_init=4, resolution=21, mode="discretized-continuous")
records = run(problem, config, np.random.default_rng(0))
feasible = [r for r in records if r.feasible_true]
print(f"{len(feasible)}/{len(records)} queries were feasible")
print("last query", records[-1].x, "objectives", np.round(records[-1].F_true, 3))

"""
Declaring infeasibility
=======================

When every constraint UCB drops below zero the optimiser stops and
reports that no feasible point exists. The fixture below has g = -1
everywhere.
"""

import numpy as np

from comboo import BetaSchedule, Matern, RunConfig, get_problem, run

problem = get_problem("infeasible_toy")
kern = Matern(2.5, 0.2)
config = RunConfig(T=60, z=(-2.1, -2.3), kernels_f=[kern] * 2, kernels_g=[kern],
                   beta=BetaSchedule("experimental", coef=0.4, scale=4.0), resolution=[5, 2])

for seed in range(3):
    records = run(problem, config, np.random.default_rng(seed))
    last = records[-1]
    print(f"seed {seed}: declared={last.declared} at round {last.round} "
          f"after {sum(r.queried for r in records)} queries, max min-UCB {last.max_min_ucb:.3f}")

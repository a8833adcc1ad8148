"""
Gaussian process posterior and confidence bounds
================================================

Fit a zero-mean GP to a handful of noisy observations of a 1-D function
and look at the optimistic and pessimistic envelopes the optimiser uses.
"""

import numpy as np

from comboo import Matern, confidence_bounds, fit_posterior, information_gain

rng = np.random.default_rng(0)

# a smooth function observed at six random points
def h(x):
    return np.sin(6 * x) + 0.5 * x

X = rng.uniform(0, 1, (6, 1))
y = h(X[:, 0]) + 0.05 * rng.standard_normal(6)

kernel = Matern(nu=2.5, lengthscales=0.2, amplitude=1.0)
model = fit_posterior(kernel, 0.05**2, X, y)

###############################################################################
# Bounds on a probe grid. The true function should sit between lcb and ucb
# almost everywhere for a moderate beta.
grid = np.linspace(0, 1, 11)[:, None]
cb = confidence_bounds(model, grid, beta=4.0)
print(" x      lcb     h(x)    ucb")
for x, lo, hi in zip(grid[:, 0], cb.lcb, cb.ucb):
    print(f"{x:4.1f} {lo:7.3f} {h(x):7.3f} {hi:7.3f}")

###############################################################################
# The information gain of the observed set grows slowly as points cluster.
print("information gain of the data:", round(information_gain(kernel, 0.05**2, X), 3))

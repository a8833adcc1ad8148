"""Constrained multi-objective Bayesian optimization (COMBOO).

Quick start::

    import numpy as np
    from comboo import get_problem, RunConfig, BetaSchedule, Matern, run

    problem = get_problem("toy")
    kern = Matern(2.5, 0.2)
    cfg = RunConfig(T=30, z=(-2.1, -2.3), kernels_f=[kern] * 2, kernels_g=[kern] * 2,
                    beta=BetaSchedule("experimental", 0.4, 4.0), n_init=10, resolution=51)
    records = run(problem, cfg, np.random.default_rng(0))
"""

from comboo.engine import (
    BetaSchedule,
    RunConfig,
    RunState,
    acquisition_value,
    beta_value,
    comboo_step,
    optimistic_feasible_set,
    run,
    select_candidate,
)
from comboo.errors import ConfigError, InputError, NumericalError, UnsupportedError
from comboo.gp import (
    RBF,
    ConfidenceBound,
    DiscretizationGrid,
    Matern,
    PosteriorModel,
    Tanimoto,
    confidence_bounds,
    fit_posterior,
    information_gain,
    kernel_eval,
    log_marginal_likelihood,
    modified_confidence_bounds,
    posterior_mean_var,
)
from comboo.metrics import MetricSeries, compute_series, random_search_run, simple_violation, summarize
from comboo.problems import (
    ProblemSpec,
    candidate_grid,
    evaluate,
    get_problem,
    make_problem,
    observe,
    true_pareto_hv,
)
from comboo.records import TrajectoryRecord
from comboo.scalarization import (
    cm_constant,
    hypervolume_exact,
    hypervolume_mc,
    pareto_front,
    sample_theta,
    scalarize,
)


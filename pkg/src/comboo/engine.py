"""The COMBOO loop: optimistic constraint estimation plus random
hypervolume scalarization of objective upper confidence bounds.

A run alternates between three steps each round: check whether any
candidate can still be feasible under the constraint UCBs (otherwise
declare infeasibility), draw a scalarization direction and query the
argmax of the scalarized objective UCBs inside the optimistic feasible
set, then refit every GP on the enlarged history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from comboo.errors import ConfigError, InputError
from comboo.gp import (
    DiscretizationGrid,
    KernelSpec,
    PosteriorModel,
    confidence_bounds,
    fit_hyperparameters,
    fit_posterior,
    modified_confidence_bounds,
)
from comboo.problems import ProblemSpec, candidate_grid, evaluate_batch, observe
from comboo.records import TrajectoryRecord
from comboo.scalarization import sample_theta, scalarize

MODES = ("discrete", "discretized-continuous")


@dataclass(frozen=True)
class BetaSchedule:
    """Confidence-width schedule.

    ``lemma1``: ``2 log(n_functions * domain_size * pi^2 t^2 / (6 delta))``.
    ``experimental``: ``coef * log(scale * (1 + t))``.
    """

    kind: str = "experimental"
    coef: float = 0.4
    scale: float = 2.0
    delta: float = 0.1
    domain_size: Optional[int] = None
    n_functions: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("lemma1", "experimental"):
            raise ConfigError(f"unknown beta schedule kind {self.kind!r}")
        if self.kind == "lemma1" and not (0.0 < self.delta < 1.0):
            raise ConfigError("delta must be in (0,1)")
        if self.kind == "experimental" and (self.coef <= 0 or self.scale < 1):
            raise ConfigError("experimental beta needs coef > 0 and scale >= 1")

    def resolved(self, domain_size: int, n_functions: int) -> "BetaSchedule":
        return BetaSchedule(
            self.kind, self.coef, self.scale, self.delta,
            self.domain_size if self.domain_size is not None else domain_size,
            self.n_functions if self.n_functions is not None else n_functions,
        )


def beta_value(schedule: BetaSchedule, t: int) -> float:
    if t < 1:
        raise InputError("beta is defined for rounds t >= 1")
    if schedule.kind == "lemma1":
        if schedule.domain_size is None or schedule.n_functions is None:
            raise ConfigError("lemma1 beta needs domain_size and n_functions")
        return 2.0 * math.log(
            schedule.n_functions * schedule.domain_size * math.pi**2 * t**2 / (6.0 * schedule.delta)
        )
    return schedule.coef * math.log(schedule.scale * (1.0 + t))


@dataclass
class RunConfig:
    """Settings for a single run.

    ``beta`` is one schedule shared by all functions, or (only in
    ``discretized-continuous`` mode) a list of ``m + c`` schedules ordered
    objectives first.
    """

    T: int
    z: Sequence[float]
    kernels_f: Sequence[KernelSpec]
    kernels_g: Sequence[KernelSpec] = ()
    beta: Union[BetaSchedule, Sequence[BetaSchedule]] = field(default_factory=BetaSchedule)
    n_init: int = 0
    mode: str = "discrete"
    candidates: Optional[np.ndarray] = None
    resolution: Optional[Union[int, Sequence[int]]] = None
    require_feasible_init: bool = False
    continue_after_declaration: bool = False
    hyper_amplitudes: Sequence[float] = ()
    hyper_lengthscales: Sequence[float] = ()
    gp_noise_sd_f: Optional[Sequence[float]] = None
    gp_noise_sd_g: Optional[Sequence[float]] = None
    grid_cap: int = 64
    c_tau: float = 1.0

    @property
    def fit_hyperparameters(self) -> bool:
        return bool(self.hyper_amplitudes) or bool(self.hyper_lengthscales)


@dataclass
class RunState:
    """Mutable loop state; models are always fitted on exactly the history."""

    problem: ProblemSpec
    config: RunConfig
    candidates: np.ndarray
    rng: np.random.Generator
    betas: list
    noise_var_f: np.ndarray
    noise_var_g: np.ndarray
    kernels_f: list
    kernels_g: list
    round: int = 0
    history_x: list = field(default_factory=list)
    history_y_f: list = field(default_factory=list)
    history_y_g: list = field(default_factory=list)
    models_f: list = field(default_factory=list)
    models_g: list = field(default_factory=list)
    declared_infeasible: bool = False
    n_declarations: int = 0

    @property
    def n_evals(self) -> int:
        return len(self.history_x)


def _bounds(models, X, betas, t, grid) -> tuple[np.ndarray, np.ndarray]:
    """Stack LCB/UCB columns for ``models`` over candidate rows ``X``."""
    if not models:
        return np.zeros((len(X), 0)), np.zeros((len(X), 0))
    lcb, ucb = [], []
    for model, beta in zip(models, betas):
        if grid is None:
            cb = confidence_bounds(model, X, beta)
        else:
            cb = modified_confidence_bounds(model, X, beta, t, grid)
        lcb.append(cb.lcb)
        ucb.append(cb.ucb)
    return np.stack(lcb, axis=1), np.stack(ucb, axis=1)


def _feasible_from_ucb(ucb_g: np.ndarray) -> tuple[np.ndarray, float, int]:
    if ucb_g.shape[1] == 0:
        return np.ones(len(ucb_g), dtype=bool), math.inf, -1
    min_ucb = ucb_g.min(axis=1)
    best = int(np.argmax(min_ucb))
    return min_ucb >= 0, float(min_ucb[best]), best


def optimistic_feasible_set(models_g: Sequence[PosteriorModel], X, beta: float):
    """Candidates whose constraint UCBs are all ``>= 0``.

    Returns ``(points, max_min_ucb)``. With no constraints every candidate
    is returned and ``max_min_ucb`` is ``inf``.
    """
    X = np.asarray(X, dtype=float)
    _, ucb_g = _bounds(list(models_g), X, [beta] * len(models_g), 1, None)
    mask, max_min, _ = _feasible_from_ucb(ucb_g)
    return X[mask], max_min


def _acquisition_from_ucb(ucb_f: np.ndarray, theta, z) -> np.ndarray:
    return np.atleast_1d(scalarize(theta, ucb_f - np.asarray(z, dtype=float)))


def acquisition_value(models_f: Sequence[PosteriorModel], x, theta, z, beta: float) -> float:
    x = np.asarray(x, dtype=float)
    _, ucb = _bounds(list(models_f), x[None, :], [beta] * len(models_f), 1, None)
    return float(_acquisition_from_ucb(ucb, theta, z)[0])


def _argmax_lowest(values: np.ndarray, mask: np.ndarray) -> int:
    masked = np.where(mask, values, -np.inf)
    return int(np.argmax(masked))


def select_candidate(models_f: Sequence[PosteriorModel], feasible, theta, z, beta: float) -> np.ndarray:
    """Exhaustive argmax of the acquisition over ``feasible``; ties go to the first."""
    feasible = np.asarray(feasible, dtype=float)
    if feasible.ndim != 2 or len(feasible) == 0:
        raise InputError("select_candidate needs a nonempty feasible set; check infeasibility first")
    _, ucb = _bounds(list(models_f), feasible, [beta] * len(models_f), 1, None)
    vals = _acquisition_from_ucb(ucb, theta, z)
    return feasible[int(np.argmax(vals))]


def round_grid(problem: ProblemSpec, t: int, grid_cap: int = 64, c_tau: float = 1.0) -> DiscretizationGrid:
    """Lattice for round ``t`` of the discretized-continuous mode.

    Per-axis resolution is ``min(grid_cap, ceil((c_tau * d * t^2)^(1/d)))``,
    at least 2.
    """
    tau = c_tau * problem.d * t**2
    res = min(grid_cap, max(2, math.ceil(tau ** (1.0 / problem.d) - 1e-12)))
    return DiscretizationGrid.lattice(problem.bounds[:, 0], problem.bounds[:, 1], res)


def _fit_all(state: RunState) -> None:
    cfg = state.config
    X = np.array(state.history_x, dtype=float).reshape(-1, state.problem.d)
    Yf = np.array(state.history_y_f, dtype=float).reshape(len(X), state.problem.m)
    Yg = np.array(state.history_y_g, dtype=float).reshape(len(X), state.problem.c)

    def fit_group(kernels, Y, noise_vars):
        models = []
        for j, (kern, nv) in enumerate(zip(kernels, noise_vars)):
            if cfg.fit_hyperparameters and len(X):
                kern = fit_hyperparameters(kern, nv, X, Y[:, j],
                                           cfg.hyper_amplitudes, cfg.hyper_lengthscales)
            models.append(fit_posterior(kern, nv, X, Y[:, j]))
        return models

    state.models_f = fit_group(state.kernels_f, Yf, state.noise_var_f)
    state.models_g = fit_group(state.kernels_g, Yg, state.noise_var_g)


def _append(state: RunState, obs) -> None:
    state.history_x.append(obs.x)
    state.history_y_f.append(obs.y_f)
    state.history_y_g.append(obs.y_g)


def _validate(problem: ProblemSpec, config: RunConfig) -> None:
    if config.T < 0 or config.n_init < 0:
        raise ConfigError("T and n_init must be >= 0")
    if config.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {config.mode!r}")
    if len(config.z) != problem.m:
        raise ConfigError(f"reference point needs {problem.m} entries, got {len(config.z)}")
    if not np.all(np.isfinite(np.asarray(config.z, dtype=float))):
        raise ConfigError("reference point must be finite")
    if len(config.kernels_f) != problem.m or len(config.kernels_g) != problem.c:
        raise ConfigError(f"need {problem.m} objective and {problem.c} constraint kernels")
    if config.mode == "discretized-continuous" and problem.bounds is None:
        raise ConfigError("discretized-continuous mode needs a box-bounded problem")
    if not isinstance(config.beta, BetaSchedule):
        if config.mode != "discretized-continuous":
            raise ConfigError("per-function beta schedules are only used in discretized-continuous mode")
        if len(config.beta) != problem.m + problem.c:
            raise ConfigError(f"need {problem.m + problem.c} per-function beta schedules")
    if problem.evaluator is None:
        raise ConfigError(f"problem {problem.name!r} has no evaluator attached")


def init_state(problem: ProblemSpec, config: RunConfig, rng: np.random.Generator) -> RunState:
    """Validate the config, build candidates and an empty state (prior models)."""
    _validate(problem, config)
    X = config.candidates if config.candidates is not None else candidate_grid(problem, config.resolution)
    X = np.asarray(X, dtype=float)
    if len(X) == 0:
        raise ConfigError("candidate set is empty")
    if config.n_init > len(X):
        raise ConfigError(f"n_init={config.n_init} exceeds {len(X)} candidates")
    n_funcs = problem.m + problem.c
    scheds = [config.beta] * n_funcs if isinstance(config.beta, BetaSchedule) else list(config.beta)
    betas = [s.resolved(len(X), n_funcs) for s in scheds]
    sd_f = problem.noise_sd_f if config.gp_noise_sd_f is None else config.gp_noise_sd_f
    sd_g = problem.noise_sd_g if config.gp_noise_sd_g is None else config.gp_noise_sd_g
    state = RunState(
        problem, config, X, rng, betas,
        np.broadcast_to(np.asarray(sd_f or 0.0, float) ** 2, (problem.m,)).copy(),
        np.broadcast_to(np.asarray(sd_g or 0.0, float) ** 2, (problem.c,)).copy(),
        list(config.kernels_f), list(config.kernels_g),
    )
    _fit_all(state)
    return state


def initial_design(state: RunState) -> list[TrajectoryRecord]:
    """Query ``n_init`` distinct random candidates and refit."""
    cfg, problem = state.config, state.problem
    if cfg.n_init == 0:
        return []
    pool = np.arange(len(state.candidates))
    if cfg.require_feasible_init:
        _, G = evaluate_batch(problem, state.candidates)
        pool = pool[np.all(G >= 0, axis=1)]
        if len(pool) < cfg.n_init:
            raise ConfigError(f"only {len(pool)} feasible candidates for n_init={cfg.n_init}")
    picks = state.rng.choice(pool, size=cfg.n_init, replace=False)
    records = []
    for idx in picks:
        x = state.candidates[idx]
        obs = observe(problem, x, state.rng)
        _append(state, obs)
        F, G = evaluate_batch(problem, x)
        records.append(TrajectoryRecord(state.n_evals, 0, obs.x, F[0], G[0], obs.y_f, obs.y_g))
    _fit_all(state)
    return records


def comboo_step(state: RunState) -> tuple[RunState, TrajectoryRecord]:
    """Run one round in place and return ``(state, record)``.

    When the optimistic feasible set is empty the round declares
    infeasibility. Unless the config allows continuing on a problem known to
    be feasible, the state becomes terminal and the record has no query. In
    the continuing case the round queries the maximiser of the smallest
    constraint UCB instead.
    """
    if state.declared_infeasible:
        raise InputError("run already declared infeasibility")
    problem, cfg = state.problem, state.config
    t = state.round + 1
    X = state.candidates
    m = problem.m
    grid = round_grid(problem, t, cfg.grid_cap, cfg.c_tau) if cfg.mode == "discretized-continuous" else None
    betas = [beta_value(s, t) for s in state.betas]
    _, ucb_g = _bounds(state.models_g, X, betas[m:], t, grid)
    feasible, max_min, aux = _feasible_from_ucb(ucb_g)
    aux_x = X[aux] if aux >= 0 else None
    n_feasible = int(feasible.sum())
    declared = n_feasible == 0
    state.round = t

    if declared:
        state.n_declarations += 1
        if not (cfg.continue_after_declaration and problem.known_feasible):
            state.declared_infeasible = True
            rec = TrajectoryRecord(state.n_evals + 1, t, None, None, None, None, None,
                                   beta=betas[0], declared=True, feasible_set_size=0,
                                   max_min_ucb=max_min, aux_x=aux_x)
            return state, rec
        theta = sample_theta(m, state.rng)
        idx = aux
    else:
        theta = sample_theta(m, state.rng)
        _, ucb_f = _bounds(state.models_f, X, betas[:m], t, grid)
        vals = _acquisition_from_ucb(ucb_f, theta, cfg.z)
        idx = _argmax_lowest(vals, feasible)

    x = X[idx]
    obs = observe(problem, x, state.rng)
    _append(state, obs)
    F, G = evaluate_batch(problem, x)
    _fit_all(state)
    rec = TrajectoryRecord(state.n_evals, t, obs.x, F[0], G[0], obs.y_f, obs.y_g,
                           beta=betas[0], theta=theta, declared=declared,
                           feasible_set_size=n_feasible, max_min_ucb=max_min, aux_x=aux_x)
    return state, rec


def run(problem: ProblemSpec, config: RunConfig, rng: np.random.Generator,
        return_state: bool = False):
    """Initial design followed by up to ``config.T`` rounds.

    Returns the list of records (and the final state if ``return_state``).
    """
    state = init_state(problem, config, rng)
    records = initial_design(state)
    for _ in range(config.T):
        state, rec = comboo_step(state)
        records.append(rec)
        if state.declared_infeasible:
            break
    return (records, state) if return_state else records

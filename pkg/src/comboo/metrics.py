"""Regret and violation metrics over trajectories, plus a random-search baseline.

Metrics use the noiseless ``F_true`` / ``G_true`` stored on each record.
The observed hypervolume counts only truly feasible points. Cumulative sums
and the constraint regret run over optimisation rounds (``round >= 1``);
initial-design rows contribute to the hypervolume but not to the sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from comboo.errors import ConfigError, InputError
from comboo.problems import ProblemSpec, candidate_grid, evaluate_batch, observe
from comboo.records import TrajectoryRecord
from comboo.scalarization import hypervolume_exact, pareto_front


def simple_violation(G_true) -> np.ndarray:
    return np.maximum(0.0, -np.asarray(G_true, dtype=float))


@dataclass
class MetricSeries:
    t: np.ndarray
    round: np.ndarray
    hv: np.ndarray
    r: np.ndarray
    v: np.ndarray
    R_cum: np.ndarray
    V_cum: np.ndarray
    C: np.ndarray
    declared_round: int = -1

    def __len__(self) -> int:
        return len(self.t)

    @property
    def c(self) -> int:
        return self.v.shape[1]

    def invariant_violations(self, tol: float = 1e-9) -> list[str]:
        """Names of monotonicity or sign properties that fail on this series."""
        bad = []
        opt = self.round >= 1
        if np.any(np.diff(self.hv) < -tol):
            bad.append("hv non-decreasing")
        if np.any(self.r < -tol):
            bad.append("r >= 0")
        if opt.sum() > 1:
            if np.any(np.diff(self.C[opt]) > tol):
                bad.append("C non-increasing")
            if np.any(np.diff(self.R_cum[opt]) < -tol):
                bad.append("R_cum non-decreasing")
            if self.c and np.any(np.diff(self.V_cum[opt], axis=0) < -tol):
                bad.append("V_cum non-decreasing")
        return bad


def _queried(trajectory) -> list[TrajectoryRecord]:
    recs = [r for r in trajectory if r.queried]
    for k, rec in enumerate(recs):
        if rec.t != k + 1:
            raise InputError(f"trajectory is not contiguous: expected t={k + 1}, found t={rec.t}")
    return recs


def compute_series(trajectory, hv_star: float, z, normalize: bool = False) -> MetricSeries:
    """Per-evaluation hypervolume, regrets, violations and constraint regret.

    With ``normalize``, each regret and violation term is divided by its
    value at the first optimisation round before forming the constraint
    regret; a zero divisor leaves that term unscaled.
    """
    if hv_star < 0:
        raise InputError("hv_star must be >= 0")
    recs = _queried(trajectory)
    declared = [r.round for r in trajectory if r.declared and not r.queried]
    n = len(recs)
    z = np.asarray(z, dtype=float)
    c = len(recs[0].G_true) if n else 0
    hv = np.zeros(n)
    feas_pts = []
    current = 0.0
    for k, rec in enumerate(recs):
        if rec.feasible_true:
            feas_pts.append(rec.F_true)
            front = pareto_front(np.array(feas_pts))
            feas_pts = list(front)
            current = hypervolume_exact(front, z)
        hv[k] = current
    r = hv_star - hv
    # exact-tie rounding when the observed front equals the true one
    r[np.abs(r) <= 1e-12 * max(1.0, hv_star)] = 0.0
    v = np.array([simple_violation(rec.G_true) for rec in recs]).reshape(n, c)
    rounds = np.array([rec.round for rec in recs], dtype=int)
    opt = rounds >= 1

    R_cum = np.where(opt, np.cumsum(np.where(opt, r, 0.0)), 0.0)
    V_cum = np.where(opt[:, None], np.cumsum(np.where(opt[:, None], v, 0.0), axis=0), 0.0)

    r_hat, v_hat = r.copy(), v.copy()
    if normalize and opt.any():
        first = int(np.argmax(opt))
        if r[first] != 0:
            r_hat = r / r[first]
        for j in range(c):
            if v[first, j] != 0:
                v_hat[:, j] = v[:, j] / v[first, j]
    score = r_hat + v_hat.sum(axis=1)
    C = np.full(n, np.nan)
    if opt.any():
        C[opt] = np.minimum.accumulate(score[opt])

    return MetricSeries(
        t=np.array([rec.t for rec in recs], dtype=int), round=rounds, hv=hv, r=r, v=v,
        R_cum=R_cum, V_cum=V_cum, C=C, declared_round=declared[0] if declared else -1,
    )


def pad_series(series: MetricSeries, length: int) -> MetricSeries:
    """Extend a truncated series to ``length`` rows by carrying the last row forward."""
    n = len(series)
    if n >= length or n == 0:
        return series
    extra = length - n

    def ext(a, step=0):
        tail = np.repeat(a[-1:], extra, axis=0)
        if step:
            tail = tail + step * np.arange(1, extra + 1).reshape((-1,) + (1,) * (a.ndim - 1))
        return np.concatenate([a, tail])

    return MetricSeries(ext(series.t, 1), ext(series.round, 1), ext(series.hv), ext(series.r),
                        ext(series.v), ext(series.R_cum), ext(series.V_cum), ext(series.C),
                        series.declared_round)


def random_search_run(problem: ProblemSpec, config, rng: np.random.Generator) -> list[TrajectoryRecord]:
    """Query ``n_init + T`` uniformly random distinct candidates.

    Honours ``require_feasible_init`` for the first ``n_init`` picks so the
    baseline starts from the same kind of design as the optimiser.
    """
    if config.T < 0 or config.n_init < 0:
        raise ConfigError("T and n_init must be >= 0")
    if problem.evaluator is None:
        raise ConfigError(f"problem {problem.name!r} has no evaluator attached")
    X = config.candidates if config.candidates is not None else candidate_grid(problem, config.resolution)
    X = np.asarray(X, dtype=float)
    N = len(X)
    if config.n_init > N:
        raise ConfigError(f"n_init={config.n_init} exceeds {N} candidates")
    pool = np.arange(N)
    if config.require_feasible_init and config.n_init:
        _, G = evaluate_batch(problem, X)
        pool = pool[np.all(G >= 0, axis=1)]
        if len(pool) < config.n_init:
            raise ConfigError(f"only {len(pool)} feasible candidates for n_init={config.n_init}")
    init = rng.choice(pool, size=config.n_init, replace=False)
    rest = np.setdiff1d(np.arange(N), init)
    if config.T <= len(rest):
        later = rng.choice(rest, size=config.T, replace=False)
    else:
        later = rng.choice(N, size=config.T, replace=True)
    records = []
    for k, idx in enumerate(np.r_[init, later].astype(int)):
        obs = observe(problem, X[idx], rng)
        F, G = evaluate_batch(problem, X[idx])
        rnd = 0 if k < config.n_init else k - config.n_init + 1
        records.append(TrajectoryRecord(k + 1, rnd, obs.x, F[0], G[0], obs.y_f, obs.y_g))
    return records


@dataclass
class Band:
    mean: np.ndarray
    median: np.ndarray
    lo: np.ndarray
    hi: np.ndarray


@dataclass
class Summary:
    """Per-row statistics across runs, keyed by metric name."""

    n_runs: int
    t: np.ndarray
    round: np.ndarray
    bands: dict = field(default_factory=dict)
    n_declared: np.ndarray = None


def metric_columns(series: MetricSeries) -> dict[str, np.ndarray]:
    cols = {"hv": series.hv, "r": series.r, "R_cum": series.R_cum, "C": series.C}
    for j in range(series.c):
        cols[f"V_cum_{j}"] = series.V_cum[:, j]
    return cols


def summarize(runs: list[MetricSeries]) -> Summary:
    """Mean, median and mean +/- 1.96 standard errors per row and metric."""
    if len(runs) < 2:
        raise InputError("summarize needs at least 2 runs")
    lengths = {len(s) for s in runs}
    if len(lengths) != 1:
        raise InputError(f"runs have unequal lengths {sorted(lengths)}")
    n = len(runs)
    out = Summary(n, runs[0].t.copy(), runs[0].round.copy())
    columns = [metric_columns(s) for s in runs]
    for name in columns[0]:
        A = np.stack([cols[name] for cols in columns])
        mean = A.mean(axis=0)
        half = 1.96 * A.std(axis=0, ddof=1) / math.sqrt(n)
        out.bands[name] = Band(mean, np.median(A, axis=0), mean - half, mean + half)
    out.n_declared = np.array([
        sum(1 for s in runs if 0 <= s.declared_round <= rnd) for rnd in out.round
    ])
    return out

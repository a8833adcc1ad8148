"""Benchmark problems with known ground truth.

Conventions used by every problem here: all objectives are maximised and a
point is feasible when every constraint value is ``>= 0``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from comboo.errors import ConfigError, InputError, UnsupportedError
from comboo.scalarization import hypervolume_exact, pareto_front

GRID_CAP = 1_000_000
BOUND_TOL = 1e-12

Evaluator = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class ProblemSpec:
    """A constrained multi-objective test problem.

    ``evaluator`` maps an ``(n, d)`` array to ``(F, G)`` with shapes
    ``(n, m)`` and ``(n, c)``. Box problems set ``bounds`` (shape ``(d, 2)``);
    discrete problems set ``candidates`` instead.
    """

    name: str
    d: int
    m: int
    c: int
    evaluator: Optional[Evaluator]
    bounds: Optional[np.ndarray] = None
    candidates: Optional[np.ndarray] = None
    noise_sd_f: tuple = ()
    noise_sd_g: tuple = ()
    known_feasible: bool = False
    thresholds: Optional[tuple] = None
    description: str = ""
    defaults: dict = field(default_factory=dict)

    @property
    def is_discrete(self) -> bool:
        return self.candidates is not None

    def with_evaluator(self, evaluator: Evaluator) -> "ProblemSpec":
        return replace(self, evaluator=evaluator)

    def with_noise(self, noise_sd_f=None, noise_sd_g=None) -> "ProblemSpec":
        f = self.noise_sd_f if noise_sd_f is None else tuple(np.broadcast_to(noise_sd_f, (self.m,)))
        g = self.noise_sd_g if noise_sd_g is None else tuple(np.broadcast_to(noise_sd_g, (self.c,)))
        return replace(self, noise_sd_f=tuple(map(float, f)), noise_sd_g=tuple(map(float, g)))


class Observation(NamedTuple):
    x: np.ndarray
    y_f: np.ndarray
    y_g: np.ndarray


def _check_points(problem: ProblemSpec, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != problem.d:
        raise InputError(f"{problem.name}: expected d={problem.d}, got {X.shape[1]}")
    if problem.bounds is not None:
        lo, hi = problem.bounds[:, 0], problem.bounds[:, 1]
        if np.any(X < lo - BOUND_TOL) or np.any(X > hi + BOUND_TOL):
            raise InputError(f"{problem.name}: point outside bounds {problem.bounds.tolist()}")
    return X


def evaluate_batch(problem: ProblemSpec, X) -> tuple[np.ndarray, np.ndarray]:
    """Noiseless ``(F, G)`` for each row of ``X``."""
    if problem.evaluator is None:
        raise UnsupportedError(
            f"problem {problem.name!r} has no shipped evaluator; "
            "attach one with ProblemSpec.with_evaluator"
        )
    X = _check_points(problem, X)
    F, G = problem.evaluator(X)
    F = np.asarray(F, dtype=float).reshape(len(X), problem.m)
    G = np.asarray(G, dtype=float).reshape(len(X), problem.c)
    return F, G


def evaluate(problem: ProblemSpec, x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InputError("evaluate takes a single point; use evaluate_batch")
    F, G = evaluate_batch(problem, x)
    return F[0], G[0]


def observe(problem: ProblemSpec, x, rng: np.random.Generator) -> Observation:
    """Evaluate at ``x`` and add independent Gaussian noise per function."""
    F, G = evaluate(problem, x)
    sd_f = np.broadcast_to(np.asarray(problem.noise_sd_f or 0.0, dtype=float), (problem.m,))
    sd_g = np.broadcast_to(np.asarray(problem.noise_sd_g or 0.0, dtype=float), (problem.c,))
    y_f = F + rng.standard_normal(problem.m) * sd_f
    y_g = G + rng.standard_normal(problem.c) * sd_g
    return Observation(np.asarray(x, dtype=float).copy(), y_f, y_g)


def candidate_grid(problem: ProblemSpec, resolution=None, cap: int = GRID_CAP) -> np.ndarray:
    """Uniform lattice over the box (endpoints included), or the explicit list.

    Rows are ordered with the last axis varying fastest.
    """
    if problem.is_discrete:
        return np.array(problem.candidates, dtype=float)
    if problem.bounds is None:
        raise ConfigError(f"problem {problem.name!r} has neither bounds nor candidates")
    if resolution is None:
        resolution = problem.defaults.get("resolution")
        if resolution is None:
            raise ConfigError(f"problem {problem.name!r} needs an explicit resolution")
    res = np.broadcast_to(np.asarray(resolution, dtype=int), (problem.d,))
    if np.any(res < 2):
        raise ConfigError("resolution must be >= 2 per axis")
    size = math.prod(int(r) for r in res)
    if size > cap:
        raise ConfigError(f"candidate grid of {size} points exceeds cap {cap}")
    axes = [np.linspace(lo, hi, int(r)) for (lo, hi), r in zip(problem.bounds, res)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([a.reshape(-1) for a in mesh], axis=1)


class TruePareto(NamedTuple):
    hv_star: float
    front: np.ndarray
    feasible_found: bool


def true_pareto_hv(problem: ProblemSpec, z, resolution=None, candidates=None) -> TruePareto:
    """Hypervolume of the feasible Pareto front restricted to a candidate set."""
    if problem.m not in (2, 3):
        raise UnsupportedError("ground-truth hypervolume needs m in {2, 3}")
    X = candidate_grid(problem, resolution) if candidates is None else np.asarray(candidates, float)
    F, G = evaluate_batch(problem, X)
    feas = np.all(G >= 0, axis=1) if problem.c else np.ones(len(X), dtype=bool)
    if not np.any(feas):
        return TruePareto(0.0, np.zeros((0, problem.m)), False)
    front = pareto_front(F[feas])
    return TruePareto(hypervolume_exact(front, z), front, True)


# -- problem definitions -------------------------------------------------------

def toy_objectives(X: np.ndarray) -> np.ndarray:
    x1, x2 = X[:, 0], X[:, 1]
    return np.stack([-1.0 / x1 - x2, -x1 - x2**2], axis=1)


TOY_THRESHOLDS = (-1.9, -2.25)


def _toy(X):
    F = toy_objectives(X)
    return F, F - np.asarray(TOY_THRESHOLDS)


def _infeasible_toy(X):
    return toy_objectives(X), -np.ones((len(X), 1))


def branin_currin_objectives(X: np.ndarray) -> np.ndarray:
    """Both objectives as printed, inputs on ``[0, 1]^2``.

    The Currin factor ``1 - exp(-1/(2 x2))`` is taken as 1 at ``x2 = 0``.
    """
    x1, x2 = X[:, 0], X[:, 1]
    u = 15.0 * x1 - 5.0
    inner = 5.1 * u**2 / (4 * math.pi**2) + 5.0 * u / math.pi - 5.0
    f1 = 15.0 * x2 - inner**2 + (10.0 - 10.0 / (8 * math.pi)) * np.cos(u)
    with np.errstate(divide="ignore"):
        decay = np.where(x2 > 0, np.exp(-1.0 / (2.0 * np.where(x2 > 0, x2, 1.0))), 0.0)
    ratio = (2300 * x1**3 + 1900 * x1**2 + 2092 * x1 + 60) / (100 * x1**3 + 500 * x1**2 + 4 * x1 + 20)
    f2 = (1.0 - decay) * ratio
    return np.stack([f1, f2], axis=1)


BRANIN_CURRIN_THRESHOLDS = (-20.0, -6.0)


def _branin_currin(X):
    F = branin_currin_objectives(X)
    return F, F - np.asarray(BRANIN_CURRIN_THRESHOLDS)


def dtlz2_objectives(X: np.ndarray, m: int) -> np.ndarray:
    """Standard DTLZ2 values (to be minimised); all entries are >= 0."""
    xm = X[:, m - 1:]
    g = np.sum((xm - 0.5) ** 2, axis=1)
    half_pi = math.pi / 2
    F = np.empty((len(X), m))
    for i in range(m):
        v = 1.0 + g
        for k in range(m - 1 - i):
            v = v * np.cos(half_pi * X[:, k])
        if i > 0:
            v = v * np.sin(half_pi * X[:, m - 1 - i])
        F[:, i] = v
    return F


def c2_dtlz2_constraint(Fmin: np.ndarray, r: float = 0.2) -> np.ndarray:
    """Constraint in ``>= 0`` form computed from the minimisation objectives."""
    m = Fmin.shape[1]
    per_i = []
    for i in range(m):
        others = sum(Fmin[:, j] ** 2 - r**2 for j in range(m) if j != i)
        per_i.append((Fmin[:, i] - 1.0) ** 2 + others)
    centre = np.sum((Fmin - 1.0 / math.sqrt(m)) ** 2 - r**2, axis=1)
    return -np.minimum(np.min(np.stack(per_i, axis=1), axis=1), centre)


def _c2_dtlz2(m: int, r: float):
    def evaluator(X):
        Fmin = dtlz2_objectives(X, m)
        return -Fmin, c2_dtlz2_constraint(Fmin, r)[:, None]
    return evaluator


def tanimoto_fingerprints(n: int = 200, bits: int = 32, seed: int = 20240601) -> np.ndarray:
    rng = np.random.default_rng(seed)
    X = (rng.random((n, bits)) < 0.5).astype(float)
    empty = X.sum(axis=1) == 0
    X[empty, 0] = 1.0
    return X


def _tanimoto_synth(X):
    half = X.shape[1] // 2
    f1 = X[:, :half].mean(axis=1)
    f2 = 1.0 - X.mean(axis=1)
    g = X[:, half:].mean(axis=1) - 0.25
    return np.stack([f1, f2], axis=1), g[:, None]


def _box(lo, hi, d):
    return np.tile(np.array([[lo, hi]], dtype=float), (d, 1))


def _toy_defaults(**extra):
    base = {
        "z": (-2.1, -2.3),
        "resolution": 101,
        "kernel": {"type": "matern", "nu": 2.5, "lengthscales": 0.2, "amplitude": 1.0},
        "beta": {"kind": "experimental", "coef": 0.4, "scale": 4.0},
        "n_init": 10,
    }
    base.update(extra)
    return base


def build_registry() -> dict[str, ProblemSpec]:
    reg = {}
    reg["toy"] = ProblemSpec(
        "toy", 2, 2, 2, _toy, bounds=_box(1.0, 1.5, 2),
        noise_sd_f=(0.05, 0.05), noise_sd_g=(0.05, 0.05), known_feasible=True,
        thresholds=TOY_THRESHOLDS,
        description="F = (-1/x1 - x2, -x1 - x2^2) on [1, 1.5]^2 with thresholds (-1.9, -2.25)",
        defaults=_toy_defaults(),
    )
    reg["infeasible_toy"] = ProblemSpec(
        "infeasible_toy", 2, 2, 1, _infeasible_toy, bounds=_box(1.0, 1.5, 2),
        noise_sd_f=(0.05, 0.05), noise_sd_g=(0.05,), known_feasible=False,
        description="toy objectives with constraint g = -1 everywhere",
        defaults=_toy_defaults(resolution=[5, 2], n_init=0),
    )
    reg["branin_currin"] = ProblemSpec(
        "branin_currin", 2, 2, 2, _branin_currin, bounds=_box(0.0, 1.0, 2),
        noise_sd_f=(0.01, 0.01), noise_sd_g=(0.01, 0.01), known_feasible=True,
        thresholds=BRANIN_CURRIN_THRESHOLDS,
        description="Branin and Currin on [0, 1]^2 with thresholds (-20, -6)",
        defaults={
            "z": (-21.0, -7.0),
            "resolution": 101,
            "kernel": {"type": "matern", "nu": 2.5, "lengthscales": 0.2, "amplitude": 1.0},
            "beta": {"kind": "experimental", "coef": 0.4, "scale": 4.0},
            "n_init": 10,
        },
    )
    reg["c2_dtlz2"] = ProblemSpec(
        "c2_dtlz2", 4, 2, 1, _c2_dtlz2(2, 0.2), bounds=_box(0.0, 1.0, 4),
        noise_sd_f=(0.05, 0.05), noise_sd_g=(0.05,), known_feasible=True,
        description="C2-DTLZ2 with r = 0.2, objectives negated for maximisation",
        defaults={
            "z": (-1.1, -1.1),
            "resolution": 11,
            "kernel": {"type": "matern", "nu": 2.5, "lengthscales": 0.3, "amplitude": 1.0},
            "beta": {"kind": "experimental", "coef": 0.4, "scale": 4.0},
            "n_init": 10,
            "require_feasible_init": True,
            "continue_after_declaration": True,
        },
    )
    reg["tanimoto_synth"] = ProblemSpec(
        "tanimoto_synth", 32, 2, 1, _tanimoto_synth, candidates=tanimoto_fingerprints(),
        noise_sd_f=(0.01, 0.01), noise_sd_g=(0.01,), known_feasible=True,
        description="200 random 32-bit fingerprints; objectives from bit counts",
        defaults={
            "z": (-0.1, -0.1),
            "kernel": {"type": "tanimoto", "amplitude": 1.0},
            "beta": {"kind": "experimental", "coef": 0.1, "scale": 2.0},
            "n_init": 10,
        },
    )
    reg["penicillin"] = ProblemSpec(
        "penicillin", 7, 3, 3, None, noise_sd_f=(0.05,) * 3, noise_sd_g=(0.05,) * 3,
        known_feasible=True, description="plug-in only: attach an external simulator",
        defaults={"kernel": {"type": "rbf", "amplitude": 1.0, "lengthscale_sq": 1.0},
                  "beta": {"kind": "experimental", "coef": 0.1, "scale": 2.0}},
    )
    reg["disc_brake"] = ProblemSpec(
        "disc_brake", 4, 2, 3, None, noise_sd_f=(0.05,) * 2, noise_sd_g=(0.05,) * 3,
        known_feasible=True, description="plug-in only: attach an external evaluator",
        defaults={"kernel": {"type": "matern", "nu": 2.5, "lengthscales": 0.2, "amplitude": 1.0},
                  "beta": {"kind": "experimental", "coef": 0.4, "scale": 4.0}},
    )
    return reg


REGISTRY = build_registry()


def get_problem(name: str) -> ProblemSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown problem {name!r}; known: {sorted(REGISTRY)}") from None


def make_problem(name: str, evaluator: Evaluator, d: int, m: int, c: int,
                 bounds=None, candidates=None, noise_sd_f=0.0, noise_sd_g=0.0,
                 known_feasible: bool = False, **defaults) -> ProblemSpec:
    """Convenience constructor for ad-hoc problems."""
    return ProblemSpec(
        name, d, m, c, evaluator,
        bounds=None if bounds is None else np.asarray(bounds, dtype=float).reshape(d, 2),
        candidates=None if candidates is None else np.asarray(candidates, dtype=float),
        noise_sd_f=tuple(map(float, np.broadcast_to(noise_sd_f, (m,)))),
        noise_sd_g=tuple(map(float, np.broadcast_to(noise_sd_g, (c,)))),
        known_feasible=known_feasible,
        defaults=defaults,
    )


def load_tabular_problem(path, name: Optional[str] = None, noise_sd_f=0.0,
                         noise_sd_g=0.0, known_feasible: bool = False) -> ProblemSpec:
    """Discrete problem from a CSV with columns ``x_*``, ``f_*`` and ``g_*``.

    Evaluation looks the queried point up among the rows, so only listed
    points can be evaluated.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path}: empty table")
        rows = [r for r in reader if r]
    cols = {p: [i for i, h in enumerate(header) if h.strip().startswith(p + "_")] for p in "xfg"}
    if not cols["x"] or not cols["f"]:
        raise InputError(f"{path}: need at least one x_* and one f_* column")
    try:
        data = np.array([[float(v) for v in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric cell ({exc})") from None
    if data.size and data.shape[1] != len(header):
        raise InputError(f"{path}: rows do not match header width")
    X, F, G = (data[:, cols[p]] if data.size else np.zeros((0, len(cols[p]))) for p in "xfg")
    lookup = {tuple(row): i for i, row in enumerate(X)}

    def evaluator(Q):
        idx = []
        for q in Q:
            try:
                idx.append(lookup[tuple(q)])
            except KeyError:
                raise InputError(f"point {q.tolist()} is not in the table") from None
        return F[idx], G[idx]

    return make_problem(
        name or str(path), evaluator, X.shape[1], F.shape[1], G.shape[1],
        candidates=X, noise_sd_f=noise_sd_f, noise_sd_g=noise_sd_g,
        known_feasible=known_feasible,
    )

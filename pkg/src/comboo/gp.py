"""Kernels and exact Gaussian-process posteriors.

Every objective and constraint gets its own zero-mean GP. A fitted
:class:`PosteriorModel` is immutable; refitting returns a new model.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.spatial.distance import cdist

from comboo.errors import InputError, NumericalError

JITTER_START = 1e-8
JITTER_MAX = 1e-4


@dataclass(frozen=True)
class RBF:
    """Squared-exponential kernel ``a * exp(-||x - x'||^2 / b)``."""

    amplitude: float = 1.0
    lengthscale_sq: float = 1.0

    def __post_init__(self):
        if not (self.amplitude > 0 and self.lengthscale_sq > 0):
            raise InputError("RBF amplitude and lengthscale_sq must be > 0")

    def __call__(self, X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(-_sqdist(X1, X2) / self.lengthscale_sq)

    def diag(self, X: np.ndarray) -> np.ndarray:
        return np.full(len(X), self.amplitude)

    def with_params(self, amplitude=None, lengthscale=None) -> "RBF":
        return replace(
            self,
            amplitude=self.amplitude if amplitude is None else amplitude,
            lengthscale_sq=self.lengthscale_sq if lengthscale is None else lengthscale,
        )


@dataclass(frozen=True)
class Matern:
    """Matérn kernel restricted to the closed-form smoothness values.

    ``lengthscales`` is a scalar or a per-dimension vector; the scaled
    distance is ``r = sqrt(sum(((x - x') / lengthscale)**2))``.
    """

    nu: float = 2.5
    lengthscales: Union[float, tuple] = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.nu not in (0.5, 1.5, 2.5):
            raise InputError(f"Matern nu must be one of 0.5, 1.5, 2.5, got {self.nu}")
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        if self.amplitude <= 0 or np.any(ls <= 0):
            raise InputError("Matern amplitude and lengthscales must be > 0")
        if ls.size > 1:
            object.__setattr__(self, "lengthscales", tuple(float(v) for v in ls))

    def __call__(self, X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
        ls = np.asarray(self.lengthscales, dtype=float)
        r = np.sqrt(_sqdist(X1 / ls, X2 / ls))
        if self.nu == 0.5:
            k = np.exp(-r)
        elif self.nu == 1.5:
            s = math.sqrt(3.0) * r
            k = (1.0 + s) * np.exp(-s)
        else:
            s = math.sqrt(5.0) * r
            k = (1.0 + s + s * s / 3.0) * np.exp(-s)
        return self.amplitude * k

    def diag(self, X: np.ndarray) -> np.ndarray:
        return np.full(len(X), self.amplitude)

    def with_params(self, amplitude=None, lengthscale=None) -> "Matern":
        ls = self.lengthscales
        if lengthscale is not None:
            # isotropic rescale keeps anisotropy ratios of a vector lengthscale
            base = np.atleast_1d(np.asarray(ls, dtype=float))
            scaled = base / base.max() * lengthscale
            ls = float(scaled[0]) if scaled.size == 1 else tuple(scaled)
        return replace(
            self,
            amplitude=self.amplitude if amplitude is None else amplitude,
            lengthscales=ls,
        )


@dataclass(frozen=True)
class Tanimoto:
    """Tanimoto similarity kernel for nonnegative (fingerprint) vectors."""

    amplitude: float = 1.0

    def __post_init__(self):
        if self.amplitude <= 0:
            raise InputError("Tanimoto amplitude must be > 0")

    def __call__(self, X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
        if np.any(X1 < 0) or np.any(X2 < 0):
            raise InputError("Tanimoto kernel expects nonnegative inputs")
        dot = X1 @ X2.T
        n1 = np.einsum("ij,ij->i", X1, X1)
        n2 = np.einsum("ij,ij->i", X2, X2)
        denom = n1[:, None] + n2[None, :] - dot
        if np.any(denom == 0):
            raise InputError("Tanimoto kernel undefined for two all-zero inputs")
        return self.amplitude * dot / denom

    def diag(self, X: np.ndarray) -> np.ndarray:
        n = np.einsum("ij,ij->i", X, X)
        if np.any(n == 0):
            raise InputError("Tanimoto kernel undefined for two all-zero inputs")
        return np.full(len(X), self.amplitude)

    def with_params(self, amplitude=None, lengthscale=None) -> "Tanimoto":
        return replace(self, amplitude=self.amplitude if amplitude is None else amplitude)


KernelSpec = Union[RBF, Matern, Tanimoto]


def _sqdist(X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
    return cdist(X1, X2, "sqeuclidean")


def _as_2d(x, name="x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise InputError(f"{name} must be a point or a 2-D array of points")
    return arr


def kernel_matrix(spec: KernelSpec, X1, X2) -> np.ndarray:
    """Covariance matrix between two point sets."""
    X1 = _as_2d(X1, "X1")
    X2 = _as_2d(X2, "X2")
    if X1.shape[1] != X2.shape[1]:
        raise InputError(f"dimension mismatch: {X1.shape[1]} vs {X2.shape[1]}")
    return spec(X1, X2)


def kernel_eval(spec: KernelSpec, x1, x2) -> float:
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.ndim != 1 or x2.ndim != 1 or x1.shape != x2.shape:
        raise InputError(f"dimension mismatch: {x1.shape} vs {x2.shape}")
    return float(spec(x1[None, :], x2[None, :])[0, 0])


class ConfidenceBound(NamedTuple):
    lcb: np.ndarray
    ucb: np.ndarray


@dataclass(frozen=True)
class PosteriorModel:
    """Fitted GP state. Build with :func:`fit_posterior`."""

    kernel: KernelSpec
    noise_var: float
    train_x: np.ndarray
    train_y: np.ndarray
    factor: np.ndarray
    weights: np.ndarray
    jitter: float = 0.0
    dim: int = field(default=0)

    @property
    def n(self) -> int:
        return len(self.train_y)

    def mean_var(self, X) -> tuple[np.ndarray, np.ndarray]:
        X = _as_2d(X)
        if self.dim and X.shape[1] != self.dim:
            raise InputError(f"dimension mismatch: model has d={self.dim}, got {X.shape[1]}")
        prior = self.kernel.diag(X)
        if self.n == 0:
            return np.zeros(len(X)), prior
        kx = self.kernel(self.train_x, X)
        mean = kx.T @ self.weights
        v = solve_triangular(self.factor, kx, lower=True, check_finite=False)
        var = prior - np.einsum("ij,ij->j", v, v)
        return mean, np.clip(var, 0.0, prior)


def _cholesky_with_jitter(K: np.ndarray, scale: float) -> tuple[np.ndarray, float]:
    jitter = JITTER_START
    n = len(K)
    while True:
        try:
            L = np.linalg.cholesky(K + jitter * scale * np.eye(n))
            if np.all(np.isfinite(L)):
                return L, jitter * scale
        except np.linalg.LinAlgError:
            pass
        jitter *= 10.0
        if jitter > JITTER_MAX * (1 + 1e-9):
            raise NumericalError(
                f"kernel matrix of size {n} is not positive definite even with "
                f"jitter {JITTER_MAX:g} x amplitude; inputs are likely duplicated "
                "with zero noise or hyperparameters are degenerate"
            )


def fit_posterior(spec: KernelSpec, noise_var: float, train_x, train_y) -> PosteriorModel:
    """Condition a zero-mean GP on ``(train_x, train_y)``.

    Parameters
    ----------
    spec : KernelSpec
        Covariance function.
    noise_var : float
        Observation noise variance, ``>= 0``.
    train_x : array_like, shape (t, d)
    train_y : array_like, shape (t,)

    Returns
    -------
    PosteriorModel
        The prior model when ``t == 0``.
    """
    if noise_var < 0:
        raise InputError("noise_var must be >= 0")
    y = np.asarray(train_y, dtype=float).reshape(-1)
    X = np.asarray(train_x, dtype=float)
    if len(y) == 0:
        dim = X.shape[1] if X.ndim == 2 else 0
        return PosteriorModel(spec, float(noise_var), np.zeros((0, dim)), y,
                              np.zeros((0, 0)), np.zeros(0), 0.0, dim)
    X = _as_2d(X, "train_x")
    if len(X) != len(y):
        raise InputError(f"train_x has {len(X)} rows but train_y has {len(y)}")
    K = spec(X, X) + noise_var * np.eye(len(y))
    L, jitter = _cholesky_with_jitter(K, spec.amplitude)
    alpha = cho_solve((L, True), y, check_finite=False)
    return PosteriorModel(spec, float(noise_var), X, y, L, alpha, jitter, X.shape[1])


def posterior_mean_var(model: PosteriorModel, x) -> tuple:
    """Posterior mean and variance at one point (scalars) or a batch (arrays)."""
    single = np.asarray(x).ndim == 1
    mean, var = model.mean_var(x)
    if single:
        return float(mean[0]), float(var[0])
    return mean, var


def confidence_bounds(model: PosteriorModel, x, beta: float) -> ConfidenceBound:
    mean, var = model.mean_var(x)
    width = math.sqrt(beta) * np.sqrt(var)
    return _maybe_scalar(ConfidenceBound(mean - width, mean + width), x)


def _maybe_scalar(cb: ConfidenceBound, x) -> ConfidenceBound:
    if np.asarray(x).ndim == 1:
        return ConfidenceBound(float(cb.lcb[0]), float(cb.ucb[0]))
    return cb


class DiscretizationGrid:
    """Finite set of points with nearest-point lookup.

    Ties go to the lowest index. Lattices built with :meth:`lattice` use an
    O(d) per-axis rounding instead of a full distance scan.
    """

    def __init__(self, points, _lattice=None):
        self.points = _as_2d(points, "grid points")
        if len(self.points) == 0:
            raise InputError("discretization grid is empty")
        self._lattice = _lattice

    @classmethod
    def lattice(cls, lower: Sequence[float], upper: Sequence[float], resolution) -> "DiscretizationGrid":
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        res = np.broadcast_to(np.asarray(resolution, dtype=int), lower.shape).copy()
        if np.any(res < 1):
            raise InputError("lattice resolution must be >= 1 per axis")
        axes = [np.linspace(lo, hi, r) if r > 1 else np.array([(lo + hi) / 2])
                for lo, hi, r in zip(lower, upper, res)]
        pts = np.array(list(itertools.product(*axes)), dtype=float)
        return cls(pts, _lattice=(lower, upper, res))

    def __len__(self) -> int:
        return len(self.points)

    def nearest_index(self, X) -> np.ndarray:
        X = _as_2d(X)
        if X.shape[1] != self.points.shape[1]:
            raise InputError("dimension mismatch between grid and query points")
        if self._lattice is not None:
            lower, upper, res = self._lattice
            span = np.where(res > 1, (upper - lower) / np.maximum(res - 1, 1), 1.0)
            pos = (X - lower) / span
            # ceil(p - 0.5) rounds exact halves down, i.e. to the lower index
            idx = np.clip(np.ceil(pos - 0.5), 0, res - 1).astype(int)
            idx = np.where(res > 1, idx, 0)
            strides = np.r_[np.cumprod(res[::-1])[:-1][::-1], 1].astype(int)
            return idx @ strides
        out = np.empty(len(X), dtype=int)
        for start in range(0, len(X), 1024):
            chunk = X[start:start + 1024]
            out[start:start + 1024] = np.argmin(_sqdist(chunk, self.points), axis=1)
        return out

    def snap(self, X) -> np.ndarray:
        return self.points[self.nearest_index(X)]


def modified_confidence_bounds(model: PosteriorModel, x, beta: float, t: int,
                               grid: DiscretizationGrid) -> ConfidenceBound:
    """Bounds evaluated at the nearest grid point and widened by ``1/t**2``."""
    if t < 1:
        raise InputError("round index t must be >= 1")
    if grid is None or len(grid) == 0:
        raise InputError("discretization grid is empty")
    snapped = grid.snap(x)
    mean, var = model.mean_var(snapped)
    width = math.sqrt(beta) * np.sqrt(var) + 1.0 / t**2
    return _maybe_scalar(ConfidenceBound(mean - width, mean + width), x)


def log_marginal_likelihood(model: PosteriorModel) -> float:
    if model.n == 0:
        raise InputError("log marginal likelihood needs at least one observation")
    return float(
        -0.5 * model.train_y @ model.weights
        - np.sum(np.log(np.diag(model.factor)))
        - 0.5 * model.n * math.log(2 * math.pi)
    )


def information_gain(spec: KernelSpec, noise_var: float, X) -> float:
    """``0.5 * log det(I + K / noise_var)`` for the point set ``X``."""
    if noise_var <= 0:
        raise InputError("noise_var must be > 0 for information gain")
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return 0.0
    X = _as_2d(X)
    M = np.eye(len(X)) + spec(X, X) / noise_var
    sign, logdet = np.linalg.slogdet(M)
    if sign <= 0:
        raise NumericalError("I + K/noise_var is not positive definite")
    return 0.5 * float(logdet)


def fit_hyperparameters(spec: KernelSpec, noise_var: float, train_x, train_y,
                        amplitudes: Sequence[float] = (),
                        lengthscales: Sequence[float] = ()) -> KernelSpec:
    """Pick the grid combination maximising the log marginal likelihood.

    Empty grids keep the current value of that parameter. For Matérn the
    lengthscale value sets the largest per-dimension lengthscale. Ties keep
    the first combination in grid order.
    """
    y = np.asarray(train_y, dtype=float)
    if len(y) == 0:
        return spec
    amps = list(amplitudes) or [None]
    lens = list(lengthscales) or [None]
    if isinstance(spec, Tanimoto):
        lens = [None]
    best, best_val = spec, -np.inf
    for a, ell in itertools.product(amps, lens):
        cand = spec.with_params(amplitude=a, lengthscale=ell)
        try:
            val = log_marginal_likelihood(fit_posterior(cand, noise_var, train_x, y))
        except NumericalError:
            continue
        if val > best_val:
            best, best_val = cand, val
    return best

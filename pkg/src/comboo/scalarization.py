"""Pareto dominance, hypervolume scalarization and hypervolume computation.

All objectives are maximised. The hypervolume of a set ``Y`` with respect
to a reference point ``z`` is the volume of the union of boxes ``[z, y]``.
"""

from __future__ import annotations

import math

import numpy as np

from comboo.errors import InputError, UnsupportedError

THETA_FLOOR = 1e-9


def sample_theta(m: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one direction uniformly from the positive orthant of the unit sphere."""
    return sample_thetas(m, 1, rng)[0]


def sample_thetas(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` directions as rows of an ``(n, m)`` array.

    Uses ``|N(0, I)| / norm``; rows with a component below ``THETA_FLOOR``
    are redrawn so that scalarization never divides by zero.
    """
    if m < 1:
        raise InputError("m must be >= 1")
    out = np.abs(rng.standard_normal((n, m)))
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    bad = np.any(out < THETA_FLOOR, axis=1)
    while np.any(bad):
        k = int(bad.sum())
        redo = np.abs(rng.standard_normal((k, m)))
        out[bad] = redo / np.linalg.norm(redo, axis=1, keepdims=True)
        bad = np.any(out < THETA_FLOOR, axis=1)
    return out


def scalarize(theta, y) -> np.ndarray | float:
    """Hypervolume scalarization ``min_i (max(0, y_i / theta_i)) ** m``.

    ``y`` may be a single vector or an ``(n, m)`` batch; returns a float or
    an array of length ``n`` respectively.
    """
    theta = np.asarray(theta, dtype=float)
    y = np.asarray(y, dtype=float)
    m = theta.shape[-1]
    if y.shape[-1] != m:
        raise InputError(f"theta has {m} components but y has {y.shape[-1]}")
    vals = np.min(np.maximum(y / theta, 0.0), axis=-1) ** m
    return float(vals) if vals.ndim == 0 else vals


def cm_constant(m: int) -> float:
    """Normalising constant ``pi^(m/2) / (2^m Gamma(m/2 + 1))``."""
    if m < 1:
        raise InputError("m must be >= 1")
    return math.pi ** (m / 2) / (2**m * math.gamma(m / 2 + 1))


def dominates(a, b) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return bool(np.all(a >= b) and np.any(a > b))


def pareto_mask(points) -> np.ndarray:
    """Boolean mask of non-dominated rows. Exact duplicates all survive."""
    Y = np.asarray(points, dtype=float)
    if Y.size == 0:
        return np.zeros(len(Y), dtype=bool)
    Y = Y.reshape(len(Y), -1)
    ge = np.all(Y[:, None, :] >= Y[None, :, :], axis=2)
    gt = np.any(Y[:, None, :] > Y[None, :, :], axis=2)
    dominated_by = ge & gt  # [i, j]: i dominates j
    return ~np.any(dominated_by, axis=0)


def pareto_front(points) -> np.ndarray:
    Y = np.asarray(points, dtype=float)
    if Y.size == 0:
        return Y.reshape(0, Y.shape[-1] if Y.ndim == 2 else 0)
    Y = Y.reshape(len(Y), -1)
    return Y[pareto_mask(Y)]


def _prepare(points, z) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=float).reshape(-1)
    Y = np.asarray(points, dtype=float)
    if Y.size == 0:
        return np.zeros((0, len(z))), z
    Y = Y.reshape(-1, Y.shape[-1]) if Y.ndim > 1 else Y.reshape(1, -1)
    if Y.shape[1] != len(z):
        raise InputError(f"points have {Y.shape[1]} columns but z has {len(z)}")
    if not np.all(np.isfinite(z)):
        raise InputError("reference point must be finite")
    return Y, z


def _hv2d(Y: np.ndarray, z: np.ndarray) -> float:
    Y = Y[np.all(Y > z, axis=1)]
    if len(Y) == 0:
        return 0.0
    order = np.lexsort((-Y[:, 1], -Y[:, 0]))
    total, best_y2 = 0.0, z[1]
    for y1, y2 in Y[order]:
        if y2 > best_y2:
            total += (y1 - z[0]) * (y2 - best_y2)
            best_y2 = y2
    return total


def _hv3d(Y: np.ndarray, z: np.ndarray) -> float:
    Y = Y[np.all(Y > z, axis=1)]
    if len(Y) == 0:
        return 0.0
    Y = Y[np.argsort(-Y[:, 2], kind="stable")]
    levels = np.r_[Y[:, 2], z[2]]
    total = 0.0
    for k in range(len(Y)):
        depth = levels[k] - levels[k + 1]
        if depth > 0:
            total += _hv2d(Y[: k + 1, :2], z[:2]) * depth
    return total


def hypervolume_exact(points, z) -> float:
    """Exact hypervolume for two or three objectives.

    Points not strictly above ``z`` in every coordinate add no volume.
    """
    Y, z = _prepare(points, z)
    m = len(z)
    if m == 1:
        return float(max(0.0, (Y[:, 0].max() - z[0]) if len(Y) else 0.0))
    if m == 2:
        return _hv2d(Y, z)
    if m == 3:
        return _hv3d(Y, z)
    raise UnsupportedError(f"exact hypervolume supports m <= 3, got m={m}; use hypervolume_mc")


def hypervolume_mc(points, z, n_samples: int, rng: np.random.Generator,
                   return_stderr: bool = False):
    """Monte Carlo hypervolume via random scalarizations.

    Averages ``max_y s_theta(y - z)`` over ``n_samples`` directions and
    multiplies by ``cm_constant(m)``. With ``return_stderr`` also returns
    the standard error of the estimate.
    """
    if n_samples < 1:
        raise InputError("n_samples must be >= 1")
    Y, z = _prepare(points, z)
    m = len(z)
    Y = Y[np.all(Y > z, axis=1)]
    if len(Y) == 0:
        return (0.0, 0.0) if return_stderr else 0.0
    D = pareto_front(Y) - z
    cm = cm_constant(m)
    thetas = sample_thetas(m, n_samples, rng)
    vals = np.empty(n_samples)
    chunk = max(1, 2_000_000 // max(len(D) * m, 1))
    for s in range(0, n_samples, chunk):
        th = thetas[s:s + chunk]
        ratios = np.min(D[None, :, :] / th[:, None, :], axis=2)
        vals[s:s + chunk] = np.max(ratios, axis=1) ** m
    est = cm * float(vals.mean())
    if not return_stderr:
        return est
    se = cm * float(vals.std(ddof=1)) / math.sqrt(n_samples) if n_samples > 1 else float("inf")
    return est, se

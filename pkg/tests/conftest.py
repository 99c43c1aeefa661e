"""Shared oracles: brute-force references the implementation is checked against."""

from __future__ import annotations

import numpy as np

from eos import Dataset


def simplex_grid(dims: int, step: float) -> np.ndarray:
    """All grid points of the (dims-1)-simplex with the given resolution."""
    n = int(round(1.0 / step))
    if dims == 2:
        i = np.arange(n + 1)
        return np.stack([i / n, (n - i) / n], axis=1)
    if dims == 3:
        i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        keep = i + j <= n
        i, j = i[keep], j[keep]
        return np.stack([i / n, j / n, (n - i - j) / n], axis=1)
    if dims == 4:
        i, j, k = np.meshgrid(
            np.arange(n + 1), np.arange(n + 1), np.arange(n + 1), indexing="ij"
        )
        keep = i + j + k <= n
        i, j, k = i[keep], j[keep], k[keep]
        return np.stack([i / n, j / n, k / n, (n - i - j - k) / n], axis=1)
    raise NotImplementedError(f"simplex grid not implemented for dims={dims}")


def grid_objective(weights_grid: np.ndarray, errors: np.ndarray, alpha: float) -> np.ndarray:
    """Vectorized L(w) = w.g + alpha * sum(w log w) over rows of the grid."""
    safe = np.where(weights_grid > 0, weights_grid, 1.0)
    entropy_term = np.sum(weights_grid * np.log(safe), axis=1)
    return weights_grid @ errors + alpha * entropy_term


def grid_min_objective(errors: np.ndarray, alpha: float, step: float) -> float:
    """Dense-grid minimum of the entropic objective over the simplex."""
    grid = simplex_grid(errors.size, step)
    return float(grid_objective(grid, errors, alpha).min())


def dense_inverse_gaussian_error(dataset: Dataset, mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Reference Gaussian error via explicit inverse and determinant."""
    d = dataset.n_features
    inv = np.linalg.inv(sigma)
    _, logdet = np.linalg.slogdet(sigma)
    diff = dataset.instances - mu
    maha = np.einsum("ij,jk,ik->i", diff, inv, diff)
    return (0.5 * logdet + 0.5 * maha) / d


def finite_difference_gradient(func, point: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    grad = np.zeros_like(point)
    for i in range(point.size):
        forward = point.copy()
        backward = point.copy()
        forward[i] += step
        backward[i] -= step
        grad[i] = (func(forward) - func(backward)) / (2.0 * step)
    return grad


def planted_gaussian_2d(seed: int = 7, n_inliers: int = 190, n_outliers: int = 10):
    """190 standard-normal points plus 10 planted at radius > 6, shuffled.

    Returns (dataset, planted_index_set).
    """
    rng = np.random.default_rng(seed)
    inliers = rng.standard_normal((n_inliers, 2))
    angles = rng.uniform(0.0, 2.0 * np.pi, n_outliers)
    radii = rng.uniform(6.5, 8.0, n_outliers)
    outliers = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
    stacked = np.vstack([inliers, outliers])
    perm = rng.permutation(n_inliers + n_outliers)
    planted = frozenset(int(i) for i in np.flatnonzero(perm >= n_inliers))
    return Dataset(stacked[perm]), planted

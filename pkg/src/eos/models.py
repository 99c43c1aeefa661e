"""Concrete error models: multivariate Gaussian and squared Euclidean.

Both satisfy the ``ErrorModel`` contract: ``update_theta`` returns the exact
minimizer of the weighted error (up to a tiny covariance ridge), so the
alternating fit is guaranteed to descend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import check_weights
from .data import Dataset
from .exceptions import InvalidInputError, ModelError

__all__ = [
    "GaussianParams",
    "covariance_floor",
    "gaussian_error",
    "weighted_gaussian_mle",
    "mahalanobis_squared",
    "GaussianModel",
    "squared_euclidean_error",
    "SquaredEuclideanModel",
]

# Covariance eigenvalues are floored at RIDGE_FACTOR times the dataset's
# mean per-coordinate variance.  The floor is a constant of the dataset, not
# of the current weights: that keeps every parameter update an exact
# minimizer over one fixed feasible set, which is what guarantees descent
# even when the weights collapse onto a handful of points.
RIDGE_FACTOR = 1e-8


@dataclass(frozen=True)
class GaussianParams:
    """Mean and covariance of a multivariate Gaussian model.

    ``ridge`` records any diagonal regularization that was actually added
    to keep the covariance positive definite.  Definiteness itself is
    checked lazily, at the first factorization.
    """

    mu: np.ndarray
    sigma: np.ndarray
    ridge: float = 0.0

    def __post_init__(self) -> None:
        mu = np.array(self.mu, dtype=float, copy=True)
        sigma = np.array(self.sigma, dtype=float, copy=True)
        if mu.ndim != 1:
            raise InvalidInputError(f"mu must be a vector, got shape {mu.shape}")
        d = mu.shape[0]
        if sigma.shape != (d, d):
            raise InvalidInputError(f"sigma must be {d}x{d}, got shape {sigma.shape}")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise InvalidInputError("mu and sigma must be finite")
        scale = max(1.0, float(np.abs(sigma).max()))
        if np.abs(sigma - sigma.T).max() > 1e-10 * scale:
            raise InvalidInputError("sigma is not symmetric within 1e-10")
        if not (self.ridge >= 0.0):
            raise InvalidInputError(f"ridge must be non-negative, got {self.ridge!r}")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "ridge", float(self.ridge))

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


def _cholesky_lower(params: GaussianParams) -> np.ndarray:
    try:
        return np.linalg.cholesky(params.sigma)
    except np.linalg.LinAlgError:
        smallest = float(np.linalg.eigvalsh(params.sigma)[0])
        raise ModelError(
            f"covariance is not positive definite (smallest eigenvalue {smallest:.6e})"
        ) from None


def mahalanobis_squared(dataset: Dataset, params: GaussianParams) -> np.ndarray:
    """(x - mu)^T Sigma^{-1} (x - mu) per row, via one triangular solve."""
    if dataset.n_features != params.dim:
        raise InvalidInputError(
            f"dataset has {dataset.n_features} features, params expect {params.dim}"
        )
    chol = _cholesky_lower(params)
    diff = dataset.instances - params.mu
    z = scipy.linalg.solve_triangular(chol, diff.T, lower=True)
    return np.einsum("ij,ij->j", z, z)


def gaussian_error(dataset: Dataset, params: GaussianParams) -> np.ndarray:
    """Per-instance negative Gaussian log-likelihood, scaled by 1/D.

    g_t = (0.5*log(det Sigma) + 0.5*(x_t-mu)^T Sigma^{-1} (x_t-mu)) / D,
    evaluated through a Cholesky factor; the covariance is never inverted
    explicitly.
    """
    if dataset.n_features != params.dim:
        raise InvalidInputError(
            f"dataset has {dataset.n_features} features, params expect {params.dim}"
        )
    chol = _cholesky_lower(params)
    half_logdet = float(np.sum(np.log(np.diag(chol))))
    diff = dataset.instances - params.mu
    z = scipy.linalg.solve_triangular(chol, diff.T, lower=True)
    maha = np.einsum("ij,ij->j", z, z)
    return (half_logdet + 0.5 * maha) / params.dim


def covariance_floor(dataset: Dataset) -> float:
    """The dataset's fixed covariance eigenvalue floor.

    RIDGE_FACTOR times the mean per-coordinate variance; an absolute
    RIDGE_FACTOR for a constant dataset, where no scale is left.
    """
    spread = float(dataset.instances.var(axis=0).mean())
    return RIDGE_FACTOR * (spread if spread > 0.0 else 1.0)


def weighted_gaussian_mle(dataset: Dataset, weights: np.ndarray) -> GaussianParams:
    """Weighted maximum-likelihood mean and covariance, with a spectrum floor.

    mu = sum_t w_t x_t and Sigma = sum_t w_t (x_t-mu)(x_t-mu)^T; the weights
    already sum to one so no further normalization is applied.  Covariance
    eigenvalues below ``covariance_floor(dataset)`` are raised to it and the
    floor is recorded as the ridge.  Eigenvalue flooring is the exact
    minimizer of the weighted Gaussian error over covariances bounded below
    by the floor, so the update never increases the weighted error even for
    one-hot weights, where the unconstrained problem is unbounded.
    """
    w = check_weights(weights, dataset.n_instances)
    x = dataset.instances
    mu = w @ x
    centered = x - mu
    sigma = (centered * w[:, None]).T @ centered
    sigma = 0.5 * (sigma + sigma.T)

    floor = covariance_floor(dataset)
    ridge = 0.0
    eigenvalues, eigenvectors = np.linalg.eigh(sigma)
    if float(eigenvalues[0]) < floor:
        sigma = (eigenvectors * np.maximum(eigenvalues, floor)) @ eigenvectors.T
        sigma = 0.5 * (sigma + sigma.T)
        ridge = floor
    params = GaussianParams(mu=mu, sigma=sigma, ridge=ridge)
    # Surface a degenerate covariance here rather than mid-evaluation.
    _cholesky_lower(params)
    return params


class GaussianModel:
    """Gaussian negative log-likelihood with the weighted-MLE update."""

    def update_theta(self, dataset: Dataset, weights: np.ndarray) -> GaussianParams:
        return weighted_gaussian_mle(dataset, weights)

    def evaluate(self, dataset: Dataset, theta: GaussianParams) -> np.ndarray:
        return gaussian_error(dataset, theta)


def squared_euclidean_error(dataset: Dataset, center: np.ndarray) -> np.ndarray:
    """g_t = ||x_t - center||^2."""
    c = np.asarray(center, dtype=float)
    if c.ndim != 1 or c.shape[0] != dataset.n_features:
        raise InvalidInputError(
            f"center must have length {dataset.n_features}, got shape {c.shape}"
        )
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("center must be finite")
    diff = dataset.instances - c
    return np.einsum("ij,ij->i", diff, diff)


class SquaredEuclideanModel:
    """Squared-distance error; the weighted mean is the exact update."""

    def update_theta(self, dataset: Dataset, weights: np.ndarray) -> np.ndarray:
        w = check_weights(weights, dataset.n_instances)
        return w @ dataset.instances

    def evaluate(self, dataset: Dataset, theta: np.ndarray) -> np.ndarray:
        return squared_euclidean_error(dataset, theta)

"""Row-normalized Gaussian affinities and their generalization.

For squared Euclidean errors the entropic weight update reproduces the
classic spherically-symmetric Gaussian affinity

    p(j | i) = exp(-||x_i - x_j||^2 / (2 sigma^2)) / sum_k exp(-||x_i - x_k||^2 / (2 sigma^2))

with sigma^2 = alpha / 2.  The same update applied to arbitrary per-pair
error values yields affinities for non-Euclidean costs.  The self pair
(i, i) is excluded from every row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import check_errors, shannon_entropy, w_step
from .data import Dataset
from .exceptions import CalibrationError, InvalidConfigError, InvalidInputError

__all__ = [
    "AffinityRow",
    "gaussian_affinity_row",
    "generalized_affinity_row",
    "calibrate_row_alpha",
    "affinity_rows",
]


@dataclass(frozen=True)
class AffinityRow:
    """One anchor's affinity distribution over the other T-1 instances.

    ``values[k]`` refers to neighbor ``j`` where j runs over all indices
    except the anchor, in ascending order.  ``sigma_sq`` is only set when
    the underlying errors are squared Euclidean distances.
    """

    anchor_index: int
    values: np.ndarray
    sigma_sq: float | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 1 or values.size < 1:
            raise InvalidInputError(f"values must be a non-empty vector, got shape {values.shape}")
        if np.any(values < 0) or abs(float(values.sum()) - 1.0) > 1e-12:
            raise InvalidInputError("affinity values must be non-negative and sum to 1")
        if self.sigma_sq is not None and not (self.sigma_sq > 0):
            raise InvalidInputError(f"sigma_sq must be positive, got {self.sigma_sq!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def neighbor_indices(self) -> np.ndarray:
        """Dataset indices the entries of ``values`` refer to."""
        n = self.values.size + 1
        return np.delete(np.arange(n), self.anchor_index)


def _squared_distances_from(dataset: Dataset, i: int) -> np.ndarray:
    diff = dataset.instances - dataset.instances[i]
    sq = np.einsum("ij,ij->i", diff, diff)
    return np.delete(sq, i)


def gaussian_affinity_row(dataset: Dataset, i: int, sigma_sq: float) -> AffinityRow:
    """Gaussian affinity row for anchor i with bandwidth sigma^2.

    Identical to ``w_step`` on the squared distances with alpha = 2*sigma^2,
    including the stabilization.
    """
    if dataset.n_instances < 2:
        raise InvalidInputError("at least two instances are required for an affinity row")
    if not 0 <= i < dataset.n_instances:
        raise InvalidInputError(f"anchor index {i} out of range for T={dataset.n_instances}")
    if not (isinstance(sigma_sq, (int, float)) and math.isfinite(sigma_sq) and sigma_sq > 0):
        raise InvalidConfigError(f"sigma_sq must be a positive finite real, got {sigma_sq!r}")
    values = w_step(_squared_distances_from(dataset, i), 2.0 * float(sigma_sq))
    return AffinityRow(anchor_index=i, values=values, sigma_sq=float(sigma_sq))


def generalized_affinity_row(
    errors_for_anchor: np.ndarray,
    alpha: float,
    *,
    anchor_index: int = 0,
    squared_euclidean: bool = False,
) -> AffinityRow:
    """Affinity row for arbitrary per-neighbor error values.

    ``sigma_sq`` is reported as alpha/2 only when the caller declares the
    errors to be squared Euclidean distances; for other costs there is no
    bandwidth interpretation.
    """
    values = w_step(errors_for_anchor, alpha)
    sigma_sq = float(alpha) / 2.0 if squared_euclidean else None
    return AffinityRow(anchor_index=anchor_index, values=values, sigma_sq=sigma_sq)


def calibrate_row_alpha(
    errors_for_anchor: np.ndarray,
    target_perplexity: float,
    *,
    rel_tol: float = 1e-4,
    max_steps: int = 256,
) -> float:
    """Bisect log(alpha) until exp(row entropy) matches the target perplexity.

    The perplexity of a row is non-decreasing in alpha, ranging from the
    multiplicity of the smallest error up to the number of neighbors.
    Targets outside that range raise ``CalibrationError`` naming the
    achievable interval.
    """
    g = check_errors(errors_for_anchor)
    n = g.size
    if not (1.0 <= target_perplexity <= n):
        raise InvalidInputError(
            f"target perplexity must lie in [1, {n}] for {n} neighbors, got {target_perplexity!r}"
        )
    target = float(target_perplexity)
    tol = rel_tol * target

    spread = float(g.max() - g.min())
    if spread == 0.0:
        if abs(n - target) <= tol:
            return 1.0
        raise CalibrationError(
            f"all neighbor errors are identical; only perplexity {n} is achievable "
            f"(target {target})"
        )

    def perplexity(alpha: float) -> float:
        return math.exp(shannon_entropy(w_step(g, alpha)))

    lo, hi = spread * 1e-12, spread * 1e12
    p_lo, p_hi = perplexity(lo), perplexity(hi)
    if target < p_lo - tol:
        raise CalibrationError(
            f"target perplexity {target} below achievable range [{p_lo:.6g}, {p_hi:.6g}] "
            "(duplicate smallest errors)"
        )
    if target > p_hi + tol:
        raise CalibrationError(
            f"target perplexity {target} above achievable range [{p_lo:.6g}, {p_hi:.6g}]"
        )
    if abs(p_lo - target) <= tol:
        return lo
    if abs(p_hi - target) <= tol:
        return hi

    achieved = p_lo
    for _ in range(max_steps):
        mid = math.sqrt(lo * hi)
        achieved = perplexity(mid)
        if abs(achieved - target) <= tol:
            return mid
        if achieved < target:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"perplexity calibration did not converge in {max_steps} steps "
        f"(achieved {achieved:.6g}, target {target})"
    )


def affinity_rows(
    dataset: Dataset,
    *,
    sigma_sq: float | None = None,
    alpha: float | None = None,
    perplexity: float | None = None,
) -> list[AffinityRow]:
    """All T rows of the affinity matrix, under exactly one bandwidth mode.

    ``sigma_sq`` or ``alpha`` fix a shared bandwidth (alpha = 2*sigma_sq);
    ``perplexity`` calibrates alpha per anchor.
    """
    chosen = [v for v in (sigma_sq, alpha, perplexity) if v is not None]
    if len(chosen) != 1:
        raise InvalidConfigError(
            "exactly one of sigma_sq, alpha, or perplexity must be given"
        )
    if dataset.n_instances < 2:
        raise InvalidInputError("at least two instances are required for affinities")

    rows: list[AffinityRow] = []
    for i in range(dataset.n_instances):
        if perplexity is not None:
            errors = _squared_distances_from(dataset, i)
            row_alpha = calibrate_row_alpha(errors, perplexity)
            rows.append(
                generalized_affinity_row(
                    errors, row_alpha, anchor_index=i, squared_euclidean=True
                )
            )
        else:
            ssq = float(sigma_sq) if sigma_sq is not None else float(alpha) / 2.0
            rows.append(gaussian_affinity_row(dataset, i, ssq))
    return rows

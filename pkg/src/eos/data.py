"""Dataset container shared by every module."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError


@dataclass(frozen=True)
class Dataset:
    """A fixed batch of T instances, one D-dimensional row per instance.

    ``labels``, when present, must be binary (0/1) and aligned with the rows.
    Arrays are copied and frozen so a Dataset can be shared across threads.
    """

    instances: np.ndarray
    labels: np.ndarray | None = None
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        x = np.array(self.instances, dtype=float, copy=True)
        if x.ndim != 2:
            raise InvalidInputError(
                f"instances must be a 2-D matrix, got ndim={x.ndim}"
            )
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise InvalidInputError(f"instances must be at least 1x1, got {x.shape}")
        if not np.all(np.isfinite(x)):
            bad = np.argwhere(~np.isfinite(x))[0]
            raise InvalidInputError(
                f"instances contain a non-finite entry at row {bad[0]}, column {bad[1]}"
            )
        x.setflags(write=False)
        object.__setattr__(self, "instances", x)

        if self.labels is not None:
            y = np.asarray(self.labels)
            if y.ndim != 1 or y.shape[0] != x.shape[0]:
                raise InvalidInputError(
                    f"labels must be a vector of length {x.shape[0]}, got shape {y.shape}"
                )
            values = np.unique(y)
            if not np.all(np.isin(values, (0, 1))):
                raise InvalidInputError(
                    f"labels must be binary 0/1, found values {values.tolist()}"
                )
            y = y.astype(np.int64)
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)

        if self.feature_names is not None:
            names = tuple(str(n) for n in self.feature_names)
            if len(names) != x.shape[1]:
                raise InvalidInputError(
                    f"feature_names has {len(names)} entries for {x.shape[1]} columns"
                )
            object.__setattr__(self, "feature_names", names)

    @property
    def n_instances(self) -> int:
        return self.instances.shape[0]

    @property
    def n_features(self) -> int:
        return self.instances.shape[1]

    def subset(self, indices: np.ndarray) -> "Dataset":
        """Row-select a new Dataset (labels follow when present)."""
        idx = np.asarray(indices, dtype=np.intp)
        labels = self.labels[idx] if self.labels is not None else None
        return Dataset(self.instances[idx], labels, self.feature_names)

    def with_labels(self, labels: np.ndarray) -> "Dataset":
        """Return a copy carrying the given label vector."""
        return Dataset(self.instances, labels, self.feature_names)

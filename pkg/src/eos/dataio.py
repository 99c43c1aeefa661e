"""CSV ingestion with strict cell-level error reporting."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .data import Dataset
from .exceptions import InvalidConfigError, ParseError

__all__ = ["parse_csv_dataset"]


def parse_csv_dataset(
    path: str | Path,
    label_column: str | None = None,
    drop_columns: tuple[str, ...] = (),
    label_map: dict[str, int] | None = None,
) -> Dataset:
    """Load a headered CSV of numeric features into a Dataset.

    ``drop_columns`` are removed before anything else (an id column, say).
    ``label_column`` values go through ``label_map`` (e.g. {"M": 1, "B": 0});
    without a map they must already be 0/1.  Every remaining cell must be a
    non-blank number; violations name the file line and column.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")

    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: file is empty, expected a header row") from None

        for name in drop_columns:
            if name not in header:
                raise InvalidConfigError(f"{path}: drop column {name!r} not found in header")
        if label_column is not None and label_column not in header:
            raise InvalidConfigError(f"{path}: label column {label_column!r} not found in header")

        dropped = set(drop_columns)
        feature_cols = [
            (i, name)
            for i, name in enumerate(header)
            if name not in dropped and name != label_column
        ]
        label_idx = header.index(label_column) if label_column is not None else None

        features: list[list[float]] = []
        labels: list[int] = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: line {line_no} has {len(row)} cells, header has {len(header)}"
                )
            values = []
            for col_idx, col_name in feature_cols:
                cell = row[col_idx].strip()
                if cell == "":
                    raise ParseError(
                        f"{path}: blank cell at line {line_no}, column {col_name!r}"
                    )
                try:
                    values.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{path}: non-numeric cell {cell!r} at line {line_no}, "
                        f"column {col_name!r}"
                    ) from None
            features.append(values)
            if label_idx is not None:
                cell = row[label_idx].strip()
                if label_map is not None:
                    if cell not in label_map:
                        raise ParseError(
                            f"{path}: label value {cell!r} at line {line_no} not in label map "
                            f"{sorted(label_map)}"
                        )
                    labels.append(int(label_map[cell]))
                else:
                    try:
                        value = int(float(cell))
                    except ValueError:
                        raise ParseError(
                            f"{path}: label value {cell!r} at line {line_no} is not numeric; "
                            "provide a label map"
                        ) from None
                    if value not in (0, 1):
                        raise ParseError(
                            f"{path}: label value {cell!r} at line {line_no} is not 0/1; "
                            "provide a label map"
                        )
                    labels.append(value)

    if not features:
        raise ParseError(f"{path}: no data rows")
    return Dataset(
        np.asarray(features, dtype=float),
        np.asarray(labels, dtype=int) if label_idx is not None else None,
        tuple(name for _, name in feature_cols),
    )

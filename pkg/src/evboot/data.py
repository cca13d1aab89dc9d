"""Tabular observation data: the unit of non-parametric resampling."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MissingValueError(ValueError):
    """A required cell in the input table is empty or non-numeric."""


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of i.i.d. rows: response ``y`` plus covariates ``x``.

    Rows are exchangeable and are resampled jointly (response together with
    its covariates).  ``column_names`` names the covariate columns of ``x``
    in order.
    """

    y: np.ndarray
    x: np.ndarray
    column_names: tuple[str, ...]
    response_name: str = "y"

    def __post_init__(self) -> None:
        y = np.ascontiguousarray(self.y, dtype=float)
        x = np.ascontiguousarray(self.x, dtype=float)
        if y.ndim != 1:
            raise ValueError("response must be one-dimensional")
        if x.ndim != 2:
            raise ValueError("covariates must form a 2-d matrix")
        if y.shape[0] < 1:
            raise ValueError("dataset needs at least one row")
        if x.shape[0] != y.shape[0]:
            raise ValueError(
                f"row mismatch: {y.shape[0]} responses, {x.shape[0]} covariate rows"
            )
        if len(self.column_names) != x.shape[1]:
            raise ValueError(
                f"{x.shape[1]} covariate columns but {len(self.column_names)} names"
            )
        if not np.isfinite(y).all() or not np.isfinite(x).all():
            raise MissingValueError("dataset contains missing or non-finite values")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def take(self, indices: np.ndarray) -> "Dataset":
        """Row subset/resample preserving column metadata."""
        idx = np.asarray(indices)
        return Dataset(self.y[idx], self.x[idx], self.column_names, self.response_name)

    def covariate_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise KeyError(f"no covariate column named {name!r}") from None


def load_csv(path: str | Path, response: str) -> Dataset:
    """Read a headered CSV into a :class:`Dataset`.

    One column, named by ``response``, becomes the response; every other
    column is a numeric covariate in header order.  Empty or non-numeric
    cells raise :class:`MissingValueError` (no imputation).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, a header row is required") from None
        header = [name.strip() for name in header]
        if response not in header:
            raise KeyError(
                f"{path}: response column {response!r} not found "
                f"(columns: {', '.join(header)})"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields")
            parsed = []
            for name, cell in zip(header, row):
                cell = cell.strip()
                if cell == "":
                    raise MissingValueError(
                        f"{path}:{lineno}: missing value in column {name!r}"
                    )
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise MissingValueError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {name!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    table = np.asarray(rows, dtype=float)
    resp_idx = header.index(response)
    cov_idx = [j for j in range(len(header)) if j != resp_idx]
    return Dataset(
        y=table[:, resp_idx],
        x=table[:, cov_idx],
        column_names=tuple(header[j] for j in cov_idx),
        response_name=response,
    )

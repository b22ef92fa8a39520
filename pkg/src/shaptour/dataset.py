"""Tabular ingestion: CSV loading, the data contract, and the Dataset type.

Predictors must form a complete numeric matrix; the response is either
categorical (class labels) or quantitative. Models are trained on the
original, unscaled units; scaling happens separately for visuals and
statistics.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import DataValidationError
from .validation import as_matrix

Task = Literal["classification", "regression"]

# Auto task detection: a numeric response with few distinct values is
# treated as class labels. The CLI flag overrides this heuristic.
AUTO_CLASSIFICATION_MAX_DISTINCT = 10

MIN_ROWS = 10
MIN_FEATURES = 2


@dataclass(frozen=True)
class Response:
    """Observed response values: class indices plus levels, or raw reals."""

    kind: Literal["categorical", "quantitative"]
    observed: np.ndarray
    levels: Optional[tuple[str, ...]] = None

    @property
    def n_levels(self) -> int:
        return len(self.levels) if self.levels is not None else 0


@dataclass(frozen=True)
class Dataset:
    """A validated, complete numeric predictor matrix with its response."""

    name: str
    x: np.ndarray
    feature_names: tuple[str, ...]
    row_labels: tuple[str, ...]
    response: Response

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def task(self) -> Task:
        return "classification" if self.response.kind == "categorical" else "regression"

    def __post_init__(self):
        x = as_matrix(self.x, "x")
        object.__setattr__(self, "x", x)
        n, p = x.shape
        if n < MIN_ROWS:
            raise DataValidationError(f"need at least {MIN_ROWS} rows, got {n}")
        if p < MIN_FEATURES:
            raise DataValidationError(f"need at least {MIN_FEATURES} predictors, got {p}")
        if len(self.feature_names) != p:
            raise DataValidationError("feature_names length does not match x")
        if len(set(self.feature_names)) != p:
            raise DataValidationError("feature_names must be unique")
        if len(self.row_labels) != n:
            raise DataValidationError("row_labels length does not match x")
        obs = self.response.observed
        if len(obs) != n:
            raise DataValidationError("response length does not match x")
        if self.response.kind == "categorical":
            levels = self.response.levels
            if levels is None or len(levels) < 2:
                raise DataValidationError("categorical response needs at least 2 levels")
            counts = np.bincount(obs.astype(int), minlength=len(levels))
            thin = [levels[i] for i in np.nonzero(counts < 2)[0]]
            if thin:
                raise DataValidationError(
                    f"each level needs at least 2 observations; too few for: {thin}"
                )


def _parse_number(cell: str) -> float:
    # Decimal-point numbers only; blank cells are contract violations.
    return float(cell)


def _looks_numeric(values: Sequence[str]) -> bool:
    try:
        for v in values:
            _parse_number(v)
    except ValueError:
        return False
    return True


def _sorted_levels(values: Sequence[str]) -> list[str]:
    uniq = sorted(set(values))
    if _looks_numeric(uniq):
        uniq.sort(key=float)
    return uniq


def load_csv(
    path,
    response_column: str,
    task: Literal["auto", "classification", "regression"] = "auto",
    name: Optional[str] = None,
) -> Dataset:
    """Load an RFC-4180 CSV (header row required, UTF-8) into a Dataset.

    Every non-response column must parse as a number; the response column
    may be text (class labels) or numeric. With task="auto" the response is
    treated as categorical iff it is non-numeric or has at most
    AUTO_CLASSIFICATION_MAX_DISTINCT distinct values.
    """
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"file not found: {path}")
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DataValidationError("empty file: a header row is required") from None
        rows = list(reader)

    if response_column not in header:
        raise DataValidationError(
            f"response column '{response_column}' not found; columns are {header}"
        )
    resp_idx = header.index(response_column)
    feature_names = tuple(h for i, h in enumerate(header) if i != resp_idx)

    n, p = len(rows), len(feature_names)
    x = np.empty((n, p), dtype=np.float64)
    resp_raw: list[str] = []
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise DataValidationError(
                f"row {i + 1} has {len(row)} cells, expected {len(header)}"
            )
        j_out = 0
        for j, cell in enumerate(row):
            if j == resp_idx:
                if cell == "":
                    raise DataValidationError(
                        f"missing response value at row {i + 1}, column '{response_column}'"
                    )
                resp_raw.append(cell)
                continue
            if cell == "":
                raise DataValidationError(
                    f"missing cell at row {i + 1}, column '{header[j]}'"
                )
            try:
                x[i, j_out] = _parse_number(cell)
            except ValueError:
                raise DataValidationError(
                    f"non-numeric predictor value '{cell}' at row {i + 1}, "
                    f"column '{header[j]}'"
                ) from None
            j_out += 1
    if not np.isfinite(x).all():
        bad = np.argwhere(~np.isfinite(x))[0]
        raise DataValidationError(
            f"non-finite predictor value at row {bad[0] + 1}, "
            f"column '{feature_names[bad[1]]}'"
        )

    if task == "auto":
        numeric = _looks_numeric(resp_raw)
        if not numeric or len(set(resp_raw)) <= AUTO_CLASSIFICATION_MAX_DISTINCT:
            task = "classification"
        else:
            task = "regression"

    if task == "classification":
        levels = _sorted_levels(resp_raw)
        index = {lvl: k for k, lvl in enumerate(levels)}
        observed = np.array([index[v] for v in resp_raw], dtype=np.int64)
        response = Response("categorical", observed, tuple(levels))
    else:
        try:
            observed = np.array([_parse_number(v) for v in resp_raw], dtype=np.float64)
        except ValueError:
            raise DataValidationError(
                f"response column '{response_column}' is not numeric; "
                "cannot use task=regression"
            ) from None
        response = Response("quantitative", observed)

    row_labels = tuple(str(i + 1) for i in range(n))
    return Dataset(
        name=name or path.stem,
        x=x,
        feature_names=feature_names,
        row_labels=row_labels,
        response=response,
    )


def penguins_path() -> Path:
    """Filesystem path of the bundled Palmer penguins CSV (333 rows, 4 predictors)."""
    return Path(resources.files("shaptour").joinpath("data/penguins.csv"))


def load_penguins() -> Dataset:
    return load_csv(penguins_path(), response_column="species", task="classification",
                    name="penguins")

"""Input validation helpers used by the estimators and geometry functions."""

from __future__ import annotations

import numpy as np

from .errors import ArityMismatchError, DataValidationError


def as_matrix(x, name: str = "x") -> np.ndarray:
    """Coerce to a 2D float64 array of finite values."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DataValidationError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if not np.isfinite(arr).all():
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise DataValidationError(
            f"{name} contains a non-finite value at row {bad[0]}, column {bad[1]}"
        )
    return arr


def as_vector(x, name: str = "x") -> np.ndarray:
    """Coerce to a 1D float64 array of finite values."""
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.isfinite(arr).all():
        raise DataValidationError(f"{name} contains a non-finite value")
    return arr


def check_arity(vec: np.ndarray, p: int, name: str = "x") -> np.ndarray:
    if vec.shape[-1] != p:
        raise ArityMismatchError(f"{name} has {vec.shape[-1]} features, expected {p}")
    return vec

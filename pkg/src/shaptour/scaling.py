"""Column-wise z-scaling with recorded means and standard deviations.

All visuals and statistics run on standardized columns so that variables
measured on different scales get common support. Constant columns are kept
(as all-zero columns, sd recorded as 0) so feature indices stay stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .dataset import Dataset
from .validation import as_matrix, check_arity


@dataclass(frozen=True)
class ScaledMatrix:
    """Z-scored values plus the per-column means/sds needed to invert them."""

    values: np.ndarray
    means: np.ndarray
    sds: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def unscale(self) -> np.ndarray:
        return self.values * self.sds + self.means


class ColumnScaler(BaseEstimator, TransformerMixin):
    """Z-score columns using sample (n-1 denominator) standard deviations.

    Columns with zero variance transform to all zeros and record sd 0, so
    inverse_transform restores their constant value from the mean.
    """

    def fit(self, X, y=None):
        X = as_matrix(X, "X")
        self.means_ = X.mean(axis=0)
        self.sds_ = X.std(axis=0, ddof=1)
        self.sds_[~np.isfinite(self.sds_)] = 0.0
        return self

    def transform(self, X) -> np.ndarray:
        X = check_arity(as_matrix(X, "X"), len(self.means_), "X")
        safe = np.where(self.sds_ > 0, self.sds_, 1.0)
        z = (X - self.means_) / safe
        z[:, self.sds_ == 0] = 0.0
        return z

    def inverse_transform(self, Z) -> np.ndarray:
        Z = check_arity(as_matrix(Z, "Z"), len(self.means_), "Z")
        return Z * self.sds_ + self.means_


def scale_matrix(X) -> ScaledMatrix:
    """Z-score an arbitrary matrix, recording per-column means and sds."""
    scaler = ColumnScaler().fit(X)
    return ScaledMatrix(values=scaler.transform(X), means=scaler.means_, sds=scaler.sds_)


def scale(ds: Dataset) -> ScaledMatrix:
    """Z-score a Dataset's predictor matrix."""
    return scale_matrix(ds.x)

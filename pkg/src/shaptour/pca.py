"""Two-component PCA via covariance eigendecomposition.

Deterministic output: eigenvectors come from the symmetric solver, ordered
by descending eigenvalue, with each loading column's largest-magnitude
entry made positive. Rank-deficient inputs keep a zeroed second component
and are flagged rather than rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DataValidationError
from .scaling import ScaledMatrix
from .validation import as_matrix

_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class Embedding2D:
    coordinates: np.ndarray         # (n, 2)
    loadings: np.ndarray            # (p, 2), orthonormal columns
    variance_explained: np.ndarray  # (2,), fractions of total variance
    rank_deficient: bool = False


def _top2_eig(values: np.ndarray):
    n = values.shape[0]
    centered = values - values.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]
    return centered, eigvals, eigvecs


def _signed(column: np.ndarray) -> np.ndarray:
    peak = np.argmax(np.abs(column))
    return -column if column[peak] < 0 else column


def pca2(xs) -> Embedding2D:
    """First two principal components of a (scaled) matrix."""
    values = xs.values if isinstance(xs, ScaledMatrix) else as_matrix(xs, "values")
    if values.shape[0] <= 2:
        raise DataValidationError("PCA needs more than 2 rows")
    centered, eigvals, eigvecs = _top2_eig(values)
    total = float(eigvals.sum())
    loadings = np.column_stack([_signed(eigvecs[:, 0]), _signed(eigvecs[:, 1])])
    rank_deficient = total <= 0 or eigvals[1] <= _RANK_RTOL * max(eigvals[0], 1e-300)
    if rank_deficient:
        loadings[:, 1] = 0.0
        variance = np.array([eigvals[0] / total if total > 0 else 0.0, 0.0])
    else:
        variance = eigvals[:2] / total
    coordinates = centered @ loadings
    return Embedding2D(
        coordinates=coordinates,
        loadings=loadings,
        variance_explained=variance,
        rank_deficient=bool(rank_deficient),
    )


class PCA2(BaseEstimator, TransformerMixin):
    """Estimator facade over pca2 for pipeline composition."""

    def fit(self, X, y=None):
        emb = pca2(X)
        self.mean_ = as_matrix(X, "X").mean(axis=0)
        self.loadings_ = emb.loadings
        self.variance_explained_ = emb.variance_explained
        self.rank_deficient_ = emb.rank_deficient
        return self

    def transform(self, X) -> np.ndarray:
        X = as_matrix(X, "X")
        return (X - self.mean_) @ self.loadings_

"""Precompute everything the explorer needs and package it as a bundle.

Stage order: train the forest, attribute every observation, z-scale both
the data and the attribution matrix, embed each scaled space with 2D PCA,
then compute the color statistics. Wall-clock per stage is recorded in
milliseconds; the clock is injectable so bundle determinism is testable.
"""

from __future__ import annotations

import time
from typing import Callable, Optional

import numpy as np

from .attribution import attribution_matrix
from .bundle import FORMAT_VERSION, Bundle
from .dataset import Dataset
from .errors import PipelineStageError, ShaptourError
from .forest import Hyperparams, default_hyper, predict_matrix, train
from .pca import pca2
from .scaling import ScaledMatrix, scale_matrix
from .validation import as_matrix

ZERO_ROW_TOL = 1e-12
MAHALANOBIS_FLOOR = 1e-12


def mahalanobis_distances(Z, cov) -> np.ndarray:
    """sqrt(z' cov^-1 z) per row, via a linear solve."""
    Z = as_matrix(Z, "Z")
    cov = np.asarray(cov, dtype=float)
    d2 = np.einsum("ij,ji->i", Z, np.linalg.solve(cov, Z.T))
    return np.sqrt(np.clip(d2, 0.0, None))


def log_mahalanobis(xs) -> np.ndarray:
    """Log Mahalanobis distance of each row under the regularized sample covariance.

    Distances measure deviation from the column means (a no-op shift for
    already-centered scaled matrices). The covariance gets a ridge of
    1e-8 * trace/p so it is always invertible; distances are floored at
    1e-12 before the log.
    """
    Z = xs.values if isinstance(xs, ScaledMatrix) else as_matrix(xs, "xs")
    n, p = Z.shape
    centered = Z - Z.mean(axis=0)
    cov = centered.T @ centered / max(n - 1, 1)
    lam = 1e-8 * float(np.trace(cov)) / p
    if lam <= 0.0:  # all-constant input: every distance is zero
        return np.full(n, float(np.log(MAHALANOBIS_FLOOR)))
    d = mahalanobis_distances(centered, cov + lam * np.eye(p))
    return np.log(np.maximum(d, MAHALANOBIS_FLOOR))


def normalize_rows(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit-norm rows plus a flag for rows too small to carry a direction."""
    norms = np.linalg.norm(values, axis=1)
    zero = norms < ZERO_ROW_TOL
    safe = np.where(zero, 1.0, norms)
    normalized = values / safe[:, None]
    normalized[zero] = 0.0
    return normalized, zero


def compute_bundle(
    ds: Dataset,
    hyper: Optional[Hyperparams] = None,
    seed: int = 0,
    clock: Callable[[], float] = time.perf_counter,
    log: Optional[Callable[[str], None]] = None,
) -> Bundle:
    """Run the full precompute and return the serializable bundle."""
    if hyper is None:
        hyper = default_hyper(ds.task, ds.n, ds.p)
    timings: dict[str, float] = {}
    started = clock()

    def stage(name: str, fn):
        t0 = clock()
        try:
            result = fn()
        except ShaptourError as exc:
            raise PipelineStageError(name, exc) from exc
        timings[name] = max(0.0, (clock() - t0) * 1000.0)
        if log:
            log(f"{name}: {timings[name]:.1f} ms")
        return result

    classification = ds.task == "classification"

    def do_train():
        forest = train(ds, hyper, seed)
        margins = predict_matrix(forest, ds.x)
        return forest, margins

    forest, margins = stage("train", do_train)
    attr = stage("attribution", lambda: attribution_matrix(forest, ds))
    scaled_data, scaled_attr = stage(
        "scale", lambda: (scale_matrix(ds.x), scale_matrix(attr.values))
    )
    emb_data, emb_attr = stage("pca", lambda: (pca2(scaled_data), pca2(scaled_attr)))

    def do_statistics():
        stats = {
            "log_maha_data": log_mahalanobis(scaled_data),
            "log_maha_attr": log_mahalanobis(scaled_attr),
        }
        if classification:
            stats["predicted_class"] = np.argmax(margins, axis=1).astype(np.int64)
        else:
            stats["residual"] = ds.response.observed - margins
        return stats

    statistics = stage("statistics", do_statistics)
    normalized, zero_rows = normalize_rows(attr.values)
    timings["total"] = max(0.0, (clock() - started) * 1000.0)

    common = dict(
        format_version=FORMAT_VERSION,
        task=ds.task,
        name=ds.name,
        feature_names=ds.feature_names,
        row_labels=ds.row_labels,
        x=ds.x,
        means=scaled_data.means,
        sds=scaled_data.sds,
        scaled=scaled_data.values,
        response_kind=ds.response.kind,
        observed=ds.response.observed,
        hyper=hyper,
        seed=seed,
        attr_values=attr.values,
        attr_normalized=normalized,
        attr_zero_rows=zero_rows,
        attr_target=attr.target,
        baseline=float(attr.baseline),
        emb_data=emb_data,
        emb_attr=emb_attr,
        statistics=statistics,
        timings_ms=timings,
    )
    if classification:
        predicted = statistics["predicted_class"]
        return Bundle(
            levels=ds.response.levels,
            predicted=predicted,
            class_probs=margins,
            residuals=None,
            misclassified=predicted != ds.response.observed,
            explained_class=attr.explained_class,
            **common,
        )
    return Bundle(
        levels=None,
        predicted=margins,
        class_probs=None,
        residuals=statistics["residual"],
        misclassified=None,
        explained_class=None,
        **common,
    )

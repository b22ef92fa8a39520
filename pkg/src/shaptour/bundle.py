"""The precomputed, versioned bundle consumed by the service and UI.

A bundle is one self-describing JSON document (UTF-8, matrices as row-major
nested arrays, numbers at full round-trip precision). Top-level keys:
format_version, task, dataset, model, attribution, embeddings, statistics,
timings_ms. Loading rejects unknown major versions, ignores unknown extra
fields within a version, and re-validates the structural invariants.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (BundleInvariantError, BundleParseError, BundleVersionError,
                     DataValidationError)
from .forest import Hyperparams
from .pca import Embedding2D

FORMAT_VERSION = "1.0"

UNIT_ROW_TOL = 1e-8


@dataclass
class Bundle:
    format_version: str
    task: str
    name: str
    feature_names: tuple[str, ...]
    row_labels: tuple[str, ...]
    x: np.ndarray
    means: np.ndarray
    sds: np.ndarray
    scaled: np.ndarray
    response_kind: str
    observed: np.ndarray
    levels: Optional[tuple[str, ...]]
    hyper: Hyperparams
    seed: int
    predicted: np.ndarray
    class_probs: Optional[np.ndarray]
    residuals: Optional[np.ndarray]
    misclassified: Optional[np.ndarray]
    attr_values: np.ndarray
    attr_normalized: np.ndarray
    attr_zero_rows: np.ndarray
    attr_target: str
    baseline: float
    explained_class: Optional[np.ndarray]
    emb_data: Embedding2D
    emb_attr: Embedding2D
    statistics: dict
    timings_ms: dict

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.levels) if self.levels else 0

    def color_statistics(self) -> list[str]:
        return sorted(self.statistics.keys())

    def validate(self) -> None:
        n, p = self.x.shape
        same_n_p = [self.scaled.shape, self.attr_values.shape,
                    self.attr_normalized.shape]
        if any(s != (n, p) for s in same_n_p):
            raise BundleInvariantError("matrices do not share n and p")
        if len(self.feature_names) != p or len(self.row_labels) != n:
            raise BundleInvariantError("names do not match matrix shape")
        if len(self.observed) != n or len(self.predicted) != n:
            raise BundleInvariantError("response arrays do not match n")
        norms = np.linalg.norm(self.attr_normalized, axis=1)
        flagged = self.attr_zero_rows.astype(bool)
        if not np.allclose(norms[~flagged], 1.0, atol=UNIT_ROW_TOL):
            raise BundleInvariantError("normalized attribution row is not unit norm")
        if flagged.any() and norms[flagged].max() > UNIT_ROW_TOL:
            raise BundleInvariantError("zero-flagged attribution row is not zero")
        if self.task == "classification":
            if self.misclassified is None or self.class_probs is None:
                raise BundleInvariantError("classification bundle missing model fields")
            mis = self.predicted.astype(int) != self.observed.astype(int)
            if not np.array_equal(mis, self.misclassified.astype(bool)):
                raise BundleInvariantError(
                    "misclassified flags disagree with predictions"
                )
        else:
            if self.residuals is None:
                raise BundleInvariantError("regression bundle missing residuals")
        for stage, ms in self.timings_ms.items():
            if not (isinstance(ms, (int, float)) and ms >= 0):
                raise BundleInvariantError(f"negative or invalid timing for {stage}")


def _emb_payload(e: Embedding2D) -> dict:
    return {
        "coordinates": e.coordinates.tolist(),
        "loadings": e.loadings.tolist(),
        "variance_explained": e.variance_explained.tolist(),
        "rank_deficient": bool(e.rank_deficient),
    }


def _emb_from(payload: dict) -> Embedding2D:
    return Embedding2D(
        coordinates=np.asarray(payload["coordinates"], dtype=float),
        loadings=np.asarray(payload["loadings"], dtype=float),
        variance_explained=np.asarray(payload["variance_explained"], dtype=float),
        rank_deficient=bool(payload["rank_deficient"]),
    )


def to_payload(b: Bundle) -> dict:
    response = {"kind": b.response_kind}
    if b.response_kind == "categorical":
        response["observed"] = [int(v) for v in b.observed]
        response["levels"] = list(b.levels)
    else:
        response["observed"] = [float(v) for v in b.observed]

    model = {
        "hyper": {"n_trees": b.hyper.n_trees, "mtry": b.hyper.mtry,
                  "min_node": b.hyper.min_node},
        "seed": int(b.seed),
    }
    if b.task == "classification":
        model["predicted_class"] = [int(v) for v in b.predicted]
        model["class_probs"] = b.class_probs.tolist()
        model["misclassified"] = [bool(v) for v in b.misclassified]
    else:
        model["predicted"] = b.predicted.tolist()
        model["residuals"] = b.residuals.tolist()

    attribution = {
        "values": b.attr_values.tolist(),
        "normalized": b.attr_normalized.tolist(),
        "zero_rows": [bool(v) for v in b.attr_zero_rows],
        "target": b.attr_target,
        "baseline": float(b.baseline),
    }
    if b.task == "classification":
        attribution["explained_class"] = [int(v) for v in b.explained_class]

    statistics = {}
    for key, arr in b.statistics.items():
        values = np.asarray(arr)
        if np.issubdtype(values.dtype, np.integer):
            statistics[key] = [int(v) for v in values]
        else:
            statistics[key] = [float(v) for v in values]

    return {
        "format_version": b.format_version,
        "task": b.task,
        "dataset": {
            "name": b.name,
            "feature_names": list(b.feature_names),
            "row_labels": list(b.row_labels),
            "x": b.x.tolist(),
            "means": b.means.tolist(),
            "sds": b.sds.tolist(),
            "scaled": b.scaled.tolist(),
            "response": response,
        },
        "model": model,
        "attribution": attribution,
        "embeddings": {"data": _emb_payload(b.emb_data),
                       "attribution": _emb_payload(b.emb_attr)},
        "statistics": statistics,
        "timings_ms": {k: float(v) for k, v in b.timings_ms.items()},
    }


def from_payload(payload: dict) -> Bundle:
    try:
        version = payload["format_version"]
        if not isinstance(version, str) or "." not in version:
            raise BundleParseError(f"malformed format_version: {version!r}")
        major = version.split(".", 1)[0]
        ours = FORMAT_VERSION.split(".", 1)[0]
        if major != ours:
            raise BundleVersionError(
                f"bundle format version {version} is not supported "
                f"(this build reads major version {ours})"
            )
        task = payload["task"]
        if task not in ("classification", "regression"):
            raise BundleParseError(f"unknown task: {task!r}")
        ds = payload["dataset"]
        model = payload["model"]
        attribution = payload["attribution"]
        embeddings = payload["embeddings"]
        response = ds["response"]
        kind = response["kind"]
        hyper = Hyperparams(**{k: int(model["hyper"][k])
                               for k in ("n_trees", "mtry", "min_node")})
        classification = task == "classification"
        if classification:
            observed = np.asarray(response["observed"], dtype=np.int64)
            levels = tuple(response["levels"])
            predicted = np.asarray(model["predicted_class"], dtype=np.int64)
        else:
            observed = np.asarray(response["observed"], dtype=float)
            levels = None
            predicted = np.asarray(model["predicted"], dtype=float)
        bundle = Bundle(
            format_version=version,
            task=task,
            name=str(ds["name"]),
            feature_names=tuple(ds["feature_names"]),
            row_labels=tuple(ds["row_labels"]),
            x=np.asarray(ds["x"], dtype=float),
            means=np.asarray(ds["means"], dtype=float),
            sds=np.asarray(ds["sds"], dtype=float),
            scaled=np.asarray(ds["scaled"], dtype=float),
            response_kind=kind,
            observed=observed,
            levels=levels,
            hyper=hyper,
            seed=int(model["seed"]),
            predicted=predicted,
            class_probs=(np.asarray(model["class_probs"], dtype=float)
                         if classification else None),
            residuals=(None if classification
                       else np.asarray(model["residuals"], dtype=float)),
            misclassified=(np.asarray(model["misclassified"], dtype=bool)
                           if classification else None),
            attr_values=np.asarray(attribution["values"], dtype=float),
            attr_normalized=np.asarray(attribution["normalized"], dtype=float),
            attr_zero_rows=np.asarray(attribution["zero_rows"], dtype=bool),
            attr_target=str(attribution["target"]),
            baseline=float(attribution["baseline"]),
            explained_class=(np.asarray(attribution["explained_class"], dtype=np.int64)
                             if classification else None),
            emb_data=_emb_from(embeddings["data"]),
            emb_attr=_emb_from(embeddings["attribution"]),
            statistics={k: np.asarray(v) for k, v in payload["statistics"].items()},
            timings_ms=dict(payload["timings_ms"]),
        )
    except DataValidationError as exc:
        raise BundleInvariantError(str(exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleParseError(f"bundle document is malformed: {exc}") from exc
    bundle.validate()
    return bundle


def save_bundle(b: Bundle, path) -> None:
    """Serialize deterministically: sorted keys, compact separators, one line."""
    payload = to_payload(b)
    text = json.dumps(payload, sort_keys=True, ensure_ascii=False,
                      separators=(",", ":"))
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_bundle(path) -> Bundle:
    path = Path(path)
    if not path.exists():
        raise BundleParseError(f"no such file: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise BundleParseError(f"not a parseable bundle: {exc}") from exc
    if not isinstance(payload, dict):
        raise BundleParseError("bundle document must be a JSON object")
    return from_payload(payload)

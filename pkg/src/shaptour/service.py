"""HTTP service exposing a loaded bundle to the workbench UI.

All responses are JSON. Errors use the wire shape
{"error": {"code": ..., "message": ...}} with 400 for bad requests,
404 for unknown routes or resources, and 422 when tour geometry is
degenerate. The bundle is immutable; identical requests return identical
bodies.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from .bundle import Bundle, load_bundle
from .errors import DegenerateBasisError
from .tour import DEFAULT_ANGLE_STEP, attribution_to_basis, radial_path, restrict_basis


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


class TourRequestBody(BaseModel):
    pi_index: int
    manip_var: int
    include: Optional[list[int]] = None
    angle_step: Optional[float] = None
    basis_override: Optional[list[float]] = None


class SelectionBody(BaseModel):
    indices: list[int]


def _check_row(bundle: Bundle, i: int, what: str = "row index") -> int:
    if not 0 <= i < bundle.n:
        raise ApiError(400, "index_out_of_range",
                       f"{what} {i} out of range 0..{bundle.n - 1}")
    return i


def _observed_json(bundle: Bundle, i: int):
    if bundle.task == "classification":
        return int(bundle.observed[i])
    return float(bundle.observed[i])


def _predicted_json(bundle: Bundle, i: int):
    if bundle.task == "classification":
        return int(bundle.predicted[i])
    return float(bundle.predicted[i])


def _selection_row(bundle: Bundle, i: int) -> dict:
    row = {
        "index": i,
        "label": bundle.row_labels[i],
        "observed": _observed_json(bundle, i),
        "predicted": _predicted_json(bundle, i),
        "features": {name: float(bundle.x[i, j])
                     for j, name in enumerate(bundle.feature_names)},
    }
    for stat, values in sorted(bundle.statistics.items()):
        v = values[i]
        row[stat] = int(v) if np.issubdtype(values.dtype, np.integer) else float(v)
    if bundle.task == "classification":
        row["observed_label"] = bundle.levels[int(bundle.observed[i])]
        row["predicted_label"] = bundle.levels[int(bundle.predicted[i])]
        row["misclassified"] = bool(bundle.misclassified[i])
    return row


def create_app(bundle: Bundle, static_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="shaptour explorer", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content=_error_body(exc.code, exc.message))

    @app.exception_handler(DegenerateBasisError)
    async def handle_degenerate(request: Request, exc: DegenerateBasisError):
        return JSONResponse(status_code=422,
                            content=_error_body("degenerate_basis", str(exc)))

    @app.exception_handler(StarletteHTTPException)
    async def handle_http(request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "http_error"
        return JSONResponse(status_code=exc.status_code,
                            content=_error_body(code, str(exc.detail)))

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content=_error_body("validation_error", str(exc.errors())))

    @app.get("/api/health")
    def health():
        return {"status": "ok", "format_version": bundle.format_version}

    @app.get("/api/meta")
    def meta():
        return {
            "task": bundle.task,
            "n": bundle.n,
            "p": bundle.p,
            "name": bundle.name,
            "feature_names": list(bundle.feature_names),
            "color_statistics": bundle.color_statistics(),
            "levels": list(bundle.levels) if bundle.levels else None,
            "default_angle_step": DEFAULT_ANGLE_STEP,
        }

    @app.get("/api/attributions")
    def attributions():
        # full normalized matrix for the parallel-coordinates view
        return {
            "target": bundle.attr_target,
            "baseline": float(bundle.baseline),
            "normalized": bundle.attr_normalized.tolist(),
            "zero_rows": [bool(v) for v in bundle.attr_zero_rows],
        }

    @app.get("/api/global")
    def global_view(color: str = ""):
        if not color:
            color = "predicted_class" if bundle.task == "classification" else "residual"
        if color == "residual" and bundle.task == "classification":
            raise ApiError(400, "bad_color",
                           "residual is only defined for regression bundles")
        if color not in bundle.statistics:
            raise ApiError(400, "bad_color",
                           f"unknown color statistic '{color}'; "
                           f"available: {bundle.color_statistics()}")
        values = bundle.statistics[color]
        integer = np.issubdtype(values.dtype, np.integer)
        records = []
        for i in range(bundle.n):
            rec = {
                "index": i,
                "label": bundle.row_labels[i],
                "data_pc1": float(bundle.emb_data.coordinates[i, 0]),
                "data_pc2": float(bundle.emb_data.coordinates[i, 1]),
                "attr_pc1": float(bundle.emb_attr.coordinates[i, 0]),
                "attr_pc2": float(bundle.emb_attr.coordinates[i, 1]),
                "observed": _observed_json(bundle, i),
                "predicted": _predicted_json(bundle, i),
                "color": int(values[i]) if integer else float(values[i]),
            }
            if bundle.task == "classification":
                rec["misclassified"] = bool(bundle.misclassified[i])
            records.append(rec)
        return {
            "color": color,
            "variance_explained": {
                "data": bundle.emb_data.variance_explained.tolist(),
                "attribution": bundle.emb_attr.variance_explained.tolist(),
            },
            "records": records,
        }

    @app.post("/api/tour")
    def tour(body: TourRequestBody):
        pi = _check_row(bundle, body.pi_index, "pi_index")
        if not 0 <= body.manip_var < bundle.p:
            raise ApiError(400, "index_out_of_range",
                           f"manip_var {body.manip_var} out of range 0..{bundle.p - 1}")
        include = body.include
        if include is not None:
            if any(not 0 <= j < bundle.p for j in include):
                raise ApiError(400, "index_out_of_range",
                               "include contains an out-of-range variable index")
            if body.manip_var not in include:
                raise ApiError(400, "bad_include",
                               "include must contain manip_var")
        if body.basis_override is not None:
            if len(body.basis_override) != bundle.p:
                raise ApiError(400, "bad_basis",
                               f"basis_override must have length {bundle.p}")
            basis = attribution_to_basis(np.asarray(body.basis_override, dtype=float))
        else:
            basis = attribution_to_basis(bundle.attr_values[pi])
            if include is not None:
                basis = restrict_basis(basis, include)
        step = body.angle_step if body.angle_step is not None else DEFAULT_ANGLE_STEP
        if step <= 0:
            raise ApiError(400, "bad_angle_step", "angle_step must be positive")
        path = radial_path(basis, body.manip_var, angle_step=step)
        scores = bundle.scaled @ path.bases.T  # (n, n_frames)
        frames = [
            {
                "angle": float(path.angles[f]),
                "basis": path.bases[f].tolist(),
                "scores": scores[:, f].tolist(),
            }
            for f in range(path.n_frames)
        ]
        return {
            "pi_index": pi,
            "manip_var": body.manip_var,
            "explained_target": bundle.attr_target,
            "frames": frames,
            "waypoints": {
                "start": path.waypoints.start,
                "full": path.waypoints.full,
                "zero": path.waypoints.zero,
                "return": path.waypoints.ret,
            },
            "axis_range": [float(scores.min()), float(scores.max())],
        }

    @app.get("/api/obs/{i}")
    def observation(i: int):
        _check_row(bundle, i)
        out = {
            "index": i,
            "label": bundle.row_labels[i],
            "features": {name: float(bundle.x[i, j])
                         for j, name in enumerate(bundle.feature_names)},
            "scaled": bundle.scaled[i].tolist(),
            "observed": _observed_json(bundle, i),
            "predicted": _predicted_json(bundle, i),
            "attribution": bundle.attr_values[i].tolist(),
            "attribution_normalized": bundle.attr_normalized[i].tolist(),
            "attribution_zero": bool(bundle.attr_zero_rows[i]),
        }
        out["baseline"] = float(bundle.baseline)
        out["attribution_target"] = bundle.attr_target
        if bundle.task == "classification":
            out["observed_label"] = bundle.levels[int(bundle.observed[i])]
            out["predicted_label"] = bundle.levels[int(bundle.predicted[i])]
            out["class_probs"] = bundle.class_probs[i].tolist()
            out["explained_class"] = int(bundle.explained_class[i])
            out["misclassified"] = bool(bundle.misclassified[i])
        else:
            out["residual"] = float(bundle.residuals[i])
        return out

    @app.post("/api/selection")
    def selection(body: SelectionBody):
        for i in body.indices:
            _check_row(bundle, i, "selection index")
        return {"rows": [_selection_row(bundle, i) for i in body.indices]}

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="static")
    return app


def default_static_dir() -> Optional[Path]:
    """The built frontend, when present next to the repository root."""
    here = Path(__file__).resolve()
    for parent in here.parents:
        candidate = parent / "frontend" / "dist"
        if candidate.is_dir():
            return candidate
    return None


def serve(bundle_path, port: int = 8700, host: str = "127.0.0.1") -> None:
    """Load a bundle file and run the HTTP service (blocking)."""
    import uvicorn

    bundle = load_bundle(bundle_path)
    app = create_app(bundle, static_dir=default_static_dir())
    uvicorn.run(app, host=host, port=port, log_level="warning")

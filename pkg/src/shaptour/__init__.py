"""Local attribution explorer: forests, tree SHAP, and radial tours.

Fit a random forest, attribute each observation's prediction to its
features, turn attribution rows into 1D projection bases, and animate
radial tours that vary one variable's contribution. Everything heavy is
precomputed into a versioned bundle served over HTTP to the browser
workbench.
"""

from .attribution import (AttributionMatrix, BreakdownResult, SampledShap,
                          attribution_matrix, breakdown, conditional_expectation,
                          exact_shapley, sampled_shap, tree_shap)
from .bundle import Bundle, load_bundle, save_bundle
from .dataset import Dataset, Response, load_csv, load_penguins, penguins_path
from .errors import (ArityMismatchError, BundleError, BundleInvariantError,
                     BundleParseError, BundleVersionError, DataValidationError,
                     DegenerateBasisError, PipelineStageError, ShaptourError)
from .forest import (Forest, Hyperparams, Internal, Leaf, Prediction, RandomForest,
                     default_hyper, fit_forest, predict, predict_matrix,
                     scalar_margin, train)
from .pca import PCA2, Embedding2D, pca2
from .pipeline import compute_bundle, log_mahalanobis, mahalanobis_distances
from .scaling import ColumnScaler, ScaledMatrix, scale, scale_matrix
from .service import create_app, serve
from .tour import (TourPath, Waypoints, attribution_to_basis,
                   manipulation_direction, project, radial_path, restrict_basis,
                   rotate)

__version__ = "0.1.0"

__all__ = [
    "AttributionMatrix", "BreakdownResult", "SampledShap", "attribution_matrix",
    "breakdown", "conditional_expectation", "exact_shapley", "sampled_shap",
    "tree_shap", "Bundle", "load_bundle", "save_bundle", "Dataset", "Response",
    "load_csv", "load_penguins", "penguins_path", "ArityMismatchError",
    "BundleError", "BundleInvariantError", "BundleParseError",
    "BundleVersionError", "DataValidationError", "DegenerateBasisError",
    "PipelineStageError", "ShaptourError", "Forest", "Hyperparams", "Internal",
    "Leaf", "Prediction", "RandomForest", "default_hyper", "fit_forest",
    "predict", "predict_matrix", "scalar_margin", "train", "PCA2", "Embedding2D",
    "pca2", "compute_bundle", "log_mahalanobis", "mahalanobis_distances",
    "ColumnScaler", "ScaledMatrix", "scale", "scale_matrix", "create_app",
    "serve", "TourPath", "Waypoints", "attribution_to_basis",
    "manipulation_direction", "project", "radial_path", "restrict_basis",
    "rotate",
]

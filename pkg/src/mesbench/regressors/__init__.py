"""Seven regression algorithms behind one fit/predict contract.

fit(spec, X, y, seed) -> fitted model; predict(model, X) -> vector.
Identical (spec, X, y, seed) always gives identical predictions. Models
serialize to a versioned JSON blob via save_model/load_model.
"""

import importlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidSpec, LengthMismatch, SchemaMismatch, TooFewRows
from .spaces import (  # noqa: F401  (re-exported surface)
    ALGORITHMS,
    default_spec,
    sample_spec,
    space_for,
    validate_spec,
)

BLOB_FORMAT = "mesbench-model"
BLOB_VERSION = 1


@dataclass(frozen=True)
class ModelSpec:
    algorithm: str
    params: dict = field(default_factory=dict)


_FITTERS = {
    "poly": ("mesbench.regressors.poly", "fit_poly"),
    "tree": ("mesbench.regressors.tree", "fit_tree"),
    "forest": ("mesbench.regressors.forest", "fit_forest"),
    "adaboost": ("mesbench.regressors.adaboost", "fit_adaboost"),
    "svr": ("mesbench.regressors.svr", "fit_svr"),
    "knn": ("mesbench.regressors.knn", "fit_knn"),
    "mlp": ("mesbench.regressors.mlp", "fit_mlp"),
}

_MODEL_CLASSES = {
    "poly": ("mesbench.regressors.poly", "FittedPoly"),
    "tree": ("mesbench.regressors.tree", "FittedTree"),
    "forest": ("mesbench.regressors.forest", "FittedForest"),
    "adaboost": ("mesbench.regressors.adaboost", "FittedAdaBoost"),
    "svr": ("mesbench.regressors.svr", "FittedSvr"),
    "knn": ("mesbench.regressors.knn", "FittedKnn"),
    "mlp": ("mesbench.regressors.mlp", "FittedMlp"),
}


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise SchemaMismatch(f"X must be 2-D, got shape {X.shape}")
    return np.ascontiguousarray(X)


def fit(spec: ModelSpec, X, y, seed: int):
    """Train one model. Hyperparameters are validated against the search domain."""
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float).ravel()
    if len(y) != X.shape[0]:
        raise LengthMismatch(f"{X.shape[0]} rows vs {len(y)} targets")
    if X.shape[0] < 1:
        raise TooFewRows("cannot fit on zero rows")
    validate_spec(spec, n_columns=X.shape[1])
    module, name = _FITTERS[spec.algorithm]
    fitter = getattr(importlib.import_module(module), name)
    return fitter(X, y, seed=int(seed), **spec.params)


def predict(model, X) -> np.ndarray:
    X = _as_matrix(X)
    if X.shape[1] != model.n_features:
        raise SchemaMismatch(
            f"model was fitted on {model.n_features} features, got {X.shape[1]}")
    return model.predict(X)


def save_model(model, path) -> None:
    blob = {
        "format": BLOB_FORMAT,
        "version": BLOB_VERSION,
        "algorithm": model.algorithm,
        "state": model.to_state(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(blob, fh)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        blob = json.load(fh)
    if blob.get("format") != BLOB_FORMAT:
        raise InvalidSpec(f"not a {BLOB_FORMAT} blob")
    if blob.get("version") != BLOB_VERSION:
        raise InvalidSpec(f"unsupported blob version {blob.get('version')}")
    module, name = _MODEL_CLASSES[blob["algorithm"]]
    cls = getattr(importlib.import_module(module), name)
    return cls.from_state(blob["state"])

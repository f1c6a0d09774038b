"""Hyperparameter search: k-fold CV, per-algorithm random search, and a
budget-capped searcher that races all seven algorithm families and blends
the best finds into a weighted ensemble.

Everything here is driven by derived seeds, so one master seed pins folds,
sampled configurations, and fit randomness across runs.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .criteria import ERROR_KINDS, regression_error
from .dataset import split_indices
from .errors import AllTrialsFailed, FoldTooSmall, InvalidConfig
from .regressors import ALGORITHMS, ModelSpec, fit, predict, sample_spec, space_for
from .regressors.knn import fit_knn
from .util import derive_seed

DEFAULT_ITERATIONS = 60
DEFAULT_FOLDS = 5


# ---------------------------------------------------------------- cross-validation

def fold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Disjoint index folds covering range(n), a pure function of (n, k, seed)."""
    if k < 2:
        raise InvalidConfig(f"need at least 2 folds, got {k}")
    if k > n:
        raise FoldTooSmall(f"cannot cut {n} rows into {k} folds")
    perm = np.random.default_rng(derive_seed(seed, "cv", n, k)).permutation(n)
    return np.array_split(perm, k)


def cross_val_score(spec: ModelSpec, X, y, k_folds: int, seed: int,
                    scoring: str = "mape") -> float:
    """Mean held-out error of `spec` over k folds (smaller is better)."""
    if scoring not in ERROR_KINDS:
        raise InvalidConfig(f"unknown scoring {scoring!r}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    folds = fold_indices(X.shape[0], k_folds, seed)

    errors = []
    for i, test_idx in enumerate(folds):
        mask = np.ones(X.shape[0], dtype=bool)
        mask[test_idx] = False
        model = fit(spec, X[mask], y[mask], seed=derive_seed(seed, "cv_fit", i))
        pred = predict(model, X[test_idx])
        errors.append(regression_error(scoring, y[test_idx], pred))
    return float(np.mean(errors))


# ---------------------------------------------------------------- random search

@dataclass(frozen=True)
class SearchConfig:
    n_iter: int = DEFAULT_ITERATIONS
    k_folds: int = DEFAULT_FOLDS
    seed: int = 0
    scoring: str = "mape"

    def __post_init__(self):
        if self.n_iter < 1:
            raise InvalidConfig(f"n_iter must be at least 1, got {self.n_iter}")
        if self.k_folds < 2:
            raise InvalidConfig(f"k_folds must be at least 2, got {self.k_folds}")
        if self.scoring not in ERROR_KINDS:
            raise InvalidConfig(f"unknown scoring {self.scoring!r}")


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    algorithm: str
    params: dict
    score: float | None
    status: str  # "ok", "failed", or "fallback"
    error: str | None = None
    duration: float = 0.0


def random_search(algorithm: str, X, y, config: SearchConfig):
    """Uniformly sample `config.n_iter` configurations and keep the best by CV.

    Every trial sees the same folds. Trials that raise are logged as failed
    and excluded from the argmin; ties keep the earliest trial. Returns
    (best_spec, best_score, records).
    """
    X = np.asarray(X, dtype=float)
    space = space_for(algorithm, X.shape[1])
    rng = np.random.default_rng(derive_seed(config.seed, "search", algorithm))

    records = []
    best_spec = None
    best_score = math.inf
    for t in range(config.n_iter):
        spec = sample_spec(algorithm, space, rng)
        started = time.perf_counter()
        try:
            score = cross_val_score(spec, X, y, config.k_folds, config.seed,
                                    config.scoring)
        except Exception as exc:
            records.append(TrialRecord(t, algorithm, dict(spec.params), None,
                                       "failed", error=str(exc),
                                       duration=time.perf_counter() - started))
            continue
        records.append(TrialRecord(t, algorithm, dict(spec.params), score, "ok",
                                   duration=time.perf_counter() - started))
        if score < best_score:
            best_spec, best_score = spec, score

    if best_spec is None:
        raise AllTrialsFailed(
            f"all {config.n_iter} {algorithm} trials raised; "
            f"last error: {records[-1].error}")
    return best_spec, best_score, tuple(records)


TRIAL_LOG_COLUMNS = ("trial_index", "algorithm", "params", "score", "status")


def _flat_params(params: dict) -> str:
    return ";".join(f"{k}={params[k]}" for k in sorted(params))


def write_trial_log(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIAL_LOG_COLUMNS)
        for rec in records:
            score = "" if rec.score is None else repr(rec.score)
            writer.writerow([rec.trial_index, rec.algorithm,
                             _flat_params(rec.params), score, rec.status])


# ---------------------------------------------------------------- budgeted search

@dataclass(frozen=True)
class AutomlConfig:
    budget_seconds: float | None = None
    max_iterations: int | None = None
    seed: int = 0
    scoring: str = "mape"
    ensemble_top_k: int = 3
    holdout_frac: float = 0.2

    def __post_init__(self):
        if (self.budget_seconds is None) == (self.max_iterations is None):
            raise InvalidConfig(
                "set exactly one of budget_seconds and max_iterations")
        if self.budget_seconds is not None and self.budget_seconds <= 0:
            raise InvalidConfig(
                f"budget_seconds must be positive, got {self.budget_seconds}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise InvalidConfig(
                f"max_iterations must be at least 1, got {self.max_iterations}")
        if self.ensemble_top_k < 1:
            raise InvalidConfig(
                f"ensemble_top_k must be at least 1, got {self.ensemble_top_k}")
        if not 0.0 < self.holdout_frac < 1.0:
            raise InvalidConfig(
                f"holdout_frac must be in (0, 1), got {self.holdout_frac}")
        if self.scoring not in ERROR_KINDS:
            raise InvalidConfig(f"unknown scoring {self.scoring!r}")


@dataclass(frozen=True, eq=False)
class FittedEnsemble:
    """Weighted blend of the top holdout performers from a budgeted search."""

    algorithm: ClassVar[str] = "automl_lite"

    member_specs: tuple
    member_models: tuple
    member_errors: np.ndarray  # holdout error per member, nan for the fallback
    weights: np.ndarray
    trials: tuple = field(repr=False)
    flags: tuple = ()

    @property
    def n_features(self) -> int:
        return self.member_models[0].n_features

    def predict(self, X) -> np.ndarray:
        out = None
        for model, w in zip(self.member_models, self.weights):
            part = w * predict(model, X)
            out = part if out is None else out + part
        return out


def _member_weights(errors: np.ndarray) -> np.ndarray:
    if len(errors) == 1:
        return np.array([1.0])
    inv = 1.0 / np.maximum(errors, 1e-12)
    return inv / inv.sum()


def automl_fit(X, y, config: AutomlConfig) -> FittedEnsemble:
    """Race uniform draws from all algorithm families against a shared budget.

    Each trial fits on an internal training split and is scored on an
    internal holdout. A trial that enters the running top-k is refit on the
    full data right away, so stopping at budget exhaustion never leaves the
    ensemble waiting on k refits. Once the deadline has passed no new fit
    starts: a member whose refit would fall past it keeps its split-trained
    model (flagged), so wall time never exceeds the budget by more than the
    one fit that was already in flight.

    A budget too small for even one trial yields a nearest-neighbour
    fallback fit plus the "budget_too_small_for_one_fit" flag instead of an
    exception.
    """
    started = time.monotonic()  # the holdout split below counts against the budget
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n = X.shape[0]
    train_idx, hold_idx = split_indices(
        n, config.holdout_frac, derive_seed(config.seed, "automl", "holdout"))
    X_tr, y_tr = X[train_idx], y[train_idx]
    X_ho, y_ho = X[hold_idx], y[hold_idx]

    rng = np.random.default_rng(derive_seed(config.seed, "automl", "trials"))

    def expired() -> bool:
        if config.budget_seconds is None:
            return False
        return time.monotonic() - started >= config.budget_seconds

    trials = []
    top = []  # [error, trial_index, spec, model, refit_skipped], kept sorted
    t = 0
    while True:
        if config.max_iterations is not None and t >= config.max_iterations:
            break
        if expired():
            break
        algorithm = ALGORITHMS[int(rng.integers(len(ALGORITHMS)))]
        spec = sample_spec(algorithm, space_for(algorithm, X.shape[1]), rng)
        trial_started = time.perf_counter()
        try:
            model = fit(spec, X_tr, y_tr,
                        seed=derive_seed(config.seed, "automl_fit", t))
            error = regression_error(config.scoring, y_ho, predict(model, X_ho))
        except Exception as exc:
            trials.append(TrialRecord(t, algorithm, dict(spec.params), None,
                                      "failed", error=str(exc),
                                      duration=time.perf_counter() - trial_started))
            t += 1
            continue
        trials.append(TrialRecord(t, algorithm, dict(spec.params), error, "ok",
                                  duration=time.perf_counter() - trial_started))

        if len(top) < config.ensemble_top_k or error < top[-1][0]:
            if expired():
                refit, refit_skipped = model, True  # keep the split-trained fit
            else:
                refit = fit(spec, X, y,
                            seed=derive_seed(config.seed, "automl_refit", t))
                refit_skipped = False
            top.append([error, t, spec, refit, refit_skipped])
            top.sort(key=lambda entry: (entry[0], entry[1]))
            del top[config.ensemble_top_k:]
        t += 1

    if not top:
        spec = ModelSpec("knn", {"n_neighbors": 2, "weights": "uniform", "p": 2})
        model = fit_knn(X, y, seed=derive_seed(config.seed, "automl_fallback"),
                        n_neighbors=2, weights="uniform", p=2)
        trials.append(TrialRecord(t, "knn", dict(spec.params), None, "fallback"))
        return FittedEnsemble(
            member_specs=(spec,), member_models=(model,),
            member_errors=np.array([math.nan]), weights=np.array([1.0]),
            trials=tuple(trials), flags=("budget_too_small_for_one_fit",))

    errors = np.array([entry[0] for entry in top])
    flags = (("member_kept_split_fit",)
             if any(entry[4] for entry in top) else ())
    return FittedEnsemble(
        member_specs=tuple(entry[2] for entry in top),
        member_models=tuple(entry[3] for entry in top),
        member_errors=errors,
        weights=_member_weights(errors),
        trials=tuple(trials),
        flags=flags)

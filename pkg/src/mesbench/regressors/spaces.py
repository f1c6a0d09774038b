"""Hyperparameter domains for the seven algorithms, kept as data.

Grids are the published ones. Integer ranges follow the half-open randint
convention [low, high), which is how the original grids were consumed.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidSpec

ALGORITHMS = ("poly", "tree", "forest", "adaboost", "svr", "knn", "mlp")


@dataclass(frozen=True)
class Choice:
    values: tuple

    def sample(self, rng: np.random.Generator):
        return self.values[int(rng.integers(0, len(self.values)))]

    def contains(self, v) -> bool:
        return any(v == x and type(v) is type(x) for x in self.values) or v in self.values


@dataclass(frozen=True)
class IntRange:
    low: int
    high: int  # exclusive

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.low, self.high))

    def contains(self, v) -> bool:
        return isinstance(v, (int, np.integer)) and not isinstance(v, bool) \
            and self.low <= v < self.high


_TREE_PARAMS = {
    "depth": Choice((0, 5, 10, 15, 20)),  # 0 = unlimited
    "criterion": Choice(("squared_error", "absolute_error", "poisson")),
}


def space_for(algorithm: str, n_columns: int) -> dict:
    """Domain map for one algorithm; forest's max_features depends on width."""
    if algorithm == "poly":
        return {"degree": Choice((1, 2, 3, 4))}
    if algorithm == "tree":
        return dict(_TREE_PARAMS)
    if algorithm == "forest":
        return {
            **_TREE_PARAMS,
            "estimators": IntRange(1, 200),
            "max_features": IntRange(1, max(2, n_columns)),
            "min_samples_split": IntRange(2, 11),
            "bootstrap": Choice((True, False)),
        }
    if algorithm == "adaboost":
        return {"estimators": IntRange(1, 200)}
    if algorithm == "svr":
        return {
            "kernel": Choice(("linear", "poly", "rbf")),
            "C": Choice((0.1, 1, 10, 100, 1000)),
            "epsilon": Choice((1e-5, 1e-4, 1e-3, 1e-2)),
        }
    if algorithm == "knn":
        return {
            "n_neighbors": Choice((2, 4, 6, 8, 10)),
            "weights": Choice(("uniform", "distance")),
            "p": Choice((1, 2, 3)),
        }
    if algorithm == "mlp":
        return {"hidden_layer_size": Choice((1, 3, 5, 7, 9))}
    raise InvalidSpec(f"unknown algorithm {algorithm!r}")


def sample_spec(algorithm: str, space: dict, rng: np.random.Generator):
    from . import ModelSpec
    return ModelSpec(algorithm, {name: domain.sample(rng) for name, domain in space.items()})


def validate_spec(spec, n_columns: int) -> None:
    space = space_for(spec.algorithm, n_columns)
    if set(spec.params) != set(space):
        raise InvalidSpec(
            f"{spec.algorithm}: params {sorted(spec.params)} != expected {sorted(space)}")
    for name, domain in space.items():
        if not domain.contains(spec.params[name]):
            raise InvalidSpec(f"{spec.algorithm}: {name}={spec.params[name]!r} outside domain")


def default_spec(algorithm: str, n_columns: int):
    """A mid-grid spec per algorithm (used for fallbacks and smoke fits)."""
    from . import ModelSpec
    defaults = {
        "poly": {"degree": 2},
        "tree": {"depth": 10, "criterion": "squared_error"},
        "forest": {"depth": 10, "criterion": "squared_error", "estimators": 50,
                   "max_features": max(1, min(n_columns - 1, n_columns)) if n_columns > 1 else 1,
                   "min_samples_split": 2, "bootstrap": True},
        "adaboost": {"estimators": 50},
        "svr": {"kernel": "rbf", "C": 1, "epsilon": 1e-3},
        "knn": {"n_neighbors": 4, "weights": "uniform", "p": 2},
        "mlp": {"hidden_layer_size": 5},
    }
    if algorithm not in defaults:
        raise InvalidSpec(f"unknown algorithm {algorithm!r}")
    spec = ModelSpec(algorithm, defaults[algorithm])
    validate_spec(spec, n_columns)
    return spec

"""Bagged ensemble of regression trees.

Each member trains on a bootstrap resample (or on the full data when
bootstrap is off) with per-node feature subsampling, and the forest
prediction is the plain mean over members. Member seeds are drawn from a
single generator keyed by the forest seed, so a forest is reproducible
from (data, spec, seed) alone.
"""

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..errors import InvalidSpec
from .tree import CRITERIA, FittedTree, _check_target, fit_tree


@dataclass(frozen=True, eq=False)
class FittedForest:
    algorithm: ClassVar[str] = "forest"
    trees: tuple
    n_features: int

    def predict(self, X):
        acc = self.trees[0].predict(X)
        for t in self.trees[1:]:
            acc = acc + t.predict(X)
        return acc / len(self.trees)

    def to_state(self):
        return {
            "trees": [t.to_state() for t in self.trees],
            "n_features": self.n_features,
        }

    @classmethod
    def from_state(cls, state):
        trees = tuple(FittedTree.from_state(s) for s in state["trees"])
        return cls(trees=trees, n_features=int(state["n_features"]))


def fit_forest(X, y, seed, depth, criterion, estimators, max_features,
               min_samples_split, bootstrap):
    if criterion not in CRITERIA:
        raise InvalidSpec(f"unknown criterion {criterion!r}")
    if estimators < 1:
        raise InvalidSpec("estimators must be >= 1")
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    _check_target(y, criterion)
    n = X.shape[0]
    rng = np.random.default_rng(int(seed))
    trees = []
    for _ in range(estimators):
        if bootstrap:
            picks = rng.integers(0, n, size=n)
            Xb = X[picks]
            yb = y[picks]
        else:
            Xb = X
            yb = y
        tree_seed = int(rng.integers(0, 2**31 - 1))
        trees.append(fit_tree(Xb, yb, tree_seed, depth, criterion,
                              min_samples_split=min_samples_split,
                              max_features=max_features))
    return FittedForest(trees=tuple(trees), n_features=X.shape[1])

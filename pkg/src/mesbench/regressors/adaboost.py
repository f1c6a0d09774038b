"""Boosted regression via weighted resampling (the R2 scheme).

Each round draws a bootstrap sample proportional to the current row weights,
fits a shallow squared-error tree, and scores it by its linear loss on the
full data. Rounds with average loss >= 0.5 stop the boosting (the first
member is always kept so the model can predict). Prediction combines the
members by weighted median, weights log(1/beta) with beta = L/(1-L).
"""

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..errors import InvalidSpec
from .tree import FittedTree, fit_tree

BASE_DEPTH = 3
# member weight used when a round fits the sample perfectly (loss 0)
_PERFECT_WEIGHT = float(np.log(1e12))


def weighted_median(values, weights):
    """Row-wise weighted median: first value whose cumulative weight
    reaches half of the total, values scanned in ascending order."""
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    out = np.empty(values.shape[0])
    for i in range(values.shape[0]):
        order = np.argsort(values[i], kind="stable")
        cum = np.cumsum(weights[order])
        j = int(np.searchsorted(cum, 0.5 * cum[-1], side="left"))
        out[i] = values[i, order[j]]
    return out


@dataclass(frozen=True, eq=False)
class FittedAdaBoost:
    algorithm: ClassVar[str] = "adaboost"
    members: tuple
    member_weights: np.ndarray
    n_features: int

    def predict(self, X):
        preds = np.column_stack([m.predict(X) for m in self.members])
        return weighted_median(preds, self.member_weights)

    def to_state(self):
        return {
            "members": [m.to_state() for m in self.members],
            "member_weights": self.member_weights.tolist(),
            "n_features": self.n_features,
        }

    @classmethod
    def from_state(cls, state):
        members = tuple(FittedTree.from_state(s) for s in state["members"])
        return cls(members=members,
                   member_weights=np.asarray(state["member_weights"], dtype=np.float64),
                   n_features=int(state["n_features"]))


def fit_adaboost(X, y, seed, estimators):
    if estimators < 1:
        raise InvalidSpec("estimators must be >= 1")
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = X.shape[0]
    rng = np.random.default_rng(int(seed))
    w = np.full(n, 1.0 / n)
    members = []
    member_weights = []
    for _ in range(estimators):
        picks = rng.choice(n, size=n, replace=True, p=w)
        member_seed = int(rng.integers(0, 2**31 - 1))
        tree = fit_tree(X[picks], y[picks], member_seed, BASE_DEPTH, "squared_error")
        abs_err = np.abs(tree.predict(X) - y)
        worst = abs_err.max()
        if worst <= 0.0:
            members.append(tree)
            member_weights.append(_PERFECT_WEIGHT)
            break
        loss = abs_err / worst  # linear loss, in [0, 1]
        avg_loss = float(np.sum(w * loss))
        if avg_loss >= 0.5:
            if not members:
                members.append(tree)
                member_weights.append(1e-6)
            break
        beta = avg_loss / (1.0 - avg_loss)
        members.append(tree)
        member_weights.append(float(np.log(1.0 / beta)))
        w = w * beta ** (1.0 - loss)
        w = w / w.sum()
    return FittedAdaBoost(members=tuple(members),
                          member_weights=np.asarray(member_weights),
                          n_features=X.shape[1])

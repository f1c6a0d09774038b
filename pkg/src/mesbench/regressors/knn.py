"""k-nearest-neighbors regression with Minkowski distances.

Neighbor selection is by (distance, training index): ties are broken toward
the earlier training row via a stable argsort, so predictions are reproducible.
With distance weighting, exact matches (distance 0) take over the prediction.
"""

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..errors import InvalidSpec

_CHUNK = 256  # bound the (queries x train) distance block


def minkowski(diff_abs: np.ndarray, p: int, axis: int) -> np.ndarray:
    """(sum |d|^p)^(1/p) via exact primitives (multiply chains, sqrt, cbrt).

    Generic float pow rounds differently between SIMD and scalar lanes, which
    would break reproducibility across array shapes; these primitives do not.
    """
    if p == 1:
        return np.sum(diff_abs, axis=axis)
    if p == 2:
        return np.sqrt(np.sum(diff_abs * diff_abs, axis=axis))
    if p == 3:
        return np.cbrt(np.sum(diff_abs * diff_abs * diff_abs, axis=axis))
    raise InvalidSpec(f"p must be 1, 2 or 3: {p}")


@dataclass(frozen=True, eq=False)
class FittedKnn:
    algorithm: ClassVar[str] = "knn"
    X: np.ndarray
    y: np.ndarray
    n_neighbors: int
    weights: str
    p: int

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def predict(self, Xq: np.ndarray) -> np.ndarray:
        out = np.empty(Xq.shape[0])
        for start in range(0, Xq.shape[0], _CHUNK):
            block = Xq[start:start + _CHUNK]
            dists = minkowski(np.abs(block[:, None, :] - self.X[None, :, :]),
                              self.p, axis=2)
            order = np.argsort(dists, axis=1, kind="stable")[:, :self.n_neighbors]
            nd = np.take_along_axis(dists, order, axis=1)
            ny = self.y[order]
            if self.weights == "uniform":
                out[start:start + _CHUNK] = np.mean(ny, axis=1)
            else:
                for i in range(len(block)):
                    zero = nd[i] == 0.0
                    if zero.any():
                        out[start + i] = np.mean(ny[i][zero])
                    else:
                        w = 1.0 / nd[i]
                        out[start + i] = np.sum(w * ny[i]) / np.sum(w)
        return out

    def to_state(self) -> dict:
        return {
            "X": self.X.tolist(),
            "y": self.y.tolist(),
            "n_neighbors": self.n_neighbors,
            "weights": self.weights,
            "p": self.p,
        }

    @classmethod
    def from_state(cls, state: dict) -> "FittedKnn":
        return cls(
            X=np.array(state["X"], dtype=float),
            y=np.array(state["y"], dtype=float),
            n_neighbors=state["n_neighbors"],
            weights=state["weights"],
            p=state["p"],
        )


def fit_knn(X: np.ndarray, y: np.ndarray, seed: int,
            n_neighbors: int, weights: str, p: int) -> FittedKnn:
    if n_neighbors > X.shape[0]:
        raise InvalidSpec(
            f"n_neighbors={n_neighbors} exceeds training size {X.shape[0]}")
    return FittedKnn(X=X.copy(), y=y.copy(),
                     n_neighbors=n_neighbors, weights=weights, p=p)

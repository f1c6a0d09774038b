"""Polynomial regression: full monomial expansion up to a degree, least squares.

Term order is bias first, then monomials grouped by total degree, each group in
lexicographic feature-combination order. Singular systems fall back to the
minimum-norm solution and flag the model instead of failing.
"""

import itertools
from dataclasses import dataclass
from typing import ClassVar

import numpy as np


def expansion_terms(n_features: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Monomials as index multisets; () is the bias term."""
    terms: list[tuple[int, ...]] = [()]
    for d in range(1, degree + 1):
        terms.extend(itertools.combinations_with_replacement(range(n_features), d))
    return tuple(terms)


def expand(X: np.ndarray, terms) -> np.ndarray:
    out = np.empty((X.shape[0], len(terms)))
    for j, idxs in enumerate(terms):
        if idxs:
            out[:, j] = np.prod(X[:, list(idxs)], axis=1)
        else:
            out[:, j] = 1.0
    return out


@dataclass(frozen=True, eq=False)
class FittedPoly:
    algorithm: ClassVar[str] = "poly"
    degree: int
    n_features: int
    coefficients: np.ndarray
    flags: tuple[str, ...] = ()

    @property
    def terms(self):
        return expansion_terms(self.n_features, self.degree)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return expand(X, self.terms) @ self.coefficients

    def to_state(self) -> dict:
        return {
            "degree": self.degree,
            "n_features": self.n_features,
            "coefficients": self.coefficients.tolist(),
            "flags": list(self.flags),
        }

    @classmethod
    def from_state(cls, state: dict) -> "FittedPoly":
        return cls(
            degree=state["degree"],
            n_features=state["n_features"],
            coefficients=np.array(state["coefficients"], dtype=float),
            flags=tuple(state["flags"]),
        )


def fit_poly(X: np.ndarray, y: np.ndarray, seed: int, degree: int) -> FittedPoly:
    terms = expansion_terms(X.shape[1], degree)
    design = expand(X, terms)
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    flags = ("rank_deficient",) if rank < design.shape[1] else ()
    return FittedPoly(degree=degree, n_features=X.shape[1],
                      coefficients=coef, flags=flags)

"""Epsilon-insensitive kernel regression solved by pairwise dual ascent.

Dual formulation over 2n box variables beta = [alpha; alpha*], signs
u = [+1...; -1...], linear term p = [eps - y; eps + y]:

    minimize 0.5 * beta' Khat beta + p' beta
    subject to 0 <= beta <= C,  sum(u * beta) = 0

with Khat[a,b] = u_a u_b K(x_a, x_b). Each step picks the most violating
pair (largest -u*G over the up-set vs smallest over the down-set), solves
the two-variable subproblem in closed form, and updates the gradient with
two kernel columns. Optimality is declared when the up/down gap falls to
the KKT tolerance; hitting the iteration cap first marks the model with a
"non_convergence" flag and keeps the last iterate.

Kernel parameters not fixed by the search space: rbf and poly bandwidth
gamma = 1 / (n_features * var(X)), poly degree 3 with no constant offset.
"""

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..errors import InvalidSpec

KERNELS = ("linear", "poly", "rbf")
POLY_DEGREE = 3
KKT_TOL = 1e-3
MAX_ITER = 200_000


def gamma_scale(X):
    """Bandwidth 1/(n_features * population variance of all entries)."""
    v = float(X.var())
    if v <= 0.0:
        v = 1.0
    return 1.0 / (X.shape[1] * v)


def kernel_matrix(kind, A, B, gamma):
    if kind == "linear":
        return A @ B.T
    if kind == "poly":
        G = gamma * (A @ B.T)
        return G * G * G
    if kind == "rbf":
        sq = (A**2).sum(axis=1)[:, None] + (B**2).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)
    raise InvalidSpec(f"unknown kernel {kind!r}")


@dataclass(frozen=True, eq=False)
class FittedSvr:
    algorithm: ClassVar[str] = "svr"
    support_X: np.ndarray
    coef: np.ndarray  # alpha - alpha* for each support point
    intercept: float
    kernel: str
    gamma: float
    n_features: int
    dual_objective: float
    kkt_gap: float
    flags: tuple

    @property
    def support_count(self):
        return self.support_X.shape[0]

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if self.support_count == 0:
            return np.full(X.shape[0], self.intercept)
        Kq = kernel_matrix(self.kernel, X, self.support_X, self.gamma)
        return Kq @ self.coef + self.intercept

    def to_state(self):
        return {
            "support_X": self.support_X.tolist(),
            "coef": self.coef.tolist(),
            "intercept": self.intercept,
            "kernel": self.kernel,
            "gamma": self.gamma,
            "n_features": self.n_features,
            "dual_objective": self.dual_objective,
            "kkt_gap": self.kkt_gap,
            "flags": list(self.flags),
        }

    @classmethod
    def from_state(cls, state):
        support = np.asarray(state["support_X"], dtype=np.float64)
        if support.size == 0:
            support = support.reshape(0, int(state["n_features"]))
        return cls(
            support_X=support,
            coef=np.asarray(state["coef"], dtype=np.float64),
            intercept=float(state["intercept"]),
            kernel=str(state["kernel"]),
            gamma=float(state["gamma"]),
            n_features=int(state["n_features"]),
            dual_objective=float(state["dual_objective"]),
            kkt_gap=float(state["kkt_gap"]),
            flags=tuple(state["flags"]),
        )


def fit_svr(X, y, seed, kernel, C, epsilon, tol=KKT_TOL, max_iter=MAX_ITER):
    # seed accepted for interface uniformity; the solver is deterministic
    del seed
    if kernel not in KERNELS:
        raise InvalidSpec(f"unknown kernel {kernel!r}")
    if C <= 0 or epsilon < 0:
        raise InvalidSpec("C must be positive and epsilon non-negative")
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = X.shape[0]
    gamma = gamma_scale(X)
    K = kernel_matrix(kernel, X, X, gamma)

    u = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([epsilon - y, epsilon + y])
    beta = np.zeros(2 * n)
    G = p.copy()

    converged = False
    gap = np.inf
    for _ in range(max_iter):
        vals = -u * G
        up = ((u > 0) & (beta < C)) | ((u < 0) & (beta > 0))
        low = ((u < 0) & (beta < C)) | ((u > 0) & (beta > 0))
        up_vals = np.where(up, vals, -np.inf)
        low_vals = np.where(low, vals, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        m_up = up_vals[i]
        m_low = low_vals[j]
        gap = m_up - m_low
        if gap <= tol:
            converged = True
            break

        bi, bj = i % n, j % n
        curv = K[bi, bi] + K[bj, bj] - 2.0 * K[bi, bj]
        if curv <= 1e-12:
            curv = 1e-12
        t = gap / curv
        cap_i = C - beta[i] if u[i] > 0 else beta[i]
        cap_j = beta[j] if u[j] > 0 else C - beta[j]
        t = min(t, cap_i, cap_j)
        if t <= 0.0:
            converged = True  # numerically pinned; nothing can move
            break
        beta[i] += t * u[i]
        beta[j] -= t * u[j]
        col = np.concatenate([K[:, bi], K[:, bi]]) - np.concatenate([K[:, bj], K[:, bj]])
        G += t * u * col

    theta = beta[:n] - beta[n:]
    edge = min(1e-10, C * 1e-12)
    free = (beta > edge) & (beta < C - edge)
    if free.any():
        intercept = float(np.mean((-u * G)[free]))
    else:
        vals = -u * G
        up = ((u > 0) & (beta < C)) | ((u < 0) & (beta > 0))
        low = ((u < 0) & (beta < C)) | ((u > 0) & (beta > 0))
        hi = np.where(up, vals, -np.inf).max()
        lo = np.where(low, vals, np.inf).min()
        intercept = float((hi + lo) / 2.0)

    objective = float(0.5 * theta @ K @ theta + p @ beta)
    support = np.abs(theta) > 0.0
    flags = () if converged else ("non_convergence",)
    return FittedSvr(
        support_X=X[support].copy(),
        coef=theta[support].copy(),
        intercept=intercept,
        kernel=kernel,
        gamma=gamma,
        n_features=X.shape[1],
        dual_objective=objective,
        kkt_gap=float(gap),
        flags=flags,
    )

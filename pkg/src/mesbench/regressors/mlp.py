"""One-hidden-layer perceptron trained with adam on squared loss.

The target is standardized internally before training (and predictions are
mapped back), because adam's step size is scale-free while raw prices are in
the tens of thousands: without this the fixed epoch budget cannot move the
output bias far enough to matter.

Loss is 0.5 * mean((out - y)^2) on the standardized target. Training runs
minibatch adam (batch 200 or the whole set if smaller) for up to 500 epochs,
stopping early once the epoch loss has not improved by more than 1e-6 for
ten consecutive epochs. Hitting the budget without such a plateau marks the
model with a "non_convergence" flag; the best iterate seen is returned.
"""

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..errors import InvalidSpec

EPOCHS = 500
LEARNING_RATE = 1e-3
PLATEAU_TOL = 1e-6
PLATEAU_EPOCHS = 10
BATCH_SIZE = 200
_ADAM_B1 = 0.9
_ADAM_B2 = 0.999
_ADAM_EPS = 1e-8

PARAM_KEYS = ("w1", "b1", "w2", "b2")


def init_params(n_features, hidden, seed):
    """Glorot-uniform weights, zero biases."""
    rng = np.random.default_rng(int(seed))
    lim1 = np.sqrt(6.0 / (n_features + hidden))
    lim2 = np.sqrt(6.0 / (hidden + 1))
    return {
        "w1": rng.uniform(-lim1, lim1, size=(n_features, hidden)),
        "b1": np.zeros(hidden),
        "w2": rng.uniform(-lim2, lim2, size=(hidden, 1)),
        "b2": np.zeros(1),
    }


def _forward(params, X):
    pre = X @ params["w1"] + params["b1"]
    hidden = np.maximum(pre, 0.0)
    out = hidden @ params["w2"] + params["b2"]
    return out[:, 0], pre, hidden


def loss_and_grad(params, X, y):
    """Scalar loss 0.5*mean((out-y)^2) and its gradient per parameter."""
    n = X.shape[0]
    out, pre, hidden = _forward(params, X)
    resid = out - y
    loss = 0.5 * float(np.mean(resid**2))
    d_out = (resid / n)[:, None]
    g_w2 = hidden.T @ d_out
    g_b2 = d_out.sum(axis=0)
    d_hidden = (d_out @ params["w2"].T) * (pre > 0.0)
    g_w1 = X.T @ d_hidden
    g_b1 = d_hidden.sum(axis=0)
    return loss, {"w1": g_w1, "b1": g_b1, "w2": g_w2, "b2": g_b2}


@dataclass(frozen=True, eq=False)
class FittedMlp:
    algorithm: ClassVar[str] = "mlp"
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    y_mean: float
    y_std: float
    flags: tuple
    epochs_run: int

    @property
    def n_features(self):
        return self.w1.shape[0]

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        params = {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}
        out, _, _ = _forward(params, X)
        return out * self.y_std + self.y_mean

    def to_state(self):
        return {
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2.tolist(),
            "y_mean": self.y_mean,
            "y_std": self.y_std,
            "flags": list(self.flags),
            "epochs_run": self.epochs_run,
        }

    @classmethod
    def from_state(cls, state):
        return cls(
            w1=np.asarray(state["w1"], dtype=np.float64),
            b1=np.asarray(state["b1"], dtype=np.float64),
            w2=np.asarray(state["w2"], dtype=np.float64),
            b2=np.asarray(state["b2"], dtype=np.float64),
            y_mean=float(state["y_mean"]),
            y_std=float(state["y_std"]),
            flags=tuple(state["flags"]),
            epochs_run=int(state["epochs_run"]),
        )


def fit_mlp(X, y, seed, hidden_layer_size):
    if hidden_layer_size < 1:
        raise InvalidSpec("hidden_layer_size must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]

    y_mean = float(y.mean())
    y_std = float(y.std())
    if y_std == 0.0:
        y_std = 1.0
    ys = (y - y_mean) / y_std

    params = init_params(X.shape[1], hidden_layer_size, seed)
    rng = np.random.default_rng(int(seed) + 1)
    m_state = {k: np.zeros_like(v) for k, v in params.items()}
    v_state = {k: np.zeros_like(v) for k, v in params.items()}
    step = 0
    batch = min(BATCH_SIZE, n)

    best_loss = np.inf
    best_params = {k: v.copy() for k, v in params.items()}
    stale = 0
    epochs_run = 0
    plateaued = False

    for epoch in range(EPOCHS):
        epochs_run = epoch + 1
        order = rng.permutation(n)
        for start in range(0, n, batch):
            take = order[start:start + batch]
            _, grads = loss_and_grad(params, X[take], ys[take])
            step += 1
            for key in PARAM_KEYS:
                m_state[key] = _ADAM_B1 * m_state[key] + (1 - _ADAM_B1) * grads[key]
                v_state[key] = _ADAM_B2 * v_state[key] + (1 - _ADAM_B2) * grads[key] ** 2
                m_hat = m_state[key] / (1 - _ADAM_B1**step)
                v_hat = v_state[key] / (1 - _ADAM_B2**step)
                params[key] = params[key] - LEARNING_RATE * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)
        epoch_loss, _ = loss_and_grad(params, X, ys)
        if epoch_loss < best_loss - PLATEAU_TOL:
            best_loss = epoch_loss
            best_params = {k: v.copy() for k, v in params.items()}
            stale = 0
        else:
            if epoch_loss < best_loss:
                best_loss = epoch_loss
                best_params = {k: v.copy() for k, v in params.items()}
            stale += 1
            if stale >= PLATEAU_EPOCHS:
                plateaued = True
                break

    flags = () if plateaued else ("non_convergence",)
    return FittedMlp(
        w1=best_params["w1"], b1=best_params["b1"],
        w2=best_params["w2"], b2=best_params["b2"],
        y_mean=y_mean, y_std=y_std, flags=flags, epochs_run=epochs_run,
    )

"""Regression tree grown with compiled kernels.

The growth loop, split sweeps, and prediction walk are numba-compiled: the
searched forests can train hundreds of unlimited-depth trees on thousands of
rows, which a pure-python loop cannot do within the harness time budget.

Split cost sweeps per criterion, for a node ordered by one feature:
  squared_error  - prefix sums of y and y^2 give both side SSEs in O(1) per cut.
  absolute_error - running medians via paired heaps, computed over the prefix
                   and over the reversed array for the suffix.
  poisson        - prefix sums of y and y*log(y) give the Poisson deviance
                   (up to a constant) per side.
Threshold is the midpoint of the gap between adjacent distinct values,
snapped down to the lower value if rounding would land it on the upper one.
"""

from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from numba import njit

from ..errors import InvalidSpec, InvalidTarget

CRITERIA = ("squared_error", "absolute_error", "poisson")
_CRIT_CODE = {name: i for i, name in enumerate(CRITERIA)}


@njit(cache=True)
def _prefix_sad(ys, out):
    """out[i] = sum of |ys[j] - median(ys[:i+1])| for j <= i.

    Paired-heap running median: `low` is a max-heap of the smaller half,
    `high` a min-heap of the larger half, kept so len(low) is len(high)
    or len(high)+1. The SAD around the median follows from the half sums.
    """
    m = ys.shape[0]
    low = np.empty(m)
    high = np.empty(m)
    nl = 0
    nh = 0
    sl = 0.0
    sh = 0.0
    for i in range(m):
        v = ys[i]
        if nl == 0 or v <= low[0]:
            low[nl] = v
            nl += 1
            sl += v
            j = nl - 1
            while j > 0:
                parent = (j - 1) // 2
                if low[parent] < low[j]:
                    low[parent], low[j] = low[j], low[parent]
                    j = parent
                else:
                    break
        else:
            high[nh] = v
            nh += 1
            sh += v
            j = nh - 1
            while j > 0:
                parent = (j - 1) // 2
                if high[parent] > high[j]:
                    high[parent], high[j] = high[j], high[parent]
                    j = parent
                else:
                    break
        if nl > nh + 1:
            moved = low[0]
            sl -= moved
            nl -= 1
            low[0] = low[nl]
            j = 0
            while True:
                l = 2 * j + 1
                r = l + 1
                largest = j
                if l < nl and low[l] > low[largest]:
                    largest = l
                if r < nl and low[r] > low[largest]:
                    largest = r
                if largest == j:
                    break
                low[j], low[largest] = low[largest], low[j]
                j = largest
            high[nh] = moved
            nh += 1
            sh += moved
            j = nh - 1
            while j > 0:
                parent = (j - 1) // 2
                if high[parent] > high[j]:
                    high[parent], high[j] = high[j], high[parent]
                    j = parent
                else:
                    break
        elif nh > nl:
            moved = high[0]
            sh -= moved
            nh -= 1
            high[0] = high[nh]
            j = 0
            while True:
                l = 2 * j + 1
                r = l + 1
                smallest = j
                if l < nh and high[l] < high[smallest]:
                    smallest = l
                if r < nh and high[r] < high[smallest]:
                    smallest = r
                if smallest == j:
                    break
                high[j], high[smallest] = high[smallest], high[j]
                j = smallest
            low[nl] = moved
            nl += 1
            sl += moved
            j = nl - 1
            while j > 0:
                parent = (j - 1) // 2
                if low[parent] < low[j]:
                    low[parent], low[j] = low[j], low[parent]
                    j = parent
                else:
                    break
        med = low[0]
        out[i] = (med * nl - sl) + (sh - med * nh)


@njit(cache=True)
def _split_costs(ys, criterion):
    """Cost of splitting after index k (left = ys[:k+1]), for k in 0..m-2."""
    m = ys.shape[0]
    costs = np.empty(m - 1)
    if criterion == 0:
        total = 0.0
        total_sq = 0.0
        for i in range(m):
            total += ys[i]
            total_sq += ys[i] * ys[i]
        s = 0.0
        ss = 0.0
        for k in range(m - 1):
            v = ys[k]
            s += v
            ss += v * v
            nl = k + 1
            nr = m - nl
            rs = total - s
            costs[k] = (ss - s * s / nl) + ((total_sq - ss) - rs * rs / nr)
    elif criterion == 1:
        pre = np.empty(m)
        _prefix_sad(ys, pre)
        suf = np.empty(m)
        _prefix_sad(ys[::-1].copy(), suf)
        for k in range(m - 1):
            costs[k] = pre[k] + suf[m - 2 - k]
    else:
        total = 0.0
        total_ylogy = 0.0
        for i in range(m):
            total += ys[i]
            total_ylogy += ys[i] * np.log(ys[i])
        s = 0.0
        sly = 0.0
        for k in range(m - 1):
            v = ys[k]
            s += v
            sly += v * np.log(v)
            nl = k + 1
            nr = m - nl
            rs = total - s
            costs[k] = (sly - s * np.log(s / nl)) + ((total_ylogy - sly) - rs * np.log(rs / nr))
    return costs


@njit(cache=True)
def _grow(X, y, max_depth, min_samples_split, max_features, criterion, seed):
    n, n_feat = X.shape
    max_nodes = 2 * n + 1
    feat = np.full(max_nodes, -1, np.int64)
    thr = np.zeros(max_nodes)
    left = np.full(max_nodes, -1, np.int64)
    right = np.full(max_nodes, -1, np.int64)
    value = np.zeros(max_nodes)

    idx = np.arange(n)
    st_node = np.empty(max_nodes, np.int64)
    st_start = np.empty(max_nodes, np.int64)
    st_end = np.empty(max_nodes, np.int64)
    st_depth = np.empty(max_nodes, np.int64)

    np.random.seed(seed)
    all_feats = np.arange(n_feat)
    node_count = 1
    sp = 0
    st_node[sp] = 0
    st_start[sp] = 0
    st_end[sp] = n
    st_depth[sp] = 0
    sp += 1

    while sp > 0:
        sp -= 1
        node = st_node[sp]
        s = st_start[sp]
        e = st_end[sp]
        d = st_depth[sp]
        m = e - s
        sub_idx = idx[s:e]
        sub_y = np.empty(m)
        for t in range(m):
            sub_y[t] = y[sub_idx[t]]

        if criterion == 1:
            value[node] = np.median(sub_y)
        else:
            value[node] = sub_y.mean()

        if m < min_samples_split or (max_depth > 0 and d >= max_depth):
            continue
        if sub_y.min() == sub_y.max():
            continue

        if max_features >= n_feat:
            cand = all_feats
            ncand = n_feat
        else:
            scratch = all_feats.copy()
            for t in range(max_features):
                r = t + np.random.randint(0, n_feat - t)
                tmp = scratch[t]
                scratch[t] = scratch[r]
                scratch[r] = tmp
            cand = np.sort(scratch[:max_features])
            ncand = max_features

        best_cost = np.inf
        best_feat = -1
        best_thr = 0.0
        col = np.empty(m)
        for ci in range(ncand):
            fi = cand[ci]
            for t in range(m):
                col[t] = X[sub_idx[t], fi]
            order = np.argsort(col)
            if col[order[0]] == col[order[m - 1]]:
                continue
            ys = np.empty(m)
            for t in range(m):
                ys[t] = sub_y[order[t]]
            costs = _split_costs(ys, criterion)
            for k in range(m - 1):
                lo = col[order[k]]
                hi = col[order[k + 1]]
                if lo < hi and costs[k] < best_cost:
                    best_cost = costs[k]
                    best_feat = fi
                    t_mid = 0.5 * (lo + hi)
                    best_thr = lo if t_mid >= hi else t_mid

        if best_feat < 0:
            continue

        left_buf = np.empty(m, np.int64)
        right_buf = np.empty(m, np.int64)
        nl = 0
        nr = 0
        for t in range(m):
            ii = sub_idx[t]
            if X[ii, best_feat] <= best_thr:
                left_buf[nl] = ii
                nl += 1
            else:
                right_buf[nr] = ii
                nr += 1
        for t in range(nl):
            idx[s + t] = left_buf[t]
        for t in range(nr):
            idx[s + nl + t] = right_buf[t]

        lnode = node_count
        rnode = node_count + 1
        node_count += 2
        feat[node] = best_feat
        thr[node] = best_thr
        left[node] = lnode
        right[node] = rnode
        st_node[sp] = lnode
        st_start[sp] = s
        st_end[sp] = s + nl
        st_depth[sp] = d + 1
        sp += 1
        st_node[sp] = rnode
        st_start[sp] = s + nl
        st_end[sp] = e
        st_depth[sp] = d + 1
        sp += 1

    return (feat[:node_count], thr[:node_count], left[:node_count],
            right[:node_count], value[:node_count])


@njit(cache=True)
def _walk(feat, thr, left, right, value, X):
    n = X.shape[0]
    out = np.empty(n)
    for i in range(n):
        node = 0
        while feat[node] >= 0:
            if X[i, feat[node]] <= thr[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


@dataclass(frozen=True, eq=False)
class FittedTree:
    algorithm: ClassVar[str] = "tree"
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int
    criterion: str

    def predict(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        return _walk(self.feature, self.threshold, self.left, self.right,
                     self.value, X)

    def to_state(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_features": self.n_features,
            "criterion": self.criterion,
        }

    @classmethod
    def from_state(cls, state):
        return cls(
            feature=np.asarray(state["feature"], dtype=np.int64),
            threshold=np.asarray(state["threshold"], dtype=np.float64),
            left=np.asarray(state["left"], dtype=np.int64),
            right=np.asarray(state["right"], dtype=np.int64),
            value=np.asarray(state["value"], dtype=np.float64),
            n_features=int(state["n_features"]),
            criterion=str(state["criterion"]),
        )


def _check_target(y, criterion):
    if criterion == "poisson" and y.min() <= 0.0:
        raise InvalidTarget("poisson criterion requires strictly positive targets")


def fit_tree(X, y, seed, depth, criterion, min_samples_split=2, max_features=None):
    if criterion not in CRITERIA:
        raise InvalidSpec(f"unknown criterion {criterion!r}")
    if depth < 0:
        raise InvalidSpec("depth must be >= 0 (0 means unlimited)")
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    _check_target(y, criterion)
    n_feat = X.shape[1]
    if max_features is None:
        max_features = n_feat
    max_features = max(1, min(int(max_features), n_feat))
    arrays = _grow(X, y, int(depth), int(min_samples_split), max_features,
                   _CRIT_CODE[criterion], int(seed) % (2**32))
    return FittedTree(*arrays, n_features=n_feat, criterion=criterion)

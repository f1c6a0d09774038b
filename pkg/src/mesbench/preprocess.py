"""Feature encoding: one-hot for categoricals, standard scaling for numerics.

Statistics always come from the table given to fit_preprocessor (training data);
transform never updates them. Block layout follows the table's column order, so
the encoded matrix is reproducible from the Preprocessor alone.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import Table
from .errors import EmptyTable, SchemaMismatch


@dataclass(frozen=True)
class Preprocessor:
    columns: tuple[str, ...]
    kinds: tuple[str, ...]                      # "categorical" | "numeric" per column
    vocabs: dict                                # column -> tuple of categories, first-appearance order
    means: dict                                 # column -> float
    stds: dict                                  # column -> float; constant columns store 1.0

    @property
    def width(self) -> int:
        return sum(len(self.vocabs[c]) if k == "categorical" else 1
                   for c, k in zip(self.columns, self.kinds))

    @property
    def feature_names(self) -> tuple[str, ...]:
        names: list[str] = []
        for c, k in zip(self.columns, self.kinds):
            if k == "categorical":
                names.extend(f"{c}={v}" for v in self.vocabs[c])
            else:
                names.append(c)
        return tuple(names)


def fit_preprocessor(table: Table) -> Preprocessor:
    if not table.columns:
        raise EmptyTable("no columns to fit")
    if table.n_rows == 0:
        raise EmptyTable("no rows to fit")
    kinds: list[str] = []
    vocabs: dict = {}
    means: dict = {}
    stds: dict = {}
    for c in table.columns:
        col = table.column(c)
        if col.dtype == object:
            kinds.append("categorical")
            seen: list = []
            for v in col:
                if v not in seen:
                    seen.append(v)
            vocabs[c] = tuple(seen)
        else:
            kinds.append("numeric")
            values = col.astype(float)
            means[c] = float(values.mean())
            sd = float(values.std())  # population std
            stds[c] = sd if sd > 0.0 else 1.0
    return Preprocessor(tuple(table.columns), tuple(kinds), vocabs, means, stds)


def transform(pre: Preprocessor, table: Table) -> np.ndarray:
    """Encode a table with fitted statistics -> float matrix (rows x width).

    Categories unseen at fit time encode to an all-zero indicator block.
    """
    if tuple(table.columns) != pre.columns:
        raise SchemaMismatch(
            f"table columns {tuple(table.columns)} != fitted columns {pre.columns}")
    n = table.n_rows
    blocks: list[np.ndarray] = []
    for c, k in zip(pre.columns, pre.kinds):
        col = table.column(c)
        if k == "categorical":
            vocab = pre.vocabs[c]
            block = np.zeros((n, len(vocab)))
            index = {v: j for j, v in enumerate(vocab)}
            for i, v in enumerate(col):
                j = index.get(v)
                if j is not None:
                    block[i, j] = 1.0
            blocks.append(block)
        else:
            values = col.astype(float)
            blocks.append(((values - pre.means[c]) / pre.stds[c]).reshape(-1, 1))
    return np.hstack(blocks)

"""Listings dataset: CSV ingestion, cleaning pipeline, feature subsets, holdout split.

The cleaning pipeline runs dedup -> outlier filter -> imputation -> rare-model
filter, in that order. Every operation returns a new Dataset; rows are frozen.
"""

import csv
import dataclasses
import datetime
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import (
    EmptyTable,
    InsufficientCompleteRows,
    InvalidConfig,
    MissingColumn,
    TooFewRows,
    UnknownFeature,
)

REQUIRED_COLUMNS = ("brand", "model", "series", "construction_year",
                    "working_hours", "location", "price")
OPTIONAL_COLUMNS = ("source_id", "observed_at")

# construction-year sanity window; upper bound fixed, not "this year", so that
# validation never depends on the wall clock
YEAR_FLOOR = 1950
YEAR_CEILING = 2035

DEFAULT_OBSERVED_AT = datetime.date(1970, 1, 1)

# ordered key sets for deduplication: portal id first, then the natural key
DEFAULT_KEY_SETS = (
    ("source_id",),
    ("model", "series", "construction_year", "working_hours", "price"),
)

TARGET = "price"

SUBSETS = {
    "basic": ("model", "working_hours", "construction_year"),
    "basic_series": ("model", "series", "working_hours", "construction_year"),
    "basic_location": ("model", "working_hours", "construction_year", "location"),
    "full": ("model", "series", "working_hours", "construction_year", "location"),
}

CATEGORICAL_FEATURES = ("model", "series", "location")


@dataclass(frozen=True)
class Listing:
    brand: str
    model: str
    series: str | None
    construction_year: int
    working_hours: float | None
    location: str
    price: float
    source_id: str
    observed_at: datetime.date


@dataclass(frozen=True)
class RowParseError:
    line: int
    column: str
    reason: str


@dataclass(frozen=True)
class Dataset:
    rows: tuple[Listing, ...]
    schema_version: int = 1
    provenance: str = "ingested"  # "ingested" | "synthetic"
    row_errors: tuple[RowParseError, ...] = ()

    def replace_rows(self, rows) -> "Dataset":
        return dataclasses.replace(self, rows=tuple(rows))


@dataclass(frozen=True)
class RejectedRow:
    listing: Listing
    reason: str  # "price_zscore" | "hours_zscore" | "lifetime_cap"


# ------------------------------------------------------------------ CSV I/O

def _parse_row(values: Mapping[str, str], line: int):
    """Return (Listing, None) or (None, RowParseError); first problem wins."""

    def err(column, reason):
        return None, RowParseError(line=line, column=column, reason=reason)

    brand = values["brand"].strip()
    if not brand:
        return err("brand", "missing value")
    model = values["model"].strip()
    if not model:
        return err("model", "missing value")
    series = values["series"].strip() or None

    raw_year = values["construction_year"].strip()
    if not raw_year:
        return err("construction_year", "missing value")
    try:
        year = int(raw_year)
    except ValueError:
        return err("construction_year", f"not an integer: {raw_year!r}")
    if not YEAR_FLOOR <= year <= YEAR_CEILING:
        return err("construction_year", f"out of range [{YEAR_FLOOR}, {YEAR_CEILING}]: {year}")

    raw_hours = values["working_hours"].strip()
    if raw_hours:
        try:
            hours = float(raw_hours)
        except ValueError:
            return err("working_hours", f"not a number: {raw_hours!r}")
        if not np.isfinite(hours) or hours < 0:
            return err("working_hours", f"must be finite and >= 0: {raw_hours!r}")
    else:
        hours = None

    location = values["location"].strip()
    if not location:
        return err("location", "missing value")

    raw_price = values["price"].strip()
    if not raw_price:
        return err("price", "missing value")
    try:
        price = float(raw_price)
    except ValueError:
        return err("price", f"not a number: {raw_price!r}")
    if not np.isfinite(price) or price <= 0:
        return err("price", f"must be finite and > 0: {raw_price!r}")

    source_id = values.get("source_id", "").strip() or f"csv:{line}"
    raw_date = values.get("observed_at", "").strip()
    if raw_date:
        try:
            observed = datetime.date.fromisoformat(raw_date)
        except ValueError:
            return err("observed_at", f"not an ISO date: {raw_date!r}")
    else:
        observed = DEFAULT_OBSERVED_AT

    return Listing(brand=brand, model=model, series=series, construction_year=year,
                   working_hours=hours, location=location, price=price,
                   source_id=source_id, observed_at=observed), None


def ingest_csv(path) -> Dataset:
    """Read a listings CSV.

    Header is matched case-insensitively; the seven catalog columns are
    required, source_id/observed_at optional. Empty cells are absent optionals.
    Rows with malformed or invariant-violating values are collected on
    Dataset.row_errors (one error per row) instead of aborting the read.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn("empty file: no header row")
        names = [h.strip().lower() for h in header]
        for col in REQUIRED_COLUMNS:
            if col not in names:
                raise MissingColumn(f"required column {col!r} not in header")
        rows: list[Listing] = []
        errors: list[RowParseError] = []
        for record in reader:
            if not any(cell.strip() for cell in record):
                continue
            line = reader.line_num
            values = {name: (record[i] if i < len(record) else "")
                      for i, name in enumerate(names)}
            parsed, problem = _parse_row(values, line)
            if problem is not None:
                errors.append(problem)
            else:
                rows.append(parsed)
    return Dataset(rows=tuple(rows), provenance="ingested", row_errors=tuple(errors))


def write_csv(dataset: Dataset, path) -> None:
    """Write rows in the ingestion schema (round-trips through ingest_csv)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(REQUIRED_COLUMNS) + list(OPTIONAL_COLUMNS))
        for r in dataset.rows:
            writer.writerow([
                r.brand, r.model, r.series or "",
                r.construction_year,
                "" if r.working_hours is None else repr(float(r.working_hours)),
                r.location, repr(float(r.price)),
                r.source_id, r.observed_at.isoformat(),
            ])


# ------------------------------------------------------------- dedup

_FIELDS = {f.name for f in dataclasses.fields(Listing)}


def deduplicate(dataset: Dataset, key_sets: Sequence[Sequence[str]] = DEFAULT_KEY_SETS) -> Dataset:
    """Collapse rows that agree on any configured key set, in key-set order.

    Survivor: earliest observed_at, ties broken by lowest source_id. Original
    row order is preserved among survivors.
    """
    for keys in key_sets:
        for k in keys:
            if k not in _FIELDS:
                raise UnknownFeature(f"unknown listing field in key set: {k!r}")
    rows = list(dataset.rows)
    for keys in key_sets:
        groups: dict[tuple, int] = {}
        for idx, row in enumerate(rows):
            key = tuple(getattr(row, k) for k in keys)
            best = groups.get(key)
            if best is None:
                groups[key] = idx
            else:
                b = rows[best]
                if (row.observed_at, row.source_id) < (b.observed_at, b.source_id):
                    groups[key] = idx
        keep = sorted(groups.values())
        rows = [rows[i] for i in keep]
    return dataset.replace_rows(rows)


# ------------------------------------------------------------ outlier filter

def _zscores(values: np.ndarray) -> np.ndarray:
    mu = values.mean()
    sd = values.std()  # population
    if sd == 0.0:
        return np.zeros_like(values)
    return np.abs(values - mu) / sd


def filter_outliers(
    dataset: Dataset,
    confidence: float = 0.99,
    lifetime_cap: float | Mapping[str, float] = 60000.0,
) -> tuple[Dataset, tuple[RejectedRow, ...]]:
    """Reject per-model-group price/hours outliers and over-cap lifetimes.

    Within each model group a row is rejected when its price or working-hours
    z-score exceeds the two-sided normal quantile for the confidence level
    (2.576 at 99%). Estimates are recomputed and re-applied until nothing more
    is rejected, so the filter is a fixed point of itself. Groups that shrink
    below 3 rows are left alone (too small for interval estimates). The
    lifetime cap applies to every row regardless of group size.
    """
    if not 0.0 < confidence < 1.0:
        raise InvalidConfig(f"confidence must be in (0, 1): {confidence}")
    quantile = float(stats.norm.ppf(0.5 + confidence / 2.0))

    def cap_for(model: str) -> float:
        if isinstance(lifetime_cap, Mapping):
            return float(lifetime_cap.get(model, np.inf))
        return float(lifetime_cap)

    reasons: dict[int, str] = {}
    survivors: list[int] = []
    for idx, row in enumerate(dataset.rows):
        if row.working_hours is not None and row.working_hours > cap_for(row.model):
            reasons[idx] = "lifetime_cap"
        else:
            survivors.append(idx)

    groups: dict[str, list[int]] = {}
    for idx in survivors:
        groups.setdefault(dataset.rows[idx].model, []).append(idx)

    for model, members in groups.items():
        current = list(members)
        while len(current) >= 3:
            prices = np.array([dataset.rows[i].price for i in current])
            pz = _zscores(prices)
            hours_idx = [i for i in current if dataset.rows[i].working_hours is not None]
            hz = {}
            if len(hours_idx) >= 3:
                hvals = np.array([dataset.rows[i].working_hours for i in hours_idx])
                for i, z in zip(hours_idx, _zscores(hvals)):
                    hz[i] = z
            bad = []
            for pos, i in enumerate(current):
                if pz[pos] > quantile:
                    bad.append((i, "price_zscore"))
                elif hz.get(i, 0.0) > quantile:
                    bad.append((i, "hours_zscore"))
            if not bad:
                break
            for i, reason in bad:
                reasons[i] = reason
            dropped = {i for i, _ in bad}
            current = [i for i in current if i not in dropped]

    kept = [r for i, r in enumerate(dataset.rows) if i not in reasons]
    rejected = tuple(RejectedRow(dataset.rows[i], reasons[i]) for i in sorted(reasons))
    return dataset.replace_rows(kept), rejected


# ---------------------------------------------------------------- imputation

def _model_design(rows: Sequence[Listing], vocab: list[str]) -> np.ndarray:
    """Intercept + construction year + model indicator columns."""
    n = len(rows)
    X = np.zeros((n, 2 + len(vocab)))
    X[:, 0] = 1.0
    X[:, 1] = [r.construction_year for r in rows]
    index = {m: j for j, m in enumerate(vocab)}
    for i, r in enumerate(rows):
        j = index.get(r.model)
        if j is not None:
            X[i, 2 + j] = 1.0
    return X


def impute_working_hours(dataset: Dataset, seed: int) -> Dataset:
    """Fill missing working_hours by stochastic regression imputation.

    Least squares of hours on construction year and model indicators, fitted on
    complete rows (at least 10 required); each missing cell gets the prediction
    plus Gaussian noise at the residual standard deviation, clamped at 0.
    Deterministic for a given (dataset, seed). Only missing cells change.
    """
    missing = [i for i, r in enumerate(dataset.rows) if r.working_hours is None]
    if not missing:
        return dataset
    complete = [r for r in dataset.rows if r.working_hours is not None]
    if len(complete) < 10:
        raise InsufficientCompleteRows(
            f"need >= 10 complete rows to fit the imputation model, have {len(complete)}")

    vocab: list[str] = []
    for r in complete:
        if r.model not in vocab:
            vocab.append(r.model)
    X = _model_design(complete, vocab)
    y = np.array([r.working_hours for r in complete])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    resid_sd = float(np.sqrt(np.mean(resid ** 2)))

    rng = np.random.default_rng(seed)
    rows = list(dataset.rows)
    targets = [dataset.rows[i] for i in missing]
    preds = _model_design(targets, vocab) @ coef
    for i, pred in zip(missing, preds):
        value = float(pred + rng.normal(0.0, resid_sd))
        rows[i] = dataclasses.replace(rows[i], working_hours=max(0.0, value))
    return dataset.replace_rows(rows)


# ---------------------------------------------------------------- rare models

def filter_rare_models(dataset: Dataset, min_count: int = 150) -> Dataset:
    """Keep only models with strictly more than min_count rows."""
    counts: dict[str, int] = {}
    for r in dataset.rows:
        counts[r.model] = counts.get(r.model, 0) + 1
    return dataset.replace_rows(r for r in dataset.rows if counts[r.model] > min_count)


# ------------------------------------------------------------- full pipeline

@dataclass(frozen=True)
class CleanReport:
    dataset: Dataset
    duplicates_removed: int
    rejected: tuple[RejectedRow, ...]
    imputed: int
    rare_removed: int


def clean_pipeline(
    dataset: Dataset,
    *,
    seed: int,
    key_sets: Sequence[Sequence[str]] = DEFAULT_KEY_SETS,
    confidence: float = 0.99,
    lifetime_cap: float | Mapping[str, float] = 60000.0,
    min_count: int = 150,
) -> CleanReport:
    """dedup -> outlier filter -> impute -> rare-model filter.

    The filter/impute pair is iterated until neither fires: an imputed value
    can land in a group's statistical tail, and a one-shot pass would then
    leave a dataset the filter still objects to, breaking idempotence of the
    whole pipeline. Rows are only ever removed, so the loop terminates. The
    result is a fixed point: cleaning it again changes nothing.
    """
    deduped = deduplicate(dataset, key_sets)
    current = deduped
    rejected_all: list[RejectedRow] = []
    imputed_total = 0
    while True:
        filtered, rejected = filter_outliers(current, confidence, lifetime_cap)
        rejected_all.extend(rejected)
        n_missing = sum(1 for r in filtered.rows if r.working_hours is None)
        if n_missing:
            current = impute_working_hours(filtered, seed)
            imputed_total += n_missing
        else:
            current = filtered
        if not rejected and not n_missing:
            break
    final = filter_rare_models(current, min_count)
    return CleanReport(
        dataset=final,
        duplicates_removed=len(dataset.rows) - len(deduped.rows),
        rejected=tuple(rejected_all),
        imputed=imputed_total,
        rare_removed=len(current.rows) - len(final.rows),
    )


# -------------------------------------------------------------- feature table

@dataclass(frozen=True, eq=False)
class Table:
    """Column-major feature table; categoricals are object arrays, numerics float."""
    columns: tuple[str, ...]
    data: dict

    @property
    def n_rows(self) -> int:
        if not self.columns:
            raise EmptyTable("table has no columns")
        return len(self.data[self.columns[0]])

    def column(self, name: str) -> np.ndarray:
        if name not in self.data:
            raise UnknownFeature(f"no column {name!r}")
        return self.data[name]

    def take(self, indices) -> "Table":
        idx = np.asarray(indices)
        return Table(self.columns, {c: self.data[c][idx] for c in self.columns})


def make_subsets(dataset: Dataset, subset_ids: Sequence[str] | None = None):
    """Build the four feature subsets -> {id: (Table, target vector)}.

    Brand never appears; target is always price. Absent series values become
    the explicit category "". Requires working_hours to be fully imputed.
    """
    if not dataset.rows:
        raise TooFewRows("cannot build subsets from an empty dataset")
    if any(r.working_hours is None for r in dataset.rows):
        raise InvalidConfig("working_hours has missing values; run imputation first")
    ids = tuple(subset_ids) if subset_ids is not None else tuple(SUBSETS)
    for sid in ids:
        if sid not in SUBSETS:
            raise UnknownFeature(f"unknown subset {sid!r}")

    full = {
        "model": np.array([r.model for r in dataset.rows], dtype=object),
        "series": np.array([r.series or "" for r in dataset.rows], dtype=object),
        "location": np.array([r.location for r in dataset.rows], dtype=object),
        "working_hours": np.array([r.working_hours for r in dataset.rows], dtype=float),
        "construction_year": np.array([float(r.construction_year) for r in dataset.rows]),
    }
    y = np.array([r.price for r in dataset.rows], dtype=float)
    out = {}
    for sid in ids:
        cols = SUBSETS[sid]
        out[sid] = (Table(cols, {c: full[c] for c in cols}), y)
    return out


# ------------------------------------------------------------------- split

def split_indices(n: int, test_frac: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic holdout partition; a function of (n, seed) only.

    Test size is round(n * test_frac) clamped to [1, n-1].
    """
    if n < 2:
        raise TooFewRows(f"need at least 2 rows to split, have {n}")
    if not 0.0 < test_frac < 1.0:
        raise InvalidConfig(f"test_frac must be in (0, 1): {test_frac}")
    n_test = int(round(n * test_frac))
    n_test = min(max(n_test, 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    test = np.sort(perm[:n_test])
    train = np.sort(perm[n_test:])
    return train, test


@dataclass(frozen=True, eq=False)
class Split:
    train_table: Table
    train_y: np.ndarray
    test_table: Table
    test_y: np.ndarray
    train_indices: np.ndarray
    test_indices: np.ndarray


def holdout_split(table: Table, target: np.ndarray, test_frac: float = 0.1, seed: int = 0) -> Split:
    train_idx, test_idx = split_indices(table.n_rows, test_frac, seed)
    return Split(
        train_table=table.take(train_idx),
        train_y=np.asarray(target)[train_idx],
        test_table=table.take(test_idx),
        test_y=np.asarray(target)[test_idx],
        train_indices=train_idx,
        test_indices=test_idx,
    )

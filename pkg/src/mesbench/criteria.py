"""The five per-method measurements and the pairwise significance test.

Correctness is a holdout error (MAPE by default), complexity is training
wall-clock in seconds, responsiveness is mean single-row prediction latency
mapped onto three categories, expertise is a configured knowledge level, and
reproducibility is the spread of correctness across repeated runs.
"""

import csv
import enum
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import t as _t_dist

from .errors import (InvalidAlpha, InvalidConfig, LengthMismatch,
                     TooFewRepetitions, ZeroTrueValue)
from .regressors import ALGORITHMS

ERROR_KINDS = ("mape", "mae", "rmse")


class ResponsivenessCategory(enum.Enum):
    REAL_TIME = "real_time"
    FAST = "fast"
    SLOW = "slow"

    @property
    def ordinal(self):
        return {"real_time": 0, "fast": 1, "slow": 2}[self.value]


# half-open intervals: [0, 0.1) real_time, [0.1, 1) fast, [1, inf) slow
def categorize_latency(mean_seconds):
    if mean_seconds < 0.1:
        return ResponsivenessCategory.REAL_TIME
    if mean_seconds < 1.0:
        return ResponsivenessCategory.FAST
    return ResponsivenessCategory.SLOW


def regression_error(kind, y_true, y_pred):
    if kind not in ERROR_KINDS:
        raise InvalidConfig(f"unknown error kind {kind!r}")
    y_true = np.asarray(y_true, dtype=np.float64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.float64).ravel()
    if len(y_true) != len(y_pred) or len(y_true) == 0:
        raise LengthMismatch(f"{len(y_true)} true values vs {len(y_pred)} predictions")
    if kind == "mape":
        if np.any(y_true == 0.0):
            raise ZeroTrueValue("mape undefined when a true value is zero")
        return float(np.mean(np.abs(y_true - y_pred) / np.abs(y_true)))
    if kind == "mae":
        return float(np.mean(np.abs(y_true - y_pred)))
    return float(np.sqrt(np.mean((y_true - y_pred) ** 2)))


def measure_training(train_fn):
    """Wall-clock the complete training call on a monotonic clock."""
    start = time.perf_counter()
    result = train_fn()
    return result, time.perf_counter() - start


def measure_responsiveness(model, X):
    """Predict each row individually; return (mean seconds, category)."""
    X = np.asarray(X)
    if X.shape[0] < 1:
        raise LengthMismatch("need at least one row to measure responsiveness")
    total = 0.0
    for i in range(X.shape[0]):
        row = X[i:i + 1]
        start = time.perf_counter()
        model.predict(row)
        total += time.perf_counter() - start
    mean_seconds = total / X.shape[0]
    return mean_seconds, categorize_latency(mean_seconds)


def reproducibility(per_repetition_corr):
    values = np.asarray(per_repetition_corr, dtype=np.float64)
    if len(values) < 2:
        raise TooFewRepetitions("reproducibility needs at least two repetitions")
    if np.ptp(values) == 0.0:
        return 0.0  # identical runs have no spread; keep mean-rounding fuzz out
    return float(np.std(values, ddof=1))


@dataclass(frozen=True)
class TTestResult:
    t: float
    significant: bool
    degenerate: bool
    critical: float
    df: int
    alpha: float


def t_test(sample_a, sample_b, alpha=0.05):
    """Two-sample Student's t with pooled variance, two-sided."""
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must be in (0, 1), got {alpha}")
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        raise TooFewRepetitions("t test needs at least two values per sample")
    df = len(a) + len(b) - 2
    critical = float(_t_dist.ppf(1.0 - alpha / 2.0, df))
    pooled = ((len(a) - 1) * a.var(ddof=1) + (len(b) - 1) * b.var(ddof=1)) / df
    if pooled <= 0.0:
        return TTestResult(t=0.0, significant=False, degenerate=True,
                           critical=critical, df=df, alpha=alpha)
    t = float((a.mean() - b.mean()) / np.sqrt(pooled * (1.0 / len(a) + 1.0 / len(b))))
    return TTestResult(t=t, significant=abs(t) > critical, degenerate=False,
                       critical=critical, df=df, alpha=alpha)


# knowledge levels a method demands of its operator, low to high
EXPERTISE_LEVELS = {
    1: "No modeling background; can run a packaged tool on its defaults.",
    2: "Can prepare a dataset and operate an automated pipeline, reading its reports.",
    3: "Knows the common model families and applies them with library defaults.",
    4: "Can diagnose fit quality and adjust features or settings with guidance.",
    5: "Designs, tunes, and validates complete modeling pipelines independently.",
    6: "Develops new methods or adapts algorithm internals to the problem.",
}

MANUAL_EXPERTISE = 5
AUTOMATED_EXPERTISE = 2


def expertise_for_method(method_id):
    """Manual pipelines demand level 5; automated ones level 2."""
    if method_id in ALGORITHMS:
        return MANUAL_EXPERTISE
    if method_id == "automl_lite" or method_id.startswith("external"):
        return AUTOMATED_EXPERTISE
    raise InvalidConfig(f"unknown method id {method_id!r}")


@dataclass(frozen=True)
class RepetitionOutcome:
    s_corr: float
    s_comp: float


@dataclass(frozen=True)
class CriteriaRecord:
    method: str
    s_corr: float  # mean correctness over repetitions
    s_comp: float  # mean training seconds over repetitions
    resp_seconds: float
    resp_category: ResponsivenessCategory
    s_exp: int
    s_repr: float
    repetitions: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.s_corr < 0:
            raise InvalidConfig("correctness must be non-negative")
        if self.s_comp <= 0:
            raise InvalidConfig("complexity must be positive seconds")
        if not 1 <= self.s_exp <= 6:
            raise InvalidConfig("expertise level must be in 1..6")
        if self.s_repr < 0:
            raise InvalidConfig("reproducibility must be non-negative")


CRITERIA_CSV_COLUMNS = ("method", "correctness", "complexity", "expertise",
                        "responsiveness", "mes")


def _pm(mean, std):
    return f"{mean!r}±{std!r}"


def parse_pm(cell):
    """Parse 'mean±std' (std optional) into a (mean, std) pair."""
    if "±" in cell:
        left, right = cell.split("±", 1)
        return float(left), float(right)
    return float(cell), 0.0


def write_criteria_csv(records, path):
    """One row per method, mes left blank for the scoring stage to fill."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CRITERIA_CSV_COLUMNS)
        for rec in records:
            comp_std = (np.std([r.s_comp for r in rec.repetitions], ddof=1)
                        if len(rec.repetitions) >= 2 else 0.0)
            writer.writerow([
                rec.method,
                _pm(rec.s_corr, rec.s_repr),
                _pm(rec.s_comp, float(comp_std)),
                rec.s_exp,
                rec.resp_category.value,
                "",
            ])


def read_criteria_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CRITERIA_CSV_COLUMNS:
            raise InvalidConfig(f"criteria csv must have columns {CRITERIA_CSV_COLUMNS}")
        rows = []
        for row in reader:
            if not row["correctness"].strip():
                continue  # failed-cell placeholder row: method name, empty metrics
            corr_mean, corr_std = parse_pm(row["correctness"])
            comp_mean, comp_std = parse_pm(row["complexity"])
            rows.append({
                "method": row["method"],
                "s_corr": corr_mean,
                "s_repr": corr_std,
                "s_comp": comp_mean,
                "s_comp_std": comp_std,
                "s_exp": int(row["expertise"]),
                "resp_category": ResponsivenessCategory(row["responsiveness"]),
            })
    return rows

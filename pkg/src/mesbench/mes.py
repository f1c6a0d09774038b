"""Method scoring: min-max normalization across methods, weighted
aggregation into a single [0, 1] score per method (smaller is better),
ranking, and the per-subset report that ties them together.

Scores are computed per repetition from per-repetition raw values and then
summarized as mean and sample std. Normalization bounds pool every
repetition of every method within the report, so one slow repetition of
one method widens the scale for all of them; the bounds used are recorded
in the report. A criterion on which all pooled values coincide normalizes
to zero for everyone: a non-discriminating criterion penalizes nobody.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .criteria import (
    CRITERIA_CSV_COLUMNS,
    ResponsivenessCategory,
    TTestResult,
    _pm,
    reproducibility,
    t_test,
)
from .errors import InvalidConfig, ZeroWeightSum

CRITERIA = ("corr", "comp", "resp", "exp", "repr")


@dataclass(frozen=True)
class Weights:
    """Non-negative criterion weights; positional order follows CRITERIA."""

    w_corr: float = 50.0
    w_comp: float = 10.0
    w_resp: float = 0.0
    w_exp: float = 40.0
    w_repr: float = 0.0

    def __post_init__(self):
        for name in CRITERIA:
            if getattr(self, f"w_{name}") < 0:
                raise InvalidConfig(f"weight {name} is negative")
        if self.total <= 0:
            raise ZeroWeightSum("all criterion weights are zero")

    @property
    def total(self) -> float:
        return sum(getattr(self, f"w_{name}") for name in CRITERIA)

    def as_dict(self) -> dict:
        return {name: float(getattr(self, f"w_{name}")) for name in CRITERIA}

    @classmethod
    def parse(cls, text: str) -> "Weights":
        """Parse "corr=50,exp=40,comp=10"; unnamed criteria keep defaults."""
        kwargs = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, sep, value = part.partition("=")
            if not sep or key not in CRITERIA:
                raise InvalidConfig(f"bad weight entry {part!r}")
            try:
                kwargs[f"w_{key}"] = float(value)
            except ValueError:
                raise InvalidConfig(f"bad weight value in {part!r}") from None
        return cls(**kwargs)


def minmax_normalize(values) -> np.ndarray:
    """Map to [0, 1] with min at 0 and max at 1; an all-equal input maps to
    all zeros. Inputs must already be oriented smaller-is-better."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise InvalidConfig("cannot normalize an empty vector")
    lo, hi = arr.min(), arr.max()
    if hi == lo:
        return np.zeros_like(arr)
    return (arr - lo) / (hi - lo)


def mes(normalized: Mapping[str, float], weights: Weights) -> float:
    """Weighted mean of normalized criteria values.

    Zero-weight criteria may be omitted from the mapping; any value present
    must lie in [0, 1] and any positively weighted criterion must be present.
    """
    if weights.total <= 0:
        raise ZeroWeightSum("all criterion weights are zero")
    for key in normalized:
        if key not in CRITERIA:
            raise InvalidConfig(f"unknown criterion {key!r}")
        v = normalized[key]
        if not 0.0 <= v <= 1.0:
            raise InvalidConfig(f"normalized {key} out of [0, 1]: {v}")
    acc = 0.0
    for name in CRITERIA:
        w = getattr(weights, f"w_{name}")
        if name in normalized:
            acc += w * normalized[name]
        elif w > 0:
            raise InvalidConfig(f"criterion {name!r} has weight {w} but no value")
    return acc / weights.total


def rank(entries) -> tuple:
    """Order (method, score_mean, raw_training_seconds) triples: ascending
    score, ties to the faster-training method, then lexical."""
    rows = list(entries)
    if not rows:
        raise InvalidConfig("cannot rank zero methods")
    rows.sort(key=lambda e: (e[1], e[2], e[0]))
    return tuple(e[0] for e in rows)


# ---------------------------------------------------------------- report assembly

@dataclass(frozen=True)
class MethodMeasurements:
    """Raw per-repetition measurements for one method on one feature subset."""

    method: str
    corr: tuple          # prediction error per repetition
    comp: tuple          # training seconds per repetition
    resp: tuple          # ResponsivenessCategory per repetition
    exp: int             # expertise level, 1..6

    def __post_init__(self):
        n = len(self.corr)
        if n < 1:
            raise InvalidConfig(f"{self.method}: need at least one repetition")
        if len(self.comp) != n or len(self.resp) != n:
            raise InvalidConfig(f"{self.method}: repetition vectors differ in length")
        if any(c < 0 for c in self.corr):
            raise InvalidConfig(f"{self.method}: negative correctness value")
        if any(t <= 0 for t in self.comp):
            raise InvalidConfig(f"{self.method}: training time must be positive")
        if not all(isinstance(r, ResponsivenessCategory) for r in self.resp):
            raise InvalidConfig(f"{self.method}: resp entries must be categories")
        if not 1 <= self.exp <= 6:
            raise InvalidConfig(f"{self.method}: expertise {self.exp} out of 1..6")

    @property
    def repetitions(self) -> int:
        return len(self.corr)


@dataclass(frozen=True)
class MethodResult:
    measurements: MethodMeasurements
    repr_value: float
    normalized: dict = field(repr=False)  # corr/comp/resp per-rep, exp/repr scalar
    mes_per_rep: tuple
    mes_mean: float
    mes_std: float


@dataclass(frozen=True)
class MesReport:
    results: tuple
    ranking: tuple
    bounds: dict          # criterion -> (lo, hi) actually used
    weights: Weights
    alpha: float
    significance: dict    # (method_a, method_b) -> TTestResult | None


def _norm(value: float, lo: float, hi: float) -> float:
    return (value - lo) / (hi - lo) if hi > lo else 0.0


def build_report(measurements: Sequence[MethodMeasurements],
                 weights: Weights = Weights(), alpha: float = 0.05) -> MesReport:
    """Score a set of methods measured on the same subset and data split.

    Single-repetition inputs get a reproducibility of 0 for every method
    (one sample has no spread to compare) and no significance entries.
    """
    rows = list(measurements)
    if not rows:
        raise InvalidConfig("no methods to score")
    names = [m.method for m in rows]
    if len(set(names)) != len(names):
        raise InvalidConfig("duplicate method names")

    reprs = {m.method: reproducibility(m.corr) if m.repetitions >= 2 else 0.0
             for m in rows}
    pooled = {
        "corr": [v for m in rows for v in m.corr],
        "comp": [v for m in rows for v in m.comp],
        "resp": [float(r.ordinal) for m in rows for r in m.resp],
        "exp": [float(m.exp) for m in rows],
        "repr": [reprs[m.method] for m in rows],
    }
    bounds = {c: (float(min(vals)), float(max(vals))) for c, vals in pooled.items()}

    results = []
    for m in rows:
        lo_c, hi_c = bounds["corr"]
        lo_t, hi_t = bounds["comp"]
        lo_r, hi_r = bounds["resp"]
        normalized = {
            "corr": tuple(_norm(v, lo_c, hi_c) for v in m.corr),
            "comp": tuple(_norm(v, lo_t, hi_t) for v in m.comp),
            "resp": tuple(_norm(float(r.ordinal), lo_r, hi_r) for r in m.resp),
            "exp": _norm(float(m.exp), *bounds["exp"]),
            "repr": _norm(reprs[m.method], *bounds["repr"]),
        }
        per_rep = tuple(
            mes({"corr": normalized["corr"][r], "comp": normalized["comp"][r],
                 "resp": normalized["resp"][r], "exp": normalized["exp"],
                 "repr": normalized["repr"]}, weights)
            for r in range(m.repetitions))
        std = float(np.std(per_rep, ddof=1)) if len(per_rep) >= 2 else 0.0
        results.append(MethodResult(
            measurements=m, repr_value=reprs[m.method], normalized=normalized,
            mes_per_rep=per_rep, mes_mean=float(np.mean(per_rep)), mes_std=std))

    ranking = rank([(res.measurements.method, res.mes_mean,
                     float(np.mean(res.measurements.comp))) for res in results])

    significance = {}
    for i, a in enumerate(results):
        for b in results[i + 1:]:
            key = (a.measurements.method, b.measurements.method)
            if a.measurements.repetitions >= 2 and b.measurements.repetitions >= 2:
                significance[key] = t_test(a.mes_per_rep, b.mes_per_rep, alpha)
            else:
                significance[key] = None

    return MesReport(results=tuple(results), ranking=ranking, bounds=bounds,
                     weights=weights, alpha=alpha, significance=significance)


# ---------------------------------------------------------------- serialization

def report_to_json(report: MesReport) -> dict:
    methods = []
    for res in report.results:
        m = res.measurements
        methods.append({
            "method": m.method,
            "correctness": list(map(float, m.corr)),
            "complexity": list(map(float, m.comp)),
            "responsiveness": [r.value for r in m.resp],
            "expertise": int(m.exp),
            "reproducibility": float(res.repr_value),
            "normalized": {
                "corr": list(res.normalized["corr"]),
                "comp": list(res.normalized["comp"]),
                "resp": list(res.normalized["resp"]),
                "exp": res.normalized["exp"],
                "repr": res.normalized["repr"],
            },
            "mes": {"mean": res.mes_mean, "std": res.mes_std,
                    "per_repetition": list(res.mes_per_rep)},
        })
    significance = []
    for (a, b), result in report.significance.items():
        entry = {"method_a": a, "method_b": b}
        if result is None:
            entry["skipped"] = True
        else:
            entry.update(t=float(result.t), significant=bool(result.significant),
                         degenerate=bool(result.degenerate),
                         critical=float(result.critical), df=int(result.df))
        significance.append(entry)
    return {
        "weights": report.weights.as_dict(),
        "alpha": report.alpha,
        "bounds": {c: [lo, hi] for c, (lo, hi) in report.bounds.items()},
        "ranking": list(report.ranking),
        "methods": methods,
        "significance": significance,
    }


def _worst_category(categories) -> ResponsivenessCategory:
    return max(categories, key=lambda c: c.ordinal)


def write_report_csv(report: MesReport, path) -> None:
    """One row per method in input order, columns mirroring the published
    comparison table layout; repetition spread shown as mean±std."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CRITERIA_CSV_COLUMNS)
        for res in report.results:
            m = res.measurements
            corr_std = float(np.std(m.corr, ddof=1)) if m.repetitions >= 2 else 0.0
            comp_std = float(np.std(m.comp, ddof=1)) if m.repetitions >= 2 else 0.0
            writer.writerow([
                m.method,
                _pm(float(np.mean(m.corr)), corr_std),
                _pm(float(np.mean(m.comp)), comp_std),
                int(m.exp),
                _worst_category(m.resp).value,
                _pm(res.mes_mean, res.mes_std),
            ])

"""Benchmark orchestration: methods x feature subsets x repetitions over one
fixed holdout split, with per-cell failure isolation and per-subset scoring.

Every random decision derives from the master seed: the holdout split from
(seed, "split"), cleaning imputation from (seed, "clean"), and each
repetition from (seed, method, subset, repetition). Timing criteria are
wall-clock and therefore vary run to run even at a fixed seed; everything
else is reproducible bit for bit in iteration-budget mode.
"""

from __future__ import annotations

import dataclasses
import io
import csv as csv_mod
from dataclasses import dataclass, field

import numpy as np

from .bridge import AdapterClient, serialize_table
from .criteria import (
    AUTOMATED_EXPERTISE,
    MANUAL_EXPERTISE,
    measure_responsiveness,
    measure_training,
    regression_error,
)
from .dataset import SUBSETS, clean_pipeline, ingest_csv, make_subsets, split_indices
from .errors import AllMethodsFailed, InvalidConfig
from .mes import MesReport, MethodMeasurements, Weights, build_report
from .preprocess import fit_preprocessor, transform
from .regressors import ALGORITHMS, fit, predict
from .search import AutomlConfig, SearchConfig, automl_fit, random_search
from .synth import SynthConfig, synth_generate
from .util import derive_seed

RESPONSIVENESS_PROBE_ROWS = 32


# ---------------------------------------------------------------- configuration

@dataclass(frozen=True)
class MethodConfig:
    kind: str                        # "manual" | "automl_lite" | "external"
    name: str
    algorithm: str | None = None     # manual: which algorithm family to search
    n_iter: int = 60                 # manual: random-search breadth
    k_folds: int = 5
    budget_seconds: float | None = None   # automated: overrides the global budget
    max_iterations: int | None = None     # automl_lite: iteration mode
    command: tuple = ()              # external: adapter argv

    def __post_init__(self):
        if self.kind == "manual":
            if self.algorithm not in ALGORITHMS:
                raise InvalidConfig(
                    f"manual method needs an algorithm from {ALGORITHMS}, "
                    f"got {self.algorithm!r}")
        elif self.kind == "automl_lite":
            if self.max_iterations is not None and self.budget_seconds is not None:
                raise InvalidConfig(
                    f"{self.name}: set budget_seconds or max_iterations, not both")
        elif self.kind == "external":
            if not self.command:
                raise InvalidConfig(f"{self.name}: external method needs a command")
        else:
            raise InvalidConfig(f"unknown method kind {self.kind!r}")
        if not self.name:
            raise InvalidConfig("method name must not be empty")


@dataclass(frozen=True)
class BenchmarkConfig:
    methods: tuple
    source_csv: str | None = None
    synth: SynthConfig | None = None
    subsets: tuple = tuple(SUBSETS)
    repetitions: int = 5
    test_frac: float = 0.1
    seed: int = 0
    weights: Weights = Weights()
    budget_seconds: float = 60.0     # default budget for automated methods
    scoring: str = "mape"
    alpha: float = 0.05
    clean: bool = True
    min_count: int = 150             # rare-model threshold during cleaning
    output_dir: str = "bench_out"

    def __post_init__(self):
        if (self.source_csv is None) == (self.synth is None):
            raise InvalidConfig("configure exactly one dataset source: csv or synth")
        if not self.methods:
            raise InvalidConfig("need at least one method")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise InvalidConfig(f"duplicate method names: {sorted(names)}")
        if not self.subsets:
            raise InvalidConfig("need at least one feature subset")
        for sid in self.subsets:
            if sid not in SUBSETS:
                raise InvalidConfig(f"unknown subset {sid!r}")
        if self.repetitions < 1:
            raise InvalidConfig("repetitions must be at least 1")
        if self.budget_seconds <= 0:
            raise InvalidConfig("budget_seconds must be positive")


_METHOD_KEYS = {"kind", "name", "algorithm", "n_iter", "k_folds",
                "budget_seconds", "max_iterations", "command"}
_CONFIG_KEYS = {"dataset", "methods", "subsets", "repetitions", "test_frac",
                "seed", "weights", "budget_seconds", "scoring", "alpha",
                "clean", "min_count", "output_dir"}


def _method_from_dict(entry: dict, index: int) -> MethodConfig:
    if not isinstance(entry, dict) or "kind" not in entry:
        raise InvalidConfig(f"method #{index}: expected an object with a 'kind'")
    unknown = set(entry) - _METHOD_KEYS
    if unknown:
        raise InvalidConfig(f"method #{index}: unknown keys {sorted(unknown)}")
    kind = entry["kind"]
    name = entry.get("name")
    if name is None:
        if kind == "manual":
            name = entry.get("algorithm", "")
        elif kind == "automl_lite":
            name = "automl_lite"
        else:
            command = entry.get("command") or [""]
            name = "external:" + str(command[0]).rsplit("/", 1)[-1]
    kwargs = {k: entry[k] for k in entry if k not in ("kind", "name", "command")}
    command = tuple(str(c) for c in entry.get("command", ()))
    return MethodConfig(kind=kind, name=name, command=command, **kwargs)


def _weights_from(value) -> Weights:
    if isinstance(value, Weights):
        return value
    if isinstance(value, str):
        return Weights.parse(value)
    if isinstance(value, dict):
        unknown = set(value) - {"corr", "comp", "resp", "exp", "repr"}
        if unknown:
            raise InvalidConfig(f"unknown weight keys {sorted(unknown)}")
        return Weights(**{f"w_{k}": float(v) for k, v in value.items()})
    raise InvalidConfig(f"cannot read weights from {type(value).__name__}")


def _synth_from_dict(entry: dict) -> SynthConfig:
    fields = {f.name for f in dataclasses.fields(SynthConfig)}
    unknown = set(entry) - fields
    if unknown:
        raise InvalidConfig(f"unknown synth keys {sorted(unknown)}")
    kwargs = dict(entry)
    for key in ("base_price_range", "hours_per_year_range", "year_range"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    return SynthConfig(**kwargs)


def config_from_dict(data: dict) -> BenchmarkConfig:
    """Build a config from a parsed JSON object (the documented schema)."""
    if not isinstance(data, dict):
        raise InvalidConfig("config root must be an object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise InvalidConfig(f"unknown config keys {sorted(unknown)}")
    source = data.get("dataset")
    if not isinstance(source, dict) or set(source) not in ({"csv"}, {"synth"}):
        raise InvalidConfig("dataset must be {'csv': path} or {'synth': {...}}")
    methods = tuple(_method_from_dict(m, i)
                    for i, m in enumerate(data.get("methods", [])))
    kwargs = {}
    if "csv" in source:
        kwargs["source_csv"] = str(source["csv"])
    else:
        kwargs["synth"] = _synth_from_dict(source["synth"])
    for key in ("repetitions", "test_frac", "seed", "budget_seconds", "scoring",
                "alpha", "clean", "min_count", "output_dir"):
        if key in data:
            kwargs[key] = data[key]
    if "subsets" in data:
        kwargs["subsets"] = tuple(data["subsets"])
    if "weights" in data:
        kwargs["weights"] = _weights_from(data["weights"])
    return BenchmarkConfig(methods=methods, **kwargs)


def config_to_dict(cfg: BenchmarkConfig) -> dict:
    """JSON-ready snapshot of a config (stored inside every bundle)."""
    methods = []
    for m in cfg.methods:
        entry = {"kind": m.kind, "name": m.name}
        if m.kind == "manual":
            entry.update(algorithm=m.algorithm, n_iter=m.n_iter, k_folds=m.k_folds)
        if m.budget_seconds is not None:
            entry["budget_seconds"] = m.budget_seconds
        if m.max_iterations is not None:
            entry["max_iterations"] = m.max_iterations
        if m.command:
            entry["command"] = list(m.command)
        methods.append(entry)
    dataset = ({"csv": cfg.source_csv} if cfg.source_csv is not None
               else {"synth": {k: (list(v) if isinstance(v, tuple) else
                                   dict(v) if not isinstance(v, (int, float, str)) else v)
                               for k, v in dataclasses.asdict(cfg.synth).items()}})
    return {
        "dataset": dataset,
        "methods": methods,
        "subsets": list(cfg.subsets),
        "repetitions": cfg.repetitions,
        "test_frac": cfg.test_frac,
        "seed": cfg.seed,
        "weights": cfg.weights.as_dict(),
        "budget_seconds": cfg.budget_seconds,
        "scoring": cfg.scoring,
        "alpha": cfg.alpha,
        "clean": cfg.clean,
        "min_count": cfg.min_count,
        "output_dir": cfg.output_dir,
    }


# ---------------------------------------------------------------- cell execution

@dataclass(frozen=True)
class CellResult:
    method: str
    subset: str
    status: str                  # "ok" | "failed"
    reason: str | None = None
    corr: tuple = ()             # per repetition
    comp: tuple = ()             # per repetition, training wall seconds
    resp_seconds: tuple = ()     # per repetition, mean seconds per predicted row
    resp_categories: tuple = ()  # per repetition
    expertise: int | None = None
    flags: tuple = ()            # deduplicated model/search warning flags
    details: tuple = field(default=(), repr=False)  # per-rep training-cycle log


@dataclass(frozen=True)
class RepOutcome:
    corr: float
    comp: float
    resp_seconds: float
    resp_category: object
    expertise: int
    flags: tuple
    detail: dict


class _AdapterModel:
    """predict() facade over a live adapter so per-row latency probes can
    reuse the same measurement loop as in-process models."""

    def __init__(self, client: AdapterClient, columns):
        self._client = client
        self._columns = tuple(columns)

    def predict(self, rows) -> np.ndarray:
        rows = np.asarray(rows, dtype=object)
        out = io.StringIO()
        writer = csv_mod.writer(out)
        writer.writerow(self._columns)
        writer.writerows(rows.tolist())
        return self._client.predict(out.getvalue(), rows.shape[0])


def _probe_matrix(table, n_rows: int) -> np.ndarray:
    idx = np.arange(min(n_rows, table.n_rows))
    probe = table.take(idx)
    return np.column_stack([probe.column(c).astype(object)
                            for c in probe.columns])


def _run_manual(method, cfg, train_table, y_train, test_table, y_test, rep_seed):
    def train_fn():
        pre = fit_preprocessor(train_table)
        X_train = transform(pre, train_table)
        search_cfg = SearchConfig(n_iter=method.n_iter, k_folds=method.k_folds,
                                  seed=rep_seed, scoring=cfg.scoring)
        spec, cv_score, records = random_search(
            method.algorithm, X_train, y_train, search_cfg)
        model = fit(spec, X_train, y_train, seed=derive_seed(rep_seed, "refit"))
        return pre, model, spec, cv_score, records

    (pre, model, spec, cv_score, records), comp = measure_training(train_fn)
    X_test = transform(pre, test_table)
    corr = regression_error(cfg.scoring, y_test, predict(model, X_test))
    seconds, category = measure_responsiveness(
        model, X_test[:RESPONSIVENESS_PROBE_ROWS])
    return RepOutcome(
        corr=corr, comp=comp, resp_seconds=seconds, resp_category=category,
        expertise=MANUAL_EXPERTISE, flags=tuple(getattr(model, "flags", ())),
        detail={"params": dict(spec.params), "cv_score": float(cv_score),
                "trials": len(records)})


def _run_automl(method, cfg, train_table, y_train, test_table, y_test, rep_seed):
    if method.max_iterations is not None:
        automl_cfg = AutomlConfig(max_iterations=method.max_iterations,
                                  seed=rep_seed, scoring=cfg.scoring)
    else:
        budget = method.budget_seconds or cfg.budget_seconds
        automl_cfg = AutomlConfig(budget_seconds=budget, seed=rep_seed,
                                  scoring=cfg.scoring)

    def train_fn():
        pre = fit_preprocessor(train_table)
        X_train = transform(pre, train_table)
        return pre, automl_fit(X_train, y_train, automl_cfg)

    (pre, ensemble), comp = measure_training(train_fn)
    X_test = transform(pre, test_table)
    corr = regression_error(cfg.scoring, y_test, ensemble.predict(X_test))
    seconds, category = measure_responsiveness(
        ensemble, X_test[:RESPONSIVENESS_PROBE_ROWS])
    return RepOutcome(
        corr=corr, comp=comp, resp_seconds=seconds, resp_category=category,
        expertise=AUTOMATED_EXPERTISE, flags=tuple(ensemble.flags),
        detail={"members": len(ensemble.member_models),
                "trials": len(ensemble.trials)})


def _run_external(method, cfg, train_table, y_train, test_table, y_test, rep_seed):
    budget = method.budget_seconds or cfg.budget_seconds
    with AdapterClient(method.command) as client:
        info = client.handshake()
        train_seconds = client.train(
            serialize_table(train_table, target=y_train), "price",
            budget, cfg.scoring)
        predictions = client.predict(serialize_table(test_table),
                                     test_table.n_rows)
        corr = regression_error(cfg.scoring, y_test, predictions)
        probe = _probe_matrix(test_table, RESPONSIVENESS_PROBE_ROWS)
        seconds, category = measure_responsiveness(
            _AdapterModel(client, test_table.columns), probe)
    return RepOutcome(
        corr=corr, comp=train_seconds, resp_seconds=seconds,
        resp_category=category, expertise=info.expertise_level, flags=(),
        detail={"framework": info.framework_name})


_RUNNERS = {"manual": _run_manual, "automl_lite": _run_automl,
            "external": _run_external}


def _run_cell(method, cfg, subset_id, train_table, y_train, test_table, y_test):
    outcomes = []
    for rep in range(cfg.repetitions):
        rep_seed = derive_seed(cfg.seed, method.name, subset_id, rep)
        try:
            outcomes.append(_RUNNERS[method.kind](
                method, cfg, train_table, y_train, test_table, y_test, rep_seed))
        except Exception as exc:
            return CellResult(
                method=method.name, subset=subset_id, status="failed",
                reason=f"repetition {rep}: {type(exc).__name__}: {exc}")
    flags = tuple(dict.fromkeys(f for o in outcomes for f in o.flags))
    return CellResult(
        method=method.name, subset=subset_id, status="ok",
        corr=tuple(o.corr for o in outcomes),
        comp=tuple(o.comp for o in outcomes),
        resp_seconds=tuple(o.resp_seconds for o in outcomes),
        resp_categories=tuple(o.resp_category for o in outcomes),
        expertise=outcomes[0].expertise, flags=flags,
        details=tuple(o.detail for o in outcomes))


# ---------------------------------------------------------------- orchestration

@dataclass(frozen=True)
class BenchmarkBundle:
    config: dict                 # snapshot, JSON-ready
    subset_reports: dict         # subset id -> MesReport | None
    cells: dict                  # (method, subset) -> CellResult
    summary: dict                # score grid, winner, cleaning counts

    @property
    def all_ok(self) -> bool:
        return all(c.status == "ok" for c in self.cells.values())


def _load_dataset(cfg: BenchmarkConfig):
    if cfg.source_csv is not None:
        return ingest_csv(cfg.source_csv)
    return synth_generate(cfg.synth)


def run_benchmark(cfg: BenchmarkConfig) -> BenchmarkBundle:
    """Execute the full grid. Failures stay inside their (method, subset)
    cell; only a run where every cell failed raises AllMethodsFailed."""
    dataset = _load_dataset(cfg)
    cleaning = None
    if cfg.clean:
        report = clean_pipeline(dataset, seed=derive_seed(cfg.seed, "clean"),
                                min_count=cfg.min_count)
        cleaning = {
            "rows_in": len(dataset.rows),
            "rows_out": len(report.dataset.rows),
            "duplicates_removed": report.duplicates_removed,
            "outliers_rejected": len(report.rejected),
            "values_imputed": report.imputed,
            "rare_rows_removed": report.rare_removed,
        }
        dataset = report.dataset

    subsets = make_subsets(dataset, cfg.subsets)
    n = len(dataset.rows)
    train_idx, test_idx = split_indices(n, cfg.test_frac,
                                        derive_seed(cfg.seed, "split"))

    cells = {}
    subset_reports = {}
    for sid in cfg.subsets:
        table, y = subsets[sid]
        train_table, test_table = table.take(train_idx), table.take(test_idx)
        y_train, y_test = y[train_idx], y[test_idx]

        measured = []
        for method in cfg.methods:
            cell = _run_cell(method, cfg, sid, train_table, y_train,
                             test_table, y_test)
            cells[(method.name, sid)] = cell
            if cell.status == "ok":
                measured.append(MethodMeasurements(
                    method=method.name, corr=cell.corr, comp=cell.comp,
                    resp=cell.resp_categories, exp=cell.expertise))
        subset_reports[sid] = (build_report(measured, weights=cfg.weights,
                                            alpha=cfg.alpha)
                               if measured else None)

    if all(c.status == "failed" for c in cells.values()):
        reasons = {c.reason for c in cells.values()}
        raise AllMethodsFailed(
            f"every cell failed; distinct reasons: {sorted(reasons)}")

    grid = {}
    best = None
    for sid, report in subset_reports.items():
        if report is None:
            continue
        for res in report.results:
            name = res.measurements.method
            grid.setdefault(name, {})[sid] = res.mes_mean
            if best is None or res.mes_mean < best[2]:
                best = (name, sid, res.mes_mean)
    summary = {
        "score_grid": grid,
        "winner": ({"method": best[0], "subset": best[1], "mes": best[2]}
                   if best else None),
        "cleaning": cleaning,
        "cells_ok": sum(1 for c in cells.values() if c.status == "ok"),
        "cells_failed": sum(1 for c in cells.values() if c.status == "failed"),
    }
    return BenchmarkBundle(config=config_to_dict(cfg),
                           subset_reports=subset_reports,
                           cells=cells, summary=summary)

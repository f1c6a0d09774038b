"""One engine per wrapped system, all behind the same three calls:
create the engine, train it once, ask it for predictions.

Engines receive the training and prediction data exactly as it crosses
the wire (CSV text, header first) and parse it themselves: the stub
needs only the target column, the real frameworks want a dataframe.
Framework imports happen inside the factories so that selecting an
engine that is not installed fails at handshake time with a clean
error instead of killing the process at startup.
"""

import csv
import io
import statistics

# Harness metric name -> framework-native metric name. auto-sklearn is
# deliberately mapped to absolute error when percentage error is asked
# for: its metric set has no MAPE, and optimizing MAE is the
# conventional stand-in. Pass an explicit override to change that.
METRIC_MAP = {
    "stub": {"mape": "mape", "mae": "mae", "rmse": "rmse"},
    "autogluon": {
        "mape": "mean_absolute_percentage_error",
        "mae": "mean_absolute_error",
        "rmse": "root_mean_squared_error",
    },
    "autosklearn": {
        "mape": "mean_absolute_error",
        "mae": "mean_absolute_error",
        "rmse": "root_mean_squared_error",
    },
    "flaml": {"mape": "mape", "mae": "mae", "rmse": "rmse"},
}


class UnsupportedMetric(Exception):
    pass


def resolve_metric(engine_name: str, requested: str, override=None) -> str:
    """Pick the framework-native metric for a harness scoring name."""
    if override:
        return override
    table = METRIC_MAP[engine_name]
    if requested not in table:
        raise UnsupportedMetric(
            f"{engine_name} has no mapping for scoring {requested!r}; "
            f"known: {sorted(table)} (or pass --metric)")
    return table[requested]


def _dataframe(csv_text: str):
    import pandas as pd
    df = pd.read_csv(io.StringIO(csv_text))
    for column in df.columns:
        if df[column].dtype == object:
            df[column] = df[column].astype("category")
    return df


class StubEngine:
    """Predicts the training-target mean, instantly. Exists so protocol
    conformance runs in CI with zero framework dependencies."""

    name = "stub"

    def __init__(self, metric_override=None):
        self._mean = None

    def train(self, csv_text: str, target: str, budget_seconds: float,
              scoring: str) -> None:
        rows = list(csv.DictReader(io.StringIO(csv_text)))
        self._mean = statistics.fmean(float(r[target]) for r in rows)

    def predict(self, csv_text: str) -> list:
        n = sum(1 for _ in csv.DictReader(io.StringIO(csv_text)))
        return [self._mean] * n


class AutogluonEngine:
    name = "autogluon"

    def __init__(self, metric_override=None):
        from autogluon.tabular import TabularPredictor
        self._cls = TabularPredictor
        self._override = metric_override
        self._predictor = None

    def train(self, csv_text, target, budget_seconds, scoring):
        metric = resolve_metric(self.name, scoring, self._override)
        df = _dataframe(csv_text)
        self._predictor = self._cls(
            label=target, eval_metric=metric, verbosity=0,
        ).fit(df, time_limit=budget_seconds)

    def predict(self, csv_text):
        values = self._predictor.predict(_dataframe(csv_text))
        return [float(v) for v in values]


class AutosklearnEngine:
    name = "autosklearn"

    def __init__(self, metric_override=None):
        import autosklearn.metrics
        import autosklearn.regression
        self._cls = autosklearn.regression.AutoSklearnRegressor
        self._metrics = autosklearn.metrics
        self._override = metric_override
        self._predictor = None

    def train(self, csv_text, target, budget_seconds, scoring):
        metric = resolve_metric(self.name, scoring, self._override)
        df = _dataframe(csv_text)
        self._predictor = self._cls(
            time_left_for_this_task=max(30, int(budget_seconds)),
            metric=getattr(self._metrics, metric),
        )
        self._predictor.fit(df.drop(columns=[target]), df[target])

    def predict(self, csv_text):
        values = self._predictor.predict(_dataframe(csv_text))
        return [float(v) for v in values]


class FlamlEngine:
    name = "flaml"

    def __init__(self, metric_override=None):
        from flaml import AutoML
        self._cls = AutoML
        self._override = metric_override
        self._predictor = None

    def train(self, csv_text, target, budget_seconds, scoring):
        metric = resolve_metric(self.name, scoring, self._override)
        df = _dataframe(csv_text)
        self._predictor = self._cls()
        self._predictor.fit(
            X_train=df.drop(columns=[target]), y_train=df[target],
            task="regression", metric=metric,
            time_budget=budget_seconds, verbose=0)

    def predict(self, csv_text):
        values = self._predictor.predict(_dataframe(csv_text))
        return [float(v) for v in values]


ENGINES = {
    "stub": StubEngine,
    "autogluon": AutogluonEngine,
    "autosklearn": AutosklearnEngine,
    "flaml": FlamlEngine,
}

FRAMEWORKS = tuple(sorted(set(ENGINES) - {"stub"}))

"""
Seven regressors, one split
===========================

Fit every built-in model family on the same synthetic holdout split with
mid-grid hyperparameters and line up test error against prediction
latency. No tuning here; demo 04 does that.
"""

import time

from mesbench.criteria import (
    categorize_latency,
    measure_responsiveness,
    regression_error,
)
from mesbench.dataset import holdout_split, make_subsets
from mesbench.preprocess import fit_preprocessor, transform
from mesbench.regressors import ALGORITHMS, fit, predict
from mesbench.regressors.spaces import default_spec
from mesbench.synth import SynthConfig, synth_generate

dataset = synth_generate(SynthConfig(n_rows=1200, n_models=6, seed=42))

# The full subset: model, series, location, hours, year.
table, y = make_subsets(dataset, ["full"])["full"]
split = holdout_split(table, y, test_frac=0.2, seed=0)

# One-hot categoricals + standardized numerics, fitted on train only so
# the test rows never leak into the scaler.
pre = fit_preprocessor(split.train_table)
X_train = transform(pre, split.train_table)
X_test = transform(pre, split.test_table)
print(f"design matrix: {X_train.shape[0]} train rows x "
      f"{X_train.shape[1]} encoded columns, {X_test.shape[0]} test rows")

print(f"\n{'algorithm':<10} {'fit s':>7} {'test mape':>10} "
      f"{'ms/row':>8}  latency class")
for algorithm in ALGORITHMS:
    spec = default_spec(algorithm, X_train.shape[1])
    started = time.perf_counter()
    model = fit(spec, X_train, split.train_y, seed=0)
    fit_seconds = time.perf_counter() - started

    mape = regression_error("mape", split.test_y, predict(model, X_test))
    per_row, category = measure_responsiveness(model, X_test[:32])
    print(f"{algorithm:<10} {fit_seconds:>7.2f} {mape:>10.3f} "
          f"{per_row * 1000:>8.3f}  {category.value}")

# Models round-trip through a plain JSON state blob, so a tuned model
# can be trained once and served elsewhere.
from tempfile import TemporaryDirectory

from mesbench.regressors import load_model, save_model

spec = default_spec("forest", X_train.shape[1])
model = fit(spec, X_train, split.train_y, seed=0)
with TemporaryDirectory() as d:
    path = f"{d}/forest.model"
    save_model(model, path)
    restored = load_model(path)
same = (predict(model, X_test) == predict(restored, X_test)).all()
print("\nsave/load round trip predictions identical:", same)

# The latency classes are fixed half-open bands over mean seconds per row.
print("\nlatency bands:",
      categorize_latency(0.05).value, "<0.1s |",
      categorize_latency(0.5).value, "<1s |",
      categorize_latency(2.0).value, ">=1s")

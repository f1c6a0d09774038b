"""
Tuning: random search and the budgeted ensemble
===============================================

First the manual route: cross-validated random search over one model
family's hyperparameter grid. Then the automated route: a wall-clock
budget spent searching across all families at once, blending the top
performers into one ensemble.
"""

import time

from mesbench.criteria import regression_error
from mesbench.dataset import holdout_split, make_subsets
from mesbench.preprocess import fit_preprocessor, transform
from mesbench.regressors import fit, predict
from mesbench.search import (
    AutomlConfig,
    SearchConfig,
    automl_fit,
    random_search,
)
from mesbench.synth import SynthConfig, synth_generate

dataset = synth_generate(SynthConfig(n_rows=900, n_models=5, seed=4))
table, y = make_subsets(dataset, ["full"])["full"]
split = holdout_split(table, y, test_frac=0.2, seed=0)
pre = fit_preprocessor(split.train_table)
X_train = transform(pre, split.train_table)
X_test = transform(pre, split.test_table)

# --- manual route -----------------------------------------------------
# 12 random knn configurations, each scored by 3-fold cross-validation.
config = SearchConfig(n_iter=12, k_folds=3, seed=5, scoring="mape")
best_spec, best_score, trials = random_search("knn", X_train,
                                              split.train_y, config)

print("random search over knn, 12 trials")
for t in trials[:5]:
    print(f"  trial {t.trial_index}: {t.params}  cv mape {t.score:.3f}")
print(f"  ... best: {best_spec.params}  cv mape {best_score:.3f}")

# Refit the winner on the full training data before judging it.
model = fit(best_spec, X_train, split.train_y, seed=11)
test_mape = regression_error("mape", split.test_y, predict(model, X_test))
print(f"  holdout mape after refit: {test_mape:.3f}")

# --- automated route --------------------------------------------------
# Same training data, but a 10-second budget instead of a trial count.
# The searcher rotates through every family, scores each candidate on an
# internal holdout, and keeps a weighted blend of the top three.
started = time.perf_counter()
ensemble = automl_fit(X_train, split.train_y,
                      AutomlConfig(budget_seconds=10.0, seed=5))
wall = time.perf_counter() - started

print(f"\nbudgeted search: {len(ensemble.trials)} trials "
      f"in {wall:.1f} s (budget 10 s)")
print("ensemble members (weight, holdout error, family):")
for spec, err, w in zip(ensemble.member_specs, ensemble.member_errors,
                        ensemble.weights):
    print(f"  {w:.2f}  {err:.3f}  {spec.algorithm} {spec.params}")
if ensemble.flags:
    print("flags:", ensemble.flags)

auto_mape = regression_error("mape", split.test_y,
                             ensemble.predict(X_test))
print(f"ensemble holdout mape: {auto_mape:.3f}")
print(f"manual knn mape:       {test_mape:.3f}")

"""
The full benchmark: methods x subsets x repetitions
===================================================

Run a small grid end to end: two manual pipelines against the budgeted
ensemble, on two feature subsets, two repetitions each. Every cell
measures error, training time, prediction latency, expertise demand,
and run-to-run spread; each subset then gets a weighted score per
method, normalized so 0 is the best observed and 1 the worst.

The same run is available from the shell:

    mesbench bench --config config.json --out bench_out
"""

import tempfile

from mesbench.bench import BenchmarkConfig, MethodConfig, run_benchmark
from mesbench.reporting import emit_report
from mesbench.synth import SynthConfig

config = BenchmarkConfig(
    methods=(
        MethodConfig(kind="manual", name="knn", algorithm="knn",
                     n_iter=6, k_folds=3),
        MethodConfig(kind="manual", name="tree", algorithm="tree",
                     n_iter=6, k_folds=3),
        MethodConfig(kind="automl_lite", name="automl_lite",
                     max_iterations=4),
    ),
    synth=SynthConfig(n_rows=500, n_models=4, seed=13),
    subsets=("basic", "full"),
    repetitions=2,
    seed=2,
    clean=False,  # the generator above injects nothing worth cleaning
)

bundle = run_benchmark(config)
summary = bundle.summary

print(f"cells ok: {summary['cells_ok']}, failed: {summary['cells_failed']}")

print("\nscore grid (lower is better, per subset)")
methods = [m.name for m in config.methods]
grid = summary["score_grid"]
print(f"{'subset':<8}" + "".join(f"{m:>14}" for m in methods))
for sid in config.subsets:
    print(f"{sid:<8}" + "".join(f"{grid[m][sid]:>14.3f}" for m in methods))
winner = summary["winner"]
print(f"overall winner: {winner['method']} on {winner['subset']} "
      f"(score {winner['mes']:.3f})")

# Per-subset detail: the raw per-repetition criteria behind the scores.
report = bundle.subset_reports["full"]
print("\nfull subset, raw criteria per method")
for result in report.results:
    m = result.measurements
    mean_corr = sum(m.corr) / len(m.corr)
    mean_comp = sum(m.comp) / len(m.comp)
    worst_resp = max(m.resp, key=lambda c: ("real_time", "fast", "slow").index(c.value))
    print(f"  {m.method:<12} mape {mean_corr:.3f} (+/-{result.repr_value:.4f})"
          f"  train {mean_comp:>6.2f} s  {worst_resp.value}"
          f"  expertise {m.exp}")

# Everything lands in three file kinds: a JSON bundle with the complete
# record, one criteria CSV per subset, and a long-format CSV for plots.
with tempfile.TemporaryDirectory() as out:
    paths = emit_report(bundle, formats=("json", "csv", "plotdata"),
                        out_dir=out)
    print("\nemitted files:")
    for p in paths:
        print("  ", p)

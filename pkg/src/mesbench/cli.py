"""Command line entry points: synth, clean, bench, score, report.

Exit codes: 0 success, 1 fatal error, 2 partial benchmark (some cells
failed but at least one completed).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys

from .bench import config_from_dict, run_benchmark
from .criteria import read_criteria_csv
from .dataset import clean_pipeline, ingest_csv, write_csv
from .errors import MesbenchError
from .mes import Weights, mes, minmax_normalize, rank
from .reporting import REPORT_FORMATS, emit_from_json, emit_report, load_bundle_json
from .synth import SynthConfig, synth_generate
from .util import derive_seed


def score_rows(rows, weights: Weights):
    """Recompute one MES per method from criteria-summary rows (the score
    subcommand's core): min-max bounds come from the rows themselves."""
    columns = {
        "corr": [r["s_corr"] for r in rows],
        "comp": [r["s_comp"] for r in rows],
        "resp": [float(r["resp_category"].ordinal) for r in rows],
        "exp": [float(r["s_exp"]) for r in rows],
        "repr": [r["s_repr"] for r in rows],
    }
    normalized = {c: minmax_normalize(v) for c, v in columns.items()}
    scored = []
    for i, row in enumerate(rows):
        value = mes({c: float(normalized[c][i]) for c in columns}, weights)
        scored.append((row["method"], value, row["s_comp"]))
    return rank(scored), {m: v for m, v, _ in scored}


def _cmd_synth(args) -> int:
    cfg = SynthConfig(n_rows=args.rows, n_models=args.models, seed=args.seed,
                      noise_sigma=args.noise_sigma,
                      duplicate_frac=args.duplicate_frac,
                      missing_hours_frac=args.missing_frac,
                      outlier_frac=args.outlier_frac)
    dataset = synth_generate(cfg)
    write_csv(dataset, args.out)
    print(f"wrote {len(dataset.rows)} rows to {args.out}")
    return 0


def _cmd_clean(args) -> int:
    dataset = ingest_csv(args.input)
    report = clean_pipeline(dataset, seed=derive_seed(args.seed, "clean"),
                            min_count=args.min_count)
    write_csv(report.dataset, args.out)
    counts = {
        "rows_in": len(dataset.rows),
        "rows_out": len(report.dataset.rows),
        "duplicates_removed": report.duplicates_removed,
        "outliers_rejected": len(report.rejected),
        "values_imputed": report.imputed,
        "rare_rows_removed": report.rare_removed,
    }
    if args.log:
        log = dict(counts)
        log["rejected"] = [
            {"source_id": r.listing.source_id, "model": r.listing.model,
             "price": r.listing.price, "reason": r.reason}
            for r in report.rejected]
        with open(args.log, "w") as fh:
            json.dump(log, fh, indent=2)
            fh.write("\n")
    for key, value in counts.items():
        print(f"{key}: {value}")
    return 0


def _cmd_bench(args) -> int:
    with open(args.config) as fh:
        cfg = config_from_dict(json.load(fh))
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.budget is not None:
        overrides["budget_seconds"] = args.budget
    if args.repetitions is not None:
        overrides["repetitions"] = args.repetitions
    if args.weights is not None:
        overrides["weights"] = Weights.parse(args.weights)
    if args.out is not None:
        overrides["output_dir"] = args.out
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)

    bundle = run_benchmark(cfg)
    formats = tuple(args.formats.split(","))
    written = emit_report(bundle, formats, cfg.output_dir)

    summary = bundle.summary
    print(f"cells ok: {summary['cells_ok']}, failed: {summary['cells_failed']}")
    for sid, report in bundle.subset_reports.items():
        if report is None:
            print(f"{sid}: all methods failed")
            continue
        line = ", ".join(
            f"{res.measurements.method}={res.mes_mean:.3f}"
            for name in report.ranking
            for res in report.results if res.measurements.method == name)
        print(f"{sid}: {line}")
    if summary["winner"]:
        w = summary["winner"]
        print(f"best: {w['method']} on {w['subset']} (mes {w['mes']:.3f})")
    for path in written:
        print(f"wrote {path}")
    return 0 if bundle.all_ok else 2


def _cmd_score(args) -> int:
    rows = read_criteria_csv(args.input)
    if not rows:
        print("no scoreable rows in input", file=sys.stderr)
        return 1
    weights = Weights.parse(args.weights) if args.weights else Weights()
    ranking, scores = score_rows(rows, weights)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method", "mes"])
            for name in ranking:
                writer.writerow([name, repr(scores[name])])
        print(f"wrote {args.out}")
    for name in ranking:
        print(f"{name}: {scores[name]:.3f}")
    return 0


def _cmd_report(args) -> int:
    data = load_bundle_json(args.bundle)
    formats = tuple(args.formats.split(","))
    out_dir = args.out if args.out else "."
    for path in emit_from_json(data, formats, out_dir):
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mesbench",
        description="Benchmark manual and automated regression pipelines "
                    "and score them on weighted evaluation criteria.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic listings CSV")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--models", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sigma", type=float, default=0.08)
    p.add_argument("--duplicate-frac", type=float, default=0.0)
    p.add_argument("--missing-frac", type=float, default=0.0)
    p.add_argument("--outlier-frac", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("clean", help="run the cleaning pipeline on a CSV")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--log", help="also write the removal counts as JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-count", type=int, default=150)
    p.set_defaults(fn=_cmd_clean)

    p = sub.add_parser("bench", help="run the full benchmark grid")
    p.add_argument("--config", required=True, help="benchmark config JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=float, help="override budget_seconds")
    p.add_argument("--repetitions", type=int)
    p.add_argument("--weights", help="e.g. corr=50,exp=40,comp=10")
    p.add_argument("--out", help="override output directory")
    p.add_argument("--formats", default=",".join(REPORT_FORMATS))
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("score", help="recompute scores from a criteria CSV")
    p.add_argument("input")
    p.add_argument("--weights")
    p.add_argument("--out", help="write method,mes rows here")
    p.set_defaults(fn=_cmd_score)

    p = sub.add_parser("report", help="re-emit report files from bundle.json")
    p.add_argument("bundle")
    p.add_argument("--formats", default="csv,plotdata")
    p.add_argument("--out", help="output directory (default: cwd)")
    p.set_defaults(fn=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except MesbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Serialize benchmark bundles and emit the flat report files.

The JSON bundle is the complete record; the CSV views are derived from it,
so `emit_from_json` can regenerate every flat file from bundle.json alone.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from .criteria import CRITERIA_CSV_COLUMNS, _pm
from .errors import InvalidConfig
from .mes import report_to_json

BUNDLE_FORMAT = "mesbench-bundle"
BUNDLE_VERSION = 1
REPORT_FORMATS = ("json", "csv", "plotdata")
PLOTDATA_COLUMNS = ("method", "subset", "repetition", "criterion", "value")

_CATEGORY_ORDER = {"real_time": 0, "fast": 1, "slow": 2}


def bundle_to_json(bundle) -> dict:
    cells = []
    for (name, sid), cell in bundle.cells.items():
        entry = {"method": name, "subset": sid, "status": cell.status}
        if cell.status == "ok":
            entry.update(
                correctness=[float(v) for v in cell.corr],
                complexity=[float(v) for v in cell.comp],
                responsiveness_seconds=[float(v) for v in cell.resp_seconds],
                responsiveness=[c.value for c in cell.resp_categories],
                expertise=int(cell.expertise),
                flags=list(cell.flags),
                details=[dict(d) for d in cell.details],
            )
        else:
            entry["reason"] = cell.reason
        cells.append(entry)
    return {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "config": bundle.config,
        "summary": bundle.summary,
        "subsets": {sid: (report_to_json(rep) if rep is not None else None)
                    for sid, rep in bundle.subset_reports.items()},
        "cells": cells,
    }


def load_bundle_json(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or data.get("format") != BUNDLE_FORMAT:
        raise InvalidConfig(f"{path} is not a benchmark bundle")
    if data.get("version") != BUNDLE_VERSION:
        raise InvalidConfig(f"unsupported bundle version {data.get('version')!r}")
    return data


def _std(values) -> float:
    return float(np.std(values, ddof=1)) if len(values) >= 2 else 0.0


def _subset_csv_rows(data: dict, sid: str) -> list:
    subset_report = data["subsets"].get(sid)
    mes_by_method = {}
    if subset_report is not None:
        for m in subset_report["methods"]:
            mes_by_method[m["method"]] = m["mes"]
    rows = []
    for cell in data["cells"]:
        if cell["subset"] != sid:
            continue
        if cell["status"] != "ok":
            rows.append([cell["method"], "", "", "", "", "failed"])
            continue
        corr, comp = cell["correctness"], cell["complexity"]
        worst = max(cell["responsiveness"], key=_CATEGORY_ORDER.__getitem__)
        m = mes_by_method[cell["method"]]
        rows.append([
            cell["method"],
            _pm(float(np.mean(corr)), _std(corr)),
            _pm(float(np.mean(comp)), _std(comp)),
            cell["expertise"],
            worst,
            _pm(m["mean"], m["std"]),
        ])
    return rows


def _plotdata_rows(data: dict) -> list:
    mes_per_rep = {}
    for sid, subset_report in data["subsets"].items():
        if subset_report is None:
            continue
        for m in subset_report["methods"]:
            mes_per_rep[(m["method"], sid)] = m["mes"]["per_repetition"]
    rows = []
    for cell in data["cells"]:
        if cell["status"] != "ok":
            continue
        name, sid = cell["method"], cell["subset"]
        series = (("correctness", cell["correctness"]),
                  ("complexity", cell["complexity"]),
                  ("responsiveness", cell["responsiveness_seconds"]),
                  ("mes", mes_per_rep[(name, sid)]))
        for criterion, values in series:
            for rep, value in enumerate(values):
                rows.append([name, sid, rep, criterion, float(value)])
    return rows


def emit_from_json(data: dict, formats, out_dir) -> list:
    """Write the requested report files from a bundle dict; returns paths."""
    unknown = set(formats) - set(REPORT_FORMATS)
    if unknown:
        raise InvalidConfig(f"unknown report formats {sorted(unknown)}")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "json" in formats:
        path = os.path.join(out_dir, "bundle.json")
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    if "csv" in formats:
        for sid in data["config"]["subsets"]:
            path = os.path.join(out_dir, f"report_{sid}.csv")
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(CRITERIA_CSV_COLUMNS)
                writer.writerows(_subset_csv_rows(data, sid))
            written.append(path)
    if "plotdata" in formats:
        path = os.path.join(out_dir, "plotdata.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(PLOTDATA_COLUMNS)
            writer.writerows(_plotdata_rows(data))
        written.append(path)
    return written


def emit_report(bundle, formats=REPORT_FORMATS, out_dir="bench_out") -> list:
    return emit_from_json(bundle_to_json(bundle), formats, out_dir)

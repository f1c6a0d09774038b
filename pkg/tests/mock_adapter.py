"""Standalone mean-predictor adapter speaking the JSON-lines protocol.

Used by the bridge tests and the protocol conformance suite. Failure modes
are switchable so the harness's negative paths can be driven from outside:

    --version N        report protocol_version N in the handshake reply
    --expertise N      report expertise_level N (default 2)
    --malformed        answer the train request with a non-JSON line
    --hang             never answer the train request
    --error-on-train   answer the train request with an error frame
    --wrong-count      answer predict with one value too few (or too many)
    --slow-predict S   sleep S seconds before every predictions reply

Stdlib only: this file must run without the package installed.
"""

import argparse
import csv
import io
import json
import sys
import time

PROTOCOL_VERSION = 1


def _reply(frame):
    sys.stdout.write(json.dumps(frame) + "\n")
    sys.stdout.flush()


def _error(code, message):
    _reply({"type": "error", "code": code, "message": message})


def _rows(csv_text):
    return list(csv.DictReader(io.StringIO(csv_text)))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--version", type=int, default=PROTOCOL_VERSION)
    parser.add_argument("--expertise", type=int, default=2)
    parser.add_argument("--malformed", action="store_true")
    parser.add_argument("--hang", action="store_true")
    parser.add_argument("--error-on-train", action="store_true")
    parser.add_argument("--wrong-count", action="store_true")
    parser.add_argument("--slow-predict", type=float, default=0.0)
    args = parser.parse_args()

    mean = None
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            frame = json.loads(line)
            kind = frame["type"]
        except (json.JSONDecodeError, KeyError, TypeError):
            _error("bad_request", "request line is not a typed JSON object")
            continue

        if kind == "handshake":
            _reply({"type": "handshake", "protocol_version": args.version,
                    "framework_name": "mock", "expertise_level": args.expertise})
        elif kind == "train":
            if args.hang:
                time.sleep(600)
                continue
            if args.malformed:
                sys.stdout.write("this line is not JSON\n")
                sys.stdout.flush()
                continue
            if args.error_on_train:
                _error("boom", "synthetic training failure")
                continue
            started = time.perf_counter()
            try:
                rows = _rows(frame["csv"])
                target = frame["target"]
                values = [float(r[target]) for r in rows]
                mean = sum(values) / len(values)
            except Exception as exc:
                _error("train_failed", str(exc))
                continue
            _reply({"type": "train_ack",
                    "train_seconds": time.perf_counter() - started})
        elif kind == "predict":
            if args.slow_predict:
                time.sleep(args.slow_predict)
            if mean is None:
                _error("not_trained", "predict before train")
                continue
            n = len(_rows(frame["csv"]))
            values = [mean] * n
            if args.wrong_count:
                values = values[:-1] if values else [0.0]
            _reply({"type": "predictions", "values": values})
        else:
            _error("bad_request", f"unknown request type {kind!r}")


if __name__ == "__main__":
    main()

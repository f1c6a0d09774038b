"""Client side of the external-adapter protocol: JSON-lines frames over a
subprocess's standard streams. One request line gets exactly one reply
line; any other shape is a protocol violation that kills the adapter.

The training deadline is hard: 2x the training budget plus 60 seconds,
after which the subprocess is killed and the cell records a timeout.
"""

from __future__ import annotations

import csv
import io
import json
import queue
import subprocess
import threading
from dataclasses import dataclass

import numpy as np

from .dataset import Table
from .errors import (
    AdapterFailure,
    AdapterTimeout,
    HandshakeMismatch,
    ProtocolViolation,
)

PROTOCOL_VERSION = 1
HANDSHAKE_TIMEOUT = 60.0
DEFAULT_EXPERTISE = 2


def reply_deadline(budget_seconds: float) -> float:
    return 2.0 * budget_seconds + 60.0


@dataclass(frozen=True)
class AdapterInfo:
    framework_name: str
    expertise_level: int
    protocol_version: int


def serialize_table(table: Table, target=None, target_name: str = "price") -> str:
    """Inline CSV text (header + rows) for a table, optionally with the
    target appended as the last column."""
    out = io.StringIO()
    columns = list(table.columns) + ([target_name] if target is not None else [])
    writer = csv.writer(out)
    writer.writerow(columns)
    cells = [table.column(c) for c in table.columns]
    if target is not None:
        cells.append(np.asarray(target))
    for i in range(table.n_rows):
        writer.writerow([col[i] for col in cells])
    return out.getvalue()


class AdapterClient:
    """Owns one adapter subprocess; use as a context manager."""

    def __init__(self, command):
        self._proc = subprocess.Popen(
            list(command), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL, text=True)
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._timeout = HANDSHAKE_TIMEOUT

    def _pump(self):
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF sentinel

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def _kill(self):
        if self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()

    def _request(self, frame: dict, reply_type: str, timeout: float) -> dict:
        try:
            self._proc.stdin.write(json.dumps(frame) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            self._kill()
            raise ProtocolViolation("adapter closed its input stream") from None
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            self._kill()
            raise AdapterTimeout(
                f"no reply to {frame['type']!r} within {timeout:.1f} s") from None
        if line is None:
            self._kill()
            raise ProtocolViolation("adapter closed its output stream before replying")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError:
            self._kill()
            raise ProtocolViolation("reply is not valid JSON",
                                    line=line.rstrip("\n")) from None
        if not isinstance(reply, dict) or "type" not in reply:
            self._kill()
            raise ProtocolViolation("reply is not a typed JSON object",
                                    line=line.rstrip("\n"))
        if reply["type"] == "error":
            raise AdapterFailure(
                f"{reply.get('code', 'error')}: {reply.get('message', '')}")
        if reply["type"] != reply_type:
            self._kill()
            raise ProtocolViolation(
                f"expected {reply_type!r} reply, got {reply['type']!r}",
                line=line.rstrip("\n"))
        return reply

    def handshake(self) -> AdapterInfo:
        reply = self._request({"type": "handshake",
                               "protocol_version": PROTOCOL_VERSION},
                              "handshake", HANDSHAKE_TIMEOUT)
        version = reply.get("protocol_version")
        if version != PROTOCOL_VERSION:
            self._kill()
            raise HandshakeMismatch(
                f"adapter speaks protocol {version!r}, harness speaks "
                f"{PROTOCOL_VERSION}")
        name = reply.get("framework_name")
        if not isinstance(name, str) or not name:
            raise ProtocolViolation("handshake reply lacks framework_name",
                                    line=json.dumps(reply))
        expertise = reply.get("expertise_level", DEFAULT_EXPERTISE)
        if not isinstance(expertise, int) or not 1 <= expertise <= 6:
            expertise = DEFAULT_EXPERTISE
        return AdapterInfo(framework_name=name, expertise_level=expertise,
                           protocol_version=version)

    def train(self, csv_text: str, target_name: str, budget_seconds: float,
              scoring: str, timeout: float | None = None) -> float:
        if timeout is None:
            timeout = reply_deadline(budget_seconds)
        self._timeout = timeout
        reply = self._request({"type": "train", "budget_seconds": budget_seconds,
                               "scoring": scoring, "target": target_name,
                               "csv": csv_text}, "train_ack", timeout)
        seconds = reply.get("train_seconds")
        if not isinstance(seconds, (int, float)) or seconds < 0:
            raise ProtocolViolation("train_ack lacks a valid train_seconds",
                                    line=json.dumps(reply))
        return float(seconds)

    def predict(self, csv_text: str, n_rows: int,
                timeout: float | None = None) -> np.ndarray:
        reply = self._request({"type": "predict", "csv": csv_text},
                              "predictions", timeout or self._timeout)
        values = reply.get("values")
        if not isinstance(values, list) or len(values) != n_rows:
            got = "missing" if values is None else f"{len(values)} values"
            raise ProtocolViolation(
                f"expected {n_rows} predictions, got {got}",
                line=json.dumps(reply))
        try:
            return np.array(values, dtype=float)
        except (TypeError, ValueError):
            raise ProtocolViolation("predictions contain non-numeric values",
                                    line=json.dumps(reply)) from None


def bridge_external(command, train_table: Table, train_y, test_table: Table,
                    budget_seconds: float, scoring: str = "mape",
                    timeout: float | None = None):
    """One full adapter session: handshake, train, predict the test rows.

    Returns (predictions, train_seconds, AdapterInfo).
    """
    with AdapterClient(command) as client:
        info = client.handshake()
        train_seconds = client.train(
            serialize_table(train_table, target=train_y), "price",
            budget_seconds, scoring, timeout=timeout)
        predictions = client.predict(serialize_table(test_table),
                                     test_table.n_rows, timeout=timeout)
    return predictions, train_seconds, info

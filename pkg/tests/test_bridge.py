"""Adapter bridge: wire protocol round-trips and every negative path."""

import sys
from pathlib import Path

import numpy as np
import pytest

from mesbench.bridge import (
    AdapterClient,
    bridge_external,
    reply_deadline,
    serialize_table,
)
from mesbench.dataset import Table
from mesbench.errors import (
    AdapterFailure,
    AdapterTimeout,
    HandshakeMismatch,
    ProtocolViolation,
)

MOCK = str(Path(__file__).parent / "mock_adapter.py")


def mock_cmd(*flags):
    return [sys.executable, MOCK, *flags]


def _tables():
    train = Table(
        columns=("model", "working_hours"),
        data={"model": np.array(["a", "b", "a", "c"], dtype=object),
              "working_hours": np.array([100.0, 200.0, 300.0, 400.0])})
    y = np.array([10.0, 20.0, 30.0, 40.0])
    test = Table(
        columns=("model", "working_hours"),
        data={"model": np.array(["b", "a"], dtype=object),
              "working_hours": np.array([150.0, 250.0])})
    return train, y, test


def test_round_trip_mean_predictor():
    train, y, test = _tables()
    preds, train_seconds, info = bridge_external(
        mock_cmd(), train, y, test, budget_seconds=5.0)
    np.testing.assert_allclose(preds, [25.0, 25.0])  # mean of the target
    assert train_seconds >= 0.0
    assert info.framework_name == "mock"
    assert info.expertise_level == 2
    assert info.protocol_version == 1


def test_serialize_table_quotes_and_round_trips():
    import csv
    import io

    table = Table(columns=("model", "hours"),
                  data={"model": np.array(['say "hi", ok', "plain"], dtype=object),
                        "hours": np.array([1.5, 2.0])})
    text = serialize_table(table, target=np.array([3.0, 4.0]))
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows[0]["model"] == 'say "hi", ok'
    assert rows[0]["price"] == "3.0"
    assert rows[1]["hours"] == "2.0"

    no_target = serialize_table(table)
    assert no_target.splitlines()[0] == "model,hours"


def test_reply_deadline_formula():
    assert reply_deadline(300.0) == 660.0
    assert reply_deadline(0.0) == 60.0


def test_version_mismatch_detected_before_training():
    train, y, test = _tables()
    with pytest.raises(HandshakeMismatch):
        bridge_external(mock_cmd("--version", "2"), train, y, test,
                        budget_seconds=5.0)


def test_malformed_reply_captures_line():
    train, y, test = _tables()
    with pytest.raises(ProtocolViolation) as info:
        bridge_external(mock_cmd("--malformed"), train, y, test,
                        budget_seconds=5.0)
    assert info.value.line == "this line is not JSON"


def test_hang_is_killed_on_deadline():
    train, y, test = _tables()
    with pytest.raises(AdapterTimeout):
        bridge_external(mock_cmd("--hang"), train, y, test,
                        budget_seconds=5.0, timeout=0.5)


def test_error_frame_surfaces_as_adapter_failure():
    train, y, test = _tables()
    with pytest.raises(AdapterFailure, match="synthetic training failure"):
        bridge_external(mock_cmd("--error-on-train"), train, y, test,
                        budget_seconds=5.0)


def test_wrong_prediction_count_rejected():
    train, y, test = _tables()
    with pytest.raises(ProtocolViolation, match="expected 2 predictions"):
        bridge_external(mock_cmd("--wrong-count"), train, y, test,
                        budget_seconds=5.0)


def test_adapter_that_exits_immediately():
    train, y, test = _tables()
    cmd = [sys.executable, "-c", "import sys; sys.exit(0)"]
    with pytest.raises(ProtocolViolation, match="output stream"):
        bridge_external(cmd, train, y, test, budget_seconds=5.0)


def test_zero_row_predict_returns_empty_vector():
    train, y, test = _tables()
    empty = test.take(np.array([], dtype=int))
    with AdapterClient(mock_cmd()) as client:
        client.handshake()
        client.train(serialize_table(train, target=y), "price", 5.0, "mape")
        preds = client.predict(serialize_table(empty), 0)
    assert preds.shape == (0,)


def test_adapter_reported_expertise_flows_through():
    train, y, test = _tables()
    _, _, info = bridge_external(mock_cmd("--expertise", "4"), train, y, test,
                                 budget_seconds=5.0)
    assert info.expertise_level == 4


def test_out_of_range_expertise_falls_back_to_default():
    train, y, test = _tables()
    _, _, info = bridge_external(mock_cmd("--expertise", "9"), train, y, test,
                                 budget_seconds=5.0)
    assert info.expertise_level == 2

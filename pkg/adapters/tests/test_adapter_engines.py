"""Engine layer: metric mapping and the stub, no subprocess involved."""

import io

import pytest

from automl_adapters.engines import (
    METRIC_MAP,
    StubEngine,
    UnsupportedMetric,
    resolve_metric,
)
from automl_adapters.server import serve

TRAIN_CSV = "model,working_hours,price\na,100,10\nb,200,30\na,300,20\n"


def test_metric_defaults_per_framework():
    assert resolve_metric("autogluon", "mape") == "mean_absolute_percentage_error"
    assert resolve_metric("flaml", "mape") == "mape"
    assert resolve_metric("flaml", "rmse") == "rmse"
    # auto-sklearn has no native percentage-error metric; absolute error
    # is the documented default stand-in
    assert resolve_metric("autosklearn", "mape") == "mean_absolute_error"
    assert resolve_metric("autosklearn", "rmse") == "root_mean_squared_error"


def test_metric_override_beats_the_table():
    assert resolve_metric("autosklearn", "mape",
                          override="r2") == "r2"
    assert resolve_metric("flaml", "mape", override="mse") == "mse"


def test_unknown_scoring_points_at_the_override_flag():
    with pytest.raises(UnsupportedMetric, match="--metric"):
        resolve_metric("autogluon", "median_house_value")


def test_every_engine_has_a_metric_table():
    from automl_adapters.engines import ENGINES
    assert set(METRIC_MAP) == set(ENGINES)
    for table in METRIC_MAP.values():
        assert set(table) >= {"mape", "mae", "rmse"}


def test_stub_predicts_training_mean():
    engine = StubEngine()
    engine.train(TRAIN_CSV, "price", budget_seconds=5.0, scoring="mape")
    assert engine.predict("model,working_hours\nc,50\nd,60\n") == [20.0, 20.0]
    assert engine.predict("model,working_hours\n") == []


def test_stub_handles_quoted_fields():
    tricky = ('model,price\n"rig, 7.5t",10\n"say ""hi""",50\n')
    engine = StubEngine()
    engine.train(tricky, "price", budget_seconds=1.0, scoring="mape")
    assert engine.predict('model\n"rig, 7.5t"\n') == [30.0]


def _serve_lines(requests, factory=StubEngine, name="stub"):
    out = io.StringIO()
    serve(factory, name, io.StringIO("".join(r + "\n" for r in requests)), out)
    return out.getvalue().splitlines()


def test_serve_answers_every_line_exactly_once():
    replies = _serve_lines([
        '{"type": "handshake", "protocol_version": 1}',
        '{"type": "train", "budget_seconds": 1, "scoring": "mape",'
        ' "target": "price", "csv": "p,price\\na,4\\nb,8\\n"}',
        '{"type": "predict", "csv": "p\\na\\n"}',
        "",
        "garbage",
    ])
    assert len(replies) == 4  # blank lines are skipped, garbage is not
    assert '"train_ack"' in replies[1]
    assert '"values": [6.0]' in replies[2]
    assert '"bad_request"' in replies[3]


def test_serve_import_failure_becomes_handshake_error():
    def missing():
        raise ImportError("No module named 'zeppelin'")

    replies = _serve_lines(
        ['{"type": "handshake", "protocol_version": 1}'] * 2,
        factory=missing, name="zeppelin")
    assert len(replies) == 2  # loop survives and answers again
    for reply in replies:
        assert '"framework_unavailable"' in reply
        assert "zeppelin" in reply


def test_serve_train_before_handshake_is_refused():
    replies = _serve_lines([
        '{"type": "train", "budget_seconds": 1, "scoring": "mape",'
        ' "target": "price", "csv": "price\\n1\\n"}',
    ])
    assert '"no_handshake"' in replies[0]

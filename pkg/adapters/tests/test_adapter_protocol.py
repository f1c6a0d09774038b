"""Black-box wire tests: a real adapter subprocess, frames over pipes.

Nothing here imports the benchmarking harness; the contract under test
is the protocol itself, as any peer would speak it.
"""

import importlib.util
import json
import subprocess
import sys

import pytest

HANDSHAKE = {"type": "handshake", "protocol_version": 1}
TRAIN = {"type": "train", "budget_seconds": 5.0, "scoring": "mape",
         "target": "price",
         "csv": "model,working_hours,price\na,100,10\nb,200,30\n"}
PREDICT = {"type": "predict", "csv": "model,working_hours\nc,50\nd,60\n"}


class AdapterProcess:
    def __init__(self, *argv, interpreter_prelude=None):
        if interpreter_prelude is None:
            cmd = [sys.executable, "-m", "automl_adapters", *argv]
        else:
            cmd = [sys.executable, "-c", interpreter_prelude, *argv]
        self.proc = subprocess.Popen(
            cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL, text=True)

    def send(self, text: str) -> None:
        self.proc.stdin.write(text + "\n")
        self.proc.stdin.flush()

    def read(self) -> dict:
        line = self.proc.stdout.readline()
        assert line, "adapter closed its output stream"
        return json.loads(line)

    def ask(self, frame: dict) -> dict:
        self.send(json.dumps(frame))
        return self.read()

    def close(self):
        self.proc.stdin.close()
        self.proc.wait(timeout=10)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@pytest.fixture()
def stub():
    with AdapterProcess("--stub") as proc:
        yield proc


def test_handshake_identity(stub):
    reply = stub.ask(HANDSHAKE)
    assert reply == {"type": "handshake", "protocol_version": 1,
                     "framework_name": "stub", "expertise_level": 2}


def test_train_then_predict(stub):
    stub.ask(HANDSHAKE)
    ack = stub.ask(TRAIN)
    assert ack["type"] == "train_ack"
    assert ack["train_seconds"] >= 0.0
    reply = stub.ask(PREDICT)
    assert reply == {"type": "predictions", "values": [20.0, 20.0]}


def test_zero_row_predict_is_empty_not_an_error(stub):
    stub.ask(HANDSHAKE)
    stub.ask(TRAIN)
    reply = stub.ask({"type": "predict", "csv": "model,working_hours\n"})
    assert reply == {"type": "predictions", "values": []}


def test_pipelined_requests_get_one_reply_each(stub):
    for frame in (HANDSHAKE, TRAIN, PREDICT):
        stub.send(json.dumps(frame))
    kinds = [stub.read()["type"] for _ in range(3)]
    assert kinds == ["handshake", "train_ack", "predictions"]
    # nothing extra is buffered: the next request is answered first
    assert stub.ask(PREDICT)["values"] == [20.0, 20.0]


def test_malformed_line_rejected_and_loop_survives(stub):
    stub.ask(HANDSHAKE)
    stub.send("this is not json")
    assert stub.read()["code"] == "bad_request"
    stub.send('["also", "not", "a", "frame"]')
    assert stub.read()["code"] == "bad_request"
    assert stub.ask(TRAIN)["type"] == "train_ack"


def test_unknown_request_type_rejected(stub):
    stub.ask(HANDSHAKE)
    reply = stub.ask({"type": "shutdown"})
    assert reply["type"] == "error"
    assert reply["code"] == "bad_request"


def test_predict_before_train_rejected_then_recovers(stub):
    stub.ask(HANDSHAKE)
    assert stub.ask(PREDICT)["code"] == "not_trained"
    stub.ask(TRAIN)
    assert stub.ask(PREDICT)["values"] == [20.0, 20.0]


def test_second_train_rejected_first_model_kept(stub):
    stub.ask(HANDSHAKE)
    stub.ask(TRAIN)
    retrain = dict(TRAIN, csv="model,price\nz,1000\n")
    assert stub.ask(retrain)["code"] == "already_trained"
    assert stub.ask(PREDICT)["values"] == [20.0, 20.0]


def test_absent_framework_reported_in_handshake():
    absent = next((f for f in ("autogluon", "autosklearn", "flaml")
                   if importlib.util.find_spec(f) is None), None)
    if absent is None:
        pytest.skip("all three frameworks are installed here")
    with AdapterProcess("--framework", absent) as proc:
        reply = proc.ask(HANDSHAKE)
        assert reply["type"] == "error"
        assert reply["code"] == "framework_unavailable"
        # the process must survive to answer again
        assert proc.ask(HANDSHAKE)["code"] == "framework_unavailable"


# A framework that logs to stdout must not be able to tear frames apart;
# the entry point repoints fd 1 before serving. Patch the stub to be as
# rude as a real framework and check every reply still parses.
NOISY = """
import sys
import automl_adapters.engines as engines

_orig = engines.StubEngine.train
def train(self, *a, **kw):
    print("fitting fold 1/5 ...")
    sys.stdout.write("progress: 100%\\n")
    sys.stdout.flush()
    return _orig(self, *a, **kw)
engines.StubEngine.train = train

from automl_adapters.cli import main
sys.exit(main(sys.argv[1:]))
"""


def test_engine_stdout_noise_cannot_corrupt_the_stream():
    with AdapterProcess("--stub", interpreter_prelude=NOISY) as proc:
        proc.ask(HANDSHAKE)
        ack = proc.ask(TRAIN)  # json.loads inside read() is the assertion
        assert ack["type"] == "train_ack"
        assert proc.ask(PREDICT)["values"] == [20.0, 20.0]


BROKEN = """
import sys
import automl_adapters.engines as engines

def train(self, *a, **kw):
    raise ValueError("framework exploded mid-fit")
engines.StubEngine.train = train

from automl_adapters.cli import main
sys.exit(main(sys.argv[1:]))
"""


def test_engine_crash_becomes_error_frame_and_loop_survives():
    with AdapterProcess("--stub", interpreter_prelude=BROKEN) as proc:
        proc.ask(HANDSHAKE)
        reply = proc.ask(TRAIN)
        assert reply["type"] == "error"
        assert reply["code"] == "internal_error"
        assert "framework exploded" in reply["message"]
        # still not trained, still alive
        assert proc.ask(PREDICT)["code"] == "not_trained"

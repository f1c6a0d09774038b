"""The request loop: JSON-lines frames in, exactly one reply frame per
request line out, never dying on an engine failure.

The loop is transport-agnostic (plain text streams) so tests can drive
it in process; the CLI wires it to the real stdin/stdout after fencing
the protocol stream off from anything the wrapped framework prints.
"""

import json
import time

from . import EXPERTISE_LEVEL, PROTOCOL_VERSION


def serve(engine_factory, engine_name: str, in_stream, out_stream) -> None:
    """Answer frames until the input stream closes.

    engine_factory is called once, at the first handshake, so that a
    missing framework surfaces as a handshake error frame instead of an
    import crash before the peer ever hears from us.
    """
    engine = None
    trained = False

    def reply(frame: dict) -> None:
        out_stream.write(json.dumps(frame) + "\n")
        out_stream.flush()

    def error(code: str, message: str) -> None:
        reply({"type": "error", "code": code, "message": message})

    for line in in_stream:
        line = line.strip()
        if not line:
            continue
        try:
            frame = json.loads(line)
            kind = frame["type"]
        except (json.JSONDecodeError, KeyError, TypeError):
            error("bad_request", "request line is not a typed JSON object")
            continue

        try:
            if kind == "handshake":
                if engine is None:
                    try:
                        engine = engine_factory()
                    except ImportError as exc:
                        error("framework_unavailable",
                              f"{engine_name} is not importable: {exc}")
                        continue
                reply({"type": "handshake",
                       "protocol_version": PROTOCOL_VERSION,
                       "framework_name": engine_name,
                       "expertise_level": EXPERTISE_LEVEL})
            elif kind == "train":
                if engine is None:
                    error("no_handshake", "train before handshake")
                    continue
                if trained:
                    # one predictor per process lifetime; start a fresh
                    # process for a fresh model
                    error("already_trained",
                          "this process already trained its predictor")
                    continue
                started = time.perf_counter()
                engine.train(frame["csv"], frame["target"],
                             float(frame["budget_seconds"]),
                             str(frame.get("scoring", "mape")))
                trained = True
                # measured wall seconds, deliberately unclamped: if the
                # framework blew through its budget the peer should see it
                reply({"type": "train_ack",
                       "train_seconds": time.perf_counter() - started})
            elif kind == "predict":
                if not trained:
                    error("not_trained", "predict before train")
                    continue
                values = engine.predict(frame["csv"])
                reply({"type": "predictions",
                       "values": [float(v) for v in values]})
            else:
                error("bad_request", f"unknown request type {kind!r}")
        except Exception as exc:  # noqa: BLE001 - the loop must outlive the engine
            error("internal_error", f"{type(exc).__name__}: {exc}")

"""Command-line entry point: pick an engine, fence off the protocol
stream, serve until stdin closes."""

import argparse
import os
import sys

from .engines import ENGINES, FRAMEWORKS
from .server import serve


def _claim_protocol_stream():
    """Reserve the real stdout for protocol frames.

    The wrapped frameworks print progress to stdout, which would tear
    JSON frames apart. Duplicate the original stdout for our replies,
    then point file descriptor 1 at stderr so every print -- ours,
    the framework's, or a child process's -- lands out of band.
    """
    protocol = os.fdopen(os.dup(sys.stdout.fileno()), "w", encoding="utf-8")
    sys.stdout.flush()
    os.dup2(sys.stderr.fileno(), sys.stdout.fileno())
    return protocol


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="automl-adapter",
        description="Serve an AutoML framework over the JSON-lines "
                    "adapter protocol (version 1).")
    which = parser.add_mutually_exclusive_group(required=True)
    which.add_argument("--framework", choices=FRAMEWORKS,
                       help="wrap this installed framework")
    which.add_argument("--stub", action="store_true",
                       help="mean-predictor engine, no dependencies")
    parser.add_argument("--metric", default=None,
                        help="override the framework-native metric chosen "
                             "for the requested scoring")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = "stub" if args.stub else args.framework
    engine_cls = ENGINES[name]

    protocol = _claim_protocol_stream()
    serve(lambda: engine_cls(metric_override=args.metric), name,
          sys.stdin, protocol)
    return 0


if __name__ == "__main__":
    sys.exit(main())

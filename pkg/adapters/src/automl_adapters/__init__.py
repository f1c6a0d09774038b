"""automl_adapters: run AutoGluon, auto-sklearn, or FLAML behind the
mesbench external-adapter protocol (JSON lines over stdin/stdout), plus
a dependency-free stub engine so the wire protocol is testable without
any framework installed."""

__version__ = "0.1.0"

PROTOCOL_VERSION = 1

# Operating any of the wrapped systems means preparing a dataset and
# reading the reports the tool produces; the scale the harness uses
# calls that level 2.
EXPERTISE_LEVEL = 2

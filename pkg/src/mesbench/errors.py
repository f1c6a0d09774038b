"""Exception types shared across the package.

Recoverable per-row or per-trial conditions are values (see dataset.RowParseError,
search.TrialRecord); exceptions here mean the caller asked for something impossible.
"""


class MesbenchError(Exception):
    pass


class MissingColumn(MesbenchError):
    """A required CSV header column is absent."""


class UnknownFeature(MesbenchError):
    """A feature name does not exist in the dataset or table."""


class InsufficientCompleteRows(MesbenchError):
    """Too few complete rows to fit the imputation regression."""


class TooFewRows(MesbenchError):
    """Operation needs more rows than the dataset has."""


class InvalidConfig(MesbenchError):
    """A configuration value is outside its documented domain."""


class EmptyTable(MesbenchError):
    """A feature table with zero rows or zero columns where data is required."""


class SchemaMismatch(MesbenchError):
    """Row width or column layout differs from what was fitted."""


class InvalidSpec(MesbenchError):
    """Unknown algorithm or hyperparameter outside its search domain."""


class InvalidTarget(MesbenchError):
    """Target vector violates an algorithm precondition (e.g. non-positive values)."""


class FoldTooSmall(MesbenchError):
    """More cross-validation folds than rows."""


class AllTrialsFailed(MesbenchError):
    """Every search trial errored; no best candidate exists."""


class ZeroTrueValue(MesbenchError):
    """MAPE is undefined when a true value is zero."""


class LengthMismatch(MesbenchError):
    """Paired vectors differ in length."""


class TooFewRepetitions(MesbenchError):
    """Spread statistics need at least two repetitions."""


class InvalidAlpha(MesbenchError):
    """Significance level must lie strictly between 0 and 1."""


class ZeroWeightSum(MesbenchError):
    """Criterion weights sum to zero; the weighted mean is undefined."""


class HandshakeMismatch(MesbenchError):
    """Adapter answered the handshake with an incompatible protocol version."""


class AdapterTimeout(MesbenchError):
    """Adapter failed to reply within its deadline."""


class ProtocolViolation(MesbenchError):
    """Adapter sent a frame that does not parse or fit the protocol state."""

    def __init__(self, message: str, line: str | None = None):
        super().__init__(message)
        self.line = line


class AdapterFailure(MesbenchError):
    """Adapter reported a structured error frame (well-formed, but a failure)."""


class AllMethodsFailed(MesbenchError):
    """Every (method, subset) cell of a benchmark run failed."""

"""Exception types shared across the toolkit.

Two broad families matter for exit-code mapping in the CLI: defects in
user-supplied data (``DataError``, exit code 1) and failures of the
environment -- I/O or the scoring backend (``IOFailure`` / ``ProviderError``,
exit code 2).
"""

from __future__ import annotations


class DataError(Exception):
    """A defect in user-supplied data or configuration."""


class SchemaError(DataError):
    """A record does not match the expected file schema."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class InvariantError(DataError):
    """A structurally valid record violates a domain invariant."""

    def __init__(self, message: str, sample_id: str | None = None):
        if sample_id is not None:
            message = f"sample {sample_id!r}: {message}"
        super().__init__(message)
        self.sample_id = sample_id


class TemplateError(DataError):
    """A prompt template is missing a required slot kind."""


class EnvelopeError(DataError):
    """A structured answer envelope carries an unknown category."""


class MissingUrl(DataError):
    """An in-range image index has no entry in the URL map."""


class MissingContext(DataError):
    """A correct image index has no extracted context on one side."""


class MissingAsset(DataError):
    """An in-range image index has no asset in the sample."""


class DimensionMismatch(DataError):
    """Vectors of different dimensions were combined."""


class ZeroVector(DataError):
    """Cosine similarity was requested for an all-zero vector."""


class DegenerateInput(DataError):
    """Correlation input is constant, too short, or misaligned."""


class EmptyCorpus(DataError):
    """Aggregation was requested over zero sample reports."""


class IOFailure(Exception):
    """A file could not be read or written."""


class ProviderError(Exception):
    """Base class for scoring-backend failures."""


class ProviderUnavailable(ProviderError):
    """The scoring backend could not be reached."""


class ProviderContract(ProviderError):
    """The scoring backend returned a malformed or contract-violating response."""

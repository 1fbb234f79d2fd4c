"""Exception hierarchy.

Every error carries a ``category`` string; the CLI maps categories onto exit
codes, so library callers and scripts see the same classification.
"""

from __future__ import annotations


class ProsodyScoreError(Exception):
    category = "error"


class ConfigurationError(ProsodyScoreError, ValueError):
    category = "usage"


class InputMissingError(ProsodyScoreError, FileNotFoundError):
    category = "input-missing"


class ValidationError(ProsodyScoreError, ValueError):
    category = "validation"


class WavFormatError(ValidationError):
    """Malformed RIFF/WAVE container."""


class UnsupportedFormatError(WavFormatError):
    """Well-formed WAV that is not 16-bit mono PCM."""


class AsrSchemaError(ValidationError):
    def __init__(self, field: str, message: str | None = None):
        self.field = field
        super().__init__(message or f"missing or invalid field: {field}")


class EmptyReferenceError(ValidationError):
    pass


class TokenError(ValidationError):
    pass


class EmptyUtteranceError(ValidationError):
    pass


class DegenerateTimingError(ValidationError):
    pass


class EmptySetError(ValidationError):
    category = "empty-set"


class ProfileMismatchError(ValidationError):
    category = "profile-mismatch"


class InsufficientDataError(ValidationError):
    category = "insufficient-data"


class DegenerateVarianceError(ValidationError):
    pass


class SchemaMismatchError(ProsodyScoreError):
    category = "schema-mismatch"

"""Error hierarchy for manifold-words.

Every error derives from :class:`MidLevelError` and from the builtin it
specializes, so callers that only know about ``ValueError`` or
``ArithmeticError`` keep working. The ``exit_code`` attribute is what the
command-line interface returns when the error escapes a stage.
"""

from typing import Optional


class MidLevelError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.stage = stage


class ConfigError(MidLevelError, ValueError):
    """Invalid configuration or hyperparameters."""

    exit_code = 2


class DataError(MidLevelError, ValueError):
    """Invalid input data or artifact files."""

    exit_code = 3


class InvalidInputError(DataError):
    """Non-finite or otherwise malformed values."""


class DimensionMismatchError(DataError):
    """Operands of incompatible shape."""


class InsufficientDataError(DataError):
    """Too few samples, features, words or class members."""


class DegenerateInputError(DataError):
    """Data without any variance."""


class KindMismatchError(DataError):
    """Mixed word kinds, or words that do not match a codebook."""


class FormatError(DataError):
    """Bad magic bytes, unsupported version or truncated artifact."""


class NumericalError(MidLevelError, ArithmeticError):
    """A numerical procedure could not produce a valid result."""

    exit_code = 4


class NotPositiveDefiniteError(NumericalError):
    """A matrix that must be SPD is not."""


class CutLocusError(NumericalError):
    """Grassmann log map requested across the cut locus."""


class RankDeficientError(NumericalError):
    """Centered data does not have the rank a subspace model needs."""


class ConvergenceError(NumericalError):
    """An iterative fit violated its monotonicity guarantee."""

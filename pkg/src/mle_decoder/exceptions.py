"""
Exceptions raised by the MLE decoder package.
"""

from typing import Any, Optional


class DecoderError(Exception):
    """Base class for all errors raised by this package."""


class DemParseError(DecoderError, ValueError):
    """A DEM text could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        self.detail = message
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class DemSyntaxError(DemParseError):
    """Malformed DEM text."""


class ProbabilityOutOfRange(DemParseError):
    """An error instruction's probability is not in the open interval (0, 1)."""


class MalformedTarget(DemParseError):
    """A target token is not D<k>, L<k> or the separator ^."""


class UnsupportedInstruction(DemParseError):
    """An instruction name outside the supported grammar."""


class ModelTooLarge(DemParseError):
    """A DEM unrolls to more instructions, detectors or observables than supported."""


class DomainError(DecoderError, ValueError):
    """A numeric argument lies outside the domain of a formula."""


class UnsupportedProbability(DecoderError, ValueError):
    """An error channel has probability above 1/2."""


class InvalidPermutation(DecoderError, ValueError):
    """A detector relabeling is not a bijection on the detector indices."""


class InvalidSyndrome(DecoderError, ValueError):
    """A syndrome references detectors the model does not have."""


class InvalidParams(DecoderError, ValueError):
    """Instance generator parameters are out of range."""


class MissingCoordinates(DecoderError, ValueError):
    """Detectors lack coordinates of a common dimension."""


class TooLarge(DecoderError, ValueError):
    """The model is too large for exhaustive enumeration."""


class UnsatisfiableSyndrome(DecoderError):
    """A syndrome detector has no incident error channel, so it can never be cleared."""

    def __init__(self, detector: int):
        self.detector = detector
        super().__init__(f"Detector D{detector} is activated but no error channel flips it")


class Unsatisfiable(DecoderError):
    """No subset of error channels reproduces the syndrome."""


class ExperimentAborted(DecoderError):
    """A decode error stopped a sampling experiment; ``stats`` holds the partial result."""

    def __init__(self, message: str, stats: Any):
        self.stats = stats
        super().__init__(message)

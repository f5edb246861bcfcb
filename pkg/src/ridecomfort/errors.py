"""Exception types raised across the pipeline.

Every error derives from :class:`RideComfortError` (itself a ``ValueError``)
so callers can catch the whole family at once, while the CLI maps the two
broad groups (input parsing vs. pipeline processing) to distinct exit codes.
"""

from __future__ import annotations


class RideComfortError(ValueError):
    """Base class for all package errors."""


class InvalidArgument(RideComfortError):
    pass


class InvalidRotation(RideComfortError):
    pass


class DegenerateInput(RideComfortError):
    pass


class EmptySeries(RideComfortError):
    pass


class NonMonotoneTimestamps(RideComfortError):
    pass


class InsufficientSamples(RideComfortError):
    pass


class WrongFrame(RideComfortError):
    pass


class NotTurning(RideComfortError):
    pass


class NotQuasiStatic(RideComfortError):
    pass


class DegenerateSpectrum(RideComfortError):
    pass


class DegenerateHorizontal(RideComfortError):
    pass


class LengthMismatch(RideComfortError):
    pass


class InsufficientCoverage(RideComfortError):
    pass


class InvalidScenario(RideComfortError):
    pass


class InvalidDuration(RideComfortError):
    pass


class ConfigError(RideComfortError):
    pass


class StageError(RideComfortError):
    """A pipeline failure labelled with the stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


class ParseError(RideComfortError):
    """Input CSV could not be read. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class MissingHeader(ParseError):
    pass


class MalformedRow(ParseError):
    pass


class NonMonotoneTimestamp(ParseError):
    pass


class EmptyInput(ParseError):
    pass

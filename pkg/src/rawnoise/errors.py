"""Exception hierarchy for the rawnoise toolkit.

Every error raised by the library derives from RawNoiseError so callers can
catch toolkit failures without masking programming errors.  The CLI maps the
subclasses onto its exit codes (data/format problems vs calibration
failures).
"""

from __future__ import annotations


class RawNoiseError(Exception):
    """Base class for all toolkit errors."""


class DomainError(RawNoiseError, ValueError):
    """A parameter lies outside its mathematical domain."""


class InsufficientDataError(RawNoiseError, ValueError):
    """Too few samples, frames, or levels for the requested estimate."""


class DegenerateDataError(RawNoiseError, ValueError):
    """Input data carries no usable signal (e.g. zero variance)."""


class ConfigurationError(RawNoiseError, ValueError):
    """A model or configuration object violates its invariants."""


class CalibrationError(RawNoiseError, RuntimeError):
    """A calibration produced a physically impossible result."""


class FormatError(RawNoiseError, ValueError):
    """A file does not conform to the on-disk format contract."""

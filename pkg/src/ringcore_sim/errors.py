"""Exception hierarchy for ringcore-sim."""

from typing import Any, Optional


class RingcoreSimError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(RingcoreSimError, ValueError):
    """Invalid configuration, profile or generator state."""


class FramingError(RingcoreSimError, ValueError):
    """Bit stream does not split into whole symbols."""


class ShapeError(RingcoreSimError, ValueError):
    """Signals with mismatched length, rate or incomplete mode groups."""


class EstimationError(RingcoreSimError, RuntimeError):
    """A blind estimator could not produce a usable estimate."""


class RangeError(EstimationError):
    """Requested or estimated offset outside the unambiguous range."""


class AdaptationError(RingcoreSimError, RuntimeError):
    """Adaptive equalizer diverged."""

    def __init__(self, message: str, diagnostics: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoLockError(RingcoreSimError, RuntimeError):
    """Received bits do not correlate with any transmit reference."""

    def __init__(self, message: str, peak_sigma: float = 0.0):
        super().__init__(message)
        self.peak_sigma = peak_sigma

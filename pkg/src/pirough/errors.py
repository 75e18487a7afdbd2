"""Exception hierarchy. Every error is a ``ValueError`` so callers can catch broadly."""

from __future__ import annotations


class PiRoughError(ValueError):
    pass


class InvalidWordError(PiRoughError):
    pass


class UnsupportedGradingError(PiRoughError):
    """Raised when an operation needs the uniform ``p_i = p / k_i`` grading."""


class CapacityError(PiRoughError):
    pass


class IncompatibleSeriesError(PiRoughError):
    pass


class NonUnitalError(PiRoughError):
    pass


class DomainError(PiRoughError):
    pass


class IntervalError(PiRoughError):
    pass


class GridError(PiRoughError):
    pass


class CapError(PiRoughError):
    pass


class CapabilityError(PiRoughError):
    pass


class CertificationError(PiRoughError):
    pass


class NormalizationRequiredError(PiRoughError):
    pass


class InadmissibleError(PiRoughError):
    def __init__(self, message: str, failures: list | None = None):
        super().__init__(message)
        self.failures = failures or []


class CellTooLargeError(PiRoughError):
    def __init__(self, message: str, cell: tuple[float, float], omega: float):
        super().__init__(message)
        self.cell = cell
        self.omega = omega


class DomainExitError(PiRoughError):
    def __init__(self, message: str, exit_time: float):
        super().__init__(message)
        self.exit_time = exit_time


class ConfigError(PiRoughError):
    pass

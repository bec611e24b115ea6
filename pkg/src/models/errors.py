"""
Exception hierarchy shared by the simulator modules and the command line.
"""
from typing import Any, Optional


class ArisError(Exception):
    """
    Base class for every error raised by the simulator.
    """


class ParameterError(ArisError):
    """
    Raised when inputs violate a documented precondition (ordering, positivity,
    missing mechanical branch, mismatched waveform lengths, ...).
    """


class DomainError(ArisError):
    """
    Raised when a value falls outside the domain of a physical formula
    (non-positive frequency, probe on top of a reflector, delays past the
    synthesis window).
    """


class NumericError(ArisError):
    """
    Raised for numerical singularities such as a vanishing parallel sum or
    a load equal to -z0.
    """


class FitError(ArisError):
    """
    Raised when the least-squares fit does not converge.

    The best parameters seen so far and their residual are kept so callers can
    still report them.
    """

    def __init__(self, message: str, best: Optional[Any] = None, residual: float = float('nan')):
        super().__init__(message)
        self.best = best
        self.residual = residual


class ExtractionError(ArisError):
    """
    Raised when the open-circuit reference is too weak to normalize against.
    """


class MetricError(ArisError):
    """
    Raised when lobe metrics are requested for an all-zero beam pattern.
    """


class InputFileError(ArisError):
    """
    Raised for malformed data files. Carries the path and 1-based line number.
    """

    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class ConfigError(ArisError):
    """
    Raised for unknown configuration keys or missing referenced files.
    """

"""
Custom exceptions for the ruelle package.

Every error carries a stable ``error_code`` (used in machine-readable reports)
and an ``exit_code`` (used by the CLI).
"""

from typing import Optional, Dict, Any


class RuelleError(Exception):
    """Base exception for the ruelle package."""

    exit_code: int = 1

    def __init__(self, message: str, error_code: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)


# ---------------------------------------------------------------------------
# Generator validation (exit code 2)
# ---------------------------------------------------------------------------

class GeneratorValidationError(RuelleError):
    """Base class for rejected rate matrices."""

    exit_code = 2

    def __init__(self, message: str = "Invalid generator", error_code: str = "INVALID_GENERATOR", **kwargs):
        super().__init__(message, error_code=error_code, **kwargs)


class NonSquareError(GeneratorValidationError):
    """Raised when the rate matrix is not an n×n matrix with n ≥ 2."""

    def __init__(self, message: str = "Generator must be a square matrix with at least 2 states", **kwargs):
        super().__init__(message, error_code="NON_SQUARE", **kwargs)


class ZeroDiagonalError(GeneratorValidationError):
    """Raised when a diagonal entry is not strictly negative."""

    def __init__(self, message: str = "Diagonal entries must be strictly negative", **kwargs):
        super().__init__(message, error_code="ZERO_DIAGONAL", **kwargs)


class NegativeOffDiagonalError(GeneratorValidationError):
    """Raised when an off-diagonal rate is negative."""

    def __init__(self, message: str = "Off-diagonal entries must be nonnegative", **kwargs):
        super().__init__(message, error_code="NEGATIVE_OFF_DIAGONAL", **kwargs)


class ColumnSumDefectError(GeneratorValidationError):
    """Raised when a column sum is farther from zero than the repair threshold."""

    def __init__(self, message: str = "Generator columns must sum to zero", **kwargs):
        super().__init__(message, error_code="COLUMN_SUM_DEFECT", **kwargs)


class ReducibleError(GeneratorValidationError):
    """Raised when the rate graph is not strongly connected."""

    def __init__(self, message: str = "Generator must be irreducible", **kwargs):
        super().__init__(message, error_code="REDUCIBLE", **kwargs)


# ---------------------------------------------------------------------------
# Argument errors (exit code 2)
# ---------------------------------------------------------------------------

class NegativeTimeError(RuelleError):
    """Raised when a time argument is negative."""

    exit_code = 2

    def __init__(self, time: float, **kwargs):
        message = f"Time must be nonnegative, got {time}"
        super().__init__(message, error_code="NEGATIVE_TIME", **kwargs)


class NonPositiveTimeError(RuelleError):
    """Raised when an operator time is not strictly positive."""

    exit_code = 2

    def __init__(self, time: float, **kwargs):
        message = f"Time must be strictly positive, got {time}"
        super().__init__(message, error_code="NON_POSITIVE_TIME", **kwargs)


class InvalidTimeError(RuelleError):
    """Raised when a time string cannot be represented at microsecond resolution."""

    exit_code = 2

    def __init__(self, value: Any, **kwargs):
        message = f"Invalid time value {value!r}: expected a nonnegative decimal with at most 6 fractional digits"
        super().__init__(message, error_code="INVALID_TIME", **kwargs)


class StateOutOfRangeError(RuelleError):
    """Raised when a cylinder constraint names a state outside 1..n."""

    exit_code = 2

    def __init__(self, state: int, n: int, **kwargs):
        message = f"State {state} is outside 1..{n}"
        super().__init__(message, error_code="STATE_OUT_OF_RANGE", **kwargs)


class InvalidCylinderError(RuelleError):
    """Raised when a constraint list is malformed (conflicting times, bad JSON shape)."""

    exit_code = 2

    def __init__(self, message: str = "Invalid cylinder", **kwargs):
        super().__init__(message, error_code="INVALID_CYLINDER", **kwargs)


class UndecidableFutureError(RuelleError):
    """Raised when the conditioning path does not pin a needed future coordinate."""

    exit_code = 2

    def __init__(self, time: Any, **kwargs):
        message = f"Conditioning constraints do not fix the path at time {time}"
        super().__init__(message, error_code="UNDECIDABLE_FUTURE", **kwargs)


class AnchorRequiredError(RuelleError):
    """Raised when LITERAL evaluation receives a spec without a time-0 constraint."""

    exit_code = 2

    def __init__(self, message: str = "Cylinder must constrain time 0 in LITERAL mode", **kwargs):
        super().__init__(message, error_code="ANCHOR_REQUIRED", **kwargs)


class AnchorMismatchError(RuelleError):
    """Raised when a bridge cylinder anchors a different start state."""

    exit_code = 2

    def __init__(self, anchor: int, start: int, **kwargs):
        message = f"Cylinder anchors X0={anchor} but the bridge starts at {start}"
        super().__init__(message, error_code="ANCHOR_MISMATCH", **kwargs)


class TimeBeyondHorizonError(RuelleError):
    """Raised when a time exceeds the simulated or bridged horizon."""

    exit_code = 2

    def __init__(self, time: float, horizon: float, **kwargs):
        message = f"Time {time} lies beyond horizon {horizon}"
        super().__init__(message, error_code="TIME_BEYOND_HORIZON", **kwargs)


class InsufficientPathsError(RuelleError):
    """Raised when a Monte Carlo estimate is requested with too few paths."""

    exit_code = 2

    def __init__(self, n_paths: int, minimum: int = 100, **kwargs):
        message = f"At least {minimum} paths are required, got {n_paths}"
        super().__init__(message, error_code="INSUFFICIENT_PATHS", **kwargs)


class ModelFileError(RuelleError):
    """Raised when a model file cannot be read or parsed."""

    exit_code = 2

    def __init__(self, message: str = "Model file could not be parsed", **kwargs):
        super().__init__(message, error_code="MODEL_FILE_ERROR", **kwargs)


class ConfigurationError(RuelleError):
    """Raised when configuration is invalid."""

    exit_code = 2

    def __init__(self, message: str = "Configuration error", **kwargs):
        super().__init__(message, error_code="CONFIGURATION_ERROR", **kwargs)


class InvalidArgumentError(RuelleError):
    """Raised when command parameters fail validation."""

    exit_code = 2

    def __init__(self, message: str = "Invalid command arguments", **kwargs):
        super().__init__(message, error_code="INVALID_ARGUMENT", **kwargs)


# ---------------------------------------------------------------------------
# Numerical failures (exit code 3)
# ---------------------------------------------------------------------------

class SolveFailureError(RuelleError):
    """Raised when the stationary system is singular beyond its rank-1 kernel."""

    exit_code = 3

    def __init__(self, message: str = "Stationary vector solve failed", **kwargs):
        super().__init__(message, error_code="SOLVE_FAILURE", **kwargs)


class DegenerateSpectrumError(RuelleError):
    """Raised when the top eigenvalue of L+V is not real and simple."""

    exit_code = 3

    def __init__(self, message: str = "Top eigenvalue is not real and simple", **kwargs):
        super().__init__(message, error_code="DEGENERATE_SPECTRUM", **kwargs)


class SpectralOverflowError(RuelleError):
    """Raised when a centered exponential still overflows."""

    exit_code = 3

    def __init__(self, message: str = "Matrix exponential overflowed", **kwargs):
        super().__init__(message, error_code="SPECTRAL_OVERFLOW", **kwargs)

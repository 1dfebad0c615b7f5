"""
Utils package initialization.
"""

from .exceptions import (
    RuelleError,
    GeneratorValidationError,
    NonSquareError,
    ZeroDiagonalError,
    NegativeOffDiagonalError,
    ColumnSumDefectError,
    ReducibleError,
    NegativeTimeError,
    NonPositiveTimeError,
    InvalidTimeError,
    StateOutOfRangeError,
    InvalidCylinderError,
    UndecidableFutureError,
    AnchorRequiredError,
    AnchorMismatchError,
    TimeBeyondHorizonError,
    InsufficientPathsError,
    ModelFileError,
    ConfigurationError,
    InvalidArgumentError,
    SolveFailureError,
    DegenerateSpectrumError,
    SpectralOverflowError,
)

from .formatters import ReportFormatter, ResponseFormatter

__all__ = [
    # Exceptions
    "RuelleError",
    "GeneratorValidationError",
    "NonSquareError",
    "ZeroDiagonalError",
    "NegativeOffDiagonalError",
    "ColumnSumDefectError",
    "ReducibleError",
    "NegativeTimeError",
    "NonPositiveTimeError",
    "InvalidTimeError",
    "StateOutOfRangeError",
    "InvalidCylinderError",
    "UndecidableFutureError",
    "AnchorRequiredError",
    "AnchorMismatchError",
    "TimeBeyondHorizonError",
    "InsufficientPathsError",
    "ModelFileError",
    "ConfigurationError",
    "InvalidArgumentError",
    "SolveFailureError",
    "DegenerateSpectrumError",
    "SpectralOverflowError",

    # Formatters
    "ReportFormatter",
    "ResponseFormatter",
]

"""
Models package initialization.
"""

from .requests import ModelFile, PerronOverride, SimulateRequest, VerifyRequest

from .responses import (
    ErrorResponse,
    GibbsResponse,
    IdentityRecord,
    MeasureResponse,
    PerronResponse,
    SemigroupResponse,
    SimulationResponse,
    TransferResponse,
    ValidationResponse,
    VerificationReport,
    VerificationSummary,
)

__all__ = [
    # Request models
    "ModelFile",
    "PerronOverride",
    "SimulateRequest",
    "VerifyRequest",

    # Response models
    "ErrorResponse",
    "GibbsResponse",
    "IdentityRecord",
    "MeasureResponse",
    "PerronResponse",
    "SemigroupResponse",
    "SimulationResponse",
    "TransferResponse",
    "ValidationResponse",
    "VerificationReport",
    "VerificationSummary",
]

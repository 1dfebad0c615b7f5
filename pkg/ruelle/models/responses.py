"""
Response models for CLI commands.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class ValidationResponse(BaseModel):
    """Result of validate."""

    success: bool = Field(..., description="Whether the generator is valid")
    n: int = Field(..., description="Number of states")
    model_digest: str = Field(..., description="SHA-256 of the canonical model JSON")
    p0: List[float] = Field(..., description="Stationary vector")
    warnings: List[str] = Field(default_factory=list, description="Non-fatal findings")


class SemigroupResponse(BaseModel):
    """e^{tL} for each requested time."""

    success: bool = Field(default=True)
    matrices: Dict[str, List[List[float]]] = Field(..., description="Time string -> e^{tL}")
    column_sum_defects: Dict[str, float] = Field(..., description="Time string -> max |column sum - 1|")


class PerronResponse(BaseModel):
    """Perron triple with its residuals."""

    success: bool = Field(default=True)
    lam: float = Field(..., serialization_alias="lambda", description="λ(V)")
    u: List[float] = Field(..., description="Left eigenvector")
    mu: List[float] = Field(..., description="Right eigenvector")
    fV: List[float] = Field(..., description="Density μ_V / p0")
    residuals: Dict[str, float] = Field(..., description="left, right, mu_sum, u_mu_sum")
    spectral_gap: Optional[float] = Field(default=None, description="λ minus the next real part")
    overridden: bool = Field(default=False, description="Triple taken from the model file")


class MeasureResponse(BaseModel):
    """P, ν_V and ρ_V on named cylinders."""

    success: bool = Field(default=True)
    values: Dict[str, Dict[str, Optional[float]]] = Field(
        ..., description="Cylinder name -> measure name -> value (null where undefined)"
    )


class TransferResponse(BaseModel):
    """A transfer operator applied to a cylinder function."""

    success: bool = Field(default=True)
    kind: str = Field(..., description="plain, weighted or normalized")
    t: str = Field(..., description="Operator time")
    function: List[Dict[str, Any]] = Field(..., description="Result as [{coeff, spec}]")
    integral_before: float = Field(..., description="Integral of the input")
    integral_after: float = Field(..., description="Integral of the output")


class GibbsResponse(BaseModel):
    """Consistency diagnostics for ν_V and ρ_V."""

    success: bool = Field(default=True)
    kolmogorov_defect: Dict[str, Dict[str, float]] = Field(..., description="Mode -> time -> defect")
    rho_total_mass: Dict[str, float] = Field(..., description="Mode -> Σ_i ρ_V{X_0 = i}")
    rho_shift_defect: Dict[str, Dict[str, float]] = Field(
        default_factory=dict, description="Mode -> cylinder@time -> shift defect"
    )


class IdentityRecord(BaseModel):
    """One evaluated identity."""

    name: str = Field(..., description="Identity name")
    parameters: Dict[str, Any] = Field(default_factory=dict, description="Time, mode and inputs")
    lhs: float = Field(..., description="Left-hand side")
    rhs: float = Field(..., description="Right-hand side")
    residual: float = Field(..., description="Distance between the sides")
    tolerance: float = Field(..., description="Largest accepted residual")
    passed: bool = Field(default=False, serialization_alias="pass", description="residual ≤ tolerance")
    informational: bool = Field(default=False, description="Reported but not required to pass")

    @model_validator(mode="after")
    def set_passed(self):
        self.passed = bool(self.residual <= self.tolerance)
        return self


class VerificationSummary(BaseModel):
    total: int = 0
    passed: int = 0
    failed: int = 0
    informational: int = 0


class VerificationReport(BaseModel):
    """All identity records for a model."""

    model_digest: str = Field(..., description="SHA-256 of the canonical model JSON")
    records: List[IdentityRecord] = Field(default_factory=list)
    summary: VerificationSummary = Field(default_factory=VerificationSummary)
    kolmogorov_defect: Dict[str, Dict[str, float]] = Field(default_factory=dict, description="Mode -> time -> defect")

    @model_validator(mode="after")
    def count_records(self):
        required = [r for r in self.records if not r.informational]
        passed = sum(r.passed for r in required)
        self.summary = VerificationSummary(
            total=len(required),
            passed=passed,
            failed=len(required) - passed,
            informational=len(self.records) - len(required),
        )
        return self

    @property
    def success(self) -> bool:
        return self.summary.failed == 0


class SimulationResponse(BaseModel):
    """Monte Carlo estimate and its exact counterpart."""

    success: bool = Field(default=True)
    value: float = Field(..., description="Sample mean")
    std_error: float = Field(..., description="Standard error of the mean")
    n_paths: int = Field(..., description="Number of paths")
    target: Dict[str, Any] = Field(..., description="i0, j0, t")
    oracle_value: float = Field(..., description="e^{t(L+V)}_{j0,i0}")
    z_score: Optional[float] = Field(default=None, description="(value - oracle) / std_error")


class ErrorResponse(BaseModel):
    """Machine-readable failure."""

    success: bool = Field(default=False)
    error: str = Field(..., description="Message")
    error_code: str = Field(..., description="Stable error code")
    details: Dict[str, Any] = Field(default_factory=dict)
    error_type: Optional[str] = Field(default=None)

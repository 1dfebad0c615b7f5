"""
Input models: the model file and command parameters.
"""

from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

TimeValue = Union[str, int, float]


class PerronOverride(BaseModel):
    """Perron data supplied by the model file instead of being computed."""

    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(..., alias="lambda", description="Top eigenvalue λ(V)")
    u: List[float] = Field(..., description="Left eigenvector u_V")
    mu: List[float] = Field(..., description="Right eigenvector μ_V")


class ModelFile(BaseModel):
    """A chain, a potential and the cylinders and times to study."""

    convention: Literal["column-generator"] = Field(
        ..., description="Must be 'column-generator': entry (i, j) of L is the rate from j to i"
    )
    n: int = Field(..., ge=2, description="Number of states")
    L: List[List[float]] = Field(..., description="Generator, row-major, column convention")
    V: Optional[List[float]] = Field(default=None, description="Potential V_i on {X_0 = i}; zeros if omitted")
    cylinders: Dict[str, List[List[TimeValue]]] = Field(
        default_factory=dict, description="Named cylinders as [[time, state], ...]"
    )
    times: List[TimeValue] = Field(default_factory=list, description="Operator times as decimal strings")
    perron_override: Optional[PerronOverride] = Field(default=None, description="Replaces the computed Perron triple")
    description: Optional[str] = Field(default=None, description="Free text")

    @field_validator("times")
    @classmethod
    def validate_times(cls, v):
        return [str(item).strip() for item in v]

    def canonical(self) -> Dict[str, Any]:
        """Parsed contents with aliases, used for the model digest."""
        return self.model_dump(by_alias=True, exclude_none=True)


class VerifyRequest(BaseModel):
    """Parameters of the verify command."""

    times: List[str] = Field(default_factory=lambda: ["0.5", "1", "2"], description="Operator times")
    n_random: int = Field(default=20, ge=0, le=10000, description="Random cylinder functions per time")
    seed: int = Field(default=0, description="Seed for the random cylinder functions")


class SimulateRequest(BaseModel):
    """Parameters of the simulate command."""

    i0: int = Field(..., ge=1, description="Start state")
    j0: int = Field(..., ge=1, description="End state")
    t: float = Field(..., gt=0, description="Horizon")
    n_paths: int = Field(default=100000, ge=1, description="Number of simulated paths")
    seed: int = Field(default=0, description="Run seed")
    workers: int = Field(default=1, ge=1, description="Worker processes")
    chunk_size: int = Field(default=4096, ge=1, description="Paths per worker task")

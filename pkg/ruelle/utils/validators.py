"""
Validation utilities for model files and command arguments.
"""

import logging
from typing import Any, Dict, List

import numpy as np

from ruelle.core.cylinder_algebra import CylinderSpec, TimePoint
from ruelle.models.requests import ModelFile
from ruelle.utils.exceptions import InvalidCylinderError, ModelFileError, NonSquareError, RuelleError

logger = logging.getLogger(__name__)


class ModelValidator:
    """Checks a parsed model file beyond its JSON schema."""

    @staticmethod
    def check_shape(model: ModelFile) -> None:
        """Raise NonSquareError unless L is n×n, ModelFileError unless V has n entries."""
        if len(model.L) != model.n or any(len(row) != model.n for row in model.L):
            raise NonSquareError(
                f"L must be {model.n}x{model.n}",
                details={"rows": len(model.L), "row_lengths": [len(row) for row in model.L]},
            )
        if model.V is not None and len(model.V) != model.n:
            raise ModelFileError(f"V must have {model.n} entries, got {len(model.V)}")
        override = model.perron_override
        if override is not None and (len(override.u) != model.n or len(override.mu) != model.n):
            raise ModelFileError(f"perron_override vectors must have {model.n} entries")

    @staticmethod
    def parse_cylinders(model: ModelFile) -> Dict[str, CylinderSpec]:
        cylinders = {}
        for name, pairs in model.cylinders.items():
            try:
                spec = CylinderSpec.from_json(pairs)
                spec.check_states(model.n)
            except RuelleError as e:
                raise InvalidCylinderError(f"Cylinder {name!r}: {e.message}", details={"cylinder": name})
            cylinders[name] = spec
        return cylinders

    @staticmethod
    def parse_times(values: List[Any]) -> List[TimePoint]:
        return [TimePoint.parse(value) for value in values]

    @staticmethod
    def validate_model_file(model: ModelFile) -> Dict[str, Any]:
        """
        Collect non-fatal findings about a model file.

        Args:
            model: parsed model file

        Returns:
            Validation result dictionary
        """
        validation = {"is_valid": True, "warnings": []}

        L = np.asarray(model.L, dtype=np.float64)
        rates = -np.diag(L)
        if rates.size and np.max(rates) / max(np.min(rates), 1e-300) > 1e6:
            validation["warnings"].append("Exit rates span more than six orders of magnitude")
        if model.V is not None and not np.any(model.V):
            validation["warnings"].append("V is identically zero")
        if model.perron_override is not None:
            validation["warnings"].append("Perron triple is taken from perron_override, not computed")
        if any(TimePoint.parse(time).micros == 0 for time in model.times):
            validation["warnings"].append("times contains 0; operators need t > 0")

        logger.debug(f"Model file validation: {validation}")
        return validation

"""
Model service: reads model files and builds the objects every command works on.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import ValidationError

from ruelle.config.settings import Settings
from ruelle.core.ctmc_core import Generator, StationaryVector, stationary_vector, validate_generator
from ruelle.core.cylinder_algebra import CylinderSpec, PathMeasureP, TimePoint
from ruelle.core.gibbs import GibbsEvaluator, GibbsMode
from ruelle.core.perron import PerronTriple, Potential, perron_triple
from ruelle.models.requests import ModelFile
from ruelle.utils.exceptions import ModelFileError
from ruelle.utils.validators import ModelValidator

logger = logging.getLogger(__name__)


def model_digest(model: ModelFile) -> str:
    """SHA-256 of the canonical JSON of a parsed model file."""
    canonical = json.dumps(model.canonical(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class LoadedModel:
    """A validated model file with its generator, potential and path measure."""

    model_file: ModelFile
    generator: Generator
    potential: Potential
    stationary: StationaryVector
    path_measure: PathMeasureP
    cylinders: Dict[str, CylinderSpec]
    times: List[TimePoint]
    digest: str
    warnings: List[str] = field(default_factory=list)
    _triple: Optional[PerronTriple] = None

    @property
    def n(self) -> int:
        return self.generator.n

    @property
    def overridden(self) -> bool:
        return self.model_file.perron_override is not None

    @property
    def triple(self) -> PerronTriple:
        """Perron triple, from perron_override when present."""
        if self._triple is None:
            override = self.model_file.perron_override
            if override is not None:
                logger.warning("Using the Perron triple from perron_override")
                self._triple = PerronTriple.from_values(override.lam, override.u, override.mu, self.stationary)
            else:
                self._triple = perron_triple(self.generator, self.potential, self.stationary)
        return self._triple

    def gibbs(self, mode: GibbsMode = GibbsMode.LITERAL) -> GibbsEvaluator:
        return GibbsEvaluator(self.path_measure, self.potential, self.triple, mode)


class ModelService:
    """Service for loading model files."""

    def __init__(self, settings: Settings):
        self.settings = settings

    @staticmethod
    def parse(data: Dict[str, Any]) -> ModelFile:
        try:
            return ModelFile.model_validate(data)
        except ValidationError as e:
            raise ModelFileError(
                "Model file does not match the schema",
                details={"errors": [{"loc": [str(x) for x in err["loc"]], "msg": err["msg"]} for err in e.errors()]},
            )

    def build(self, model: ModelFile) -> LoadedModel:
        """Validate every part of a parsed model file."""
        ModelValidator.check_shape(model)
        generator = validate_generator(model.L)
        try:
            potential = Potential.for_generator(model.V, generator)
        except ValueError as e:
            raise ModelFileError(str(e))
        stationary = stationary_vector(generator)
        validation = ModelValidator.validate_model_file(model)

        loaded = LoadedModel(
            model_file=model,
            generator=generator,
            potential=potential,
            stationary=stationary,
            path_measure=PathMeasureP(generator, stationary),
            cylinders=ModelValidator.parse_cylinders(model),
            times=ModelValidator.parse_times(model.times),
            digest=model_digest(model),
            warnings=validation["warnings"],
        )
        logger.info(f"Loaded model with n={loaded.n}, digest {loaded.digest[:12]}")
        return loaded

    def load(self, path: Union[str, Path]) -> LoadedModel:
        """
        Read and validate a model file.

        Args:
            path: JSON model file

        Returns:
            LoadedModel
        """
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ModelFileError(f"Model file not found: {path}")
        except (OSError, json.JSONDecodeError) as e:
            raise ModelFileError(f"Cannot read model file {path}: {e}")
        if not isinstance(data, dict):
            raise ModelFileError("Model file must contain a JSON object")
        logger.debug(f"Read model file {path}")
        return self.build(self.parse(data))

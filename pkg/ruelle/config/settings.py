"""
Configuration settings for the ruelle toolkit.
Centralized configuration management with environment variable support.
"""

import logging
import os
from typing import Optional

from dotenv import find_dotenv, load_dotenv

from ruelle.utils.exceptions import ConfigurationError

load_dotenv(find_dotenv())

logger = logging.getLogger(__name__)


def _env_flag(name: str, default: str) -> bool:
    return os.environ.get(name, default).lower() == "true"


def _env_number(name: str, default: str, kind=float):
    raw = os.environ.get(name, default)
    try:
        return kind(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be a number, got {raw!r}", details={"variable": name})


class Settings:
    """Application settings with environment variable support."""

    def __init__(self):
        # Application
        self.app_name: str = os.environ.get("APP_NAME", "ruelle")

        # Logging Configuration
        self.log_level: str = os.environ.get("LOG_LEVEL", "INFO")
        self.log_format: str = os.environ.get("LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        self.log_file: Optional[str] = os.environ.get("LOG_FILE")

        # MLflow Configuration
        self.enable_mlflow: bool = _env_flag("ENABLE_MLFLOW", "false")
        self.mlflow_tracking_uri: str = os.environ.get("MLFLOW_TRACKING_URI", "./mlruns")
        self.mlflow_experiment_name: str = os.environ.get("MLFLOW_EXPERIMENT_NAME", "ruelle-verification")

        # Monte Carlo
        self.mc_workers: int = _env_number("MC_WORKERS", "1", int)
        self.mc_chunk_size: int = _env_number("MC_CHUNK_SIZE", "4096", int)
        self.default_seed: int = _env_number("DEFAULT_SEED", "0", int)

        # Verification tolerances
        self.verify_tolerance: float = _env_number("VERIFY_TOLERANCE", "1e-9")
        self.dual_tolerance: float = _env_number("DUAL_TOLERANCE", "1e-10")

    def validate_required_settings(self) -> bool:
        """Check settings for values that will not work; warns, never raises."""
        problems = []
        if self.mc_workers < 1:
            problems.append("MC_WORKERS must be at least 1")
        if self.mc_chunk_size < 1:
            problems.append("MC_CHUNK_SIZE must be at least 1")
        if self.verify_tolerance <= 0 or self.dual_tolerance <= 0:
            problems.append("tolerances must be positive")
        if not isinstance(logging.getLevelName(self.log_level.upper()), int):
            problems.append(f"unknown LOG_LEVEL {self.log_level}")

        for problem in problems:
            logger.warning(f"Configuration: {problem}")
        return not problems


# Global settings instance
settings = Settings()

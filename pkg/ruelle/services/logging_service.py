"""
Logging service for application logging and optional MLflow tracking.
"""

import logging
import sys
from typing import Any, Dict, Optional

from ruelle.config.settings import Settings

logger = logging.getLogger(__name__)


class LoggingService:
    """Service for managing application logging and MLflow runs."""

    def __init__(self, settings: Settings):
        self.settings = settings
        self.mlflow_enabled = settings.enable_mlflow
        self.mlflow = None

        self._setup_logging()
        if self.mlflow_enabled:
            try:
                import mlflow
                self.mlflow = mlflow
                self._initialize_mlflow()
            except ImportError:
                logger.warning("MLflow not installed, tracking disabled")
                self.mlflow_enabled = False
        else:
            logger.debug("MLflow tracking disabled by configuration")

    def _setup_logging(self):
        """Send log records to stderr, plus LOG_FILE when set; stdout carries JSON only."""
        handlers = [logging.StreamHandler(sys.stderr)]
        if self.settings.log_file:
            handlers.append(logging.FileHandler(self.settings.log_file, mode="a"))
        level = logging.getLevelName(self.settings.log_level.upper())
        logging.basicConfig(
            level=level if isinstance(level, int) else logging.INFO,
            format=self.settings.log_format,
            handlers=handlers,
            force=True,
        )

    def _initialize_mlflow(self):
        """Initialize MLflow configuration."""
        try:
            if self.settings.mlflow_tracking_uri:
                self.mlflow.set_tracking_uri(self.settings.mlflow_tracking_uri)
            experiment_name = self.settings.mlflow_experiment_name
            experiment = self.mlflow.get_experiment_by_name(experiment_name)
            if experiment is None:
                logger.info(f"Creating new MLflow experiment: {experiment_name}")
                self.mlflow.create_experiment(experiment_name)
            elif experiment.lifecycle_stage == "deleted":
                logger.info(f"Restoring deleted MLflow experiment: {experiment_name}")
                self.mlflow.client.MlflowClient().restore_experiment(experiment.experiment_id)
            self.mlflow.set_experiment(experiment_name)
            logger.info("MLflow tracking initialized successfully")
        except Exception as e:
            logger.error(f"Failed to initialize MLflow: {e}")
            self.mlflow_enabled = False

    def _log_run(self, run_name: str, params: Dict[str, Any], metrics: Dict[str, float], artifact: Optional[str], artifact_name: str):
        if not self.mlflow_enabled:
            return
        try:
            with self.mlflow.start_run(run_name=run_name):
                self.mlflow.log_params(params)
                self.mlflow.log_metrics(metrics)
                if artifact is not None:
                    self.mlflow.log_text(artifact, artifact_name)
        except Exception as e:
            logger.error(f"Failed to log {run_name} to MLflow: {e}")

    def log_verification_report(self, report, report_json: str):
        """Log verification summary and residuals; the full report becomes a text artifact."""
        metrics = {
            "passed": float(report.summary.passed),
            "failed": float(report.summary.failed),
            "max_residual": max((r.residual for r in report.records if not r.informational), default=0.0),
        }
        for mode, defects in report.kolmogorov_defect.items():
            for time, value in defects.items():
                metrics[f"kolmogorov_defect_{mode}_{time}"] = value
        self._log_run(
            "verify",
            {"app": self.settings.app_name, "model_digest": report.model_digest},
            metrics,
            report_json,
            "verification_report.json",
        )

    def log_simulation(self, response, model_digest: str):
        """Log a Monte Carlo estimate against its exact value."""
        metrics = {"value": response.value, "std_error": response.std_error, "oracle_value": response.oracle_value}
        if response.z_score is not None:
            metrics["z_score"] = response.z_score
        params = {"app": self.settings.app_name, "model_digest": model_digest, "n_paths": response.n_paths}
        params.update({key: str(value) for key, value in response.target.items()})
        self._log_run("simulate", params, metrics, None, "")

"""
Services package initialization and dependency injection.
"""

import logging
from typing import Any, Dict, Optional

from ruelle.config.settings import Settings, settings
from ruelle.services.logging_service import LoggingService
from ruelle.services.model_service import LoadedModel, ModelService

logger = logging.getLogger(__name__)


class ServiceContainer:
    """Container for managing service dependencies."""

    def __init__(self, settings: Settings):
        self.settings = settings
        self._services: Dict[str, Any] = {}
        self._initialized = False

    def initialize(self):
        """Initialize all services."""
        if self._initialized:
            return
        self._services["logging"] = LoggingService(self.settings)
        self._services["model"] = ModelService(self.settings)
        self.settings.validate_required_settings()
        logger.debug("All services initialized")
        self._initialized = True

    def get_service(self, service_name: str) -> Any:
        """Get a specific service by name."""
        if not self._initialized:
            raise RuntimeError("Services not initialized. Call initialize() first.")
        if service_name not in self._services:
            raise ValueError(f"Service '{service_name}' not found")
        return self._services[service_name]

    @property
    def logging(self) -> LoggingService:
        return self.get_service("logging")

    @property
    def models(self) -> ModelService:
        return self.get_service("model")


# Global service container
_service_container: Optional[ServiceContainer] = None


def get_service_container() -> ServiceContainer:
    """Get the service container instance."""
    global _service_container
    if _service_container is None:
        _service_container = ServiceContainer(settings)
        _service_container.initialize()
    return _service_container


__all__ = [
    "LoadedModel",
    "LoggingService",
    "ModelService",
    "ServiceContainer",
    "get_service_container",
]

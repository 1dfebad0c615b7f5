"""
Formatting utilities for report serialization.
"""

import json
import logging
import math
from typing import Any, Dict

import numpy as np

from ruelle.models.responses import ErrorResponse

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 17


class ReportFormatter:
    """Serializes reports as JSON with every real written to 17 significant digits."""

    @staticmethod
    def _format_data(data: Any) -> Any:
        """
        Convert numpy values and pydantic models to plain JSON-compatible values.

        Args:
            data: Data to format

        Returns:
            JSON-compatible data
        """
        if hasattr(data, "model_dump"):
            return ReportFormatter._format_data(data.model_dump(by_alias=True))
        if isinstance(data, np.ndarray):
            return [ReportFormatter._format_data(item) for item in data.tolist()]
        if isinstance(data, (np.bool_, bool)):
            return bool(data)
        if isinstance(data, np.integer):
            return int(data)
        if isinstance(data, np.floating):
            return float(data)
        if isinstance(data, (list, tuple)):
            return [ReportFormatter._format_data(item) for item in data]
        if isinstance(data, dict):
            return {str(key): ReportFormatter._format_data(value) for key, value in data.items()}
        return data

    @staticmethod
    def _encode(data: Any, indent: int, level: int) -> str:
        pad = " " * (indent * (level + 1))
        close = " " * (indent * level)
        if isinstance(data, float):
            if math.isfinite(data):
                return f"{data:.{SIGNIFICANT_DIGITS}g}"
            return json.dumps(str(data))
        if isinstance(data, dict):
            if not data:
                return "{}"
            items = [f"{pad}{json.dumps(key)}: {ReportFormatter._encode(value, indent, level + 1)}" for key, value in data.items()]
            return "{\n" + ",\n".join(items) + "\n" + close + "}"
        if isinstance(data, list):
            if not data:
                return "[]"
            if all(not isinstance(item, (dict, list)) for item in data):
                return "[" + ", ".join(ReportFormatter._encode(item, indent, level + 1) for item in data) + "]"
            items = [pad + ReportFormatter._encode(item, indent, level + 1) for item in data]
            return "[\n" + ",\n".join(items) + "\n" + close + "]"
        return json.dumps(data)

    @staticmethod
    def dumps(data: Any, indent: int = 2) -> str:
        """JSON text for data; reals use 17 significant digits, NaN and infinities become strings."""
        return ReportFormatter._encode(ReportFormatter._format_data(data), indent, 0)


class ResponseFormatter:
    """Formatter for machine-readable command output."""

    @staticmethod
    def format_error_response(error: Exception, include_details: bool = True) -> Dict[str, Any]:
        """
        Format an error for the CLI.

        Args:
            error: Exception object
            include_details: Whether to include detailed error information

        Returns:
            Formatted error response
        """
        error_response = ErrorResponse(
            error=str(error),
            error_code=getattr(error, "error_code", None) or "INTERNAL_ERROR",
        )
        if not include_details:
            return error_response.model_dump(exclude={"details", "error_type"})
        error_response.details = ReportFormatter._format_data(getattr(error, "details", None) or {})
        error_response.error_type = type(error).__name__
        return error_response.model_dump()

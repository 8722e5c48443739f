"""Error hierarchy shared by every stage of the simulator."""
from typing import Any, Dict, Optional


class SimulatorError(Exception):
    """Base error carrying a machine-readable code and a human message."""

    code = "simulator_error"

    def __init__(self, message: str, *, details: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        return self.message


class ConfigError(SimulatorError):
    """Invalid experiment or world configuration."""

    code = "config_error"


class LogFormatError(SimulatorError):
    """A log line could not be parsed."""

    code = "log_format"

    def __init__(self, message: str, *, line_number: int, details: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(f"line {line_number}: {message}", details=details)
        self.line_number = line_number


class SchemaViolationError(LogFormatError):
    """A parsed line breaks a record invariant (e.g. attribution without conversion)."""

    code = "schema_violation"


class InsufficientDataError(SimulatorError):
    """Not enough data for the requested operation."""

    code = "insufficient_data"


class AttributionDomainError(SimulatorError, ValueError):
    """Argument outside the domain of an attribution-model function."""

    code = "domain_error"


class MetricDomainError(SimulatorError, ValueError):
    """Metric inputs outside their domain (e.g. non-positive cost under a cost perturbation)."""

    code = "metric_domain_error"


class TrainingError(SimulatorError):
    """Conversion-model training failed or was called on unusable data."""

    code = "training_error"


class CalibrationError(SimulatorError):
    """Bid calibration cannot reach the reference spend."""

    code = "calibration_error"


class StageError(SimulatorError):
    """Failure inside a pipeline stage, tagged with the stage name and split index."""

    code = "stage_error"

    def __init__(self, stage: str, cause: BaseException, *, split_index: Optional[int] = None) -> None:
        where = stage if split_index is None else f"{stage} (split {split_index})"
        super().__init__(f"[{where}] {cause}")
        self.stage = stage
        self.split_index = split_index

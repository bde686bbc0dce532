"""
Configuration models for qudit-broadcast
BroadcastConfig with source tracking and validation
"""

from typing import Dict, List

from pydantic import BaseModel, Field, PrivateAttr, field_validator

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigValidationResult:
    """Result of configuration validation"""

    def __init__(self):
        self.is_valid: bool = True
        self.errors: List[str] = []
        self.warnings: List[str] = []

    def add_error(self, message: str):
        self.errors.append(message)
        self.is_valid = False

    def add_warning(self, message: str):
        self.warnings.append(message)


class BroadcastConfig(BaseModel):
    """Numerical tolerances, survey ensemble and output settings"""

    hermitian_tol: float = Field(default=1e-12, description="Max-norm Hermiticity tolerance")
    trace_tol: float = Field(default=1e-10, description="Unit-trace tolerance for states")
    criteria_tol: float = Field(default=1e-9, description="Sign tolerance for eigenvalue decisions")
    discord_clamp_tol: float = Field(default=1e-9, description="Largest negative discord clamped to zero")
    survey_environment_dim: int = Field(default=64, description="Environment dimension of the survey ensemble")
    default_seed: int = Field(default=42, description="Seed used when none is given")
    significant_digits: int = Field(default=12, description="Significant digits in emitted numbers")
    monotonicity_probes: int = Field(default=16, description="Interior probes before bisection")
    log_level: str = Field(default="INFO", description="Logging level")
    log_dir: str = Field(default="logs", description="Directory for rotating log files")

    _config_sources: Dict[str, str] = PrivateAttr(default_factory=dict)

    @field_validator("hermitian_tol", "trace_tol", "criteria_tol", "discord_clamp_tol")
    @classmethod
    def validate_tolerance(cls, v):
        if not 0 < v < 1e-3:
            raise ValueError("Tolerance must lie in (0, 1e-3)")
        return v

    @field_validator("survey_environment_dim", "monotonicity_probes")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("Value must be a positive integer")
        return v

    @field_validator("significant_digits")
    @classmethod
    def validate_digits(cls, v):
        if not 6 <= v <= 17:
            raise ValueError("Significant digits must be between 6 and 17")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        level = v.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"Log level must be one of {', '.join(LOG_LEVELS)}")
        return level

    def set_source_info(self, field: str, source: str):
        self._config_sources[field] = source

    def get_source_info(self) -> Dict[str, str]:
        return self._config_sources.copy()

"""
Configuration loader for qudit-broadcast
Implements precedence-based configuration loading from multiple sources
"""

from typing import Dict, List, Optional, Tuple

import structlog
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ConfigurationError, ValidationError
from .models import BroadcastConfig, ConfigValidationResult
from .sources import ConfigSource, DefaultSource, DotEnvSource, EnvironmentSource

logger = structlog.get_logger(__name__)


def handle_configuration_error(error: ConfigurationError) -> None:
    """Handle configuration errors with appropriate logging and user guidance"""

    if isinstance(error, ValidationError):
        logger.error("Configuration parameter validation failed",
                     parameter=error.parameter,
                     reason=error.reason,
                     guidance="Check parameter format and allowed values")
    else:
        logger.error("Configuration error occurred",
                     error_type=type(error).__name__,
                     error_message=str(error),
                     guidance="Check your configuration parameters")

    logger.info("Configuration keys may be set as QBROADCAST_<KEY> in the environment or a .env file")


class LayeredConfigLoader:
    """Configuration loader with multiple source support"""

    CONFIG_PARAMETER_MAP = {
        "hermitian_tol": "HERMITIAN_TOL",
        "trace_tol": "TRACE_TOL",
        "criteria_tol": "CRITERIA_TOL",
        "discord_clamp_tol": "DISCORD_CLAMP_TOL",
        "survey_environment_dim": "SURVEY_ENVIRONMENT_DIM",
        "default_seed": "DEFAULT_SEED",
        "significant_digits": "SIGNIFICANT_DIGITS",
        "monotonicity_probes": "MONOTONICITY_PROBES",
        "log_level": "LOG_LEVEL",
        "log_dir": "LOG_DIR",
    }

    FLOAT_FIELDS = ("hermitian_tol", "trace_tol", "criteria_tol", "discord_clamp_tol")
    INT_FIELDS = (
        "survey_environment_dim",
        "default_seed",
        "significant_digits",
        "monotonicity_probes",
    )

    def __init__(self, env_file: str = ".env"):
        # Higher index = higher precedence
        self.config_sources: List[ConfigSource] = [
            DefaultSource(),
            DotEnvSource(env_file),
            EnvironmentSource(),
        ]
        self.logger = structlog.get_logger(__name__)

    def _convert(self, field: str, value: str):
        if field in self.FLOAT_FIELDS:
            try:
                return float(value)
            except ValueError:
                raise ValidationError(field, value, f"{field} must be a number")
        if field in self.INT_FIELDS:
            try:
                return int(value)
            except ValueError:
                raise ValidationError(field, value, f"{field} must be a valid integer")
        return value

    def load_config(self) -> BroadcastConfig:
        """Load configuration with precedence handling"""
        self.logger.debug("Starting configuration loading")

        config_values = {}
        source_tracking: Dict[str, str] = {}

        for field, env_key in self.CONFIG_PARAMETER_MAP.items():
            value, source = self.get_value_with_source(env_key)
            if value is None:
                continue
            config_values[field] = self._convert(field, value.strip())
            source_tracking[field] = source

        try:
            config = BroadcastConfig(**config_values)
        except PydanticValidationError as e:
            first = e.errors()[0]
            field = str(first["loc"][0]) if first.get("loc") else "config"
            self.logger.error("Configuration validation failed", errors=str(e))
            raise ValidationError(field, str(config_values.get(field)), first["msg"])

        for field, source in source_tracking.items():
            config.set_source_info(field, source)

        self.logger.info("Configuration loaded",
                         sources_used=sorted(set(source_tracking.values())),
                         fields_loaded=list(config_values.keys()))
        return config

    def get_value_with_source(self, key: str) -> Tuple[Optional[str], Optional[str]]:
        """Get configuration value with source information"""
        for source in reversed(self.config_sources):
            if source.is_available():
                value = source.get_value(key)
                if value is not None:
                    self.logger.debug("Configuration value found",
                                      key=key,
                                      source=source.get_source_name())
                    return value, source.get_source_name()

        self.logger.debug("Configuration value not found", key=key)
        return None, None

    def validate_sources(self) -> ConfigValidationResult:
        """Validate all configuration sources"""
        result = ConfigValidationResult()

        for source in self.config_sources:
            try:
                if source.is_available():
                    self.logger.debug("Configuration source available",
                                      source=source.get_source_name())
                else:
                    result.add_warning(f"Source {source.get_source_name()} not available")
            except Exception as e:
                result.add_error(f"Source {source.get_source_name()} validation failed: {e}")

        return result

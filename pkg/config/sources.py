"""
Configuration sources for qudit-broadcast
Environment variables, an optional .env file and built-in defaults
"""

import os
from abc import ABC, abstractmethod
from typing import Dict, Optional

import structlog
from dotenv import dotenv_values

logger = structlog.get_logger(__name__)

ENV_PREFIX = "QBROADCAST_"


class ConfigSource(ABC):
    """Abstract base class for configuration sources"""

    @abstractmethod
    def get_value(self, key: str) -> Optional[str]:
        """Get configuration value for key"""
        pass

    @abstractmethod
    def is_available(self) -> bool:
        """Check if configuration source is available"""
        pass

    @abstractmethod
    def get_source_name(self) -> str:
        """Get human-readable source name"""
        pass


class EnvironmentSource(ConfigSource):
    """Process environment; prefixed keys win over bare keys"""

    def __init__(self, prefix: str = ENV_PREFIX):
        self.prefix = prefix
        self.logger = structlog.get_logger(__name__)

    def get_value(self, key: str) -> Optional[str]:
        """Get value from QBROADCAST_<key>, falling back to the bare key"""
        prefixed = os.getenv(f"{self.prefix}{key}")
        if prefixed is not None:
            self.logger.debug("Found prefixed environment value", key=key, source="env_prefixed")
            return prefixed

        value = os.getenv(key)
        if value is not None:
            self.logger.debug("Found environment value", key=key, source="env")
        return value

    def is_available(self) -> bool:
        """The process environment is always available"""
        return True

    def get_source_name(self) -> str:
        """Get human-readable source name"""
        return "Environment"


class DotEnvSource(ConfigSource):
    """Values from a .env file, read without touching os.environ"""

    def __init__(self, env_file: str = ".env", prefix: str = ENV_PREFIX):
        self.env_file = env_file
        self.prefix = prefix
        self.env_vars: Dict[str, str] = {}
        self.logger = structlog.get_logger(__name__)
        self._load_env_file()

    def _load_env_file(self):
        """Parse the .env file if present; unreadable files are logged and skipped"""
        if not os.path.exists(self.env_file):
            self.logger.debug(".env file not found", file=self.env_file)
            return
        try:
            values = dotenv_values(self.env_file)
        except (OSError, UnicodeDecodeError) as e:
            self.logger.warning("Failed to read .env file", file=self.env_file, error=str(e))
            return
        self.env_vars = {k: v for k, v in values.items() if v is not None}
        self.logger.debug("Loaded .env file", file=self.env_file, vars_count=len(self.env_vars))

    def get_value(self, key: str) -> Optional[str]:
        """Get value from the parsed .env variables, prefixed key first"""
        value = self.env_vars.get(f"{self.prefix}{key}", self.env_vars.get(key))
        if value is not None:
            self.logger.debug("Found .env value", key=key, source="dotenv")
        return value

    def is_available(self) -> bool:
        """Check if the .env file existed and defined any variables"""
        return len(self.env_vars) > 0

    def get_source_name(self) -> str:
        """Get human-readable source name including the file path"""
        return f".env file ({self.env_file})"


class DefaultSource(ConfigSource):
    """Configuration source for fallback default values"""

    def __init__(self):
        self.defaults = {
            "HERMITIAN_TOL": "1e-12",
            "TRACE_TOL": "1e-10",
            "CRITERIA_TOL": "1e-9",
            "DISCORD_CLAMP_TOL": "1e-9",
            "SURVEY_ENVIRONMENT_DIM": "64",
            "DEFAULT_SEED": "42",
            "SIGNIFICANT_DIGITS": "12",
            "MONOTONICITY_PROBES": "16",
            "LOG_LEVEL": "INFO",
            "LOG_DIR": "logs",
        }
        self.logger = structlog.get_logger(__name__)

    def get_value(self, key: str) -> Optional[str]:
        """Get default value for key"""
        value = self.defaults.get(key)
        if value is not None:
            self.logger.debug("Using default value", key=key, source="defaults")
        return value

    def is_available(self) -> bool:
        """Default source is always available"""
        return True

    def get_source_name(self) -> str:
        """Get human-readable source name"""
        return "Default Values"

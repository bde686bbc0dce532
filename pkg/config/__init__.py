"""
Configuration module for qudit-broadcast
Layered configuration loading with source precedence and tracking
"""

from .sources import ConfigSource, EnvironmentSource, DotEnvSource, DefaultSource
from .loader import LayeredConfigLoader, handle_configuration_error
from .models import BroadcastConfig, ConfigValidationResult
from .exceptions import ConfigurationError, ValidationError

__all__ = [
    'ConfigSource',
    'EnvironmentSource',
    'DotEnvSource',
    'DefaultSource',
    'LayeredConfigLoader',
    'handle_configuration_error',
    'BroadcastConfig',
    'ConfigValidationResult',
    'ConfigurationError',
    'ValidationError'
]

"""
Domain exceptions for qudit-broadcast
Every failure carries the offending parameter, its value and a reason
"""

from typing import Any


class BroadcastError(Exception):
    """Base error for the broadcasting toolkit"""

    def __init__(self, parameter: str, value: Any, reason: str):
        self.parameter = parameter
        self.value = value
        self.reason = reason
        super().__init__(f"Parameter '{parameter}' rejected: {reason}")


class DomainError(BroadcastError):
    """Parameter lies outside the admissible domain of a family or routine"""
    pass


class ShapeError(BroadcastError):
    """Matrix shape does not match the declared subsystem dimensions"""
    pass


DimensionError = ShapeError


class ContractViolationError(BroadcastError):
    """Input breaks a routine precondition (e.g. Hermiticity)"""
    pass


class NumericsError(BroadcastError):
    """Floating point drift beyond the configured clamp tolerance"""
    pass


class BracketError(BroadcastError):
    """Threshold bracket has no sign change or the predicate is not monotone"""
    pass


class StateFileError(BroadcastError):
    """State interchange file failed validation"""

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__("state", path, reason)


class OutputError(BroadcastError):
    """Result destination could not be written"""

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__("out", path, reason)

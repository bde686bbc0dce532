"""
qudit-broadcast
Broadcasting of entanglement, geometric discord and l1 coherence in
qubit-qudit systems through local symmetric Heisenberg cloners
"""

__version__ = "1.0.0"

from .exceptions import (
    BracketError,
    BroadcastError,
    ContractViolationError,
    DimensionError,
    DomainError,
    NumericsError,
    OutputError,
    ShapeError,
    StateFileError,
)
from .models import DensityMatrix

__all__ = [
    "__version__",
    "BracketError",
    "BroadcastError",
    "ContractViolationError",
    "DensityMatrix",
    "DimensionError",
    "DomainError",
    "NumericsError",
    "OutputError",
    "ShapeError",
    "StateFileError",
]

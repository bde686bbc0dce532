"""
Correlation measures: geometric discord of 2 (x) d states and l1 coherence
"""

from enum import Enum
from typing import Optional, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, field_validator

from .bloch import decompose
from .exceptions import NumericsError
from .models import DensityMatrix

logger = structlog.get_logger(__name__)

DISCORD_CLAMP_TOL = 1e-9
COMPUTATIONAL_BASIS = "computational"


class MeasureName(str, Enum):
    GEOMETRIC_DISCORD = "GeometricDiscord"
    L1_COHERENCE = "L1Coherence"


class MeasureValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: MeasureName
    value: float
    basis_note: Optional[str] = None

    @field_validator("value")
    @classmethod
    def non_negative(cls, v):
        if v < 0:
            raise ValueError("measure values are non-negative")
        return v

    def __float__(self) -> float:
        return self.value


def geometric_discord(rho: DensityMatrix, clamp_tol: float = DISCORD_CLAMP_TOL) -> MeasureValue:
    """D_G = (|x|^2 + |T'|_F^2 - lambda_max(x x^t + T' T'^t)) / 2d on expansion coefficients"""
    b = decompose(rho)
    x, _, t_c = b.expansion()
    omega = np.outer(x, x) + t_c @ t_c.T
    largest = float(np.linalg.eigvalsh(omega)[-1])
    value = (float(x @ x) + float(np.sum(t_c ** 2)) - largest) / (2 * b.d)
    if value < 0:
        if -value > clamp_tol:
            logger.error("Geometric discord below clamp tolerance", value=value, clamp_tol=clamp_tol)
            raise NumericsError("geometric_discord", value, f"negative beyond clamp tolerance {clamp_tol:g}")
        logger.debug("Geometric discord clamped to zero", value=value)
        value = 0.0
    return MeasureValue(name=MeasureName.GEOMETRIC_DISCORD, value=value)


def l1_coherence(rho: Union[DensityMatrix, np.ndarray]) -> MeasureValue:
    """Sum of |<i|rho|j>| over i != j in the computational product basis"""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    value = float(np.sum(np.abs(m)) - np.sum(np.abs(np.diag(m))))
    return MeasureValue(name=MeasureName.L1_COHERENCE, value=max(value, 0.0), basis_note=COMPUTATIONAL_BASIS)


def alice_local_coherence_formula(x) -> float:
    """1/3 + (4/3) sqrt(x1^2 + x2^2) for the input qubit Bloch vector x"""
    x = np.asarray(x, dtype=float)
    return 1.0 / 3.0 + (4.0 / 3.0) * float(np.hypot(x[0], x[1]))

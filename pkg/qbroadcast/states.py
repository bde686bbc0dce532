"""
State families for qubit-qutrit broadcasting
MEMS (two branches), the two-parameter class TPCS and Haar-induced random states.

Basis ordering for 2 (x) 3 is {|00>, |01>, |02>, |10>, |11>, |12>}, so the
projector E_k is onto the k-th vector of that list.
"""

from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict

from .exceptions import DomainError
from .models import DensityMatrix

logger = structlog.get_logger(__name__)

QUBIT_QUTRIT = (2, 3)
BETA_SLACK = 1e-12

SeedLike = Union[int, np.random.Generator, None]


class MemsBranch(str, Enum):
    I = "I"
    II = "II"


class MemsParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: float

    @property
    def subclass(self) -> MemsBranch:
        return MemsBranch.I if self.r <= 0.5 else MemsBranch.II


class TpcsParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float
    gamma: float

    @property
    def beta(self) -> float:
        return (1.0 - 2.0 * self.alpha - self.gamma) / 3.0


def _ket(index: int, dim: int = 6) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def _projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def _E(k: int) -> np.ndarray:
    return _projector(_ket(k - 1))


def phi_plus_mems() -> np.ndarray:
    """(|00> + |12>)/sqrt(2)"""
    return (_ket(0) + _ket(5)) / np.sqrt(2)


def bell_states() -> dict:
    """Bell vectors on qutrit levels {0, 1} embedded in 2 (x) 3"""
    k00, k01, k10, k11 = _ket(0), _ket(1), _ket(3), _ket(4)
    s = 1 / np.sqrt(2)
    return {
        "phi+": s * (k00 + k11),
        "phi-": s * (k00 - k11),
        "psi+": s * (k01 + k10),
        "psi-": s * (k01 - k10),
    }


def mems_params(r: float) -> MemsParams:
    if not 0.0 <= r <= 1.0:
        raise DomainError("r", r, "MEMS parameter must lie in [0, 1]")
    return MemsParams(r=float(r))


def mems(r: float) -> DensityMatrix:
    """Maximally entangled mixed state; branch I for r <= 1/2, branch II above"""
    params = mems_params(r)
    phi = _projector(phi_plus_mems())
    if params.subclass is MemsBranch.I:
        m = (
            r * phi
            + (1 + r / 2) / 5 * (_E(2) + _E(5))
            + (1 - 2 * r) / 5 * (_E(1) + _E(3) + _E(6))
        )
    else:
        m = r * phi + (1 - r) / 2 * (_E(2) + _E(5))
    return DensityMatrix(matrix=m, dims=QUBIT_QUTRIT)


def mems_branch_i(r: float) -> DensityMatrix:
    """Branch I formula evaluated without the branch switch"""
    mems_params(r)
    m = r * _projector(phi_plus_mems()) + (1 + r / 2) / 5 * (_E(2) + _E(5)) + (1 - 2 * r) / 5 * (
        _E(1) + _E(3) + _E(6)
    )
    return DensityMatrix(matrix=m, dims=QUBIT_QUTRIT)


def mems_branch_ii(r: float) -> DensityMatrix:
    mems_params(r)
    m = r * _projector(phi_plus_mems()) + (1 - r) / 2 * (_E(2) + _E(5))
    return DensityMatrix(matrix=m, dims=QUBIT_QUTRIT)


def tpcs_params(alpha: float, gamma: float) -> TpcsParams:
    if not 0.0 <= alpha <= 0.5:
        raise DomainError("alpha", alpha, "alpha must lie in [0, 1/2]")
    if not 0.0 <= gamma <= 1.0:
        raise DomainError("gamma", gamma, "gamma must lie in [0, 1]")
    params = TpcsParams(alpha=float(alpha), gamma=float(gamma))
    if params.beta < -BETA_SLACK:
        raise DomainError(
            "beta",
            params.beta,
            f"2*alpha + gamma <= 1 violated (alpha={alpha}, gamma={gamma})",
        )
    return params


def tpcs(alpha: float, gamma: float) -> DensityMatrix:
    """alpha(E3 + E6) + beta(phi+ + phi- + psi+) + gamma psi-, beta = (1 - 2 alpha - gamma)/3"""
    params = tpcs_params(alpha, gamma)
    beta = max(params.beta, 0.0)
    bell = {name: _projector(v) for name, v in bell_states().items()}
    m = (
        alpha * (_E(3) + _E(6))
        + beta * (bell["phi+"] + bell["phi-"] + bell["psi+"])
        + gamma * bell["psi-"]
    )
    return DensityMatrix(matrix=m, dims=QUBIT_QUTRIT)


def default_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for sample ``index`` of a run seeded with ``seed``"""
    return np.random.default_rng(int(seed) + int(index))


def haar_random_state(
    dims: Union[int, Sequence[int]],
    rank_envelope: Optional[int] = None,
    seed: SeedLike = None,
) -> DensityMatrix:
    """Induced-measure random state: G G^dagger / Tr with G a complex Ginibre matrix

    ``rank_envelope`` is the environment dimension traced out; it defaults to
    the system dimension.
    """
    dims = (int(dims),) if np.isscalar(dims) else tuple(int(d) for d in dims)
    d_total = int(np.prod(dims))
    k = d_total if rank_envelope is None else int(rank_envelope)
    if k < 1:
        raise DomainError("rank_envelope", rank_envelope, "environment dimension must be >= 1")
    rng = default_rng(seed)
    g = rng.standard_normal((d_total, k)) + 1j * rng.standard_normal((d_total, k))
    rho = g @ g.conj().T
    return DensityMatrix(matrix=rho / np.trace(rho).real, dims=dims)


def haar_random_ket(d: int, seed: SeedLike = None) -> np.ndarray:
    rng = default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def product_state(a: np.ndarray, b: np.ndarray) -> DensityMatrix:
    return DensityMatrix(matrix=np.kron(a, b), dims=(a.shape[0], b.shape[0]))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    n = int(np.prod(dims))
    return DensityMatrix(matrix=np.eye(n) / n, dims=tuple(dims))


def bell_pair() -> DensityMatrix:
    """|Phi+><Phi+| on two qubits"""
    v = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)
    return DensityMatrix(matrix=np.outer(v, v.conj()), dims=(2, 2))

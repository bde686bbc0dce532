"""
Symmetric Heisenberg cloning and the local broadcasting protocol

Each party clones its half of rho_12 with the optimal symmetric 1 -> 2
universal cloner. Subsystems are labelled 1 (Alice input / clone a),
2 (Bob input / clone a), 3 (Alice clone b), 4 (Bob clone b),
5 (Alice machine), 6 (Bob machine).
"""

from functools import lru_cache

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, field_validator

from . import linalg
from .bloch import BlochRep, decompose, reconstruct
from .exceptions import DomainError, ShapeError
from .models import DensityMatrix

logger = structlog.get_logger(__name__)

ALICE_SHRINKING = 2.0 / 3.0

# native order of (V_A (x) V_B) output is labels 1,3,5,2,4,6
_TO_CANONICAL = (0, 3, 1, 4, 2, 5)


class CloningIsometry(BaseModel):
    """V: C^d -> C^d (x) C^d (x) C^d ordered (clone a, clone b, machine)"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: int
    v: np.ndarray

    @field_validator("v", mode="before")
    @classmethod
    def freeze(cls, v):
        arr = np.array(v, dtype=np.complex128, copy=True)
        arr.setflags(write=False)
        return arr

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return self.v @ rho @ self.v.conj().T

    def isometry_defect(self) -> float:
        return float(np.max(np.abs(self.v.conj().T @ self.v - np.eye(self.d))))


class BroadcastOutputs(BaseModel):
    model_config = ConfigDict(frozen=True)

    rho_13: DensityMatrix
    rho_24: DensityMatrix
    rho_14: DensityMatrix
    rho_23: DensityMatrix

    def items(self):
        return [("rho_13", self.rho_13), ("rho_24", self.rho_24), ("rho_14", self.rho_14), ("rho_23", self.rho_23)]


def _check_dimension(d: int) -> int:
    if int(d) < 2:
        raise DomainError("d", d, "cloner dimension must be >= 2")
    return int(d)


@lru_cache(maxsize=None)
def heisenberg_isometry(d: int) -> CloningIsometry:
    """|j> -> sqrt(2/(d+1)) (|jjj> + 1/2 sum_{k!=j} (|j k k> + |k j k>))"""
    d = _check_dimension(d)
    amplitude = np.sqrt(2.0 / (d + 1))
    v = np.zeros((d ** 3, d), dtype=np.complex128)

    def index(a: int, b: int, c: int) -> int:
        return (a * d + b) * d + c

    for j in range(d):
        v[index(j, j, j), j] = amplitude
        for k in range(d):
            if k != j:
                v[index(j, k, k), j] = amplitude / 2
                v[index(k, j, k), j] = amplitude / 2
    logger.debug("Cloning isometry built", dim=d)
    return CloningIsometry(d=d, v=v)


def clone_pair(rho: np.ndarray, d: int) -> np.ndarray:
    """Two-clone output (machine traced out) of a single d-level input"""
    iso = heisenberg_isometry(d)
    return linalg.partial_trace(iso.apply(rho), (d, d, d), keep=(0, 1))


def single_clone(rho: np.ndarray, d: int) -> np.ndarray:
    iso = heisenberg_isometry(d)
    return linalg.partial_trace(iso.apply(rho), (d, d, d), keep=(0,))


def clone_fidelity(d: int, psi: np.ndarray) -> float:
    """<psi| rho_clone |psi> for a pure input ``psi``"""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (d,):
        raise ShapeError("psi", psi.shape, f"expected a vector of length {d}")
    psi = psi / np.linalg.norm(psi)
    clone = single_clone(np.outer(psi, psi.conj()), d)
    return float(np.real(psi.conj() @ clone @ psi))


def expected_fidelity(d: int) -> float:
    return (d + 3) / (2.0 * (d + 1))


def shrinking_factor(d: int) -> float:
    """Closed form of the single-clone depolarizing factor, (d+2)/(2(d+1))"""
    d = _check_dimension(d)
    return (d + 2) / (2.0 * (d + 1))


def broadcast(rho_12: DensityMatrix) -> BroadcastOutputs:
    """Clone both halves locally and return the four two-party reductions"""
    if len(rho_12.dims) != 2 or rho_12.dims[0] != 2:
        raise ShapeError("dims", rho_12.dims, "broadcast expects a qubit (x) qudit input [2, d]")
    d = rho_12.dims[1]
    v_a = heisenberg_isometry(2).v
    v_b = heisenberg_isometry(d).v
    w = np.kron(v_a, v_b)
    native = w @ rho_12.matrix @ w.conj().T

    six, six_dims = linalg.permute_subsystems(native, (2, 2, 2, d, d, d), _TO_CANONICAL)
    four = linalg.partial_trace(six, six_dims, keep=(0, 1, 2, 3))
    four_dims = (2, d, 2, d)

    rho_13 = linalg.partial_trace(four, four_dims, keep=(0, 2))
    rho_24 = linalg.partial_trace(four, four_dims, keep=(1, 3))
    rho_14 = linalg.partial_trace(four, four_dims, keep=(0, 3))
    # keep (1, 2) yields Bob-before-Alice; swap back to qubit first
    rho_32 = linalg.partial_trace(four, four_dims, keep=(1, 2))
    rho_23, _ = linalg.permute_subsystems(rho_32, (d, 2), (1, 0))

    return BroadcastOutputs(
        rho_13=DensityMatrix(matrix=rho_13, dims=(2, 2)),
        rho_24=DensityMatrix(matrix=rho_24, dims=(d, d)),
        rho_14=DensityMatrix(matrix=rho_14, dims=(2, d)),
        rho_23=DensityMatrix(matrix=rho_23, dims=(2, d)),
    )


def _calibration_input(d: int) -> BlochRep:
    """Small qudit polarization along the last basis element, separable and positive"""
    k = d * d - 1
    y = np.zeros(k)
    y[-1] = 0.1
    return BlochRep(d=d, x=np.zeros(3), y=y, t=np.zeros((3, k)))


@lru_cache(maxsize=None)
def calibrate_shrinking_factor(d: int) -> float:
    """Measure Y_out / Y_in of the nonlocal output against the full protocol"""
    d = _check_dimension(d)
    reference = _calibration_input(d)
    outputs = broadcast(reconstruct(reference))
    ratio = float(decompose(outputs.rho_14).y[-1] / reference.y[-1])
    logger.info("Calibrated qudit shrinking factor", dim=d, factor=ratio, closed_form=shrinking_factor(d))
    return ratio


def nonlocal_output_fast(b: BlochRep) -> BlochRep:
    """(s_A X, s_B Y, s_A s_B T) with s_A = 2/3 and s_B calibrated per dimension"""
    s_b = calibrate_shrinking_factor(b.d)
    return b.scaled(ALICE_SHRINKING, s_b, ALICE_SHRINKING * s_b)


def alice_local_expected(x: np.ndarray) -> BlochRep:
    """Alice's local output in 2 (x) 2 Bloch form: ((2/3)x, (2/3)x, diag(1/3))"""
    x = np.asarray(x, dtype=float)
    return BlochRep(d=2, x=ALICE_SHRINKING * x, y=ALICE_SHRINKING * x, t=np.eye(3) / 3)

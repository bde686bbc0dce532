"""
Bloch representation of qubit-qudit states
Operator bases (Pauli, Gell-Mann, generalized Gell-Mann) and the conversion
between a 2 (x) d density matrix and its (X, Y, T) triple
"""

from functools import lru_cache
from typing import Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .exceptions import ContractViolationError, DomainError, ShapeError
from .models import DensityMatrix

logger = structlog.get_logger(__name__)

BASIS_NORMALIZATION = 2.0


class OperatorBasis(BaseModel):
    """Traceless Hermitian basis with Tr(O_i O_j) = c delta_ij"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim: int
    ops: np.ndarray
    normalization: float = BASIS_NORMALIZATION

    @field_validator("ops", mode="before")
    @classmethod
    def freeze_ops(cls, v):
        arr = np.array(v, dtype=np.complex128, copy=True)
        arr.setflags(write=False)
        return arr

    def __len__(self) -> int:
        return self.ops.shape[0]

    def gram(self) -> np.ndarray:
        """Matrix of pairwise traces Tr(O_i O_j)"""
        return np.einsum("iab,jba->ij", self.ops, self.ops)

    def check_invariants(self, tol: float = 1e-12) -> None:
        for i, op in enumerate(self.ops):
            if np.max(np.abs(op - op.conj().T)) > tol:
                raise ContractViolationError(f"ops[{i}]", self.dim, "basis element is not Hermitian")
            if abs(np.trace(op)) > tol:
                raise ContractViolationError(f"ops[{i}]", self.dim, "basis element is not traceless")
        expected = self.normalization * np.eye(len(self))
        if np.max(np.abs(self.gram() - expected)) > tol:
            raise ContractViolationError("ops", self.dim, "basis is not orthogonal with the declared normalization")


def _symmetric(d: int, j: int, k: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=np.complex128)
    m[j, k] = m[k, j] = 1
    return m


def _antisymmetric(d: int, j: int, k: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=np.complex128)
    m[j, k] = -1j
    m[k, j] = 1j
    return m


def _diagonal(d: int, level: int) -> np.ndarray:
    entries = [1.0] * level + [-float(level)] + [0.0] * (d - level - 1)
    return np.sqrt(2.0 / (level * (level + 1))) * np.diag(entries).astype(np.complex128)


def _gell_mann_ordered(d: int) -> list:
    """Standard ordering for qubits and qutrits: pairs (j<k) by k, then the diagonal"""
    ops = []
    for k in range(1, d):
        for j in range(k):
            ops.append(_symmetric(d, j, k))
            ops.append(_antisymmetric(d, j, k))
        ops.append(_diagonal(d, k))
    return ops


def _generalized_gell_mann(d: int) -> list:
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    symmetric = [_symmetric(d, j, k) for j, k in pairs]
    antisymmetric = [_antisymmetric(d, j, k) for j, k in pairs]
    diagonal = [_diagonal(d, level) for level in range(1, d)]
    return symmetric + antisymmetric + diagonal


@lru_cache(maxsize=None)
def standard_basis(d: int) -> OperatorBasis:
    """Pauli matrices for d=2, Gell-Mann matrices for d=3, generalized Gell-Mann above

    For d <= 3 the order is the textbook one (sigma_x, sigma_y, sigma_z and
    lambda_1..lambda_8). Larger dimensions list the symmetric family first,
    then the antisymmetric family, then the diagonal family.
    """
    if int(d) < 2:
        raise DomainError("d", d, "dimension must be >= 2")
    d = int(d)
    ops = _gell_mann_ordered(d) if d <= 3 else _generalized_gell_mann(d)
    logger.debug("Operator basis built", dim=d, size=len(ops))
    return OperatorBasis(dim=d, ops=np.stack(ops))


def pauli_basis() -> OperatorBasis:
    return standard_basis(2)


class BlochRep(BaseModel):
    """Raw expectation values of a 2 (x) d state

    x_i = Tr[rho (sigma_i (x) I)], y_j = Tr[rho (I (x) O_j)],
    t_ij = Tr[rho (sigma_i (x) O_j)].
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: int
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray

    @field_validator("x", "y", "t", mode="before")
    @classmethod
    def as_real_array(cls, v):
        arr = np.array(v, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def check_sizes(self):
        if self.d < 2:
            raise DomainError("d", self.d, "dimension must be >= 2")
        k = self.d * self.d - 1
        if self.x.shape != (3,):
            raise ShapeError("x", self.x.shape, "qubit vector must have 3 components")
        if self.y.shape != (k,):
            raise ShapeError("y", self.y.shape, f"qudit vector must have {k} components")
        if self.t.shape != (3, k):
            raise ShapeError("t", self.t.shape, f"correlation matrix must be 3x{k}")
        return self

    @classmethod
    def zeros(cls, d: int) -> "BlochRep":
        k = d * d - 1
        return cls(d=d, x=np.zeros(3), y=np.zeros(k), t=np.zeros((3, k)))

    @property
    def qudit_scale(self) -> float:
        return self.d / BASIS_NORMALIZATION

    def expansion(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coefficients of rho = (1/2d)(I + x.sigma(x)I + y'.I(x)O + T':sigma(x)O)"""
        s = self.qudit_scale
        return self.x.copy(), s * self.y, s * self.t

    @classmethod
    def from_expansion(cls, d: int, x, y_c, t_c) -> "BlochRep":
        s = d / BASIS_NORMALIZATION
        return cls(d=d, x=x, y=np.asarray(y_c, dtype=float) / s, t=np.asarray(t_c, dtype=float) / s)

    def scaled(self, sx: float, sy: float, st: float) -> "BlochRep":
        return BlochRep(d=self.d, x=sx * self.x, y=sy * self.y, t=st * self.t)

    def as_dict(self) -> dict:
        return {"d": self.d, "x": self.x.tolist(), "y": self.y.tolist(), "t": self.t.tolist()}

    def max_abs_diff(self, other: "BlochRep") -> float:
        if other.d != self.d:
            raise ShapeError("d", other.d, f"cannot compare with a d={self.d} representation")
        return float(
            max(
                np.max(np.abs(self.x - other.x)),
                np.max(np.abs(self.y - other.y)),
                np.max(np.abs(self.t - other.t)),
            )
        )


def _qubit_qudit_dim(rho: DensityMatrix) -> int:
    if len(rho.dims) != 2 or rho.dims[0] != 2:
        raise ShapeError("dims", rho.dims, "expected a qubit (x) qudit state with dims [2, d]")
    return rho.dims[1]


def decompose(rho: DensityMatrix) -> BlochRep:
    d = _qubit_qudit_dim(rho)
    sigma = pauli_basis().ops
    ops = standard_basis(d).ops
    # r[a, b, a', b'] = <a b| rho |a' b'>; Tr[rho (A (x) B)] = sum rho A[a', a] B[b', b]
    r = rho.matrix.reshape(2, d, 2, d)
    x = np.einsum("abcb,ica->i", r, sigma)
    y = np.einsum("abae,jeb->j", r, ops)
    t = np.einsum("abce,ica,jeb->ij", r, sigma, ops)
    residue = max(np.max(np.abs(x.imag)), np.max(np.abs(y.imag)), np.max(np.abs(t.imag)))
    if residue > 1e-10:
        logger.warning("Non-Hermitian input to Bloch decomposition", imaginary_residue=float(residue))
    return BlochRep(d=d, x=x.real, y=y.real, t=t.real)


def reconstruct(b: BlochRep) -> DensityMatrix:
    """Unique Hermitian trace-1 operator whose decomposition is ``b``; positivity unchecked"""
    d = b.d
    sigma = pauli_basis().ops
    ops = standard_basis(d).ops
    x, y_c, t_c = b.expansion()
    eye_q, eye_d = np.eye(2), np.eye(d)
    m = np.kron(eye_q, eye_d).astype(np.complex128)
    m += np.kron(np.einsum("i,iab->ab", x, sigma), eye_d)
    m += np.kron(eye_q, np.einsum("j,jab->ab", y_c, ops))
    m += np.einsum("ij,iab,jce->acbe", t_c, sigma, ops).reshape(2 * d, 2 * d)
    return DensityMatrix(matrix=m / (2 * d), dims=(2, d))

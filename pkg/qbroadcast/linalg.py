"""
Dense complex matrix kernel
Tensor products, partial trace, partial transpose, realignment and norms
over numpy arrays with an explicit subsystem dimension list
"""

from typing import Iterable, NamedTuple, Sequence, Tuple

import numpy as np
import structlog
from scipy import linalg as sla

from .exceptions import ContractViolationError, ShapeError
from .models import DensityMatrix

logger = structlog.get_logger(__name__)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
CRITERIA_TOL = 1e-9


class Eigensystem(NamedTuple):
    """Eigenvalues in descending order with matching eigenvector columns"""

    values: np.ndarray
    vectors: np.ndarray


def _checked_dims(m: np.ndarray, dims: Sequence[int]) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise ShapeError("dims", dims, "every subsystem dimension must be >= 2")
    n = int(np.prod(dims))
    if m.ndim != 2 or m.shape != (n, n):
        raise ShapeError(
            "matrix", m.shape, f"dimension does not match dims {list(dims)} (product {n})"
        )
    return dims


def _checked_index(index: int, n: int) -> int:
    if not 0 <= int(index) < n:
        raise ShapeError("subsystem", index, f"index must lie in [0, {n - 1}]")
    return int(index)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduce ``rho`` onto the subsystems in ``keep``

    The kept subsystems appear in ascending index order.
    """
    dims = _checked_dims(rho, dims)
    n = len(dims)
    keep = sorted({_checked_index(k, n) for k in keep})
    if not keep:
        raise ShapeError("keep", keep, "at least one subsystem must be kept")

    # traced subsystems share their row and column label so einsum sums them
    row_labels = list(range(n))
    col_labels = [i + n if i in keep else i for i in range(n)]
    out_labels = keep + [k + n for k in keep]
    tensor = rho.reshape(dims + dims)
    reduced = np.einsum(tensor, row_labels + col_labels, out_labels)
    kept_dim = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(kept_dim, kept_dim)


def partial_transpose(rho: np.ndarray, dims: Sequence[int], which: int) -> np.ndarray:
    """Transpose subsystem ``which``: rho[m mu, eta v] -> rho[m v, eta mu]"""
    dims = _checked_dims(rho, dims)
    n = len(dims)
    which = _checked_index(which, n)
    tensor = rho.reshape(dims + dims)
    return np.swapaxes(tensor, which, n + which).reshape(rho.shape)


def permute_subsystems(
    rho: np.ndarray, dims: Sequence[int], order: Sequence[int]
) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Reorder tensor factors so that new subsystem k is old subsystem order[k]"""
    dims = _checked_dims(rho, dims)
    n = len(dims)
    order = [int(o) for o in order]
    if sorted(order) != list(range(n)):
        raise ShapeError("order", order, f"must be a permutation of 0..{n - 1}")
    tensor = rho.reshape(dims + dims)
    permuted = tensor.transpose(order + [o + n for o in order])
    return permuted.reshape(rho.shape), tuple(dims[o] for o in order)


def realign(rho: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """R(|i><j| (x) |k><l|) = |i><k| (x) |j><l|, an m^2 x n^2 matrix"""
    dims = _checked_dims(rho, dims)
    if len(dims) != 2:
        raise ShapeError("dims", dims, "realignment needs exactly two subsystems")
    m, n = dims
    return rho.reshape(m, n, m, n).transpose(0, 2, 1, 3).reshape(m * m, n * n)


def unrealign(r: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Inverse of ``realign`` for the same subsystem dimensions"""
    dims = tuple(int(d) for d in dims)
    if len(dims) != 2:
        raise ShapeError("dims", dims, "realignment needs exactly two subsystems")
    m, n = dims
    if r.shape != (m * m, n * n):
        raise ShapeError("matrix", r.shape, f"expected {m * m}x{n * n}")
    return r.reshape(m, m, n, n).transpose(0, 2, 1, 3).reshape(m * n, m * n)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return m.ndim == 2 and m.shape[0] == m.shape[1] and bool(
        np.max(np.abs(m - m.conj().T), initial=0.0) <= tol
    )


def eig_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> Eigensystem:
    if not is_hermitian(m, tol):
        raise ContractViolationError(
            "matrix", getattr(m, "shape", None), f"not Hermitian within {tol:g} max-norm"
        )
    values, vectors = sla.eigh(m)
    return Eigensystem(values[::-1].copy(), vectors[:, ::-1].copy())


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``m``"""
    return float(sla.eigvalsh(hermitian_part(m))[0])


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(sla.svdvals(m)))


def ky_fan_norm(m: np.ndarray) -> float:
    """Sum of all singular values; the same number as ``trace_norm``"""
    return trace_norm(m)


def validate_physical(
    rho: DensityMatrix,
    hermitian_tol: float = HERMITIAN_TOL,
    trace_tol: float = TRACE_TOL,
    psd_tol: float = CRITERIA_TOL,
) -> None:
    """Raise ContractViolationError unless ``rho`` is a density matrix"""
    if not is_hermitian(rho.matrix, hermitian_tol):
        raise ContractViolationError("matrix", rho.dims, "state is not Hermitian")
    trace = rho.trace()
    if abs(trace - 1.0) > trace_tol:
        raise ContractViolationError("trace", trace, f"trace differs from 1 by more than {trace_tol:g}")
    lowest = min_eigenvalue(rho.matrix)
    if lowest < -psd_tol:
        raise ContractViolationError("min_eigenvalue", lowest, "state is not positive semidefinite")

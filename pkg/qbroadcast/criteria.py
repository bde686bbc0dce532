"""
Separability and entanglement classification
Peres-Horodecki (spectrum and W-determinant forms), the Bloch-norm sufficient
separability condition, realignment, absolute separability and PPTES detection
"""

from enum import Enum
from typing import Optional

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict

from . import linalg
from .bloch import BlochRep
from .cloning import ALICE_SHRINKING, BroadcastOutputs, shrinking_factor
from .exceptions import ShapeError
from .models import DensityMatrix

logger = structlog.get_logger(__name__)


class VerdictStatus(str, Enum):
    SEPARABLE = "Separable"
    ENTANGLED = "Entangled"
    INDETERMINATE = "Indeterminate"


class Verdict(BaseModel):
    """Classification with the criterion that produced it and its witness value"""

    model_config = ConfigDict(frozen=True)

    status: VerdictStatus
    criterion: str
    witness: float

    @property
    def entangled(self) -> bool:
        return self.status is VerdictStatus.ENTANGLED

    @property
    def separable(self) -> bool:
        return self.status is VerdictStatus.SEPARABLE


def _bipartite_dims(rho: DensityMatrix):
    if not rho.is_bipartite:
        raise ShapeError("dims", rho.dims, "criterion needs a bipartite state")
    return rho.dims


def _two_qubit(rho: DensityMatrix) -> None:
    if tuple(rho.dims) != (2, 2):
        raise ShapeError("dims", rho.dims, "criterion is defined for 2 (x) 2 states only")


def pt_min_eigenvalue(rho: DensityMatrix, which: int = 1) -> float:
    dims = _bipartite_dims(rho)
    pt = linalg.partial_transpose(rho.hermitian_part(), dims, which)
    return linalg.min_eigenvalue(pt)


def ph_criterion(rho: DensityMatrix, tol: float = linalg.CRITERIA_TOL) -> Verdict:
    """Negative partial transpose certifies entanglement

    PPT decides separability when the total dimension is at most 6; above that
    a positive spectrum leaves the state undecided.
    """
    dims = _bipartite_dims(rho)
    lowest = pt_min_eigenvalue(rho)
    if lowest < -tol:
        status = VerdictStatus.ENTANGLED
    elif int(np.prod(dims)) <= 6:
        status = VerdictStatus.SEPARABLE
    else:
        status = VerdictStatus.INDETERMINATE
    return Verdict(status=status, criterion="peres_horodecki", witness=lowest)


def w_matrices(rho: DensityMatrix):
    """Leading principal blocks W2, W3, W4 of rho^{T_B} written in rho's entries

    Rows and columns run over |00>, |01>, |10>, |11>.
    """
    _two_qubit(rho)
    p = rho.hermitian_part()
    w2 = np.array([[p[0, 0], p[1, 0]], [p[0, 1], p[1, 1]]])
    w3 = np.array(
        [
            [p[0, 0], p[1, 0], p[0, 2]],
            [p[0, 1], p[1, 1], p[0, 3]],
            [p[2, 0], p[3, 0], p[2, 2]],
        ]
    )
    w4 = np.array(
        [
            [p[0, 0], p[1, 0], p[0, 2], p[1, 2]],
            [p[0, 1], p[1, 1], p[0, 3], p[1, 3]],
            [p[2, 0], p[3, 0], p[2, 2], p[3, 2]],
            [p[2, 1], p[3, 1], p[2, 3], p[3, 3]],
        ]
    )
    return w2, w3, w4


def ph_determinant_form(rho: DensityMatrix, tol: float = linalg.CRITERIA_TOL) -> Verdict:
    w2, w3, w4 = w_matrices(rho)
    det2, det3, det4 = (float(np.linalg.det(w).real) for w in (w2, w3, w4))
    entangled = (det3 < -tol or det4 < -tol) and det2 >= -tol
    status = VerdictStatus.ENTANGLED if entangled else VerdictStatus.SEPARABLE
    return Verdict(status=status, criterion="w_determinant", witness=det4)


def bloch_norm_lhs(b: BlochRep, m: int = 2, n: Optional[int] = None) -> float:
    """sqrt(2(M-1)/M)|x| + sqrt(2(N-1)/N)|y'| + sqrt(4(M-1)(N-1)/MN)|T'|_KF

    Norms are taken on the expansion coefficients (x, y', T').
    """
    n = b.d if n is None else n
    if m != 2 or n != b.d:
        raise ShapeError("M,N", (m, n), f"representation is 2 (x) {b.d}")
    x, y_c, t_c = b.expansion()
    return float(
        np.sqrt(2 * (m - 1) / m) * np.linalg.norm(x)
        + np.sqrt(2 * (n - 1) / n) * np.linalg.norm(y_c)
        + np.sqrt(4 * (m - 1) * (n - 1) / (m * n)) * linalg.ky_fan_norm(t_c)
    )


def bloch_separability(b: BlochRep, m: int = 2, n: Optional[int] = None) -> Verdict:
    """Sufficient separability test; failure is Indeterminate, never Entangled"""
    lhs = bloch_norm_lhs(b, m, n)
    status = VerdictStatus.SEPARABLE if lhs <= 1.0 else VerdictStatus.INDETERMINATE
    return Verdict(status=status, criterion="bloch_norm", witness=lhs - 1.0)


def column_norm_sum(t: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(t, axis=0)))


def nonbroadcastable_predicate(b: BlochRep) -> bool:
    """Input-side condition under which no nonlocal output pair is entangled

    For qutrits this is the printed inequality
    (2/3) sum_j |col_j(T')| <= (12 - 8A - 15B) / (10 sqrt 3), A = |x|, B = |y'|.
    Other dimensions use the Bloch-norm bound on the calibrated output with the
    column-norm sum in place of the Ky-Fan norm.
    """
    x, y_c, t_c = b.expansion()
    a, bn = float(np.linalg.norm(x)), float(np.linalg.norm(y_c))
    columns = column_norm_sum(t_c)
    if b.d == 3:
        return bool((2.0 / 3.0) * columns <= (12 - 8 * a - 15 * bn) / (10 * np.sqrt(3)))
    eta = shrinking_factor(b.d)
    kappa = np.sqrt(2 * (b.d - 1) / b.d)
    lhs = ALICE_SHRINKING * a + kappa * eta * bn + kappa * ALICE_SHRINKING * eta * columns
    return bool(lhs <= 1.0)


def absolute_separability(rho: DensityMatrix, tol: float = linalg.CRITERIA_TOL) -> bool:
    """lambda_1 <= lambda_3 + 2 sqrt(lambda_2 lambda_4) with descending eigenvalues"""
    _two_qubit(rho)
    lam = np.clip(linalg.eig_hermitian(rho.hermitian_part()).values, 0.0, None)
    return bool(lam[0] <= lam[2] + 2 * np.sqrt(lam[1] * lam[3]) + tol)


def realignment_norm(rho: DensityMatrix) -> float:
    dims = _bipartite_dims(rho)
    return linalg.trace_norm(linalg.realign(rho.hermitian_part(), dims))


def realignment_criterion(rho: DensityMatrix, tol: float = linalg.CRITERIA_TOL) -> Verdict:
    excess = realignment_norm(rho) - 1.0
    status = VerdictStatus.ENTANGLED if excess > tol else VerdictStatus.INDETERMINATE
    return Verdict(status=status, criterion="realignment", witness=excess)


def pptes_detect(rho: DensityMatrix, tol: float = linalg.CRITERIA_TOL) -> bool:
    """Positive partial transpose together with a realignment violation"""
    if ph_criterion(rho, tol).entangled:
        return False
    return realignment_criterion(rho, tol).entangled


def combined_verdict(rho: DensityMatrix, tol: float = linalg.CRITERIA_TOL) -> Verdict:
    """PH first, realignment when PH leaves the state undecided"""
    ph = ph_criterion(rho, tol)
    if ph.status is not VerdictStatus.INDETERMINATE:
        return ph
    realigned = realignment_criterion(rho, tol)
    return realigned if realigned.entangled else ph


def local_entanglement_detected(outputs: BroadcastOutputs, tol: float = linalg.CRITERIA_TOL) -> bool:
    return combined_verdict(outputs.rho_13, tol).entangled or combined_verdict(outputs.rho_24, tol).entangled

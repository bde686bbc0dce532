"""
Shared state carrier for qudit-broadcast
DensityMatrix pairs a dense complex matrix with its tensor factorization
"""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .exceptions import ShapeError


class DensityMatrix(BaseModel):
    """Dense complex matrix annotated with subsystem dimensions

    Only the shape is enforced here. Hermiticity, unit trace and positivity
    are properties of physical states and are checked where they matter
    (see ``validate_physical``), since reconstructed Bloch operators and
    intermediate operators legitimately violate them.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray
    dims: Tuple[int, ...]

    @field_validator("matrix", mode="before")
    @classmethod
    def coerce_matrix(cls, v):
        """Store a read-only complex copy"""
        arr = np.array(v, dtype=np.complex128, copy=True)
        arr.setflags(write=False)
        return arr

    @field_validator("dims", mode="before")
    @classmethod
    def coerce_dims(cls, v):
        return tuple(int(d) for d in v)

    @model_validator(mode="after")
    def check_shape(self):
        if any(d < 2 for d in self.dims):
            raise ShapeError("dims", self.dims, "every subsystem dimension must be >= 2")
        n = int(np.prod(self.dims))
        if self.matrix.ndim != 2 or self.matrix.shape != (n, n):
            raise ShapeError(
                "matrix",
                self.matrix.shape,
                f"expected a {n}x{n} matrix for dims {list(self.dims)}",
            )
        return self

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_bipartite(self) -> bool:
        return len(self.dims) == 2

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def hermitian_part(self) -> np.ndarray:
        return (self.matrix + self.matrix.conj().T) / 2

    def max_abs_diff(self, other: "DensityMatrix") -> float:
        return float(np.max(np.abs(self.matrix - other.matrix)))

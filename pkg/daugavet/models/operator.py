from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from daugavet.exceptions import ConstructionError, DimensionMismatchError
from daugavet.models.space import NormedSpace


@dataclass(frozen=True, eq=False)
class Operator:
    """A matrix acting from ``domain`` to ``codomain``.

    ``provenance`` records how the operator was assembled (for example an
    extension by zero of a summand operator) and is copied into reports.
    """

    matrix: np.ndarray
    domain: NormedSpace
    codomain: NormedSpace
    provenance: Optional[dict] = field(default=None)

    def __post_init__(self):
        if self.domain.field is not self.codomain.field:
            raise ConstructionError("operator spaces share the scalar field")
        matrix = np.array(self.matrix, dtype=np.complex128 if np.iscomplexobj(self.matrix) else np.float64)
        if matrix.ndim != 2:
            raise DimensionMismatchError((self.codomain.dim, self.domain.dim), matrix.shape)
        if matrix.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatchError((self.codomain.dim, self.domain.dim), matrix.shape)
        if not self.domain.is_complex:
            if np.iscomplexobj(matrix):
                if np.any(np.abs(matrix.imag) > 0):
                    raise ConstructionError("matrix entries belong to the scalar field",
                                            "complex entry on a real space")
                matrix = matrix.real.copy()
        else:
            matrix = matrix.astype(np.complex128)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def on(cls, space: NormedSpace, matrix, provenance: Optional[dict] = None) -> "Operator":
        return cls(np.asarray(matrix), space, space, provenance)

    def with_matrix(self, matrix) -> "Operator":
        return Operator(np.asarray(matrix), self.domain, self.codomain, self.provenance)

    def scaled(self, factor) -> "Operator":
        matrix = self.matrix * factor
        if not self.domain.is_complex:
            matrix = np.real_if_close(matrix)
        return self.with_matrix(matrix)

    def __matmul__(self, other: "Operator") -> "Operator":
        if other.codomain is not self.domain:
            raise DimensionMismatchError(self.domain.label, other.codomain.label)
        return Operator(self.matrix @ other.matrix, other.domain, self.codomain)

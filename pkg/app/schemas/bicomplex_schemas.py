from builtins import ValueError, complex, float, int, len, range
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Annotated

from app.models.bicomplex_model import Bicomplex, GradedBasisChoice
from app.models.linalg_model import SubspaceBasis

ComplexPair = Annotated[List[float], Field(min_length=2, max_length=2)]
WireVector = List[ComplexPair]
WireMatrix = List[List[ComplexPair]]


def complex_to_wire(value: complex) -> List[float]:
    value = complex(value)
    return [float(value.real), float(value.imag)]


def vector_to_wire(vector: Sequence[complex]) -> List[List[float]]:
    return [complex_to_wire(v) for v in vector]


def matrix_to_wire(matrix: np.ndarray) -> List[List[List[float]]]:
    return [vector_to_wire(row) for row in np.asarray(matrix)]


def matrix_from_wire(rows, shape) -> np.ndarray:
    array = np.asarray(rows, dtype=float)
    if array.size == 0:
        return np.zeros(shape, dtype=np.complex128)
    return array[..., 0] + 1j * array[..., 1]


def wire_shape(rows) -> tuple:
    """(rows, cols) of a wire matrix; ragged rows raise ValueError."""
    widths = {len(row) for row in rows}
    if len(widths) > 1:
        raise ValueError("Matrix rows have different lengths")
    return len(rows), widths.pop() if widths else 0


def _check_matrix(rows, shape, label: str) -> None:
    actual = wire_shape(rows)
    if shape[0] * shape[1] == 0 and actual[0] * actual[1] == 0 and actual[0] in (0, shape[0]):
        return
    if actual != shape:
        raise ValueError(f"{label} has shape {actual}, expected {shape}")


class BicomplexSchema(BaseModel):
    length: int = Field(..., ge=0, description="N, the complex has degrees 0..N")
    dims: List[int] = Field(..., min_length=1, description="dim C^q for q = 0..N")
    d: List[WireMatrix] = Field(..., description="d_q: C^q -> C^{q+1}, q = 0..N-1, entries as [re, im]")
    dstar: List[WireMatrix] = Field(..., description="d*_q: C^q -> C^{q-1}, q = 1..N, entries as [re, im]")
    cohomology_basis: Optional[List[List[WireVector]]] = Field(
        None, description="Per degree, coordinate vectors of cocycles lifting a basis of H^q(C, d)")
    homology_basis: Optional[List[List[WireVector]]] = Field(
        None, description="Per degree, coordinate vectors of cycles lifting a basis of H_q(C, d*)")

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "length": 1,
                "dims": [1, 1],
                "d": [[[[2.0, 0.0]]]],
                "dstar": [[[[3.0, 0.0]]]],
            }
        },
    )

    @field_validator("dims")
    @classmethod
    def validate_dims(cls, dims: List[int]) -> List[int]:
        if any(n < 0 for n in dims):
            raise ValueError("Dimensions must be non-negative")
        return dims

    @model_validator(mode="after")
    def validate_shapes(self):
        if len(self.dims) != self.length + 1:
            raise ValueError(f"length {self.length} needs {self.length + 1} dims, got {len(self.dims)}")
        if len(self.d) != self.length or len(self.dstar) != self.length:
            raise ValueError(f"length {self.length} needs {self.length} matrices in d and dstar")
        for q in range(self.length):
            _check_matrix(self.d[q], (self.dims[q + 1], self.dims[q]), f"d[{q}]")
            _check_matrix(self.dstar[q], (self.dims[q], self.dims[q + 1]), f"dstar[{q}]")
        if (self.cohomology_basis is None) != (self.homology_basis is None):
            raise ValueError("cohomology_basis and homology_basis must be given together")
        for name in ("cohomology_basis", "homology_basis"):
            blocks = getattr(self, name)
            if blocks is None:
                continue
            if len(blocks) != self.length + 1:
                raise ValueError(f"{name} must list vectors for all {self.length + 1} degrees")
            for q, vectors in enumerate(blocks):
                if any(len(v) != self.dims[q] for v in vectors):
                    raise ValueError(f"{name}[{q}] vectors must have {self.dims[q]} coordinates")
        return self

    def to_domain(self) -> Bicomplex:
        dims = self.dims
        d = [matrix_from_wire(self.d[q], (dims[q + 1], dims[q])) for q in range(self.length)]
        dstar = [matrix_from_wire(self.dstar[q], (dims[q], dims[q + 1])) for q in range(self.length)]
        return Bicomplex(tuple(dims), tuple(d), tuple(dstar))

    def basis_choice(self) -> Optional[GradedBasisChoice]:
        if self.cohomology_basis is None:
            return None

        def bases(blocks):
            return tuple(
                SubspaceBasis(n, matrix_from_wire(vectors, (0, n)).T.reshape(n, len(vectors)))
                for n, vectors in zip(self.dims, blocks)
            )

        return GradedBasisChoice(bases(self.cohomology_basis), bases(self.homology_basis))

    @classmethod
    def from_domain(cls, bc: Bicomplex, basis: Optional[GradedBasisChoice] = None) -> "BicomplexSchema":
        payload = {
            "length": bc.length,
            "dims": list(bc.dims),
            "d": [matrix_to_wire(m) for m in bc.d],
            "dstar": [matrix_to_wire(m) for m in bc.dstar],
        }
        if basis is not None:
            payload["cohomology_basis"] = [matrix_to_wire(b.vectors.T) for b in basis.cohomology]
            payload["homology_basis"] = [matrix_to_wire(b.vectors.T) for b in basis.homology]
        return cls(**payload)

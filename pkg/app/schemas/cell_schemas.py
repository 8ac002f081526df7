from builtins import ValueError, int, len, str
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, RootModel, field_validator, model_validator
from typing_extensions import Literal

from app.models.cell_model import DualPair, FlatCellComplex, Incidence, Representation
from app.schemas.bicomplex_schemas import WireMatrix, matrix_from_wire, matrix_to_wire, wire_shape

IncidenceTriple = Tuple[int, Literal[1, -1], List[str]]


class FlatCellComplexSchema(BaseModel):
    dim: int = Field(..., ge=0, description="Dimension n of the complex")
    cells: List[int] = Field(..., description="Number of cells in degrees 0..n")
    incidences: List[List[List[IncidenceTriple]]] = Field(
        ..., description="incidences[q][i]: [face, sign, word] triples of the i-th (q+1)-cell")
    generators: List[str] = Field(default_factory=lambda: ["t"], description="Loop generator names")

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "dim": 1,
                "cells": [1, 1],
                "incidences": [[[[0, 1, ["t"]], [0, -1, []]]]],
                "generators": ["t"],
            }
        },
    )

    @field_validator("generators")
    @classmethod
    def validate_generators(cls, generators: List[str]) -> List[str]:
        for name in generators:
            if not name or name.startswith("-"):
                raise ValueError(f"Invalid generator name {name!r}")
        return generators

    @model_validator(mode="after")
    def validate_counts(self):
        if len(self.cells) != self.dim + 1:
            raise ValueError(f"dim {self.dim} needs {self.dim + 1} cell counts")
        if len(self.incidences) != self.dim:
            raise ValueError(f"dim {self.dim} needs incidences for {self.dim} degrees")
        return self

    def to_domain(self) -> FlatCellComplex:
        incidences = tuple(
            tuple(tuple(Incidence(face, sign, tuple(word)) for face, sign, word in cell) for cell in degree)
            for degree in self.incidences
        )
        return FlatCellComplex(self.dim, tuple(self.cells), incidences, tuple(self.generators))

    @classmethod
    def fields_from_domain(cls, cw: FlatCellComplex) -> dict:
        return {
            "dim": cw.dimension,
            "cells": list(cw.cells),
            "incidences": [
                [[[i.face, i.sign, list(i.word)] for i in cell] for cell in degree] for degree in cw.incidences
            ],
            "generators": list(cw.generators),
        }


class DualPairSchema(FlatCellComplexSchema):
    dual: FlatCellComplexSchema = Field(..., description="The dual cell complex")
    pairing: List[List[int]] = Field(..., description="pairing[q][i]: dual (n-q)-cell paired with primal q-cell i")
    dual_exponent: Optional[int] = Field(None, description="Exponent used by a generated dual structure")

    def to_domain(self) -> DualPair:
        primal = FlatCellComplexSchema(
            dim=self.dim, cells=self.cells, incidences=self.incidences, generators=self.generators
        ).to_domain()
        return DualPair(primal, self.dual.to_domain(), tuple(tuple(p) for p in self.pairing), self.dual_exponent)

    @classmethod
    def from_domain(cls, pair: DualPair) -> "DualPairSchema":
        return cls(
            **cls.fields_from_domain(pair.primal),
            dual=FlatCellComplexSchema(**cls.fields_from_domain(pair.dual)),
            pairing=[list(p) for p in pair.pairing],
            dual_exponent=pair.dual_exponent,
        )


class RepresentationSchema(RootModel[Dict[str, WireMatrix]]):
    """Generator name to holonomy matrix, entries as [re, im]."""

    @model_validator(mode="after")
    def validate_square(self):
        for name, rows in self.root.items():
            rows_count, cols = wire_shape(rows)
            if rows_count == 0 or rows_count != cols:
                raise ValueError(f"Holonomy of {name!r} must be a non-empty square matrix")
        return self

    def to_domain(self) -> Representation:
        return Representation({
            name: matrix_from_wire(rows, (len(rows), len(rows))) for name, rows in self.root.items()
        })

    @classmethod
    def from_domain(cls, rho: Representation) -> "RepresentationSchema":
        return cls({name: matrix_to_wire(matrix) for name, matrix in rho.matrices.items()})

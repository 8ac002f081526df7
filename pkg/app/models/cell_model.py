from builtins import int, len, property, range, sorted, str, tuple
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
import scipy.linalg

from app.utils.exceptions import DimensionMismatchError, InputError, InvalidRepresentationError

INVERTIBILITY_TOLERANCE = 1e-12


def generator_name(letter: str) -> str:
    """Generator named by a word letter; a leading '-' marks the inverse."""
    return letter[1:] if letter.startswith("-") else letter


@dataclass(frozen=True)
class Incidence:
    """A face of a cell with its orientation sign and the holonomy word along the attaching path."""
    face: int
    sign: int
    word: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InputError(f"Incidence sign must be +1 or -1, got {self.sign}")
        object.__setattr__(self, "face", int(self.face))
        object.__setattr__(self, "word", tuple(str(letter) for letter in self.word))


@dataclass(frozen=True)
class FlatCellComplex:
    """
    Finite cell complex whose incidences carry holonomy words.

    Attributes:
        dimension (int): n, cells exist in degrees 0..n.
        cells (tuple): Number of cells per degree.
        incidences (tuple): incidences[q][i] lists the faces of the i-th (q+1)-cell.
        generators (tuple): Names of the loop generators used in the words.
    """
    dimension: int
    cells: Tuple[int, ...]
    incidences: Tuple[Tuple[Tuple[Incidence, ...], ...], ...]
    generators: Tuple[str, ...] = ("t",)

    def __post_init__(self):
        cells = tuple(int(c) for c in self.cells)
        if self.dimension < 0 or len(cells) != self.dimension + 1 or any(c < 0 for c in cells):
            raise DimensionMismatchError(f"A {self.dimension}-dimensional complex needs {self.dimension + 1} cell counts")
        incidences = tuple(tuple(tuple(cell) for cell in degree) for degree in self.incidences)
        if len(incidences) != self.dimension:
            raise DimensionMismatchError(f"Expected incidences for {self.dimension} degrees, got {len(incidences)}")
        generators = tuple(self.generators)
        for q, degree in enumerate(incidences):
            if len(degree) != cells[q + 1]:
                raise DimensionMismatchError(f"Degree {q + 1} has {cells[q + 1]} cells but {len(degree)} incidence lists")
            for cell in degree:
                for incidence in cell:
                    if not 0 <= incidence.face < cells[q]:
                        raise InputError(f"Face index {incidence.face} out of range for degree {q}")
                    unknown = [l for l in incidence.word if generator_name(l) not in generators]
                    if unknown:
                        raise InputError(f"Unknown generators {unknown} in holonomy word")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "incidences", incidences)
        object.__setattr__(self, "generators", generators)


@dataclass(frozen=True)
class Representation:
    """
    Holonomy representation: an invertible k x k matrix per generator.

    Attributes:
        matrices (dict): Generator name to matrix.
    """
    matrices: Mapping[str, np.ndarray]

    def __post_init__(self):
        frozen: Dict[str, np.ndarray] = {}
        sizes = set()
        for name, matrix in self.matrices.items():
            array = np.array(matrix, dtype=np.complex128)
            if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
                raise InvalidRepresentationError(f"Holonomy of {name!r} must be a non-empty square matrix")
            if not np.all(np.isfinite(array)):
                raise InvalidRepresentationError(f"Holonomy of {name!r} has non-finite entries")
            if abs(np.linalg.det(array)) <= INVERTIBILITY_TOLERANCE:
                raise InvalidRepresentationError(f"Holonomy of {name!r} is not invertible")
            array.setflags(write=False)
            frozen[str(name)] = array
            sizes.add(array.shape[0])
        if len(sizes) > 1:
            raise InvalidRepresentationError(f"Holonomies have different sizes {sorted(sizes)}")
        object.__setattr__(self, "matrices", frozen)

    @property
    def fiber_dim(self) -> int:
        return next(iter(self.matrices.values())).shape[0] if self.matrices else 1

    @classmethod
    def scalar(cls, value: complex, generator: str = "t") -> "Representation":
        return cls({generator: np.array([[value]], dtype=np.complex128)})

    @classmethod
    def trivial(cls, generators, fiber_dim: int = 1) -> "Representation":
        return cls({name: np.eye(fiber_dim, dtype=np.complex128) for name in generators})

    def evaluate(self, word) -> np.ndarray:
        """Product of the letters' matrices read left to right."""
        result = np.eye(self.fiber_dim, dtype=np.complex128)
        for letter in word:
            name = generator_name(letter)
            if name not in self.matrices:
                raise InvalidRepresentationError(f"No holonomy given for generator {name!r}")
            matrix = self.matrices[name]
            result = result @ (scipy.linalg.inv(matrix) if letter.startswith("-") else matrix)
        return result


@dataclass(frozen=True)
class DualPair:
    """
    A cell complex with its dual decomposition.

    Attributes:
        primal (FlatCellComplex): The decomposition W.
        dual (FlatCellComplex): The dual decomposition D(W).
        pairing (tuple): pairing[q][i] is the (n-q)-cell of the dual paired with the i-th q-cell.
        dual_exponent (int): Exponent the generator used in the dual attaching words, if any.
    """
    primal: FlatCellComplex
    dual: FlatCellComplex
    pairing: Tuple[Tuple[int, ...], ...]
    dual_exponent: Optional[int] = None

    def __post_init__(self):
        n = self.primal.dimension
        if self.dual.dimension != n:
            raise DimensionMismatchError(f"Dual has dimension {self.dual.dimension}, primal has {n}")
        pairing = tuple(tuple(int(i) for i in degree) for degree in self.pairing)
        if len(pairing) != n + 1:
            raise DimensionMismatchError(f"Pairing must cover {n + 1} degrees")
        for q in range(n + 1):
            if self.primal.cells[q] != self.dual.cells[n - q]:
                raise DimensionMismatchError(
                    f"{self.primal.cells[q]} primal {q}-cells but {self.dual.cells[n - q]} dual {n - q}-cells"
                )
            if sorted(pairing[q]) != list(range(self.primal.cells[q])):
                raise InputError(f"Pairing in degree {q} is not a bijection")
        object.__setattr__(self, "pairing", pairing)

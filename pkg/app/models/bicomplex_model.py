from builtins import all, bool, int, len, max, property, range, str, sum, tuple
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from app.models.linalg_model import SubspaceBasis
from app.utils.exceptions import DegenerateBasisError, DimensionMismatchError, InvalidComplexError

ACYCLIC = "acyclic"


def _freeze_matrices(matrices, shapes, label: str) -> Tuple[np.ndarray, ...]:
    frozen = []
    for index, (matrix, shape) in enumerate(zip(matrices, shapes)):
        array = np.array(matrix, dtype=np.complex128)
        if array.size == 0 and shape[0] * shape[1] == 0:
            array = array.reshape(shape)
        if array.shape != shape:
            raise DimensionMismatchError(f"{label}[{index}] has shape {array.shape}, expected {shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidComplexError(f"{label}[{index}] has non-finite entries")
        array.setflags(write=False)
        frozen.append(array)
    return tuple(frozen)


@dataclass(frozen=True)
class CochainComplex:
    """
    Graded space C^0..C^N with a single coboundary d of degree +1.

    Attributes:
        dims (tuple): dim C^q for q = 0..N.
        d (tuple): d[q] is the matrix of d_q: C^q -> C^{q+1}, shape (dims[q+1], dims[q]).
    """
    dims: Tuple[int, ...]
    d: Tuple[np.ndarray, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims or any(n < 0 for n in dims):
            raise DimensionMismatchError("A complex needs at least one degree and non-negative dimensions")
        if len(self.d) != len(dims) - 1:
            raise DimensionMismatchError(f"Expected {len(dims) - 1} coboundary matrices, got {len(self.d)}")
        shapes = [(dims[q + 1], dims[q]) for q in range(len(dims) - 1)]
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "d", _freeze_matrices(self.d, shapes, "d"))

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def dim(self, q: int) -> int:
        return self.dims[q] if 0 <= q <= self.length else 0

    def up(self, q: int) -> np.ndarray:
        if 0 <= q < self.length:
            return self.d[q]
        return np.zeros((self.dim(q + 1), self.dim(q)), dtype=np.complex128)


@dataclass(frozen=True)
class Bicomplex:
    """
    Graded space with an up-differential d and a down-differential d*, each squaring to zero.

    Attributes:
        dims (tuple): dim C^q for q = 0..N.
        d (tuple): d[q] = d_q: C^q -> C^{q+1}, shape (dims[q+1], dims[q]), q = 0..N-1.
        dstar (tuple): dstar[q-1] = d*_q: C^q -> C^{q-1}, shape (dims[q-1], dims[q]), q = 1..N.
        reference_scale (float): Magnitude inherited from an enclosing complex, so that a
            compressed copy decides ranks against the scale of the original.

    Closure (d^2 = 0, d*^2 = 0) is checked by BicomplexService.validate, not here,
    so that invalid inputs can still be reported on.
    """
    dims: Tuple[int, ...]
    d: Tuple[np.ndarray, ...]
    dstar: Tuple[np.ndarray, ...]
    reference_scale: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims or any(n < 0 for n in dims):
            raise DimensionMismatchError("A complex needs at least one degree and non-negative dimensions")
        length = len(dims) - 1
        if len(self.d) != length or len(self.dstar) != length:
            raise DimensionMismatchError(
                f"Length {length} needs {length} matrices for d and d*, got {len(self.d)} and {len(self.dstar)}"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "d", _freeze_matrices(self.d, [(dims[q + 1], dims[q]) for q in range(length)], "d"))
        object.__setattr__(
            self, "dstar", _freeze_matrices(self.dstar, [(dims[q - 1], dims[q]) for q in range(1, length + 1)], "dstar")
        )

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    @property
    def scale(self) -> float:
        """Largest row norm over all differentials, the shared reference for rank decisions."""
        norms = [float(np.max(np.linalg.norm(m, axis=1))) for m in self.d + self.dstar if m.size]
        if self.reference_scale is not None:
            norms.append(float(self.reference_scale))
        return max(norms, default=0.0)

    def dim(self, q: int) -> int:
        return self.dims[q] if 0 <= q <= self.length else 0

    def up(self, q: int) -> np.ndarray:
        """d_q: C^q -> C^{q+1}, a zero matrix outside 0 <= q < N."""
        if 0 <= q < self.length:
            return self.d[q]
        return np.zeros((self.dim(q + 1), self.dim(q)), dtype=np.complex128)

    def down(self, q: int) -> np.ndarray:
        """d*_q: C^q -> C^{q-1}, a zero matrix outside 1 <= q <= N."""
        if 1 <= q <= self.length:
            return self.dstar[q - 1]
        return np.zeros((self.dim(q - 1), self.dim(q)), dtype=np.complex128)

    def laplacian(self, q: int) -> np.ndarray:
        """Combinatorial Laplacian d_{q-1}·d*_q + d*_{q+1}·d_q on C^q."""
        return self.up(q - 1) @ self.down(q) + self.down(q + 1) @ self.up(q)

    def cochain_complex(self) -> CochainComplex:
        return CochainComplex(self.dims, self.d)

    @classmethod
    def from_cochain(cls, complex_: CochainComplex, dstar) -> "Bicomplex":
        return cls(complex_.dims, complex_.d, tuple(dstar))


@dataclass(frozen=True)
class GradedBasisChoice:
    """
    Cohomology and homology representatives per degree.

    Attributes:
        cohomology (tuple): SubspaceBasis of d-cocycles lifting a basis of H^q(C, d), q = 0..N.
        homology (tuple): SubspaceBasis of d*-cycles lifting a basis of H_q(C, d*), q = 0..N.
    """
    cohomology: Tuple[SubspaceBasis, ...]
    homology: Tuple[SubspaceBasis, ...]

    def __post_init__(self):
        object.__setattr__(self, "cohomology", tuple(self.cohomology))
        object.__setattr__(self, "homology", tuple(self.homology))
        if len(self.cohomology) != len(self.homology):
            raise DimensionMismatchError("Cohomology and homology bases must cover the same degrees")

    @classmethod
    def empty(cls, dims) -> "GradedBasisChoice":
        bases = tuple(SubspaceBasis.empty(n) for n in dims)
        return cls(bases, bases)

    @property
    def cohomology_dims(self) -> List[int]:
        return [b.count for b in self.cohomology]

    @property
    def homology_dims(self) -> List[int]:
        return [b.count for b in self.homology]


BasisRecord = Union[GradedBasisChoice, str]


@dataclass(frozen=True)
class TorsionScalar:
    """
    Torsion relative to explicit bases, value = (-1)^S · unsigned_value.

    Attributes:
        unsigned_value (complex): The ratio of the two torsion isomorphisms.
        sign_exponent (int): The integer S, kept exact.
        basis (GradedBasisChoice | str): The bases used, or ACYCLIC.
    """
    unsigned_value: complex
    sign_exponent: int
    basis: BasisRecord = field(repr=False)

    def __post_init__(self):
        value = complex(self.unsigned_value)
        if value == 0 or not np.isfinite(value):
            raise DegenerateBasisError(f"Torsion must be a nonzero finite number, got {value}")
        object.__setattr__(self, "unsigned_value", value)
        object.__setattr__(self, "sign_exponent", int(self.sign_exponent))

    @property
    def sign(self) -> int:
        return -1 if self.sign_exponent % 2 else 1

    @property
    def value(self) -> complex:
        return self.sign * self.unsigned_value

    @property
    def is_acyclic(self) -> bool:
        return isinstance(self.basis, str) and self.basis == ACYCLIC


@dataclass(frozen=True)
class DimensionProfile:
    """
    Dimension bookkeeping of a bicomplex.

    Attributes:
        dims (tuple): n_q = dim C^q.
        coboundary_dims (tuple): s_q = dim B^q = rank d_{q-1}.
        boundary_dims (tuple): r_q = dim B_q = rank d*_{q+1}.
        cohomology_dims (tuple): v_q = dim H^q(C, d).
        homology_dims (tuple): u_q = dim H_q(C, d*).
    """
    dims: Tuple[int, ...]
    coboundary_dims: Tuple[int, ...]
    boundary_dims: Tuple[int, ...]
    cohomology_dims: Tuple[int, ...]
    homology_dims: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def _get(self, values, q: int) -> int:
        return values[q] if 0 <= q < len(values) else 0

    def s(self, q: int) -> int:
        return self._get(self.coboundary_dims, q)

    def r(self, q: int) -> int:
        return self._get(self.boundary_dims, q)

    def v(self, q: int) -> int:
        return self._get(self.cohomology_dims, q)

    def u(self, q: int) -> int:
        return self._get(self.homology_dims, q)

    @property
    def doubly_acyclic(self) -> bool:
        return not any(self.cohomology_dims) and not any(self.homology_dims)

    def sign_exponent(self) -> int:
        """S = sum_q r_{q-1}·s_{q+1} + s_{q+1}·u_q + r_{q-1}·v_q."""
        return sum(
            self.r(q - 1) * self.s(q + 1) + self.s(q + 1) * self.u(q) + self.r(q - 1) * self.v(q)
            for q in range(self.length + 1)
        )

    def identities(self) -> Dict[str, bool]:
        """Exact alternating-sum identities between ranks and (co)homology dimensions."""
        n = self.dims
        checks = {"boundary_ranks": True, "coboundary_ranks": True, "rank_difference": True, "euler_characteristic": True}
        for q in range(self.length + 1):
            alternating = range(q + 1)
            r_expected = sum((-1) ** i * (n[q - i] - self.u(q - i)) for i in alternating)
            s_expected = sum((-1) ** i * (n[q - i] - self.v(q - i)) for i in alternating)
            difference = sum((-1) ** i * (self.v(q - i) - self.u(q - i)) for i in alternating)
            checks["boundary_ranks"] &= self.r(q) == r_expected
            checks["coboundary_ranks"] &= self.s(q + 1) == s_expected
            checks["rank_difference"] &= self.r(q) - self.s(q + 1) == difference
        euler = sum((-1) ** q * n[q] for q in range(self.length + 1))
        checks["euler_characteristic"] = (
            euler == sum((-1) ** q * self.v(q) for q in range(self.length + 1))
            == sum((-1) ** q * self.u(q) for q in range(self.length + 1))
        )
        if self.doubly_acyclic:
            checks["acyclic_rank_match"] = all(self.r(q) == self.s(q + 1) for q in range(self.length + 1))
        return checks


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    degree: int
    residual: float
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: Tuple[ValidationIssue, ...] = ()
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not self.issues

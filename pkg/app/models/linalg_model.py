from builtins import int, property, tuple
from dataclasses import dataclass, field
from typing import Dict, Tuple
import numpy as np

from app.utils.exceptions import DegenerateBasisError, DimensionMismatchError


def _frozen(array, dtype=np.complex128) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PivotedLU:
    """
    Factorization P·A = L·U of a square complex matrix.

    Attributes:
        lower (ndarray): Unit lower triangular factor L.
        upper (ndarray): Upper triangular factor U, zeros on the diagonal when A is singular.
        permutation (tuple): Row i of P·A is row permutation[i] of A.
        sign (int): Sign of the permutation, +1 or -1.
    """
    lower: np.ndarray
    upper: np.ndarray
    permutation: Tuple[int, ...]
    sign: int

    def __post_init__(self):
        object.__setattr__(self, "lower", _frozen(self.lower))
        object.__setattr__(self, "upper", _frozen(self.upper))

    def permutation_matrix(self) -> np.ndarray:
        n = len(self.permutation)
        P = np.zeros((n, n), dtype=np.complex128)
        P[np.arange(n), list(self.permutation)] = 1.0
        return P


@dataclass(frozen=True)
class SubspaceBasis:
    """
    Ordered basis of a subspace of C^n stored as the columns of a matrix.

    Attributes:
        ambient_dim (int): Dimension n of the ambient space.
        vectors (ndarray): Matrix of shape (n, k) whose columns are the basis vectors.
    """
    ambient_dim: int
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=np.complex128)
        if vectors.ndim == 1 and vectors.size == 0:
            vectors = vectors.reshape(self.ambient_dim, 0)
        if vectors.ndim != 2 or vectors.shape[0] != self.ambient_dim:
            raise DimensionMismatchError(
                f"Basis vectors of shape {vectors.shape} do not live in C^{self.ambient_dim}"
            )
        k = vectors.shape[1]
        if k > self.ambient_dim or (k > 0 and np.linalg.matrix_rank(vectors) < k):
            raise DegenerateBasisError(f"{k} vectors in C^{self.ambient_dim} are linearly dependent")
        object.__setattr__(self, "vectors", _frozen(vectors))

    @property
    def count(self) -> int:
        return self.vectors.shape[1]

    @classmethod
    def empty(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=np.complex128))

    @classmethod
    def standard(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=np.complex128))


@dataclass(frozen=True)
class SpectralProjector:
    """
    Projector onto the generalized eigenspaces of a matrix with Re(lambda) < K.

    Attributes:
        matrix (ndarray): The projector P.
        selected (tuple): Selected eigenvalues with multiplicity, sorted.
        threshold (float): The threshold K.
        range_basis (ndarray): Orthonormal basis V of range(P), shape (n, k).
        left_inverse (ndarray): Matrix L with L·V = I and P = V·L, shape (k, n).
        source (ndarray): The matrix A the projector was computed for.
    """
    matrix: np.ndarray
    selected: Tuple[complex, ...]
    threshold: float
    range_basis: np.ndarray
    left_inverse: np.ndarray
    source: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("matrix", "range_basis", "left_inverse", "source"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def rank(self) -> int:
        return self.range_basis.shape[1]

    def residuals(self) -> Dict[str, float]:
        """Return the idempotence, commutation and trace residuals of the projector."""
        P, A = self.matrix, self.source
        if P.size == 0:
            return {"idempotence": 0.0, "commutation": 0.0, "trace": 0.0}
        return {
            "idempotence": float(np.linalg.norm(P @ P - P)),
            "commutation": float(np.linalg.norm(P @ A - A @ P)),
            "trace": float(abs(np.trace(P) - len(self.selected))),
        }

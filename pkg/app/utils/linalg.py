"""
Dense complex linear algebra used by every torsion computation.

Factorizations and eigenvalue problems are delegated to LAPACK through
scipy.linalg; this module adds the scale-aware tolerances, the zero-dimensional
conventions (the empty determinant is 1) and the domain errors.
"""
from builtins import float, int, len, max, sorted, tuple
import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from app.dependencies import get_settings
from app.models.linalg_model import PivotedLU, SpectralProjector, SubspaceBasis
from app.utils.exceptions import (
    AmbiguousRankError,
    DimensionMismatchError,
    EigenvalueConvergenceError,
    InputError,
    NotInSpanError,
    SpectralSplitError,
    ThresholdCollisionError,
)

settings = get_settings()
logger = logging.getLogger(__name__)


class RankResult(NamedTuple):
    rank: int
    kernel: SubspaceBasis
    image: SubspaceBasis
    pivots: Tuple[int, ...]


def as_cmatrix(data, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """
    Converts nested numeric data into a finite complex matrix.

    Args:
        data: Array-like of numbers.
        shape (tuple): Expected (rows, cols), checked when given.

    Returns:
        ndarray: A 2-D complex128 array.

    Raises:
        DimensionMismatchError: If the data is not 2-D or has the wrong shape.
        InputError: If an entry is NaN or infinite.
    """
    A = np.asarray(data, dtype=np.complex128)
    if shape is not None and A.size == 0 and shape[0] * shape[1] == 0:
        A = A.reshape(shape)
    if A.ndim != 2:
        raise DimensionMismatchError(f"Expected a matrix, got an array with {A.ndim} axes")
    if shape is not None and A.shape != tuple(shape):
        raise DimensionMismatchError(f"Expected shape {tuple(shape)}, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("Matrix entries must be finite")
    return A


def _require_square(A: np.ndarray, what: str = "matrix") -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"{what} must be square, got shape {A.shape}")


def _permutation_sign(permutation: Sequence[int]) -> int:
    seen = [False] * len(permutation)
    transpositions = 0
    for start in range(len(permutation)):
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = permutation[i]
            length += 1
        if length:
            transpositions += length - 1
    return -1 if transpositions % 2 else 1


def lu_decompose(A) -> PivotedLU:
    """
    Computes the partially pivoted factorization P·A = L·U.

    Args:
        A: Square complex matrix.

    Returns:
        PivotedLU: Factors, permutation and its sign. A singular input gives a zero pivot on U.

    Raises:
        DimensionMismatchError: If A is not square.
    """
    A = as_cmatrix(A)
    _require_square(A)
    n = A.shape[0]
    if n == 0:
        return PivotedLU(np.zeros((0, 0)), np.zeros((0, 0)), (), 1)
    p, lower, upper = scipy.linalg.lu(A)
    # scipy returns A = p·L·U, so row i of p^T·A is row argmax(p[:, i]) of A
    permutation = tuple(int(i) for i in np.argmax(p, axis=0))
    return PivotedLU(lower, upper, permutation, _permutation_sign(permutation))


def det(A) -> complex:
    """Determinant from the pivoted LU factors; the empty matrix has determinant 1."""
    factors = lu_decompose(A)
    if not factors.permutation:
        return 1.0 + 0.0j
    return complex(np.prod(np.diag(factors.upper)) * factors.sign)


def rank_threshold(A: np.ndarray, tol: Optional[float] = None, scale: Optional[float] = None) -> float:
    """
    Scale-aware rank threshold tol × max(rows, cols) × max(largest row norm, scale).

    The optional scale lets a whole complex share one reference magnitude, so that
    a map which is zero up to rounding is not promoted to full rank.
    """
    tol = settings.rank_tolerance if tol is None else tol
    if A.size == 0:
        return 0.0
    reference = float(np.max(np.linalg.norm(A, axis=1)))
    if scale is not None:
        reference = max(reference, float(scale))
    return tol * max(A.shape) * reference


def rank_kernel_image(A, tol: Optional[float] = None, scale: Optional[float] = None, strict: bool = False) -> RankResult:
    """
    Numerical rank, kernel basis and image basis of a matrix.

    Args:
        A: Complex matrix of shape (m, n).
        tol (float): Relative rank tolerance, defaults to settings.rank_tolerance.
        scale (float): Optional reference magnitude shared with related matrices.
        strict (bool): Reject singular values within a factor 10 of the threshold.

    Returns:
        RankResult: rank, orthonormal kernel basis in C^n, image basis made of pivot
        columns of A in C^m, and the sorted pivot column indices.

    Raises:
        AmbiguousRankError: If strict and the rank cannot be decided.
    """
    A = as_cmatrix(A)
    m, n = A.shape
    if m == 0 or n == 0:
        return RankResult(0, SubspaceBasis.standard(n), SubspaceBasis.empty(m), ())
    threshold = rank_threshold(A, tol, scale)
    _, singular, vh = scipy.linalg.svd(A, full_matrices=True)
    if threshold == 0.0:
        rank = 0
    else:
        rank = int(np.sum(singular > threshold))
        if strict:
            ambiguous = singular[(singular > threshold / 10.0) & (singular < threshold * 10.0)]
            if ambiguous.size:
                logger.error(f"Ambiguous rank: singular value {ambiguous[0]:.3e} near threshold {threshold:.3e}")
                raise AmbiguousRankError(
                    f"Singular value {ambiguous[0]:.3e} is within a factor 10 of the rank threshold {threshold:.3e}"
                )
    kernel = SubspaceBasis(n, vh[rank:].conj().T)
    if rank == 0:
        return RankResult(0, kernel, SubspaceBasis.empty(m), ())
    _, _, columns = scipy.linalg.qr(A, pivoting=True, mode="economic")
    pivots = tuple(sorted(int(c) for c in columns[:rank]))
    return RankResult(rank, kernel, SubspaceBasis(m, A[:, list(pivots)]), pivots)


def orthonormal_basis(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column span of a full column rank matrix."""
    if vectors.shape[1] == 0:
        return np.zeros((vectors.shape[0], 0), dtype=np.complex128)
    q, _ = scipy.linalg.qr(vectors, mode="economic")
    return q


def complement_basis(ambient: np.ndarray, subspace: np.ndarray) -> np.ndarray:
    """
    Orthonormal basis of span(ambient) ∩ span(subspace)^⊥.

    Args:
        ambient (ndarray): Orthonormal columns spanning Z.
        subspace (ndarray): Columns spanning B ⊆ Z, full column rank.

    Returns:
        ndarray: dim Z − dim B orthonormal columns completing B to a basis of Z.
    """
    wanted = ambient.shape[1] - subspace.shape[1]
    if wanted <= 0:
        return np.zeros((ambient.shape[0], 0), dtype=np.complex128)
    q = orthonormal_basis(subspace)
    residual = ambient - q @ (q.conj().T @ ambient)
    u, _, _ = scipy.linalg.svd(residual, full_matrices=False)
    return u[:, :wanted]


def coordinates(Y: np.ndarray, X: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """
    Least-squares coordinates C with Y = X·C.

    Raises:
        NotInSpanError: If some column of Y is not in span(X) within tolerance.
    """
    tol = settings.basis_tolerance if tol is None else tol
    if X.shape[1] == 0:
        if Y.size and np.linalg.norm(Y) > tol:
            raise NotInSpanError("Nonzero vectors are not in the span of an empty basis")
        return np.zeros((0, Y.shape[1]), dtype=np.complex128)
    coords, _, _, _ = scipy.linalg.lstsq(X, Y)
    residual = float(np.linalg.norm(X @ coords - Y)) if Y.size else 0.0
    if residual > tol * max(1.0, float(np.linalg.norm(Y))):
        logger.error(f"Vectors leave the span by residual {residual:.3e}")
        raise NotInSpanError(f"Vectors are not in the span of the reference basis (residual {residual:.3e})")
    return coords


def change_of_basis_det(Y: SubspaceBasis, X: SubspaceBasis, tol: Optional[float] = None) -> complex:
    """
    Determinant [Y/X] of the change of basis, y_1∧…∧y_k = [Y/X]·x_1∧…∧x_k.

    Args:
        Y (SubspaceBasis): The basis being expressed.
        X (SubspaceBasis): The reference basis.
        tol (float): Relative residual allowed for the in-span check.

    Returns:
        complex: det of the coordinate matrix of Y in X, 1 for empty bases.

    Raises:
        DimensionMismatchError: If counts or ambient dimensions differ.
        NotInSpanError: If a vector of Y is not in span(X).
    """
    if Y.ambient_dim != X.ambient_dim or Y.count != X.count:
        raise DimensionMismatchError(
            f"Cannot compare {Y.count} vectors in C^{Y.ambient_dim} with {X.count} vectors in C^{X.ambient_dim}"
        )
    if X.count == 0:
        return 1.0 + 0.0j
    return det(coordinates(Y.vectors, X.vectors, tol))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary matrix from the QR factorization of a Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = scipy.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def eigenvalues(A, seed: int = 0) -> np.ndarray:
    """
    Eigenvalues with multiplicity of a square complex matrix.

    LAPACK reduces to Hessenberg form and runs shifted QR. If that fails to
    converge, the computation is retried once on a random unitary similarity.

    Args:
        A: Square complex matrix.
        seed (int): Seed of the unitary used for the retry.

    Returns:
        ndarray: The n eigenvalues sorted by real then imaginary part.

    Raises:
        DimensionMismatchError: If A is not square.
        EigenvalueConvergenceError: If both attempts fail.
    """
    A = as_cmatrix(A)
    _require_square(A)
    if A.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128)
    try:
        values = scipy.linalg.eigvals(A)
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.warning(f"Eigenvalue iteration failed ({e}); retrying after a unitary similarity")
        Q = random_unitary(np.random.default_rng(seed), A.shape[0])
        try:
            values = scipy.linalg.eigvals(Q.conj().T @ A @ Q)
        except (np.linalg.LinAlgError, ValueError) as retry_error:
            logger.error(f"Eigenvalue iteration failed twice: {retry_error}")
            raise EigenvalueConvergenceError("Eigenvalue iteration did not converge") from retry_error
    if not np.all(np.isfinite(values)):
        raise EigenvalueConvergenceError("Eigenvalue iteration produced non-finite values")
    return np.sort_complex(values.astype(np.complex128))


def cluster_eigenvalues(values: Sequence[complex], tol: Optional[float] = None, scale: float = 1.0) -> List[Tuple[complex, int]]:
    """
    Groups eigenvalues lying within tol × max(1, scale) of each other.

    Returns:
        list: (mean value, multiplicity) pairs sorted by real part.
    """
    tol = (settings.cluster_tolerance if tol is None else tol) * max(1.0, scale)
    clusters: List[List[complex]] = []
    for value in np.sort_complex(np.asarray(values, dtype=np.complex128)):
        for cluster in clusters:
            if abs(value - cluster[0]) <= tol:
                cluster.append(value)
                break
        else:
            clusters.append([value])
    return [(complex(np.mean(c)), len(c)) for c in clusters]


def relative_error(a: complex, b: complex) -> float:
    """|a − b| relative to the larger modulus, 0 when both vanish."""
    reference = max(abs(a), abs(b))
    return 0.0 if reference == 0.0 else float(abs(a - b) / reference)


def spectral_projector(A, K: float, gap_tol: Optional[float] = None, degree: Optional[int] = None) -> SpectralProjector:
    """
    Projector onto the generalized eigenspaces of A with real part below K.

    The right invariant subspace V comes from a complex Schur form ordered so the
    selected eigenvalues lead; W is the orthogonal complement of the complementary
    invariant subspace, so P = V·(W^H·V)^{-1}·W^H.

    Args:
        A: Square complex matrix.
        K (float): Real-part threshold.
        gap_tol (float): Minimal |Re(lambda) − K|, defaults to settings.gap_tolerance.
        degree (int): Degree reported in a collision error.

    Returns:
        SpectralProjector: Projector with its range basis and left inverse.

    Raises:
        ThresholdCollisionError: If an eigenvalue lies within gap_tol of the line Re = K.
        SpectralSplitError: If the projector is not idempotent or does not commute with A.
    """
    gap_tol = settings.gap_tolerance if gap_tol is None else gap_tol
    A = as_cmatrix(A)
    _require_square(A)
    n = A.shape[0]
    values = eigenvalues(A)
    if n and np.min(np.abs(values.real - K)) < gap_tol:
        offending = values[np.argmin(np.abs(values.real - K))]
        logger.error(f"Threshold {K} collides with eigenvalue {offending} (degree {degree})")
        raise ThresholdCollisionError(degree, offending, K)
    selected = values[values.real < K]
    k = len(selected)
    if k == 0:
        V = np.zeros((n, 0), dtype=np.complex128)
        L = np.zeros((0, n), dtype=np.complex128)
    elif k == n:
        V = np.eye(n, dtype=np.complex128)
        L = np.eye(n, dtype=np.complex128)
    else:
        _, Z, sdim = scipy.linalg.schur(A, output="complex", sort=lambda x: x.real < K)
        _, Z_rest, sdim_rest = scipy.linalg.schur(A, output="complex", sort=lambda x: x.real > K)
        if sdim != k or sdim_rest != n - k:
            raise EigenvalueConvergenceError(
                f"Ordered Schur form selected {sdim} eigenvalues, expected {k}"
            )
        V = Z[:, :k]
        W = Z_rest[:, n - k:]
        L = scipy.linalg.solve(W.conj().T @ V, W.conj().T)
    projector = SpectralProjector(
        matrix=V @ L,
        selected=tuple(complex(v) for v in selected),
        threshold=float(K),
        range_basis=V,
        left_inverse=L,
        source=A,
    )
    residuals = projector.residuals()
    bound = settings.projector_tolerance * max(1.0, float(np.linalg.norm(A))) * max(1.0, float(np.linalg.norm(L))) ** 2
    worst = max(residuals["idempotence"], residuals["commutation"])
    if worst > bound:
        logger.error(f"Spectral projector residuals {residuals} exceed {bound:.3e}")
        raise SpectralSplitError(f"Projector at K={K} has residual {worst:.3e} above {bound:.3e}")
    return projector

from builtins import classmethod, int, len, max, range, str, tuple
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from app.dependencies import get_settings
from app.models.bicomplex_model import (
    ACYCLIC,
    Bicomplex,
    CochainComplex,
    DimensionProfile,
    GradedBasisChoice,
    TorsionScalar,
    ValidationIssue,
    ValidationReport,
)
from app.models.linalg_model import SubspaceBasis
from app.utils.exceptions import (
    AmbiguousRankError,
    DimensionMismatchError,
    InvalidBasisError,
    InvalidComplexError,
    MissingBasisError,
    NonAcyclicError,
)
from app.utils.linalg import (
    RankResult,
    change_of_basis_det,
    complement_basis,
    det,
    eigenvalues,
    rank_kernel_image,
)
from app.utils.random_gen import well_conditioned

settings = get_settings()
logger = logging.getLogger(__name__)

Chamber = Optional[Sequence[SubspaceBasis]]


class BicomplexService:
    """Cohomology, homology and torsion of complexes carrying both d and d*."""

    @classmethod
    def _rank(cls, bc: Bicomplex, matrix: np.ndarray, strict: bool = True) -> RankResult:
        return rank_kernel_image(matrix, settings.rank_tolerance, scale=bc.scale, strict=strict)

    @classmethod
    def _standard_chamber(cls, bc: Bicomplex, chamber: Chamber) -> Tuple[SubspaceBasis, ...]:
        if chamber is None:
            return tuple(SubspaceBasis.standard(n) for n in bc.dims)
        chamber = tuple(chamber)
        if len(chamber) != len(bc.dims) or any(c.ambient_dim != n or c.count != n for c, n in zip(chamber, bc.dims)):
            raise DimensionMismatchError("Chamber bases must be bases of every C^q")
        return chamber

    @classmethod
    def validate(cls, bc: Bicomplex) -> ValidationReport:
        """Lists closure failures and ambiguous ranks with their degree and residual."""
        issues: List[ValidationIssue] = []
        residuals = {}
        for q in range(bc.length - 1):
            first, second = bc.up(q), bc.up(q + 1)
            residual = float(np.linalg.norm(second @ first))
            residuals[f"d_squared[{q}]"] = residual
            if residual > settings.closure_tolerance * max(1.0, np.linalg.norm(first) * np.linalg.norm(second)):
                issues.append(ValidationIssue("d_squared", q, residual, f"d_{q + 1}·d_{q} != 0"))
        for q in range(2, bc.length + 1):
            first, second = bc.down(q), bc.down(q - 1)
            residual = float(np.linalg.norm(second @ first))
            residuals[f"dstar_squared[{q}]"] = residual
            if residual > settings.closure_tolerance * max(1.0, np.linalg.norm(first) * np.linalg.norm(second)):
                issues.append(ValidationIssue("dstar_squared", q, residual, f"d*_{q - 1}·d*_{q} != 0"))
        for q in range(bc.length + 1):
            for kind, matrix in (("d", bc.up(q)), ("dstar", bc.down(q))):
                try:
                    cls._rank(bc, matrix)
                except AmbiguousRankError as e:
                    issues.append(ValidationIssue("ambiguous_rank", q, 0.0, f"{kind}_{q}: {e}"))
        if issues:
            logger.warning(f"Bicomplex failed validation with {len(issues)} issue(s)")
        return ValidationReport(tuple(issues), residuals)

    @classmethod
    def ensure_valid(cls, bc: Bicomplex) -> None:
        report = cls.validate(bc)
        if not report.valid:
            first = report.issues[0]
            logger.error(f"Invalid bicomplex: {first.message} (residual {first.residual:.3e})")
            raise InvalidComplexError(f"Invalid bicomplex at degree {first.degree}: {first.message}")

    @classmethod
    def _quotient(cls, n: int, cycles: np.ndarray, boundaries: np.ndarray, what: str) -> Tuple[int, SubspaceBasis]:
        if boundaries.shape[1] > cycles.shape[1]:
            raise InvalidComplexError(f"{what}: boundaries exceed cycles, the differential does not square to zero")
        reps = complement_basis(cycles, boundaries)
        return reps.shape[1], SubspaceBasis(n, reps)

    @classmethod
    def cohomology(cls, bc: Bicomplex, q: int) -> Tuple[int, SubspaceBasis]:
        """dim H^q(C, d) and cocycles lifting a basis of it."""
        cocycles = cls._rank(bc, bc.up(q)).kernel.vectors
        coboundaries = cls._rank(bc, bc.up(q - 1)).image.vectors
        return cls._quotient(bc.dim(q), cocycles, coboundaries, f"H^{q}")

    @classmethod
    def homology(cls, bc: Bicomplex, q: int) -> Tuple[int, SubspaceBasis]:
        """dim H_q(C, d*) and cycles lifting a basis of it."""
        cycles = cls._rank(bc, bc.down(q)).kernel.vectors
        boundaries = cls._rank(bc, bc.down(q + 1)).image.vectors
        return cls._quotient(bc.dim(q), cycles, boundaries, f"H_{q}")

    @classmethod
    def default_basis(cls, bc: Bicomplex) -> GradedBasisChoice:
        degrees = range(bc.length + 1)
        return GradedBasisChoice(
            tuple(cls.cohomology(bc, q)[1] for q in degrees),
            tuple(cls.homology(bc, q)[1] for q in degrees),
        )

    @classmethod
    def dimension_profile(cls, bc: Bicomplex) -> DimensionProfile:
        degrees = range(bc.length + 1)
        up_ranks = [cls._rank(bc, bc.up(q)).rank for q in degrees]
        down_ranks = [cls._rank(bc, bc.down(q)).rank for q in degrees]
        s = tuple(up_ranks[q - 1] if q >= 1 else 0 for q in degrees)
        r = tuple(down_ranks[q + 1] if q < bc.length else 0 for q in degrees)
        v = tuple(bc.dims[q] - up_ranks[q] - s[q] for q in degrees)
        u = tuple(bc.dims[q] - down_ranks[q] - r[q] for q in degrees)
        if min(v + u, default=0) < 0:
            raise InvalidComplexError("Negative (co)homology dimension, the differentials do not square to zero")
        return DimensionProfile(bc.dims, s, r, v, u)

    @classmethod
    def sign_exponent(cls, bc: Bicomplex) -> int:
        return cls.dimension_profile(bc).sign_exponent()

    @classmethod
    def _check_representatives(cls, bc: Bicomplex, basis: GradedBasisChoice, profile: DimensionProfile) -> None:
        if len(basis.cohomology) != bc.length + 1:
            raise DimensionMismatchError(f"Basis covers {len(basis.cohomology)} degrees, complex has {bc.length + 1}")
        bound = settings.basis_tolerance * max(1.0, bc.scale)
        for q in range(bc.length + 1):
            for kind, reps, expected, matrix in (
                ("cohomology", basis.cohomology[q], profile.v(q), bc.up(q)),
                ("homology", basis.homology[q], profile.u(q), bc.down(q)),
            ):
                if reps.ambient_dim != bc.dim(q):
                    raise DimensionMismatchError(f"{kind} representatives in degree {q} live in C^{reps.ambient_dim}")
                if reps.count != expected:
                    raise InvalidBasisError(f"{kind} in degree {q} has dimension {expected}, got {reps.count} vectors")
                if reps.count == 0:
                    continue
                residual = float(np.linalg.norm(matrix @ reps.vectors))
                if residual > bound * max(1.0, float(np.linalg.norm(reps.vectors))):
                    logger.error(f"{kind} representatives in degree {q} are not closed (residual {residual:.3e})")
                    raise InvalidBasisError(f"{kind} representatives in degree {q} are not closed (residual {residual:.3e})")

    @classmethod
    def _lifts(cls, bc: Bicomplex, matrix: np.ndarray, lift_rng: Optional[np.random.Generator]) -> np.ndarray:
        """Domain vectors whose images form a basis of the image; pivot columns unless re-chosen at random."""
        result = cls._rank(bc, matrix)
        lifts = np.eye(matrix.shape[1], dtype=np.complex128)[:, list(result.pivots)]
        if lift_rng is not None and result.rank:
            kernel = result.kernel.vectors
            shift = kernel @ (lift_rng.standard_normal((kernel.shape[1], result.rank))
                              + 1j * lift_rng.standard_normal((kernel.shape[1], result.rank)))
            lifts = lifts @ well_conditioned(lift_rng, result.rank) + shift
        return lifts

    @classmethod
    def _block_det(cls, block: np.ndarray, chamber: SubspaceBasis, q: int) -> complex:
        n = chamber.ambient_dim
        if block.shape[1] != n:
            raise InvalidBasisError(f"Assembled {block.shape[1]} vectors in degree {q}, expected {n}")
        return change_of_basis_det(SubspaceBasis(n, block), chamber)

    @classmethod
    def milnor_tau(
        cls,
        bc: Bicomplex,
        cohomology_basis: Sequence[SubspaceBasis],
        chamber: Chamber = None,
        lift_rng: Optional[np.random.Generator] = None,
    ) -> complex:
        """
        Torsion isomorphism of the ascending complex, [prod_q [b^q, h^q, b~^{q+1} / c^q]^{(-1)^q}]^{-1}.

        Args:
            bc (Bicomplex): The complex, only d is used.
            cohomology_basis: Cocycle representatives per degree.
            chamber: Bases c^q of C^q, standard coordinates by default.
            lift_rng (Generator): When given, image bases and lifts are re-chosen at random.

        Returns:
            complex: The scalar tau.
        """
        chamber = cls._standard_chamber(bc, chamber)
        lifts = [cls._lifts(bc, bc.up(q), lift_rng) for q in range(bc.length + 1)]
        product = 1.0 + 0.0j
        for q in range(bc.length + 1):
            if q >= 1:
                images = bc.up(q - 1) @ lifts[q - 1]
            else:
                images = np.zeros((bc.dim(0), 0), dtype=np.complex128)
            block = np.hstack([images, cohomology_basis[q].vectors, lifts[q]])
            factor = cls._block_det(block, chamber[q], q)
            logger.debug(f"tau factor in degree {q}: {factor}")
            product *= factor ** ((-1) ** q)
        return 1.0 / product

    @classmethod
    def milnor_tau_prime(
        cls,
        bc: Bicomplex,
        homology_basis: Sequence[SubspaceBasis],
        chamber: Chamber = None,
        lift_rng: Optional[np.random.Generator] = None,
    ) -> complex:
        """Mirror of milnor_tau for the descending d*, blocks [b_q, h'_q, b~_{q-1}]."""
        chamber = cls._standard_chamber(bc, chamber)
        lifts = [cls._lifts(bc, bc.down(q), lift_rng) for q in range(bc.length + 1)]
        product = 1.0 + 0.0j
        for q in range(bc.length + 1):
            if q < bc.length:
                images = bc.down(q + 1) @ lifts[q + 1]
            else:
                images = np.zeros((bc.dim(q), 0), dtype=np.complex128)
            block = np.hstack([images, homology_basis[q].vectors, lifts[q]])
            factor = cls._block_det(block, chamber[q], q)
            logger.debug(f"tau' factor in degree {q}: {factor}")
            product *= factor ** ((-1) ** q)
        return 1.0 / product

    @classmethod
    def torsion(
        cls,
        bc: Bicomplex,
        basis: Optional[GradedBasisChoice] = None,
        chamber: Chamber = None,
        lift_rng: Optional[np.random.Generator] = None,
    ) -> TorsionScalar:
        """
        Bicomplex torsion (-1)^S · tau / tau' relative to the given bases.

        Args:
            bc (Bicomplex): A valid bicomplex.
            basis (GradedBasisChoice): Representatives, may be omitted for doubly acyclic input.
            chamber: Shared bases c^q, the result does not depend on them.
            lift_rng (Generator): Re-choose image bases and lifts at random.

        Returns:
            TorsionScalar: Value, exact sign exponent and basis record.

        Raises:
            MissingBasisError: If bases are omitted but the complex has (co)homology.
            InvalidBasisError: If the representatives are not closed or have the wrong count.
            DegenerateBasisError: If the representatives do not complete to a basis.
        """
        profile = cls.dimension_profile(bc)
        if basis is None:
            if not profile.doubly_acyclic:
                logger.error(
                    f"No bases supplied for H^* = {profile.cohomology_dims}, H_* = {profile.homology_dims}"
                )
                raise MissingBasisError(
                    f"Complex is not doubly acyclic (H^* dims {list(profile.cohomology_dims)}, "
                    f"H_* dims {list(profile.homology_dims)}); cohomology and homology bases are required"
                )
            basis, record = GradedBasisChoice.empty(bc.dims), ACYCLIC
        else:
            record = basis
        cls._check_representatives(bc, basis, profile)
        tau = cls.milnor_tau(bc, basis.cohomology, chamber, lift_rng)
        tau_prime = cls.milnor_tau_prime(bc, basis.homology, chamber, lift_rng)
        result = TorsionScalar(tau / tau_prime, profile.sign_exponent(), record)
        logger.info(f"Torsion of complex with dims {list(bc.dims)}: {result.value} (S = {result.sign_exponent})")
        return result

    @classmethod
    def _inverse(cls, matrix: np.ndarray) -> np.ndarray:
        if matrix.size == 0:
            return np.zeros_like(matrix)
        return scipy.linalg.inv(matrix)

    @classmethod
    def pairing_dual(
        cls,
        complex_: CochainComplex,
        chamber: Chamber = None,
        cohomology_basis: Optional[Sequence[SubspaceBasis]] = None,
    ) -> Tuple[Bicomplex, GradedBasisChoice]:
        """
        Builds d* as the transpose of d for the bilinear pairing making each chamber basis orthonormal.

        Args:
            complex_ (CochainComplex): The complex (C, d).
            chamber: Bases c^q declared orthonormal, standard coordinates by default.
            cohomology_basis: Cocycle representatives, computed when omitted.

        Returns:
            tuple: The bicomplex (C, d, d*) and bases whose homology part is pairing-dual to the cohomology part.
        """
        zero_dual = Bicomplex.from_cochain(
            complex_, [np.zeros((complex_.dim(q - 1), complex_.dim(q))) for q in range(1, complex_.length + 1)]
        )
        chamber = cls._standard_chamber(zero_dual, chamber)
        frames = [c.vectors for c in chamber]
        inverses = [cls._inverse(frame) for frame in frames]
        dstar = []
        for q in range(1, complex_.length + 1):
            reduced = inverses[q] @ complex_.up(q - 1) @ frames[q - 1]
            dstar.append(frames[q - 1] @ reduced.T @ inverses[q])
        bc = Bicomplex.from_cochain(complex_, dstar)
        if cohomology_basis is None:
            cohomology_basis = tuple(cls.cohomology(bc, q)[1] for q in range(bc.length + 1))
        homology = []
        for q in range(bc.length + 1):
            reps = cohomology_basis[q].vectors
            if reps.shape[1] == 0:
                homology.append(SubspaceBasis.empty(bc.dim(q)))
                continue
            cycles = cls._rank(bc, bc.down(q)).kernel.vectors
            pairing = reps.T @ (inverses[q].T @ inverses[q]) @ cycles
            homology.append(SubspaceBasis(bc.dim(q), cycles @ scipy.linalg.pinv(pairing)))
        return bc, GradedBasisChoice(tuple(cohomology_basis), tuple(homology))

    @classmethod
    def eigen_torsion(cls, bc: Bicomplex) -> complex:
        """
        [prod_q det(Laplacian_q)^{(-1)^q q}]^{-1}.

        Raises:
            NonAcyclicError: If some Laplacian has an eigenvalue near zero.
        """
        product = 1.0 + 0.0j
        for q in range(bc.length + 1):
            laplacian = bc.laplacian(q)
            if laplacian.size == 0:
                continue
            values = eigenvalues(laplacian)
            smallest = float(np.min(np.abs(values)))
            if smallest < settings.zero_eigenvalue_tolerance * max(1.0, float(np.linalg.norm(laplacian))):
                logger.error(f"Laplacian in degree {q} has eigenvalue of modulus {smallest:.3e}")
                raise NonAcyclicError(f"Laplacian in degree {q} is not invertible (|lambda| = {smallest:.3e})")
            exponent = (-1) ** q * q
            if exponent:
                product *= det(laplacian) ** exponent
        return 1.0 / product

    @classmethod
    def direct_sum(cls, first: Bicomplex, second: Bicomplex) -> Bicomplex:
        """Block-diagonal sum; the shorter complex is padded with zero-dimensional degrees."""
        length = max(first.length, second.length)
        dims = tuple(first.dim(q) + second.dim(q) for q in range(length + 1))
        d = tuple(scipy.linalg.block_diag(first.up(q), second.up(q)) for q in range(length))
        dstar = tuple(scipy.linalg.block_diag(first.down(q), second.down(q)) for q in range(1, length + 1))
        return Bicomplex(dims, d, dstar)

    @classmethod
    def direct_sum_basis(
        cls,
        first: Bicomplex,
        first_basis: GradedBasisChoice,
        second: Bicomplex,
        second_basis: Optional[GradedBasisChoice] = None,
    ) -> GradedBasisChoice:
        """Representatives of the direct sum, first summand's vectors first."""
        if second_basis is None:
            second_basis = GradedBasisChoice.empty(second.dims)
        length = max(first.length, second.length)

        def combine(a: Sequence[SubspaceBasis], a_bc: Bicomplex, b: Sequence[SubspaceBasis], b_bc: Bicomplex):
            combined = []
            for q in range(length + 1):
                left = a[q].vectors if q <= a_bc.length else np.zeros((0, 0))
                right = b[q].vectors if q <= b_bc.length else np.zeros((0, 0))
                combined.append(SubspaceBasis(a_bc.dim(q) + b_bc.dim(q), scipy.linalg.block_diag(left, right)))
            return tuple(combined)

        return GradedBasisChoice(
            combine(first_basis.cohomology, first, second_basis.cohomology, second),
            combine(first_basis.homology, first, second_basis.homology, second),
        )

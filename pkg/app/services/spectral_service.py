from builtins import classmethod, float, len, max, range, tuple
import logging
from typing import List, Optional, Sequence

import numpy as np

from app.dependencies import get_settings
from app.models.bicomplex_model import ACYCLIC, Bicomplex, GradedBasisChoice, TorsionScalar
from app.models.linalg_model import SubspaceBasis
from app.models.spectral_model import (
    PerturbationProbe,
    ProbeReport,
    SpectralSplit,
    ThresholdRatioReport,
    ZetaReport,
)
from app.services.bicomplex_service import BicomplexService
from app.utils.exceptions import (
    BranchCutError,
    InputError,
    MissingBasisError,
    ProjectionDegeneracyError,
    SpectralSplitError,
)
from app.utils.linalg import cluster_eigenvalues, eigenvalues, relative_error, spectral_projector

settings = get_settings()
logger = logging.getLogger(__name__)

ZERO_CLOUD_RADIUS = 1e-2


class SpectralService:
    """Laplacian spectra, threshold splittings and the zeta-regularized torsion."""

    @classmethod
    def spectrum(cls, bc: Bicomplex) -> List[np.ndarray]:
        """Laplacian eigenvalues per degree."""
        return [eigenvalues(bc.laplacian(q)) for q in range(bc.length + 1)]

    @classmethod
    def split(cls, bc: Bicomplex, K: float, gap_tol: Optional[float] = None) -> SpectralSplit:
        """
        Splits the complex into generalized eigenmodes with Re(lambda) < K and the rest.

        Args:
            bc (Bicomplex): A valid bicomplex.
            K (float): Threshold, any real number.
            gap_tol (float): Minimal distance of every Re(lambda) from K.

        Returns:
            SpectralSplit: The small subcomplex in range-basis coordinates and the large eigenvalues.

        Raises:
            ThresholdCollisionError: If a Laplacian eigenvalue lies on the line Re = K.
            SpectralSplitError: If the compressed differentials do not close on the small subspaces.
        """
        degrees = range(bc.length + 1)
        projectors = tuple(spectral_projector(bc.laplacian(q), K, gap_tol, degree=q) for q in degrees)
        large = tuple(
            tuple(complex(v) for v in eigenvalues(bc.laplacian(q)) if v.real > K) for q in degrees
        )
        frames = [p.range_basis for p in projectors]
        lefts = [p.left_inverse for p in projectors]
        residuals = {}
        small_d, small_dstar = [], []
        for q in range(bc.length):
            for label, matrix, source, target, store in (
                (f"d[{q}]", bc.up(q), q, q + 1, small_d),
                (f"dstar[{q + 1}]", bc.down(q + 1), q + 1, q, small_dstar),
            ):
                compressed = lefts[target] @ matrix @ frames[source]
                residual = float(np.linalg.norm(matrix @ frames[source] - frames[target] @ compressed)) \
                    if compressed.size else 0.0
                residuals[label] = residual
                bound = settings.basis_tolerance * max(1.0, float(np.linalg.norm(matrix))) \
                    * max(1.0, float(np.linalg.norm(lefts[target])))
                if residual > bound:
                    logger.error(f"Compressed {label} leaves the small subspace (residual {residual:.3e})")
                    raise SpectralSplitError(f"Restricted {label} does not close at K={K} (residual {residual:.3e})")
                store.append(compressed)
        small = Bicomplex(
            tuple(f.shape[1] for f in frames), tuple(small_d), tuple(small_dstar), reference_scale=bc.scale
        )
        logger.info(f"Split at K={K}: small dims {list(small.dims)}, large counts {[len(v) for v in large]}")
        return SpectralSplit(float(K), projectors, small, large, residuals)

    @classmethod
    def zeta_prime_at_zero(cls, values: Sequence[complex], degree: Optional[int] = None) -> complex:
        """
        -sum_k Log(lambda_k) with the principal branch, Im Log in (-pi, pi].

        Raises:
            BranchCutError: If an eigenvalue is zero or lies on the negative real axis.
        """
        tol = settings.branch_cut_tolerance
        total = 0.0 + 0.0j
        for value in values:
            value = complex(value)
            if abs(value) <= tol or np.pi - abs(np.angle(value)) <= tol:
                logger.error(f"Eigenvalue {value} on the branch cut (degree {degree})")
                raise BranchCutError(value, degree)
            total += np.log(value)
        return -total

    @classmethod
    def zeta_report(cls, split: SpectralSplit) -> ZetaReport:
        zeta_primes = tuple(
            cls.zeta_prime_at_zero(values, q) for q, values in enumerate(split.large_eigenvalues)
        )
        exponent = sum((-1) ** q * q * z for q, z in enumerate(zeta_primes))
        return ZetaReport(zeta_primes, complex(np.exp(exponent / 2.0)), complex(np.exp(exponent)))

    @classmethod
    def ray_singer_term(cls, split: SpectralSplit) -> complex:
        """exp((1/2) sum_q (-1)^q q zeta'_q(0))."""
        return cls.zeta_report(split).ray_singer

    @classmethod
    def project_basis(cls, split: SpectralSplit, basis: GradedBasisChoice) -> GradedBasisChoice:
        """
        Coordinates of the projected representatives in the small subcomplex.

        Raises:
            ProjectionDegeneracyError: If a projected family loses rank.
        """
        projected = []
        for family in (basis.cohomology, basis.homology):
            degree_bases = []
            for q, reps in enumerate(family):
                left = split.projectors[q].left_inverse
                coords = left @ reps.vectors
                if reps.count and np.linalg.matrix_rank(coords) < reps.count:
                    logger.error(f"Projection of degree {q} representatives loses rank at K={split.threshold}")
                    raise ProjectionDegeneracyError(
                        f"Projected representatives in degree {q} are degenerate at K={split.threshold}"
                    )
                degree_bases.append(SubspaceBasis(left.shape[0], coords))
            projected.append(tuple(degree_bases))
        return GradedBasisChoice(projected[0], projected[1])

    @classmethod
    def total_torsion(
        cls,
        bc: Bicomplex,
        K: float,
        basis: Optional[GradedBasisChoice] = None,
        gap_tol: Optional[float] = None,
    ) -> TorsionScalar:
        """
        Torsion of the small subcomplex times the squared Ray-Singer term of the large eigenvalues.

        Args:
            bc (Bicomplex): A valid bicomplex.
            K (float): Threshold.
            basis (GradedBasisChoice): Representatives in the whole complex, projected into the small part.
            gap_tol (float): Threshold gap tolerance.

        Returns:
            TorsionScalar: A value independent of K, recorded against the ambient bases.
        """
        split = cls.split(bc, K, gap_tol)
        if basis is None:
            profile = BicomplexService.dimension_profile(bc)
            if not profile.doubly_acyclic:
                raise MissingBasisError("Complex is not doubly acyclic; cohomology and homology bases are required")
            small_basis, record = None, ACYCLIC
        else:
            small_basis, record = cls.project_basis(split, basis), basis
        small = BicomplexService.torsion(split.small, small_basis)
        zeta = cls.zeta_report(split)
        result = TorsionScalar(small.unsigned_value * zeta.ray_singer_squared, small.sign_exponent, record)
        logger.info(f"Total torsion at K={K}: {result.value}")
        return result

    @classmethod
    def admissible_thresholds(cls, bc: Bicomplex, gap_tol: Optional[float] = None) -> List[float]:
        """
        Thresholds in the gaps of the Laplacian real parts.

        Candidates are one value below all real parts, the midpoints of gaps between
        distinct real parts, and one value above all. A candidate is kept when it clears
        the gap tolerance and no eigenvalue above it is zero or on the negative real axis.
        For complexes with (co)homology it must also be positive and above the zero modes.
        """
        gap_tol = settings.gap_tolerance if gap_tol is None else gap_tol
        values = np.concatenate([np.asarray(v) for v in cls.spectrum(bc)] + [np.zeros(0, dtype=np.complex128)])
        if values.size == 0:
            return [1.0]
        clusters = cluster_eigenvalues(values.real, scale=float(np.max(np.abs(values))))
        distinct = [center.real for center, _ in clusters]
        candidates = [distinct[0] - 1.0]
        candidates += [(a + b) / 2.0 for a, b in zip(distinct, distinct[1:]) if b - a > 2.0 * gap_tol]
        candidates.append(distinct[-1] + 1.0)
        # with (co)homology the zero modes must stay small; a defective zero eigenvalue is computed as a small cloud
        floor = -np.inf
        if not BicomplexService.dimension_profile(bc).doubly_acyclic:
            radius = ZERO_CLOUD_RADIUS * max(1.0, float(np.max(np.abs(values))))
            floor = max(0.0, float(np.max(values.real[np.abs(values) <= radius], initial=0.0)))
        admissible = []
        for K in candidates:
            if K <= floor or np.min(np.abs(values.real - K)) < gap_tol:
                continue
            large = values[values.real > K]
            off_cut = all(
                abs(v) > settings.branch_cut_tolerance and np.pi - abs(np.angle(v)) > settings.branch_cut_tolerance
                for v in large
            )
            if off_cut:
                admissible.append(float(K))
        return admissible

    @classmethod
    def k_ratio_check(
        cls,
        bc: Bicomplex,
        K: float,
        L: float,
        basis: Optional[GradedBasisChoice] = None,
        gap_tol: Optional[float] = None,
    ) -> ThresholdRatioReport:
        """
        Verifies how the zeta data and the total torsion change between thresholds K < L.

        Checks [RS(K)/RS(L)]^2 against the bracketed eigenvalue product, each zeta'_K(0) - zeta'_L(0)
        against -sum Log(lambda) over the bracketed eigenvalues, and total torsion at K against L.
        """
        if not K < L:
            raise InputError(f"Thresholds must satisfy K < L, got K={K}, L={L}")
        split_k, split_l = cls.split(bc, K, gap_tol), cls.split(bc, L, gap_tol)
        zeta_k, zeta_l = cls.zeta_report(split_k), cls.zeta_report(split_l)
        bracketed = tuple(tuple(v for v in values if v.real < L) for values in split_k.large_eigenvalues)
        product = 1.0 + 0.0j
        for q, values in enumerate(bracketed):
            if values:
                product *= complex(np.prod(values)) ** ((-1) ** q * q)
        eigenvalue_product = 1.0 / product
        ratio_squared = zeta_k.ray_singer_squared / zeta_l.ray_singer_squared
        differences = tuple(a - b for a, b in zip(zeta_k.zeta_primes, zeta_l.zeta_primes))
        log_sums = tuple(cls.zeta_prime_at_zero(values, q) for q, values in enumerate(bracketed))
        zeta_deviation = max((abs(a - b) for a, b in zip(differences, log_sums)), default=0.0)

        if basis is None and not BicomplexService.dimension_profile(bc).doubly_acyclic:
            basis = BicomplexService.default_basis(bc)
        small_k = BicomplexService.torsion(split_k.small, None if basis is None else cls.project_basis(split_k, basis))
        small_l = BicomplexService.torsion(split_l.small, None if basis is None else cls.project_basis(split_l, basis))
        stabilization = relative_error(small_l.value, small_k.value * eigenvalue_product)

        report = ThresholdRatioReport(
            lower=float(K),
            upper=float(L),
            bracketed=bracketed,
            ratio_squared=ratio_squared,
            eigenvalue_product=eigenvalue_product,
            zeta_differences=differences,
            log_sums=log_sums,
            ratio_deviation=relative_error(ratio_squared, eigenvalue_product),
            zeta_deviation=float(zeta_deviation),
            stabilization_deviation=stabilization,
        )
        logger.info(f"Threshold change {K} -> {L}: max deviation {report.max_deviation:.3e}")
        return report

    @classmethod
    def strip_and_parabola_check(cls, probe: PerturbationProbe, margin: Optional[float] = None) -> ProbeReport:
        """
        Checks |Im(lambda)| <= ||alpha|| for D + alpha and Re(mu) >= Im(mu)^2 / (4||alpha||^2) - ||alpha||^2
        for the eigenvalues mu of (D + alpha)^2; with alpha = 0 the squared spectrum must be real and non-negative.
        """
        margin = settings.probe_margin if margin is None else margin
        operator = probe.base + probe.perturbation
        scale = max(1.0, float(np.linalg.norm(operator, ord=2))) if operator.size else 1.0
        norm = probe.norm
        values = eigenvalues(operator)
        squared = eigenvalues(operator @ operator)
        max_imaginary = float(np.max(np.abs(values.imag))) if values.size else 0.0
        strip_violation = max(0.0, max_imaginary - norm)
        if squared.size == 0:
            parabola_violation = 0.0
        elif norm > 0.0:
            bound = squared.imag ** 2 / (4.0 * norm ** 2) - norm ** 2
            parabola_violation = max(0.0, float(np.max(bound - squared.real)))
        else:
            parabola_violation = max(0.0, float(np.max(np.abs(squared.imag))), float(np.max(-squared.real)))
        return ProbeReport(
            norm=norm,
            max_imaginary=max_imaginary,
            strip_violation=strip_violation,
            parabola_violation=parabola_violation,
            strip_margin=margin,
            parabola_margin=margin * scale ** 2,
        )

from builtins import bool, float, int, len, max, property, tuple
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from app.models.bicomplex_model import Bicomplex
from app.models.linalg_model import SpectralProjector, SubspaceBasis
from app.utils.exceptions import InputError

HERMITIAN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SpectralSplit:
    """
    Splitting of a bicomplex at the threshold Re(lambda) = K of its Laplacians.

    Attributes:
        threshold (float): K.
        projectors (tuple): Per-degree projector onto the small generalized eigenspaces.
        small (Bicomplex): Restriction of d and d* to the small subspaces, in range-basis coordinates.
        large_eigenvalues (tuple): Per-degree Laplacian eigenvalues with Re(lambda) > K.
        residuals (dict): Closure residuals of the compressed differentials.
    """
    threshold: float
    projectors: Tuple[SpectralProjector, ...]
    small: Bicomplex
    large_eigenvalues: Tuple[Tuple[complex, ...], ...]
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def small_dims(self) -> Tuple[int, ...]:
        return self.small.dims

    @property
    def large_counts(self) -> Tuple[int, ...]:
        return tuple(len(values) for values in self.large_eigenvalues)

    def basis(self, q: int) -> SubspaceBasis:
        """Small-mode subspace of C^q."""
        frame = self.projectors[q].range_basis
        return SubspaceBasis(frame.shape[0], frame)


@dataclass(frozen=True)
class ZetaReport:
    """
    Exact finite-spectrum zeta data of a split.

    Attributes:
        zeta_primes (tuple): zeta'_q(0) = -sum of principal logarithms of the large eigenvalues.
        ray_singer (complex): exp((1/2) sum_q (-1)^q q zeta'_q(0)).
        ray_singer_squared (complex): exp(sum_q (-1)^q q zeta'_q(0)).
    """
    zeta_primes: Tuple[complex, ...]
    ray_singer: complex
    ray_singer_squared: complex


@dataclass(frozen=True)
class PerturbationProbe:
    """
    Self-adjoint operator D with a perturbation alpha.

    Attributes:
        base (ndarray): Hermitian matrix D.
        perturbation (ndarray): Matrix alpha of the same size.
    """
    base: np.ndarray
    perturbation: np.ndarray

    def __post_init__(self):
        base = np.array(self.base, dtype=np.complex128)
        perturbation = np.array(self.perturbation, dtype=np.complex128)
        if base.ndim != 2 or base.shape[0] != base.shape[1] or perturbation.shape != base.shape:
            raise InputError(f"Probe needs square matrices of equal size, got {base.shape} and {perturbation.shape}")
        if base.size and np.max(np.abs(base - base.conj().T)) > HERMITIAN_TOLERANCE:
            raise InputError("Probe base operator must be Hermitian")
        base.setflags(write=False)
        perturbation.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "perturbation", perturbation)

    @property
    def dimension(self) -> int:
        return self.base.shape[0]

    @property
    def norm(self) -> float:
        """Operator 2-norm of alpha."""
        if self.perturbation.size == 0:
            return 0.0
        return float(np.linalg.norm(self.perturbation, ord=2))


@dataclass(frozen=True)
class ThresholdRatioReport:
    """
    Comparison of two thresholds K < L on the same complex.

    Attributes:
        lower (float): K.
        upper (float): L.
        bracketed (tuple): Per-degree eigenvalues with K < Re(lambda) < L.
        ratio_squared (complex): [RS(K) / RS(L)]^2 from the zeta data.
        eigenvalue_product (complex): [prod_q (prod lambda)^{(-1)^q q}]^{-1} over the bracketed eigenvalues.
        zeta_differences (tuple): Per-degree zeta'_K(0) - zeta'_L(0).
        log_sums (tuple): Per-degree -sum Log(lambda) over the bracketed eigenvalues.
        ratio_deviation (float): Relative deviation between ratio_squared and eigenvalue_product.
        zeta_deviation (float): Largest absolute deviation between zeta_differences and log_sums.
        stabilization_deviation (float): Relative deviation of total torsion between K and L.
    """
    lower: float
    upper: float
    bracketed: Tuple[Tuple[complex, ...], ...]
    ratio_squared: complex
    eigenvalue_product: complex
    zeta_differences: Tuple[complex, ...]
    log_sums: Tuple[complex, ...]
    ratio_deviation: float
    zeta_deviation: float
    stabilization_deviation: float

    @property
    def max_deviation(self) -> float:
        return max(self.ratio_deviation, self.zeta_deviation, self.stabilization_deviation)


@dataclass(frozen=True)
class ProbeReport:
    """
    Spectrum bounds of D + alpha.

    Attributes:
        norm (float): Operator norm of alpha.
        max_imaginary (float): Largest |Im(lambda)| over eigenvalues of D + alpha.
        strip_violation (float): Amount by which |Im(lambda)| exceeds the norm, 0 when inside.
        parabola_violation (float): Amount by which an eigenvalue of (D + alpha)^2 leaves the parabola.
        strip_margin (float): Slack allowed for the strip bound, linear in the operator scale.
        parabola_margin (float): Slack allowed for the parabola bound, quadratic in the operator scale.
    """
    norm: float
    max_imaginary: float
    strip_violation: float
    parabola_violation: float
    strip_margin: float
    parabola_margin: float

    @property
    def passed(self) -> bool:
        return self.strip_violation <= self.strip_margin and self.parabola_violation <= self.parabola_margin

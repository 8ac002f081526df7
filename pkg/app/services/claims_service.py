from builtins import classmethod, float, int, len, max, range
from dataclasses import dataclass, field
import logging
from typing import Callable, Dict, List, Optional

import numpy as np

from app.dependencies import get_settings
from app.schemas.report_schemas import ClaimSuite
from app.services.bicomplex_service import BicomplexService
from app.services.spectral_service import SpectralService
from app.utils.exceptions import InputError, TorsionError
from app.utils.linalg import relative_error
from app.utils.random_gen import (
    GeneratorMode,
    random_bicomplex,
    random_chamber,
    random_cochain_complex,
    random_dims,
    random_probe,
    trial_rng,
)

settings = get_settings()
logger = logging.getLogger(__name__)

# thresholds closer than this to an eigenvalue real part make the projectors too ill-conditioned to compare
SUITE_GAP = 1e-2


@dataclass
class SuiteResult:
    """
    Outcome of a randomized property suite.

    Attributes:
        suite (str): Suite name.
        trials (int): Number of trials run.
        tolerance (float): Largest accepted error.
        errors (dict): Error per trial index.
        failures (list): Trial indices whose error exceeded the tolerance or raised.
        messages (dict): Exception type and message per trial that raised.
    """
    suite: str
    trials: int
    tolerance: float
    errors: Dict[int, float] = field(default_factory=dict)
    failures: List[int] = field(default_factory=list)
    messages: Dict[int, str] = field(default_factory=dict)

    @property
    def worst_error(self) -> float:
        return max(self.errors.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return not self.failures


class ClaimsService:
    """Seeded property suites; trial t draws from its own stream derived from (seed, t)."""

    @classmethod
    def pairing_trial(cls, rng: np.random.Generator) -> float:
        """Torsion of the pairing-dual bicomplex against the square of tau."""
        length = int(rng.integers(1, 5))
        complex_ = random_cochain_complex(rng, random_dims(rng, length, max_dim=4))
        chamber = random_chamber(rng, complex_.dims)
        bc, basis = BicomplexService.pairing_dual(complex_, chamber)
        tau = BicomplexService.milnor_tau(bc, basis.cohomology, chamber)
        return relative_error(BicomplexService.torsion(bc, basis).value, tau ** 2)

    @classmethod
    def eigenvalue_trial(cls, rng: np.random.Generator) -> float:
        """Torsion of a doubly acyclic bicomplex against the Laplacian determinant product."""
        bc = random_bicomplex(int(rng.integers(1, 5)), rng=rng, max_dim=6)
        return relative_error(BicomplexService.torsion(bc).value, BicomplexService.eigen_torsion(bc))

    @classmethod
    def direct_sum_trial(cls, rng: np.random.Generator) -> float:
        """Multiplicativity of torsion under a direct sum with a doubly acyclic complex."""
        first = random_bicomplex(int(rng.integers(1, 4)), rng=rng, mode=GeneratorMode.ARBITRARY, max_dim=4)
        second = random_bicomplex(int(rng.integers(1, 4)), rng=rng, max_dim=4)
        basis = BicomplexService.default_basis(first)
        total = BicomplexService.direct_sum(first, second)
        combined = BicomplexService.torsion(total, BicomplexService.direct_sum_basis(first, basis, second))
        expected = BicomplexService.torsion(first, basis).value * BicomplexService.torsion(second).value
        return relative_error(combined.value, expected)

    @classmethod
    def threshold_trial(cls, rng: np.random.Generator, trial: int = 0) -> float:
        """Agreement of total torsion across admissible thresholds, plus the exact threshold-change identities."""
        length = int(rng.integers(1, 4))
        if trial % 2:
            bc = random_bicomplex(length, rng=rng, mode=GeneratorMode.ARBITRARY, max_dim=5)
            basis = BicomplexService.default_basis(bc)
        else:
            bc = random_bicomplex(length, rng=rng, max_dim=5)
            basis = None
        thresholds = SpectralService.admissible_thresholds(bc, gap_tol=SUITE_GAP)
        totals = [SpectralService.total_torsion(bc, K, basis, gap_tol=SUITE_GAP).value for K in thresholds]
        error = max((relative_error(a, totals[0]) for a in totals), default=0.0)
        for lower, upper in zip(thresholds, thresholds[1:]):
            report = SpectralService.k_ratio_check(bc, lower, upper, basis, gap_tol=SUITE_GAP)
            identity_error = max(report.ratio_deviation, report.zeta_deviation)
            if identity_error > settings.identity_tolerance:
                logger.warning(f"Threshold identities off by {identity_error:.3e} between {lower} and {upper}")
                return float("inf")
            error = max(error, report.stabilization_deviation)
        return error

    @classmethod
    def run(
        cls,
        suite: ClaimSuite,
        trials: int,
        seed: int,
        tolerance: Optional[float] = None,
    ) -> SuiteResult:
        """
        Runs one randomized suite.

        Args:
            suite (ClaimSuite): a (pairing duality), b (eigenvalue formula), c (direct sums) or k (thresholds).
            trials (int): Number of trials, at least 1.
            seed (int): Seed the per-trial streams derive from.
            tolerance (float): Relative error accepted per trial, settings.agreement_tolerance by default.

        Returns:
            SuiteResult: Errors keyed by trial index and the failing trials.
        """
        if trials < 1:
            raise InputError("A claim suite needs at least one trial")
        suite = ClaimSuite(suite)
        tolerance = settings.agreement_tolerance if tolerance is None else tolerance
        runners: Dict[ClaimSuite, Callable[[np.random.Generator, int], float]] = {
            ClaimSuite.PAIRING: lambda rng, t: cls.pairing_trial(rng),
            ClaimSuite.EIGENVALUES: lambda rng, t: cls.eigenvalue_trial(rng),
            ClaimSuite.DIRECT_SUM: lambda rng, t: cls.direct_sum_trial(rng),
            ClaimSuite.THRESHOLDS: cls.threshold_trial,
        }
        result = SuiteResult(suite.value, trials, tolerance)
        for trial in range(trials):
            try:
                error = runners[suite](trial_rng(seed, trial), trial)
            except (TorsionError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
                logger.warning(f"Suite {suite.value} trial {trial} raised {type(e).__name__}: {e}")
                result.messages[trial] = f"{type(e).__name__}: {e}"
                error = float("inf")
            result.errors[trial] = float(error)
            if not error <= tolerance:
                result.failures.append(trial)
        logger.info(
            f"Suite {suite.value}: {len(result.failures)} failure(s) in {trials} trials, worst error {result.worst_error:.3e}"
        )
        return result

    @classmethod
    def probe_suite(cls, trials: int, seed: int, dimension: int = 10, zero_alpha: bool = False) -> SuiteResult:
        """Strip and parabola bounds for random Hermitian operators with random perturbations."""
        if trials < 1 or dimension < 1:
            raise InputError("Probes need at least one trial and dimension at least 1")
        result = SuiteResult("probe", trials, settings.probe_margin)
        for trial in range(trials):
            rng = trial_rng(seed, trial)
            probe = random_probe(rng, int(rng.integers(1, dimension + 1)), zero_alpha)
            report = SpectralService.strip_and_parabola_check(probe)
            result.errors[trial] = max(report.strip_violation, report.parabola_violation)
            if not report.passed:
                result.failures.append(trial)
        logger.info(f"Probe suite: {len(result.failures)} violation(s) in {trials} trials")
        return result

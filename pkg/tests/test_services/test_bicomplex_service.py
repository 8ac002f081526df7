from builtins import range
import numpy as np
import pytest

from app.models.bicomplex_model import Bicomplex, GradedBasisChoice
from app.models.linalg_model import SubspaceBasis
from app.services.bicomplex_service import BicomplexService
from app.utils.exceptions import (
    InvalidBasisError,
    InvalidComplexError,
    MissingBasisError,
    NonAcyclicError,
)
from app.utils.linalg import relative_error
from app.utils.random_gen import (
    GeneratorMode,
    random_bicomplex,
    random_chamber,
    random_cochain_complex,
    random_dims,
    trial_rng,
)

TOLERANCE = 1e-8


def _scaled(basis, family, q, factor):
    """Copy of basis with the degree-q representatives of one family multiplied by factor."""
    bases = {"cohomology": list(basis.cohomology), "homology": list(basis.homology)}
    reps = bases[family][q]
    bases[family][q] = SubspaceBasis(reps.ambient_dim, reps.vectors * factor)
    return GradedBasisChoice(tuple(bases["cohomology"]), tuple(bases["homology"]))

# === Validation ===

def test_validate_golden(golden_bicomplex):
    report = BicomplexService.validate(golden_bicomplex)
    assert report.valid
    assert report.issues == ()

def test_validate_reports_non_closed_differential():
    bc = Bicomplex((1, 1, 1), (np.eye(1), np.eye(1)), (np.zeros((1, 1)), np.zeros((1, 1))))
    report = BicomplexService.validate(bc)
    assert not report.valid
    assert report.issues[0].kind == "d_squared"
    assert report.issues[0].degree == 0
    assert report.residuals["d_squared[0]"] == pytest.approx(1.0)
    with pytest.raises(InvalidComplexError):
        BicomplexService.ensure_valid(bc)

def test_validate_reports_ambiguous_rank():
    bc = Bicomplex((2, 2), (np.diag([1.0, 4e-10]),), (np.zeros((2, 2)),))
    report = BicomplexService.validate(bc)
    assert any(issue.kind == "ambiguous_rank" for issue in report.issues)

# === Dimensions ===

def test_cohomology_of_zero_complex(zero_bicomplex):
    for q in range(2):
        assert BicomplexService.cohomology(zero_bicomplex, q)[0] == 1
        assert BicomplexService.homology(zero_bicomplex, q)[0] == 1

def test_dimension_profile_of_golden(golden_bicomplex):
    profile = BicomplexService.dimension_profile(golden_bicomplex)
    assert profile.coboundary_dims == (0, 1)
    assert profile.boundary_dims == (1, 0)
    assert profile.doubly_acyclic
    assert BicomplexService.sign_exponent(golden_bicomplex) == 0

def test_dimension_identities_on_random_complex(arbitrary_bicomplex):
    profile = BicomplexService.dimension_profile(arbitrary_bicomplex)
    assert all(profile.identities().values())
    basis = BicomplexService.default_basis(arbitrary_bicomplex)
    assert basis.cohomology_dims == list(profile.cohomology_dims)
    assert basis.homology_dims == list(profile.homology_dims)

# === Torsion ===

def test_golden_torsion(golden_bicomplex):
    result = BicomplexService.torsion(golden_bicomplex)
    assert result.value == pytest.approx(6.0)
    assert result.sign_exponent == 0
    assert result.is_acyclic

def test_identity_torsion(identity_bicomplex):
    assert BicomplexService.torsion(identity_bicomplex).value == pytest.approx(1.0)

def test_golden_tau_and_tau_prime(golden_bicomplex):
    empty = GradedBasisChoice.empty(golden_bicomplex.dims)
    assert BicomplexService.milnor_tau(golden_bicomplex, empty.cohomology) == pytest.approx(2.0)
    assert BicomplexService.milnor_tau_prime(golden_bicomplex, empty.homology) == pytest.approx(1.0 / 3.0)

def test_missing_bases(zero_bicomplex):
    with pytest.raises(MissingBasisError):
        BicomplexService.torsion(zero_bicomplex)

def test_zero_complex_with_bases(zero_bicomplex, zero_basis):
    result = BicomplexService.torsion(zero_bicomplex, zero_basis)
    assert result.value == pytest.approx(1.0)
    assert not result.is_acyclic

@pytest.mark.parametrize("family, q, expected", [
    ("cohomology", 0, 0.5),
    ("cohomology", 1, 2.0),
    ("homology", 0, 2.0),
    ("homology", 1, 0.5),
])
def test_basis_scaling_covariance(zero_bicomplex, zero_basis, family, q, expected):
    result = BicomplexService.torsion(zero_bicomplex, _scaled(zero_basis, family, q, 2.0))
    assert result.value == pytest.approx(expected)

def test_wrong_basis_count(zero_bicomplex):
    with pytest.raises(InvalidBasisError):
        BicomplexService.torsion(zero_bicomplex, GradedBasisChoice.empty(zero_bicomplex.dims))

def test_non_closed_representative():
    bc = Bicomplex((2, 1), (np.array([[1.0, 0.0]]),), (np.zeros((2, 1)),))
    e1, e2 = np.eye(2)[:, :1], np.eye(2)[:, 1:]
    good = GradedBasisChoice(
        (SubspaceBasis(2, e2), SubspaceBasis.empty(1)),
        (SubspaceBasis.standard(2), SubspaceBasis.standard(1)),
    )
    assert BicomplexService.torsion(bc, good).value != 0
    bad = GradedBasisChoice((SubspaceBasis(2, e1), SubspaceBasis.empty(1)), good.homology)
    with pytest.raises(InvalidBasisError):
        BicomplexService.torsion(bc, bad)

def test_odd_sign_exponent_matches_eigenvalues():
    bc = random_bicomplex(2, dims=(1, 2, 1), seed=3)
    result = BicomplexService.torsion(bc)
    assert result.sign_exponent == 1
    assert result.sign == -1
    assert relative_error(result.value, BicomplexService.eigen_torsion(bc)) < TOLERANCE

def test_chamber_independence(arbitrary_bicomplex, rng):
    basis = BicomplexService.default_basis(arbitrary_bicomplex)
    plain = BicomplexService.torsion(arbitrary_bicomplex, basis).value
    chamber = random_chamber(rng, arbitrary_bicomplex.dims)
    assert relative_error(BicomplexService.torsion(arbitrary_bicomplex, basis, chamber).value, plain) < TOLERANCE

def test_lift_independence(arbitrary_bicomplex, rng):
    basis = BicomplexService.default_basis(arbitrary_bicomplex)
    plain = BicomplexService.torsion(arbitrary_bicomplex, basis).value
    mixed = BicomplexService.torsion(arbitrary_bicomplex, basis, lift_rng=rng).value
    assert relative_error(mixed, plain) < TOLERANCE

# === Eigenvalue formula ===

def test_eigen_torsion_golden(golden_bicomplex):
    assert BicomplexService.eigen_torsion(golden_bicomplex) == pytest.approx(6.0)

def test_eigen_torsion_rejects_singular_laplacian(zero_bicomplex):
    with pytest.raises(NonAcyclicError):
        BicomplexService.eigen_torsion(zero_bicomplex)

@pytest.mark.parametrize("seed", range(10))
def test_torsion_matches_eigen_torsion(seed):
    bc = random_bicomplex(int(seed % 4) + 1, seed=seed)
    assert relative_error(BicomplexService.torsion(bc).value, BicomplexService.eigen_torsion(bc)) < TOLERANCE

# === Pairing duality ===

@pytest.mark.parametrize("trial", range(5))
def test_pairing_dual_torsion_is_tau_squared(trial):
    rng = trial_rng(99, trial)
    complex_ = random_cochain_complex(rng, random_dims(rng, 3, max_dim=4))
    chamber = random_chamber(rng, complex_.dims)
    bc, basis = BicomplexService.pairing_dual(complex_, chamber)
    tau = BicomplexService.milnor_tau(bc, basis.cohomology, chamber)
    assert relative_error(BicomplexService.torsion(bc, basis).value, tau ** 2) < TOLERANCE

def test_pairing_dual_with_standard_chamber_is_transpose(rng):
    complex_ = random_cochain_complex(rng, (2, 3, 1))
    bc, _ = BicomplexService.pairing_dual(complex_)
    for q in range(bc.length):
        np.testing.assert_allclose(bc.dstar[q], bc.d[q].T, atol=1e-12)

# === Direct sums ===

def test_direct_sum_pads_shorter_complex(golden_bicomplex, acyclic_bicomplex):
    total = BicomplexService.direct_sum(golden_bicomplex, acyclic_bicomplex)
    assert total.length == acyclic_bicomplex.length
    assert total.dims[0] == 1 + acyclic_bicomplex.dims[0]
    assert total.dims[2] == acyclic_bicomplex.dims[2]

def test_direct_sum_multiplies_torsion(arbitrary_bicomplex, acyclic_bicomplex):
    basis = BicomplexService.default_basis(arbitrary_bicomplex)
    total = BicomplexService.direct_sum(arbitrary_bicomplex, acyclic_bicomplex)
    combined = BicomplexService.torsion(
        total, BicomplexService.direct_sum_basis(arbitrary_bicomplex, basis, acyclic_bicomplex)
    )
    expected = BicomplexService.torsion(arbitrary_bicomplex, basis).value \
        * BicomplexService.torsion(acyclic_bicomplex).value
    assert relative_error(combined.value, expected) < TOLERANCE

def test_direct_sum_of_golden_complexes(golden_bicomplex):
    total = BicomplexService.direct_sum(golden_bicomplex, golden_bicomplex)
    assert BicomplexService.torsion(total).value == pytest.approx(36.0)

def test_pairing_mode_generator_matches_pairing_dual(rng):
    bc = random_bicomplex(2, rng=rng, mode=GeneratorMode.PAIRING_DUAL, max_dim=4)
    assert BicomplexService.validate(bc).valid

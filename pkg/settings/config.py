from builtins import bool, float, int
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Linear algebra tolerances
    rank_tolerance: float = Field(default=1e-10, gt=0, description="Relative factor of the scale-aware rank threshold")
    closure_tolerance: float = Field(default=1e-10, gt=0, description="Residual factor for d^2 = 0 and twisted boundary checks")
    basis_tolerance: float = Field(default=1e-8, gt=0, description="Residual factor for cocycle and in-span checks")
    identity_tolerance: float = Field(default=1e-10, gt=0, description="Tolerance for exact finite-sum identities")

    # Spectral configuration
    gap_tolerance: float = Field(default=1e-6, gt=0, description="Minimal distance of Re(lambda) from a threshold K")
    zero_eigenvalue_tolerance: float = Field(default=1e-9, gt=0, description="Laplacian eigenvalues below this modulus count as zero")
    branch_cut_tolerance: float = Field(default=1e-9, gt=0, description="Minimal angular distance from the negative real axis")
    cluster_tolerance: float = Field(default=1e-8, gt=0, description="Eigenvalue clustering tolerance, scaled by matrix norm")
    projector_tolerance: float = Field(default=1e-9, gt=0, description="Residual allowed in spectral projector invariants")
    probe_margin: float = Field(default=1e-8, ge=0, description="Slack for the strip and parabola spectrum bounds")

    # Randomized checks
    agreement_tolerance: float = Field(default=1e-8, gt=0, description="Relative agreement required by randomized property suites")
    default_seed: int = Field(default=42, description="Seed used when no seed is supplied")
    default_trials: int = Field(default=100, ge=1, description="Trial count used when none is supplied")

    # Output
    report_indent: int = Field(default=2, ge=0, description="Indentation of JSON reports")
    debug: bool = Field(default=False, description="Debug mode enables DEBUG level logging")

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", env_prefix="TORSION_", extra="ignore")


# Instantiate settings to be imported in your application
settings = Settings()

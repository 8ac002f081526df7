from builtins import bool, float, int, str
from enum import Enum
import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Command(str, Enum):
    VALIDATE = "validate"
    TORSION = "torsion"
    SPECTRAL = "spectral"
    SWEEP_K = "sweep-k"
    CW = "cw"
    CLAIMS = "claims"
    PROBE = "probe"


class ClaimSuite(str, Enum):
    PAIRING = "a"
    EIGENVALUES = "b"
    DIRECT_SUM = "c"
    THRESHOLDS = "k"


class Builtin(str, Enum):
    CIRCLE = "circle"
    LENS = "lens"


class RunConfig(BaseModel):
    command: Command = Field(..., description="Command being run")
    inputs: List[str] = Field(default_factory=list, description="Input file paths")
    threshold: Optional[float] = Field(None, description="Spectral threshold K")
    ladder: Optional[List[float]] = Field(None, description="Thresholds of a K sweep")
    seed: int = Field(42, ge=0, lt=2 ** 64, description="Seed of every randomized step")
    trials: int = Field(100, ge=1, description="Number of randomized trials")
    tolerance: Optional[float] = Field(None, gt=0, description="Agreement tolerance override")
    output: Optional[str] = Field(None, description="Report output path")
    builtin: Optional[Builtin] = Field(None, description="Built-in cell complex")
    subdivisions: int = Field(1, ge=1, description="Subdivisions of the built-in circle")
    holonomy: Optional[List[float]] = Field(None, min_length=2, max_length=2, description="Scalar holonomy [re, im]")
    lens_p: Optional[int] = Field(None, description="Lens space order p")
    lens_q: Optional[int] = Field(None, description="Lens space twist q'")
    suite: Optional[ClaimSuite] = Field(None, description="Randomized claim suite")
    dimension: int = Field(10, ge=1, description="Largest probe dimension")
    zero_alpha: bool = Field(False, description="Force a zero perturbation in probes")

    model_config = ConfigDict(extra="forbid")


class CheckResult(BaseModel):
    name: str = Field(..., description="Check identifier")
    passed: bool
    value: Optional[float] = Field(None, description="Measured deviation or violation")
    limit: Optional[float] = Field(None, description="Largest accepted value")


class Report(BaseModel):
    command: Command
    config: RunConfig
    inputs_digest: str = Field(..., description="sha256 of the inputs and configuration")
    results: Dict[str, Any] = Field(default_factory=dict)
    residuals: Dict[str, float] = Field(default_factory=dict)
    checks: List[CheckResult] = Field(default_factory=list)
    wall_clock_seconds: float = 0.0

    @field_validator("residuals")
    @classmethod
    def finite_residuals(cls, residuals: Dict[str, float]) -> Dict[str, float]:
        return {key: float(value) for key, value in residuals.items()}

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_json(self, indent: Optional[int] = 2, include_wall_clock: bool = True) -> str:
        payload = self.model_dump(mode="json")
        payload["passed"] = self.passed
        if not include_wall_clock:
            payload.pop("wall_clock_seconds")
        return json.dumps(payload, sort_keys=True, indent=indent)

# test_cli.py
from builtins import all, len, sorted, staticmethod, str
import json

import pytest

from app.main import cli
from app.models.cell_model import Representation
from app.schemas.cell_schemas import DualPairSchema, RepresentationSchema
from app.services.claims_service import ClaimsService
from app.utils.exceptions import CheckFailure, SpectralSplitError


def _run(runner, tmp_path, *args):
    out = tmp_path / "report.json"
    result = runner.invoke(cli, [*args, "--out", str(out)])
    report = json.loads(out.read_text(encoding="utf-8")) if out.exists() else None
    return result, report

# === validate ===

def test_validate_golden(runner, tmp_path, golden_file):
    result, report = _run(runner, tmp_path, "validate", "--input", golden_file)
    assert result.exit_code == 0, result.output
    assert report["results"]["valid"] is True
    assert report["results"]["coboundary_dims"] == [0, 1]
    assert report["passed"] is True

def test_validate_reports_non_closed_complex(runner, tmp_path, non_closed_file):
    result, report = _run(runner, tmp_path, "validate", "--input", non_closed_file)
    assert result.exit_code == 1
    assert report["results"]["valid"] is False
    assert report["results"]["issues"][0]["kind"] == "d_squared"

# === torsion ===

def test_torsion_golden(runner, tmp_path, golden_file):
    result, report = _run(runner, tmp_path, "torsion", "--input", golden_file)
    assert result.exit_code == 0, result.output
    assert report["results"]["value"] == pytest.approx([6.0, 0.0])
    assert report["results"]["eigen_torsion"] == pytest.approx([6.0, 0.0])
    assert report["results"]["sign_exponent"] == 0
    assert "torsion: PASS" in result.output

def test_torsion_identity(runner, tmp_path, identity_file):
    result, report = _run(runner, tmp_path, "torsion", "--input", identity_file)
    assert result.exit_code == 0
    assert report["results"]["value"] == pytest.approx([1.0, 0.0])

def test_torsion_with_supplied_bases(runner, tmp_path, based_zero_file):
    result, report = _run(runner, tmp_path, "torsion", "--input", based_zero_file)
    assert result.exit_code == 0, result.output
    assert report["results"]["value"] == pytest.approx([2.0, 0.0])
    assert report["results"]["basis"] == "supplied"
    assert report["checks"] == []

def test_torsion_requires_bases(runner, tmp_path, zero_file):
    result, report = _run(runner, tmp_path, "torsion", "--input", zero_file)
    assert result.exit_code == 2
    assert report is None

def test_torsion_rejects_non_closed_complex(runner, tmp_path, non_closed_file):
    result, _ = _run(runner, tmp_path, "torsion", "--input", non_closed_file)
    assert result.exit_code == 2

def test_malformed_json(runner, tmp_path, malformed_file):
    result, _ = _run(runner, tmp_path, "torsion", "--input", malformed_file)
    assert result.exit_code == 2
    assert "line 4" in result.output

def test_missing_input_file(runner, tmp_path):
    result, _ = _run(runner, tmp_path, "torsion", "--input", str(tmp_path / "absent.json"))
    assert result.exit_code == 2

def test_reports_are_reproducible(runner, tmp_path, random_file):
    _, first = _run(runner, tmp_path, "torsion", "--input", random_file)
    _, second = _run(runner, tmp_path, "torsion", "--input", random_file)
    first.pop("wall_clock_seconds")
    second.pop("wall_clock_seconds")
    assert first == second
    assert first["passed"] is True

# === spectral ===

def test_spectral_below_spectrum(runner, tmp_path, golden_file):
    result, report = _run(runner, tmp_path, "spectral", "--input", golden_file, "--K", "5")
    assert result.exit_code == 0, result.output
    assert report["results"]["small_dims"] == [0, 0]
    assert report["results"]["ray_singer_squared"] == pytest.approx([6.0, 0.0])
    assert report["results"]["total_torsion"] == pytest.approx([6.0, 0.0])

def test_spectral_above_spectrum(runner, tmp_path, golden_file):
    result, report = _run(runner, tmp_path, "spectral", "--input", golden_file, "--K", "7")
    assert result.exit_code == 0, result.output
    assert report["results"]["small_dims"] == [1, 1]
    assert report["results"]["ray_singer"] == [1.0, 0.0]
    assert report["results"]["total_torsion"] == pytest.approx([6.0, 0.0])

def test_spectral_threshold_collision(runner, tmp_path, golden_file):
    result, report = _run(runner, tmp_path, "spectral", "--input", golden_file, "--K", "6")
    assert result.exit_code == 3
    assert report is None

def test_spectral_with_computed_bases(runner, tmp_path, zero_file):
    result, report = _run(runner, tmp_path, "spectral", "--input", zero_file, "--K", "1")
    assert result.exit_code == 0, result.output
    assert report["results"]["basis"] == "computed"

# === sweep-k ===

def test_sweep_ladder(runner, tmp_path, golden_file):
    result, report = _run(runner, tmp_path, "sweep-k", "--input", golden_file, "--K-ladder", "7,5")
    assert result.exit_code == 0, result.output
    assert report["results"]["thresholds"] == [5.0, 7.0]
    transition = report["results"]["transitions"][0]
    assert transition["ratio_squared"] == pytest.approx([6.0, 0.0])
    assert transition["eigenvalue_product"] == pytest.approx([6.0, 0.0])

def test_sweep_default_ladder(runner, tmp_path, golden_file):
    result, report = _run(runner, tmp_path, "sweep-k", "--input", golden_file)
    assert result.exit_code == 0, result.output
    assert report["results"]["thresholds"] == [5.0, 7.0]
    assert report["results"]["max_pairwise_deviation"] < 1e-12
    assert all(check["passed"] for check in report["checks"])

def test_sweep_rejects_bad_ladder(runner, tmp_path, golden_file):
    result, _ = _run(runner, tmp_path, "sweep-k", "--input", golden_file, "--K-ladder", "five")
    assert result.exit_code == 2

# === cw ===

def test_cw_circle(runner, tmp_path):
    result, report = _run(runner, tmp_path, "cw", "--builtin", "circle", "--holonomy", "2,0", "--subdivisions", "3")
    assert result.exit_code == 0, result.output
    assert report["results"]["value"] == pytest.approx([-0.5, 0.0])
    assert report["results"]["modulus"] == pytest.approx(0.5)

def test_cw_trivial_circle_is_not_acyclic(runner, tmp_path):
    result, report = _run(runner, tmp_path, "cw", "--builtin", "circle", "--holonomy", "1,0")
    assert result.exit_code == 2
    assert "[1, 1]" in result.output
    assert report is None

def test_cw_lens_default_holonomy(runner, tmp_path):
    result, report = _run(runner, tmp_path, "cw", "--builtin", "lens", "--lens-p", "5", "--lens-q", "2")
    assert result.exit_code == 0, result.output
    assert [check["name"] for check in report["checks"]] == ["closed_form"]

def test_cw_lens_needs_parameters(runner, tmp_path):
    result, _ = _run(runner, tmp_path, "cw", "--builtin", "lens", "--lens-p", "5")
    assert result.exit_code == 2

@pytest.mark.parametrize("holonomy", ["2", "a,b", "1,2,3"])
def test_cw_bad_holonomy(runner, tmp_path, holonomy):
    result, _ = _run(runner, tmp_path, "cw", "--builtin", "circle", "--holonomy", holonomy)
    assert result.exit_code == 2

@pytest.fixture
def circle_file(tmp_path, circle_pair):
    path = tmp_path / "circle.json"
    path.write_text(json.dumps(DualPairSchema.from_domain(circle_pair).model_dump()), encoding="utf-8")
    return str(path)

def test_cw_dual_pair_file(runner, tmp_path, circle_file):
    result, report = _run(runner, tmp_path, "cw", "--input", circle_file, "--holonomy", "2,0")
    assert result.exit_code == 0, result.output
    assert report["results"]["value"] == pytest.approx([-0.5, 0.0])
    assert report["checks"] == []

def test_cw_representation_file(runner, tmp_path, circle_file):
    path = tmp_path / "rho.json"
    path.write_text(json.dumps(RepresentationSchema.from_domain(Representation.scalar(-1.0)).model_dump()), encoding="utf-8")
    result, report = _run(runner, tmp_path, "cw", "--input", circle_file, "--representation", str(path))
    assert result.exit_code == 0, result.output
    assert report["results"]["value"] == pytest.approx([4.0, 0.0])
    assert len(report["config"]["inputs"]) == 2

def test_cw_file_needs_holonomy(runner, tmp_path, circle_file):
    result, _ = _run(runner, tmp_path, "cw", "--input", circle_file)
    assert result.exit_code == 2

# === claims and probe ===

def test_claims_suite(runner, tmp_path):
    result, report = _run(runner, tmp_path, "claims", "--suite", "b", "--trials", "3", "--seed", "9")
    assert result.exit_code == 0, result.output
    assert report["results"]["failure_count"] == 0
    assert sorted(report["results"]["errors"]) == ["0", "1", "2"]
    assert report["config"]["seed"] == 9

def test_claims_with_failed_trials_exit_with_check_failure(runner, tmp_path, monkeypatch):
    def raising(rng):
        raise SpectralSplitError("projector residual too large")

    monkeypatch.setattr(ClaimsService, "eigenvalue_trial", staticmethod(raising))
    result, report = _run(runner, tmp_path, "claims", "--suite", "b", "--trials", "2", "--seed", "1")
    assert result.exit_code == CheckFailure.exit_code == 1
    assert report["passed"] is False
    assert report["results"]["failure_count"] == 2
    assert report["results"]["messages"]["0"] == "SpectralSplitError: projector residual too large"
    assert "failures" in result.output

def test_claims_rejects_zero_trials(runner, tmp_path):
    result, _ = _run(runner, tmp_path, "claims", "--suite", "a", "--trials", "0")
    assert result.exit_code == 2

def test_claims_rejects_unknown_suite(runner, tmp_path):
    result, _ = _run(runner, tmp_path, "claims", "--suite", "z", "--trials", "1")
    assert result.exit_code == 2

def test_probe(runner, tmp_path):
    result, report = _run(runner, tmp_path, "probe", "--trials", "10", "--dimension", "4", "--zero-alpha")
    assert result.exit_code == 0, result.output
    assert report["config"]["zero_alpha"] is True

# === group ===

def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "0.0.1" in result.output

def test_help_lists_exit_codes(runner):
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    assert "sweep-k" in result.output

"""
File: conftest.py

Overview:
This file provides pytest fixtures for the torsion test suite.
It includes hand-checked complexes, seeded random complexes, built-in cell complexes,
JSON input files for the command line and a CliRunner.
"""

# === Standard library imports ===
import json

# === Third-party imports ===
import numpy as np
import pytest
from click.testing import CliRunner

# === Application imports ===
from app.dependencies import get_settings
from app.models.bicomplex_model import Bicomplex, GradedBasisChoice
from app.models.linalg_model import SubspaceBasis
from app.schemas.bicomplex_schemas import BicomplexSchema
from app.services.cw_service import CWService
from app.utils.random_gen import GeneratorMode, random_bicomplex

# === Globals ===
settings = get_settings()

GOLDEN_PAYLOAD = {
    "length": 1,
    "dims": [1, 1],
    "d": [[[[2.0, 0.0]]]],
    "dstar": [[[[3.0, 0.0]]]],
}

# === Random streams ===

@pytest.fixture
def rng():
    return np.random.default_rng(20240601)

# === Hand-checked complexes ===

@pytest.fixture
def golden_bicomplex():
    """d = [[2]], d* = [[3]]; torsion 6 with S = 0."""
    return Bicomplex((1, 1), (np.array([[2.0]]),), (np.array([[3.0]]),))

@pytest.fixture
def identity_bicomplex():
    return Bicomplex((1, 1), (np.eye(1),), (np.eye(1),))

@pytest.fixture
def zero_bicomplex():
    """Both differentials vanish, so every degree carries (co)homology."""
    return Bicomplex((1, 1), (np.zeros((1, 1)),), (np.zeros((1, 1)),))

@pytest.fixture
def zero_basis():
    unit = SubspaceBasis.standard(1)
    return GradedBasisChoice((unit, unit), (unit, unit))

# === Random complexes ===

@pytest.fixture
def acyclic_bicomplex():
    return random_bicomplex(3, seed=7)

@pytest.fixture
def arbitrary_bicomplex():
    return random_bicomplex(2, seed=11, mode=GeneratorMode.ARBITRARY, max_dim=4)

# === Cell complexes ===

@pytest.fixture
def circle_pair():
    return CWService.builtin_circle(1)

@pytest.fixture
def lens_pair():
    return CWService.builtin_lens(5, 1)

# === Input files ===

def _write_json(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)

@pytest.fixture
def golden_payload():
    return json.loads(json.dumps(GOLDEN_PAYLOAD))

@pytest.fixture
def golden_file(tmp_path):
    return _write_json(tmp_path / "golden.json", GOLDEN_PAYLOAD)

@pytest.fixture
def identity_file(tmp_path):
    payload = dict(GOLDEN_PAYLOAD, d=[[[[1.0, 0.0]]]], dstar=[[[[1.0, 0.0]]]])
    return _write_json(tmp_path / "identity.json", payload)

@pytest.fixture
def zero_file(tmp_path):
    payload = dict(GOLDEN_PAYLOAD, d=[[[[0.0, 0.0]]]], dstar=[[[[0.0, 0.0]]]])
    return _write_json(tmp_path / "zero.json", payload)

@pytest.fixture
def based_zero_file(tmp_path):
    unit = [[[1.0, 0.0]]]
    payload = dict(
        GOLDEN_PAYLOAD,
        d=[[[[0.0, 0.0]]]],
        dstar=[[[[0.0, 0.0]]]],
        cohomology_basis=[unit, [[[2.0, 0.0]]]],
        homology_basis=[unit, unit],
    )
    return _write_json(tmp_path / "based_zero.json", payload)

@pytest.fixture
def non_closed_file(tmp_path):
    payload = {
        "length": 2,
        "dims": [1, 1, 1],
        "d": [[[[1.0, 0.0]]], [[[1.0, 0.0]]]],
        "dstar": [[[[0.0, 0.0]]], [[[0.0, 0.0]]]],
    }
    return _write_json(tmp_path / "non_closed.json", payload)

@pytest.fixture
def malformed_file(tmp_path):
    path = tmp_path / "malformed.json"
    path.write_text('{\n  "length": 1,\n  "dims": [1, 1\n}', encoding="utf-8")
    return str(path)

@pytest.fixture
def random_file(tmp_path, acyclic_bicomplex):
    payload = BicomplexSchema.from_domain(acyclic_bicomplex).model_dump()
    return _write_json(tmp_path / "random.json", payload)

# === Command line ===

@pytest.fixture
def runner(monkeypatch):
    """CliRunner with the file logging configuration disabled."""
    monkeypatch.setattr("app.main.setup_logging", lambda debug=None: None)
    return CliRunner()

# test_conftest.py

from builtins import len
import json

import numpy as np

from app.services.bicomplex_service import BicomplexService
from app.utils.random_gen import random_bicomplex


def test_golden_fixture_is_valid(golden_bicomplex):
    assert BicomplexService.validate(golden_bicomplex).valid
    assert golden_bicomplex.dims == (1, 1)

def test_zero_fixture_has_homology(zero_bicomplex, zero_basis):
    profile = BicomplexService.dimension_profile(zero_bicomplex)
    assert profile.cohomology_dims == (1, 1)
    assert profile.homology_dims == (1, 1)
    assert zero_basis.cohomology_dims == [1, 1]

def test_random_fixtures_are_reproducible(acyclic_bicomplex):
    again = random_bicomplex(3, seed=7)
    assert again.dims == acyclic_bicomplex.dims
    for first, second in zip(again.d, acyclic_bicomplex.d):
        np.testing.assert_array_equal(first, second)

def test_random_file_round_trips(random_file, acyclic_bicomplex):
    with open(random_file, encoding="utf-8") as handle:
        payload = json.load(handle)
    assert payload["dims"] == list(acyclic_bicomplex.dims)
    assert len(payload["d"]) == acyclic_bicomplex.length

def test_builtin_fixtures(circle_pair, lens_pair):
    assert circle_pair.primal.cells == (1, 1)
    assert lens_pair.primal.cells == (1, 1, 1, 1)
    assert lens_pair.dual_exponent == 1

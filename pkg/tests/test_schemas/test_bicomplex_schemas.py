from builtins import dict
import pytest
from pydantic import ValidationError

from app.schemas.bicomplex_schemas import BicomplexSchema, complex_to_wire, matrix_from_wire, wire_shape


@pytest.fixture
def zero_with_bases(golden_payload):
    unit = [[[1.0, 0.0]]]
    return dict(
        golden_payload,
        d=[[[[0.0, 0.0]]]],
        dstar=[[[[0.0, 0.0]]]],
        cohomology_basis=[unit, [[[0.0, 2.0]]]],
        homology_basis=[unit, unit],
    )

# Tests for BicomplexSchema
def test_bicomplex_schema_valid(golden_payload):
    schema = BicomplexSchema(**golden_payload)
    bc = schema.to_domain()
    assert bc.dims == (1, 1)
    assert bc.d[0][0, 0] == 2.0
    assert bc.dstar[0][0, 0] == 3.0
    assert schema.basis_choice() is None

def test_bicomplex_schema_example_is_valid():
    example = BicomplexSchema.model_config["json_schema_extra"]["example"]
    assert BicomplexSchema(**example).to_domain().dims == (1, 1)

def test_complex_entries(golden_payload):
    golden_payload["d"] = [[[[0.0, -1.5]]]]
    assert BicomplexSchema(**golden_payload).to_domain().d[0][0, 0] == -1.5j

@pytest.mark.parametrize("field, value", [
    ("dims", [1, -1]),
    ("dims", [1, 1, 1]),
    ("d", [[[[2.0, 0.0], [1.0, 0.0]]]]),
    ("dstar", []),
    ("d", [[[[2.0, 0.0, 1.0]]]]),
    ("length", -1),
])
def test_bicomplex_schema_invalid(golden_payload, field, value):
    golden_payload[field] = value
    with pytest.raises(ValidationError):
        BicomplexSchema(**golden_payload)

def test_bicomplex_schema_forbids_unknown_fields(golden_payload):
    golden_payload["metric"] = "euclidean"
    with pytest.raises(ValidationError):
        BicomplexSchema(**golden_payload)

def test_bases_must_come_together(zero_with_bases):
    zero_with_bases.pop("homology_basis")
    with pytest.raises(ValidationError):
        BicomplexSchema(**zero_with_bases)

def test_basis_vectors_must_fit_degree(zero_with_bases):
    zero_with_bases["cohomology_basis"] = [[[[1.0, 0.0], [1.0, 0.0]]], []]
    with pytest.raises(ValidationError):
        BicomplexSchema(**zero_with_bases)

def test_basis_choice(zero_with_bases):
    choice = BicomplexSchema(**zero_with_bases).basis_choice()
    assert choice.cohomology_dims == [1, 1]
    assert choice.cohomology[1].vectors[0, 0] == 2.0j
    assert choice.homology[0].vectors.shape == (1, 1)

def test_empty_basis_blocks(golden_payload):
    payload = dict(golden_payload, cohomology_basis=[[], []], homology_basis=[[], []])
    choice = BicomplexSchema(**payload).basis_choice()
    assert choice.cohomology_dims == [0, 0]
    assert choice.homology[1].vectors.shape == (1, 0)

def test_zero_dimensional_degree():
    schema = BicomplexSchema(length=1, dims=[0, 2], d=[[[], []]], dstar=[[]])
    assert schema.to_domain().d[0].shape == (2, 0)

def test_from_domain_round_trip(golden_bicomplex, zero_bicomplex, zero_basis):
    assert BicomplexSchema.from_domain(golden_bicomplex).model_dump()["d"] == [[[[2.0, 0.0]]]]
    schema = BicomplexSchema.from_domain(zero_bicomplex, zero_basis)
    assert schema.basis_choice().homology_dims == [1, 1]

# Tests for wire helpers
def test_wire_helpers():
    assert complex_to_wire(1 - 2j) == [1.0, -2.0]
    assert wire_shape([[[1, 0], [2, 0]]]) == (1, 2)
    assert matrix_from_wire([], (0, 3)).shape == (0, 3)
    with pytest.raises(ValueError):
        wire_shape([[[1, 0]], []])

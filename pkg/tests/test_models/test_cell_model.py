import numpy as np
import pytest

from app.models.cell_model import DualPair, FlatCellComplex, Incidence, Representation, generator_name
from app.utils.exceptions import DimensionMismatchError, InputError, InvalidRepresentationError


def _loop():
    return FlatCellComplex(1, (1, 1), (((Incidence(0, 1, ("t",)), Incidence(0, -1)),),))

def test_generator_name_strips_inverse_marker():
    assert generator_name("-t") == "t"
    assert generator_name("s") == "s"

def test_incidence_sign_must_be_unit():
    with pytest.raises(InputError):
        Incidence(0, 2)

def test_cell_complex_checks_counts():
    with pytest.raises(DimensionMismatchError):
        FlatCellComplex(1, (1, 2), (((Incidence(0, 1),),),))

def test_cell_complex_checks_face_range():
    with pytest.raises(InputError):
        FlatCellComplex(1, (1, 1), (((Incidence(3, 1),),),))

def test_cell_complex_checks_generators():
    with pytest.raises(InputError):
        FlatCellComplex(1, (1, 1), (((Incidence(0, 1, ("s",)),),),))

def test_representation_evaluates_words_left_to_right():
    a = np.array([[1.0, 1.0], [0.0, 1.0]])
    b = np.array([[2.0, 0.0], [0.0, 1.0]])
    rho = Representation({"a": a, "b": b})
    np.testing.assert_allclose(rho.evaluate(("a", "b")), a @ b)
    np.testing.assert_allclose(rho.evaluate(("-a", "a")), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(rho.evaluate(()), np.eye(2))

def test_scalar_and_trivial_representations():
    assert Representation.scalar(2.0).evaluate(("-t",))[0, 0] == pytest.approx(0.5)
    assert Representation.trivial(("t", "s"), 3).fiber_dim == 3

@pytest.mark.parametrize("matrices", [
    {"t": np.zeros((1, 1))},
    {"t": np.ones((1, 2))},
    {"t": np.eye(1), "s": np.eye(2)},
    {"t": np.array([[np.nan]])},
])
def test_invalid_representations(matrices):
    with pytest.raises(InvalidRepresentationError):
        Representation(matrices)

def test_missing_generator_in_representation():
    with pytest.raises(InvalidRepresentationError):
        Representation.scalar(2.0, "s").evaluate(("t",))

def test_dual_pair_requires_matching_cells():
    loop = _loop()
    point_and_two_edges = FlatCellComplex(
        1, (1, 2), (((Incidence(0, 1),), (Incidence(0, -1),)),)
    )
    with pytest.raises(DimensionMismatchError):
        DualPair(loop, point_and_two_edges, ((0,), (0, 1)))

def test_dual_pair_requires_bijection(circle_pair):
    with pytest.raises(InputError):
        DualPair(circle_pair.primal, circle_pair.dual, ((0,), (1,)))

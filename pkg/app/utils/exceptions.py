from builtins import ValueError, int, str
from typing import Optional


class TorsionError(ValueError):
    """Base class for every failure raised by the torsion services.

    Attributes:
        exit_code (int): Process exit code the command line maps the error to.
    """
    exit_code: int = 1


class InputError(TorsionError):
    """Malformed or inconsistent input data."""
    exit_code = 2


class DimensionMismatchError(InputError):
    pass


class InvalidComplexError(InputError):
    """Differentials have wrong shapes or fail to square to zero."""


class NotInSpanError(InputError):
    pass


class DegenerateBasisError(InputError):
    """Vectors expected to form a basis are linearly dependent."""


class InvalidBasisError(InputError):
    """Representatives fail the cocycle or cycle check, or miss a class."""


class MissingBasisError(InputError):
    """Torsion of a complex with nonzero cohomology needs explicit bases."""


class AmbiguousRankError(InputError):
    """A singular value lies too close to the rank threshold to classify."""


class NonAcyclicError(InputError):
    """An operation defined only for doubly acyclic complexes got cohomology."""

    def __init__(self, message: str, cohomology: Optional[list] = None, homology: Optional[list] = None):
        super().__init__(message)
        self.cohomology = cohomology or []
        self.homology = homology or []


class ProjectionDegeneracyError(InputError):
    """A projected basis lost rank inside a small subcomplex."""


class TwistedBoundaryError(InputError):
    pass


class InvalidRepresentationError(InputError):
    pass


class InvalidBuiltinError(InputError):
    pass


class ThresholdCollisionError(TorsionError):
    """An eigenvalue sits on the threshold line Re(lambda) = K."""
    exit_code = 3

    def __init__(self, degree: Optional[int], eigenvalue: complex, threshold: float):
        self.degree = degree
        self.eigenvalue = complex(eigenvalue)
        self.threshold = float(threshold)
        where = f"degree {degree}" if degree is not None else "matrix"
        super().__init__(
            f"Threshold K={threshold:g} collides with eigenvalue {self.eigenvalue:.12g} in {where}"
        )


class BranchCutError(TorsionError):
    """A large eigenvalue lies at zero or on the negative real axis."""
    exit_code = 3

    def __init__(self, eigenvalue: complex, degree: Optional[int] = None):
        self.eigenvalue = complex(eigenvalue)
        self.degree = degree
        suffix = f" in degree {degree}" if degree is not None else ""
        super().__init__(f"Eigenvalue {self.eigenvalue:.12g}{suffix} lies on the principal branch cut")


class EigenvalueConvergenceError(TorsionError):
    pass


class SpectralSplitError(TorsionError):
    """Restricted differentials fail to close on the small subspaces."""


class CheckFailure(TorsionError):
    """A verification check of a command did not pass."""

from builtins import classmethod, int, len, max, range, tuple
import logging
from math import gcd
from typing import List, Optional, Union

import numpy as np

from app.dependencies import get_settings
from app.models.bicomplex_model import ACYCLIC, Bicomplex, CochainComplex, GradedBasisChoice, TorsionScalar
from app.models.cell_model import DualPair, FlatCellComplex, Incidence, Representation
from app.services.bicomplex_service import BicomplexService
from app.utils.exceptions import (
    InvalidBuiltinError,
    MissingBasisError,
    NonAcyclicError,
    TwistedBoundaryError,
)

settings = get_settings()
logger = logging.getLogger(__name__)


class CWService:
    """Twisted cochains of flat cell complexes and their combinatorial torsion."""

    @classmethod
    def twist(cls, cw: FlatCellComplex, rho: Representation) -> CochainComplex:
        """
        Cochain complex with coefficients in the flat bundle given by rho.

        The (tau, sigma) block of d_q sums sign·rho(word) over the incidences of the
        (q+1)-cell tau on the q-cell sigma.

        Raises:
            TwistedBoundaryError: If d_{q+1}·d_q is not zero.
        """
        k = rho.fiber_dim
        d = []
        for q in range(cw.dimension):
            matrix = np.zeros((cw.cells[q + 1] * k, cw.cells[q] * k), dtype=np.complex128)
            for tau, faces in enumerate(cw.incidences[q]):
                for incidence in faces:
                    sigma = incidence.face
                    matrix[tau * k:(tau + 1) * k, sigma * k:(sigma + 1) * k] += incidence.sign * rho.evaluate(incidence.word)
            d.append(matrix)
        for q in range(len(d) - 1):
            residual = float(np.linalg.norm(d[q + 1] @ d[q]))
            bound = settings.closure_tolerance * max(1.0, float(np.linalg.norm(d[q + 1]) * np.linalg.norm(d[q])))
            if residual > bound:
                logger.error(f"Twisted coboundary squares to {residual:.3e} in degree {q}")
                raise TwistedBoundaryError(f"Twisted d_{q + 1}·d_{q} != 0 (residual {residual:.3e})")
        return CochainComplex(tuple(c * k for c in cw.cells), tuple(d))

    @classmethod
    def _theta(cls, pair: DualPair, q: int, k: int) -> np.ndarray:
        """Block permutation from primal q-cochains to dual (n-q)-cochains."""
        count = pair.primal.cells[q]
        theta = np.zeros((count * k, count * k), dtype=np.complex128)
        for i, j in enumerate(pair.pairing[q]):
            theta[j * k:(j + 1) * k, i * k:(i + 1) * k] = np.eye(k)
        return theta

    @classmethod
    def theta_bicomplex(cls, pair: DualPair, rho: Representation) -> Bicomplex:
        """
        Bicomplex with d the primal coboundary and delta_a = Theta_{a-1}^{-1} d'_{n-a} Theta_a.

        Theta is a block permutation, so delta squares to zero exactly when the twisted dual coboundary does.

        Raises:
            TwistedBoundaryError: If the primal or the dual twisted coboundary does not square to zero.
        """
        primal = cls.twist(pair.primal, rho)
        dual = cls.twist(pair.dual, rho)
        n, k = pair.primal.dimension, rho.fiber_dim
        thetas = [cls._theta(pair, q, k) for q in range(n + 1)]
        delta = [thetas[a - 1].T @ dual.up(n - a) @ thetas[a] for a in range(1, n + 1)]
        return Bicomplex(primal.dims, primal.d, tuple(delta))

    @classmethod
    def comb_torsion(
        cls,
        pair: DualPair,
        rho: Representation,
        basis: Union[GradedBasisChoice, str, None] = ACYCLIC,
    ) -> TorsionScalar:
        """
        Combinatorial torsion of the Theta-bicomplex.

        Raises:
            NonAcyclicError: If the basis marker is ACYCLIC but the twisted complex has cohomology.
        """
        bc = cls.theta_bicomplex(pair, rho)
        if basis is None or basis == ACYCLIC:
            try:
                return BicomplexService.torsion(bc)
            except MissingBasisError as e:
                profile = BicomplexService.dimension_profile(bc)
                raise NonAcyclicError(
                    f"Twisted complex is not acyclic: H^* dims {list(profile.cohomology_dims)}",
                    list(profile.cohomology_dims),
                    list(profile.homology_dims),
                ) from e
        return BicomplexService.torsion(bc, basis)

    @classmethod
    def builtin_circle(cls, subdivisions: int = 1) -> DualPair:
        """
        Circle with m vertices and m edges; edge i runs from v_i to v_{i+1} and the last edge carries t.

        The dual 1-cell around v_i runs from the center of e_{i-1} to the center of e_i,
        crossing the basepoint of the loop (word "-t") only around v_0.
        """
        m = int(subdivisions)
        if m < 1:
            raise InvalidBuiltinError(f"Circle needs at least one subdivision, got {m}")
        edges = tuple(
            (Incidence((i + 1) % m, 1, ("t",) if i == m - 1 else ()), Incidence(i, -1))
            for i in range(m)
        )
        primal = FlatCellComplex(1, (m, m), (edges,), ("t",))
        dual_edges = [(Incidence(m - 1, 1, ("-t",)), Incidence(0, -1))]
        dual_edges += [(Incidence(i - 1, 1), Incidence(i, -1)) for i in range(1, m)]
        dual = FlatCellComplex(1, (m, m), (tuple(dual_edges),), ("t",))
        identity = tuple(range(m))
        return DualPair(primal, dual, (identity, identity))

    @classmethod
    def builtin_lens(cls, p: int, q_prime: int) -> DualPair:
        """
        Lens space L(p, q') with one cell in each degree 0..3.

        Primal boundaries are t - 1, 1 + t + ... + t^{p-1} and t^{q'} - 1; the dual
        structure uses the inverse generator with exponents q', 1 and 1 on the same pattern.
        """
        if p < 2 or gcd(p, q_prime) != 1:
            raise InvalidBuiltinError(f"Lens space needs p >= 2 and gcd(p, q') = 1, got p={p}, q'={q_prime}")
        q_prime = q_prime % p

        def difference(word):
            return ((Incidence(0, 1, word), Incidence(0, -1)),)

        def norm_element(letter):
            return (tuple(Incidence(0, 1, (letter,) * j) for j in range(p)),)

        primal = FlatCellComplex(
            3, (1, 1, 1, 1), (difference(("t",)), norm_element("t"), difference(("t",) * q_prime)), ("t",)
        )
        dual = FlatCellComplex(
            3, (1, 1, 1, 1), (difference(("-t",) * q_prime), norm_element("-t"), difference(("-t",))), ("t",)
        )
        return DualPair(primal, dual, ((0,), (0,), (0,), (0,)), dual_exponent=q_prime)

    @classmethod
    def cohomology_dims(cls, pair: DualPair, rho: Optional[Representation] = None) -> List[int]:
        """Twisted cohomology dimensions, untwisted when rho is omitted."""
        if rho is None:
            rho = Representation.trivial(pair.primal.generators)
        bc = cls.theta_bicomplex(pair, rho)
        return list(BicomplexService.dimension_profile(bc).cohomology_dims)

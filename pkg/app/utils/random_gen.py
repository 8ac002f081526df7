"""Seeded generators of random complexes, chamber bases and perturbation probes."""
from builtins import int, len, range, str, tuple
from enum import Enum
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from app.dependencies import get_settings
from app.models.bicomplex_model import Bicomplex, CochainComplex
from app.models.linalg_model import SubspaceBasis
from app.models.spectral_model import PerturbationProbe
from app.utils.exceptions import DimensionMismatchError, InputError
from app.utils.linalg import random_unitary

settings = get_settings()
logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 100
MIN_LAPLACIAN_REAL_PART = 0.05


class GeneratorMode(str, Enum):
    DOUBLY_ACYCLIC = "doubly-acyclic"
    PAIRING_DUAL = "pairing-dual"
    ARBITRARY = "arbitrary"


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Independent stream for one trial, reproducible from (seed, trial) alone."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial),)))


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def well_conditioned(rng: np.random.Generator, n: int, low: float = 0.5, high: float = 2.0) -> np.ndarray:
    """Invertible matrix with singular values drawn from [low, high]."""
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    return random_unitary(rng, n) @ np.diag(rng.uniform(low, high, n)) @ random_unitary(rng, n)


def random_chamber(rng: np.random.Generator, dims: Sequence[int]) -> Tuple[SubspaceBasis, ...]:
    return tuple(SubspaceBasis(n, well_conditioned(rng, n)) for n in dims)


def acyclic_ranks(dims: Sequence[int]) -> List[int]:
    """
    Ranks s_0..s_{N+1} of the coboundary of an acyclic complex with the given dimensions.

    Raises:
        InputError: If an alternating partial sum is negative or the total is nonzero.
    """
    ranks = [0]
    for n in dims:
        nxt = n - ranks[-1]
        if nxt < 0:
            raise InputError(f"Dimensions {list(dims)} admit no acyclic complex (negative alternating sum)")
        ranks.append(nxt)
    if ranks[-1] != 0:
        raise InputError(f"Dimensions {list(dims)} admit no acyclic complex (Euler characteristic {ranks[-1]:+d})")
    return ranks


def random_acyclic_dims(rng: np.random.Generator, length: int, max_dim: int = 6) -> Tuple[int, ...]:
    if length < 1:
        return (0,)
    ranks = [0] + [int(rng.integers(1, max(1, max_dim // 2) + 1)) for _ in range(length)] + [0]
    return tuple(ranks[q] + ranks[q + 1] for q in range(length + 1))


def random_dims(rng: np.random.Generator, length: int, max_dim: int = 6) -> Tuple[int, ...]:
    return tuple(int(n) for n in rng.integers(1, max_dim + 1, length + 1))


def _random_ranks(rng: np.random.Generator, dims: Sequence[int]) -> List[int]:
    # leaves at least one cohomology class in every degree with room for it
    ranks = [0]
    for q, n in enumerate(dims):
        room = n - ranks[-1]
        if q == len(dims) - 1 or room <= 0:
            ranks.append(0)
        else:
            # a map into C^{q+1} has rank at most dims[q + 1]
            ranks.append(int(rng.integers(0, min(room - 1, dims[q + 1]) + 1)))
    return ranks


def _canonical_up(rng: np.random.Generator, dims: Sequence[int], ranks: Sequence[int]) -> List[np.ndarray]:
    """d_q maps the last s_{q+1} coordinates of C^q onto the first s_{q+1} of C^{q+1}."""
    maps = []
    for q in range(len(dims) - 1):
        k = ranks[q + 1]
        up = np.zeros((dims[q + 1], dims[q]), dtype=np.complex128)
        if k:
            up[:k, dims[q] - k:] = well_conditioned(rng, k)
        maps.append(up)
    return maps


def _conjugate_up(maps: Sequence[np.ndarray], frames: Sequence[np.ndarray]) -> List[np.ndarray]:
    return [frames[q + 1] @ m @ _inverse(frames[q]) for q, m in enumerate(maps)]


def _inverse(matrix: np.ndarray) -> np.ndarray:
    return matrix if matrix.size == 0 else scipy.linalg.inv(matrix)


def _spectrum_block(rng: np.random.Generator, k: int) -> np.ndarray:
    """Non-normal matrix with eigenvalues in [0.5, 4] + i[-1, 1]."""
    values = rng.uniform(0.5, 4.0, k) + 1j * rng.uniform(-1.0, 1.0, k)
    triangular = np.diag(values) + 0.3 * np.triu(_ginibre(rng, k, k), 1)
    unitary = random_unitary(rng, k)
    return unitary @ triangular @ unitary.conj().T


def random_cochain_complex(
    rng: np.random.Generator, dims: Sequence[int], acyclic: bool = False
) -> CochainComplex:
    ranks = acyclic_ranks(dims) if acyclic else _random_ranks(rng, dims)
    frames = [well_conditioned(rng, n) for n in dims]
    return CochainComplex(tuple(dims), tuple(_conjugate_up(_canonical_up(rng, dims, ranks), frames)))


def _doubly_acyclic(rng: np.random.Generator, dims: Sequence[int], mix: float) -> Bicomplex:
    ranks = acyclic_ranks(dims)
    length = len(dims) - 1
    up, down = [], []
    for q in range(length):
        k, offset = ranks[q + 1], ranks[q]
        forward = well_conditioned(rng, k)
        backward = scipy.linalg.solve(forward, _spectrum_block(rng, k)) if k else np.zeros((0, 0))
        d_q = np.zeros((dims[q + 1], dims[q]), dtype=np.complex128)
        dstar_q = np.zeros((dims[q], dims[q + 1]), dtype=np.complex128)
        d_q[:k, offset:] = forward
        dstar_q[offset:, :k] = backward
        up.append(d_q)
        down.append(dstar_q)
    frames = [well_conditioned(rng, n) for n in dims]
    mixed = []
    for frame, n in zip(frames, dims):
        perturbation = _ginibre(rng, n, n)
        if n:
            perturbation /= np.linalg.norm(perturbation, ord=2)
        mixed.append(frame @ (np.eye(n) + mix * perturbation))
    d = _conjugate_up(up, frames)
    dstar = [mixed[q] @ down[q] @ _inverse(mixed[q + 1]) for q in range(length)]
    return Bicomplex(tuple(dims), tuple(d), tuple(dstar))


def _laplacian_margin(bc: Bicomplex) -> float:
    margins = [
        float(np.min(scipy.linalg.eigvals(bc.laplacian(q)).real))
        for q in range(bc.length + 1) if bc.dim(q)
    ]
    return min(margins, default=np.inf)


def random_bicomplex(
    length: int,
    dims: Optional[Sequence[int]] = None,
    seed: Optional[int] = None,
    mode: GeneratorMode = GeneratorMode.DOUBLY_ACYCLIC,
    mix: float = 0.3,
    rng: Optional[np.random.Generator] = None,
    max_dim: int = 6,
) -> Bicomplex:
    """
    Random bicomplex, deterministic in the seed.

    Args:
        length (int): N, the complex has degrees 0..N.
        dims: Dimensions of C^0..C^N, drawn at random when omitted.
        seed (int): Seed of the generator, settings.default_seed when omitted.
        mode (GeneratorMode): doubly-acyclic, pairing-dual (d* = d^T) or arbitrary.
        mix (float): Size of the frame perturbation separating d* from the frames of d.
        rng (Generator): Stream to draw from instead of a fresh seeded one.
        max_dim (int): Largest dimension when dims are drawn.

    Returns:
        Bicomplex: In doubly-acyclic mode every Laplacian eigenvalue has real part above 0.05.

    Raises:
        InputError: If the requested dimensions admit no acyclic complex.
    """
    mode = GeneratorMode(mode)
    if rng is None:
        rng = trial_rng(settings.default_seed if seed is None else seed)
    if dims is None:
        dims = random_acyclic_dims(rng, length, max_dim) if mode == GeneratorMode.DOUBLY_ACYCLIC else random_dims(rng, length, max_dim)
    dims = tuple(int(n) for n in dims)
    if len(dims) != length + 1:
        raise DimensionMismatchError(f"Length {length} needs {length + 1} dimensions, got {len(dims)}")

    if mode == GeneratorMode.DOUBLY_ACYCLIC:
        acyclic_ranks(dims)
        for attempt in range(MAX_ATTEMPTS):
            bc = _doubly_acyclic(rng, dims, mix)
            if _laplacian_margin(bc) >= MIN_LAPLACIAN_REAL_PART:
                return bc
            logger.debug(f"Rejected doubly acyclic draw {attempt} with a Laplacian eigenvalue near the imaginary axis")
        raise InputError(f"Could not draw a doubly acyclic complex with dims {list(dims)} and mix {mix}")

    cochain = random_cochain_complex(rng, dims)
    if mode == GeneratorMode.PAIRING_DUAL:
        return Bicomplex.from_cochain(cochain, [m.T for m in cochain.d])
    reversed_dims = dims[::-1]
    reversed_up = _conjugate_up(
        _canonical_up(rng, reversed_dims, _random_ranks(rng, reversed_dims)),
        [well_conditioned(rng, n) for n in reversed_dims],
    )
    dstar = [reversed_up[length - q] for q in range(1, length + 1)]
    return Bicomplex.from_cochain(cochain, dstar)


def random_probe(rng: np.random.Generator, dimension: int, zero_alpha: bool = False) -> PerturbationProbe:
    """Random Hermitian D with a random perturbation alpha of operator norm up to 2."""
    x = _ginibre(rng, dimension, dimension)
    base = (x + x.conj().T) / 2.0
    if zero_alpha:
        return PerturbationProbe(base, np.zeros_like(base))
    alpha = _ginibre(rng, dimension, dimension)
    alpha *= rng.uniform(0.0, 2.0) / max(np.linalg.norm(alpha, ord=2), 1e-300)
    return PerturbationProbe(base, alpha)

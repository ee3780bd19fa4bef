"""Ready-made source models and random test objects."""

import numpy as np

from .linalg import DensityOperator
from .states import ClassicalMarkov, DressedMarkov, IIDProduct


def biased_qubit(p0: float = 0.9) -> IIDProduct:
    return IIDProduct(np.diag([p0, 1.0 - p0]))


def maximally_mixed_qubit() -> IIDProduct:
    return IIDProduct(np.eye(2) / 2)


def pure_qubit() -> IIDProduct:
    return IIDProduct(np.diag([1.0, 0.0]))


def symmetric_flip_chain(flip: float = 0.2) -> ClassicalMarkov:
    return ClassicalMarkov([[1 - flip, flip], [flip, 1 - flip]])


def deterministic_cycle(d: int = 3) -> ClassicalMarkov:
    return ClassicalMarkov(np.roll(np.eye(d), 1, axis=1))


def period_two_chain(noise: float = 0.3) -> ClassicalMarkov:
    """Bipartite chain: {0, 1} <-> {2, 3}, choosing the partner state with probability ``noise``."""
    a, b = 1 - noise, noise
    return ClassicalMarkov(
        [
            [0, 0, a, b],
            [0, 0, b, a],
            [a, b, 0, 0],
            [b, a, 0, 0],
        ]
    )


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(d: int, rng: np.random.Generator, rank=None) -> DensityOperator:
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityOperator(m / np.trace(m).real)


def random_chain(d: int, rng: np.random.Generator, density: float = 0.6) -> ClassicalMarkov:
    """Random irreducible chain: a random cycle through all states plus random extra edges."""
    p = np.where(rng.random((d, d)) < density, rng.random((d, d)), 0.0)
    perm = rng.permutation(d)
    p[perm, np.roll(perm, -1)] += 0.5
    return ClassicalMarkov(p / p.sum(axis=1, keepdims=True))


def random_bipartite_chain(half: int, rng: np.random.Generator) -> ClassicalMarkov:
    """Random irreducible chain of period 2 on ``2 * half`` states."""
    d = 2 * half
    p = np.zeros((d, d))
    p[:half, half:] = rng.random((half, half)) + 0.05
    p[half:, :half] = rng.random((half, half)) + 0.05
    return ClassicalMarkov(p / p.sum(axis=1, keepdims=True))


def random_dressed(d: int, rng: np.random.Generator) -> DressedMarkov:
    return DressedMarkov(random_chain(d, rng), random_unitary(d, rng))


def random_iid(d: int, rng: np.random.Generator) -> IIDProduct:
    return IIDProduct(random_density(d, rng))

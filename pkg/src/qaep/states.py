"""
Translation-invariant sources on the one-dimensional lattice and their
n-block density operators.

Every model here has block states that are diagonal in a product basis:

* ``IIDProduct``     -- basis = site eigenbasis, word law = product of site eigenvalues
* ``ClassicalMarkov`` -- basis = computational basis, word law = Markov path probabilities
* ``DressedMarkov``  -- basis = columns of the site unitary, word law = base chain

``BlockState`` keeps that structure and only materializes the dense matrix
when asked for it.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np

from .errors import CapacityError, ModelError, StructuralError
from .linalg import (
    DensityOperator,
    EigenDecomposition,
    as_matrix,
    clip_spectrum,
    density_eig,
    kron_columns,
    kron_power,
)
from . import linalg

STATIONARY_TOL = 1e-12
STATIONARY_MAX_ITER = 100_000


@dataclass(frozen=True)
class BoxShape:
    """Box ``{0..n_1-1} x ... x {0..n_nu-1}`` in Z^nu."""

    sides: Tuple[int, ...]

    def __post_init__(self):
        sides = tuple(int(s) for s in self.sides)
        if not sides or any(s < 1 for s in sides):
            raise StructuralError(f"box sides must be positive integers, got {self.sides}")
        object.__setattr__(self, "sides", sides)

    @classmethod
    def interval(cls, n: int) -> "BoxShape":
        return cls((n,))

    @property
    def nu(self) -> int:
        return len(self.sides)

    @property
    def volume(self) -> int:
        return int(np.prod(self.sides))


def entropy_nats(probs) -> float:
    """Shannon entropy ``-sum p log p`` with ``0 log 0 = 0``."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


# --------------------------------------------------------------------------
# Markov chain structure
# --------------------------------------------------------------------------


def reachability(adjacency) -> np.ndarray:
    """Boolean matrix R with R[i, j] iff j is reachable from i in zero or more steps."""
    a = np.asarray(adjacency, dtype=bool)
    r = a | np.eye(a.shape[0], dtype=bool)
    while True:
        nxt = r | ((r.astype(np.int64) @ r.astype(np.int64)) > 0)
        if np.array_equal(nxt, r):
            return r
        r = nxt


def communicating_classes(adjacency):
    """Communicating classes as sorted tuples, with a flag marking closed ones."""
    a = np.asarray(adjacency, dtype=bool)
    r = reachability(a)
    mutual = r & r.T
    seen = set()
    classes = []
    for i in range(a.shape[0]):
        if i in seen:
            continue
        members = tuple(int(j) for j in np.flatnonzero(mutual[i]))
        seen.update(members)
        outside = np.setdiff1d(np.arange(a.shape[0]), members)
        closed = not np.any(a[np.ix_(members, outside)]) if outside.size else True
        classes.append((members, closed))
    return classes


def stationary_distribution(transition, support=None) -> np.ndarray:
    """Stationary law of a chain with a single closed class.

    Power iteration on the lazy chain ``(I + P) / 2``, which averages every
    step with the previous one and therefore converges for periodic chains
    too. States outside ``support`` (transient states) are zeroed at the end.
    """
    p = np.asarray(transition, dtype=float)
    d = p.shape[0]
    lazy = 0.5 * (np.eye(d) + p)
    x = np.full(d, 1.0 / d)
    for _ in range(STATIONARY_MAX_ITER):
        x = x @ lazy
        if np.sum(np.abs(x @ p - x)) <= STATIONARY_TOL:
            break
    else:
        raise ModelError(
            f"stationary vector did not converge in {STATIONARY_MAX_ITER} iterations"
        )
    if support is not None:
        mask = np.zeros(d, dtype=bool)
        mask[list(support)] = True
        x = np.where(mask, x, 0.0)
    x = np.clip(x, 0.0, None)
    return x / x.sum()


# --------------------------------------------------------------------------
# Source models
# --------------------------------------------------------------------------


class IIDProduct:
    """Product state: every site carries the same density operator."""

    kind = "iid"

    def __init__(self, site_density):
        if not isinstance(site_density, DensityOperator):
            try:
                site_density = DensityOperator(site_density)
            except Exception as exc:
                raise ModelError(f"invalid site density: {exc}") from exc
        self.site_density = site_density
        m = site_density.matrix
        if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
            # already diagonal: keep the computational basis and its order
            self.site_probs = clip_spectrum(np.diag(m).real)
            self.site_basis = np.eye(m.shape[0], dtype=complex)
        else:
            eig = density_eig(site_density)
            self.site_probs = eig.eigenvalues
            self.site_basis = eig.eigenvectors

    @property
    def d(self) -> int:
        return self.site_density.dim

    def __repr__(self):
        return f"IIDProduct(d={self.d})"


class ClassicalMarkov:
    """Stationary Markov chain on ``{0..d-1}``, embedded as diagonal block states.

    The transition matrix must be row-stochastic with exactly one closed
    communicating class; transient states are allowed and get zero weight.
    """

    kind = "markov"

    def __init__(self, transition):
        p = np.array(transition, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] == 0:
            raise ModelError(f"transition matrix must be square, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ModelError("transition matrix has non-finite entries")
        if np.any(p < 0):
            i, j = np.argwhere(p < 0)[0]
            raise ModelError(f"transition entry [{i}][{j}] = {float(p[i, j])!r} is negative")
        sums = p.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > 1e-12)
        if bad.size:
            i = bad[0]
            raise ModelError(f"transition row {i} sums to {float(sums[i])!r}, expected 1")
        closed = [c for c, is_closed in communicating_classes(p > 0) if is_closed]
        if len(closed) != 1:
            raise ModelError(
                f"chain has {len(closed)} closed communicating classes; exactly one is required"
            )
        self.support = closed[0]
        p.setflags(write=False)
        self.transition = p
        pi = stationary_distribution(p, self.support)
        if np.max(np.abs(pi @ p - pi)) > 1e-10:
            raise ModelError("stationary vector fails pi P = pi within 1e-10")
        pi.setflags(write=False)
        self.stationary = pi

    @property
    def d(self) -> int:
        return self.transition.shape[0]

    @property
    def alphabet_size(self) -> int:
        return self.d

    def row_entropies(self) -> np.ndarray:
        """``-sum_j P_ij log P_ij`` for each state ``i``."""
        return np.array([entropy_nats(row) for row in self.transition])

    def word_probs(self, n: int, initial=None) -> np.ndarray:
        """Probabilities of all length-``n`` words in lexicographic order."""
        if n < 1:
            raise StructuralError("word length must be at least 1")
        p = self.transition
        w = np.array(self.stationary if initial is None else initial, dtype=float)
        d = self.d
        for _ in range(n - 1):
            last = np.arange(w.size) % d
            w = (w[:, None] * p[last, :]).ravel()
        return w

    def __repr__(self):
        return f"ClassicalMarkov(d={self.d})"


class DressedMarkov:
    """Markov chain conjugated site-wise by a unitary: block = U^{⊗n} D U^{⊗n}†."""

    kind = "dressed"

    def __init__(self, base: ClassicalMarkov, site_unitary):
        if not isinstance(base, ClassicalMarkov):
            base = ClassicalMarkov(base)
        try:
            u = np.array(as_matrix(site_unitary), dtype=complex)
        except Exception as exc:
            raise ModelError(f"invalid unitary: {exc}") from exc
        if u.shape != (base.d, base.d):
            raise ModelError(f"unitary shape {u.shape} does not match alphabet size {base.d}")
        dev = np.max(np.abs(u.conj().T @ u - np.eye(base.d)))
        if dev > 1e-10:
            raise ModelError(f"site unitary is not unitary (max |U†U - I| = {dev:.3e})")
        u.setflags(write=False)
        self.base = base
        self.site_unitary = u

    @property
    def d(self) -> int:
        return self.base.d

    def __repr__(self):
        return f"DressedMarkov(d={self.d})"


SourceModel = Union[IIDProduct, ClassicalMarkov, DressedMarkov]


# --------------------------------------------------------------------------
# Block states
# --------------------------------------------------------------------------


class BlockState:
    """n-block state of a source, diagonal in a known product basis.

    ``word_probs[w]`` is the eigenvalue belonging to the product basis vector
    indexed by word ``w``. ``density`` is built on first access.
    """

    def __init__(self, shape: BoxShape, source, word_probs, site_basis, diagonal: bool):
        self.shape = shape
        self.source = source
        self.word_probs = np.asarray(word_probs, dtype=float)
        self.site_basis = np.asarray(site_basis, dtype=complex)
        self.diagonal = diagonal

    @property
    def n(self) -> int:
        return self.shape.volume

    @property
    def d(self) -> int:
        return self.site_basis.shape[0]

    @property
    def dim(self) -> int:
        return self.word_probs.size

    @cached_property
    def order(self) -> np.ndarray:
        """Word indices sorted by descending probability, ties by ascending index."""
        return np.argsort(-self.word_probs, kind="stable")

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        w = clip_spectrum(self.word_probs[self.order])
        w.setflags(write=False)
        return w

    def eigenvectors(self, positions=None) -> np.ndarray:
        """Eigenvector columns for the given positions in the sorted spectrum."""
        idx = self.order if positions is None else self.order[np.asarray(positions, dtype=int)]
        if self.diagonal:
            out = np.zeros((self.dim, len(idx)), dtype=complex)
            out[idx, np.arange(len(idx))] = 1.0
            return out
        return kron_columns(self.site_basis, idx, self.n)

    def eig(self) -> EigenDecomposition:
        return EigenDecomposition(self.eigenvalues, self.eigenvectors())

    @cached_property
    def density(self) -> DensityOperator:
        src = self.source
        if isinstance(src, IIDProduct):
            return kron_power(src.site_density, self.n)
        diag = np.diag(self.word_probs.astype(complex))
        if isinstance(src, ClassicalMarkov):
            return DensityOperator(diag, check=False)
        u = kron_power(src.site_unitary, self.n)
        m = u @ diag @ u.conj().T
        return DensityOperator(0.5 * (m + m.conj().T), check=False)

    def __repr__(self):
        return f"BlockState(n={self.n}, dim={self.dim}, source={self.source!r})"


def _as_shape(n) -> BoxShape:
    if isinstance(n, BoxShape):
        shape = n
    else:
        shape = BoxShape.interval(int(n))
    if shape.nu != 1:
        raise StructuralError(f"quantum blocks are one-dimensional; got nu = {shape.nu}")
    return shape


def block_density(model: SourceModel, n, max_dim: Optional[int] = None) -> BlockState:
    """The n-block state of ``model`` (``n`` an int or a one-dimensional ``BoxShape``)."""
    shape = _as_shape(n)
    length = shape.volume
    d = model.d
    limit = linalg.MAX_DIM if max_dim is None else int(max_dim)
    if d**length > limit:
        raise CapacityError(
            f"block dimension d^n = {d}^{length} = {d**length} exceeds the maximum dimension {limit}"
        )
    if isinstance(model, IIDProduct):
        probs = np.ones(1)
        for _ in range(length):
            probs = np.outer(probs, model.site_probs).ravel()
        basis = model.site_basis
        diagonal = bool(np.array_equal(basis, np.eye(d)))
        return BlockState(shape, model, probs, basis, diagonal)
    if isinstance(model, ClassicalMarkov):
        return BlockState(shape, model, model.word_probs(length), np.eye(d), True)
    if isinstance(model, DressedMarkov):
        probs = model.base.word_probs(length)
        return BlockState(shape, model, probs, model.site_unitary, False)
    raise TypeError(f"unknown source model {model!r}")


def block_entropy(model: SourceModel, n, max_dim: Optional[int] = None) -> float:
    """von Neumann entropy of the n-block, in nats."""
    return entropy_nats(block_density(model, n, max_dim).eigenvalues)


def mean_entropy(model: SourceModel) -> float:
    """Entropy per site in nats."""
    if isinstance(model, IIDProduct):
        return entropy_nats(model.site_probs)
    if isinstance(model, DressedMarkov):
        model = model.base
    if isinstance(model, ClassicalMarkov):
        return float(np.dot(model.stationary, model.row_entropies()))
    raise TypeError(f"unknown source model {model!r}")


def base_chain(model: SourceModel) -> ClassicalMarkov:
    if isinstance(model, ClassicalMarkov):
        return model
    if isinstance(model, DressedMarkov):
        return model.base
    raise TypeError(f"{model!r} has no underlying Markov chain")

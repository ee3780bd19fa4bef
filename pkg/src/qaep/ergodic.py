"""
Decomposition of a stationary classical chain into components that are
ergodic under shifts by ``l`` sites.

For an irreducible chain of period ``d`` the ``l``-step chain splits the
support into ``gcd(l, d)`` closed classes. Started from the stationary law
conditioned on one class, each class gives a ``T^l``-invariant ergodic
component; the components are shifts of one another and mix uniformly back
to the source.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .aep import EmpiricalDistribution
from .errors import ContractError, ModelError, ParameterError
from .linalg import as_matrix, density_eig, is_orthonormal
from .states import (
    ClassicalMarkov,
    DressedMarkov,
    IIDProduct,
    communicating_classes,
    entropy_nats,
    mean_entropy,
)

ENTROPY_TOL = 1e-8
# word arrays checked by the mixture/translate identities are 1-D, so this is
# independent of the dense matrix limit
VERIFY_MAX_WORDS = 1 << 20


def as_classical_chain(model) -> Tuple[ClassicalMarkov, bool]:
    """Underlying classical chain and whether it lives in a rotated basis."""
    if isinstance(model, ClassicalMarkov):
        return model, False
    if isinstance(model, DressedMarkov):
        return model.base, True
    if isinstance(model, IIDProduct):
        chain = ClassicalMarkov(np.tile(model.site_probs, (model.d, 1)))
        return chain, not np.array_equal(model.site_basis, np.eye(model.d))
    raise TypeError(f"unknown source model {model!r}")


def chain_period(markov: ClassicalMarkov) -> int:
    """Period of the closed class: gcd of ``dist(u) + 1 - dist(v)`` over its edges."""
    if not isinstance(markov, ClassicalMarkov):
        raise ModelError(f"chain_period needs a ClassicalMarkov, got {markov!r}")
    support = list(markov.support)
    adj = markov.transition > 0
    ref = support[0]
    dist = {ref: 0}
    queue = deque([ref])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    if set(dist) != set(support):
        raise ModelError("closed class is not strongly connected")
    g = 0
    for u in support:
        for v in np.flatnonzero(adj[u]):
            g = math.gcd(g, abs(dist[u] + 1 - dist[int(v)]))
    return g


def _bool_power(adj: np.ndarray, k: int) -> np.ndarray:
    out = np.eye(adj.shape[0], dtype=bool)
    a = adj.astype(np.int64)
    for _ in range(k):
        out = (out.astype(np.int64) @ a) > 0
    return out


@dataclass(frozen=True)
class SublatticeSpec:
    """Sublattice ``l Z`` together with the number ``k`` of its ergodic components."""

    l: int
    k: int

    def __post_init__(self):
        if self.l < 1 or self.k < 1:
            raise ParameterError(f"l and k must be positive, got l={self.l}, k={self.k}")

    @property
    def divides(self) -> bool:
        return self.k <= self.l and self.l % self.k == 0


@dataclass(frozen=True)
class ErgodicComponent:
    index: int
    residue_class: Tuple[int, ...]
    initial: np.ndarray = field(repr=False)
    chain: ClassicalMarkov = field(repr=False)
    l: int
    entropy_rate_Gl: float

    def word_probs(self, m: int) -> np.ndarray:
        """Distribution of length-``m`` words of this component."""
        return self.chain.word_probs(m, initial=self.initial)

    def block_distribution(self, n: int) -> np.ndarray:
        """Word distribution on ``l * n`` consecutive sites."""
        return self.word_probs(self.l * n)

    def finite_box_entropy(self, m: int) -> float:
        """Shannon entropy of the length-``m`` words, by the Markov chain rule."""
        h = self.chain.row_entropies()
        law = self.initial
        total = entropy_nats(law)
        for _ in range(m - 1):
            total += float(law @ h)
            law = law @ self.chain.transition
        return total


@dataclass(frozen=True)
class DecompositionResult:
    spec: SublatticeSpec
    components: List[ErgodicComponent]
    basis_conjugated: bool
    weights: np.ndarray
    mixture_error: float
    translate_error: float
    verified_length: int

    @property
    def k(self) -> int:
        return self.spec.k

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)


def _component_rate(chain: ClassicalMarkov, initial: np.ndarray, l: int) -> float:
    # entropy per l-block: sum over the l phases of the conditional entropies
    h = chain.row_entropies()
    law = initial
    rate = 0.0
    for _ in range(l):
        rate += float(law @ h)
        law = law @ chain.transition
    return rate


def ergodic_decompose(
    model, l: int, max_words: Optional[int] = None, verify: bool = True
) -> DecompositionResult:
    """Components of ``model`` that are ergodic under shifts by ``l`` sites.

    The uniform-mixture and translate identities are verified on all word
    lengths up to ``3 l`` whose enumeration fits in ``max_words`` words
    (default ``VERIFY_MAX_WORDS``); the largest verified length is
    recorded.
    """
    if int(l) < 1:
        raise ParameterError(f"l must be a positive integer, got {l!r}")
    l = int(l)
    chain, conjugated = as_classical_chain(model)
    budget = VERIFY_MAX_WORDS if max_words is None else int(max_words)
    support = list(chain.support)
    adj = chain.transition > 0
    sub = np.ix_(support, support)
    adj_l = _bool_power(adj, l)[sub]

    classes = [tuple(support[i] for i in c) for c, _ in communicating_classes(adj_l)]
    k = len(classes)
    spec = SublatticeSpec(l, k)

    # order components as successive shifts of the class holding the first support state
    first = next(c for c in classes if support[0] in c)
    ordered = [first]
    reach = np.zeros(chain.d, dtype=bool)
    reach[list(first)] = True
    for _ in range(k - 1):
        reach = (reach.astype(np.int64) @ adj.astype(np.int64)) > 0
        nxt = next(c for c in classes if set(np.flatnonzero(reach)) <= set(c))
        ordered.append(nxt)
    if len(set(ordered)) != k:
        raise ModelError("component classes are not cyclically permuted by the shift")

    pi = chain.stationary
    weights = np.array([pi[list(c)].sum() for c in ordered])
    comps = []
    for x, cls in enumerate(ordered):
        init = np.zeros(chain.d)
        init[list(cls)] = pi[list(cls)]
        init /= init.sum()
        init.setflags(write=False)
        comps.append(
            ErgodicComponent(x, cls, init, chain, l, _component_rate(chain, init, l))
        )

    mixture_err, translate_err, verified = 0.0, 0.0, 0
    for m in range(1, 3 * l + 1 if verify else 1):
        if chain.d ** (m + k - 1) > budget:
            break
        source = chain.word_probs(m)
        mix = sum(c.word_probs(m) for c in comps) / k
        mixture_err = max(mixture_err, float(np.max(np.abs(mix - source))))
        for c in comps[1:]:
            x = c.index
            shifted = comps[0].word_probs(m + x).reshape(chain.d**x, -1).sum(axis=0)
            translate_err = max(translate_err, float(np.max(np.abs(shifted - c.word_probs(m)))))
        verified = m
    return DecompositionResult(spec, comps, conjugated, weights, mixture_err, translate_err, verified)


class EntropyCheck(NamedTuple):
    l: int
    k: int
    rates: List[float]
    target: float
    max_pairwise_diff: float
    equal_entropy: bool
    matches_target: bool


def component_entropy_check(model, l: int) -> EntropyCheck:
    """Compare each component's entropy per ``l``-block with ``l`` times the mean entropy."""
    dec = ergodic_decompose(model, l)
    rates = [c.entropy_rate_Gl for c in dec.components]
    chain, _ = as_classical_chain(model)
    target = l * mean_entropy(chain)
    spread = max(rates) - min(rates)
    return EntropyCheck(
        l, dec.k, rates, target, spread,
        spread <= ENTROPY_TOL,
        all(abs(r - target) <= ENTROPY_TOL for r in rates),
    )


class AtypicalReport(NamedTuple):
    l: int
    eta: float
    k: int
    fraction: float
    s_finite: List[float]


def atypical_density(model, l_max: int, eta: float) -> List[AtypicalReport]:
    """Fraction of ``l``-components whose entropy per site on ``l`` sites is ``>= s + eta``."""
    if not eta > 0:
        raise ParameterError(f"eta must be positive, got {eta!r}")
    chain, _ = as_classical_chain(model)
    s = mean_entropy(chain)
    out = []
    for l in range(1, l_max + 1):
        dec = ergodic_decompose(chain, l, verify=False)
        finite = [c.finite_box_entropy(l) / l for c in dec.components]
        bad = sum(1 for v in finite if v >= s + eta)
        out.append(AtypicalReport(l, float(eta), dec.k, bad / dec.k, finite))
    return out


def atypical_onset(reports: List[AtypicalReport]) -> Optional[int]:
    """Smallest ``L`` with zero atypical fraction for every reported ``l >= L``."""
    onset = None
    for r in reversed(reports):
        if r.fraction != 0:
            break
        onset = r.l
    return onset


def maximal_abelian_restriction(rho, basis="eigen") -> EmpiricalDistribution:
    """Outcome distribution of measuring ``rho`` in an orthonormal basis (columns of ``basis``).

    With ``basis="eigen"`` the eigenbasis is used and the Shannon entropy of
    the result equals the von Neumann entropy of ``rho``.
    """
    m = as_matrix(rho)
    if isinstance(basis, str):
        if basis != "eigen":
            raise ContractError(f"unknown basis keyword {basis!r}")
        e = density_eig(m)
        return EmpiricalDistribution.from_probs(e.eigenvalues)
    b = as_matrix(basis)
    if b.shape != m.shape or not is_orthonormal(b, 1e-10):
        raise ContractError("measurement basis is not orthonormal within 1e-10")
    probs = np.real(np.einsum("ji,jk,ki->i", b.conj(), m, b))
    if probs.min() < -1e-10:
        raise ContractError("measurement produced negative probabilities")
    probs = np.clip(probs, 0.0, None)
    return EmpiricalDistribution.from_probs(probs / probs.sum())


def decompose_report(model, l_max: int, eta: float) -> dict:
    """JSON-ready summary of the decompositions for ``l = 1..l_max``."""
    atyp = atypical_density(model, l_max, eta)
    reports = []
    conjugated = False
    for l, a in zip(range(1, l_max + 1), atyp):
        dec = ergodic_decompose(model, l)
        check = component_entropy_check(model, l)
        conjugated = dec.basis_conjugated
        reports.append(
            {
                "l": l,
                "k": dec.k,
                "divides_l": dec.spec.divides,
                "components": [
                    {"index": c.index, "entropy_rate_Gl": c.entropy_rate_Gl, "s_finite_box": a.s_finite[c.index]}
                    for c in dec.components
                ],
                "equal_entropy": check.equal_entropy,
                "matches_l_times_s": check.matches_target,
                "atypical_fraction": a.fraction,
                "mixture_error": dec.mixture_error,
                "translate_error": dec.translate_error,
                "verified_length": dec.verified_length,
            }
        )
    return {
        "eta": float(eta),
        "basis_conjugated": conjugated,
        "atypical_onset": atypical_onset(atyp),
        "reports": reports,
    }

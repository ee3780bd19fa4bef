"""
Brute-force reference computations.

These deliberately avoid the production code paths (no structured spectra,
no greedy prefix, no boolean matrix closure) so they can be used to check
them: exact binomial sums for two-level i.i.d. sources, exhaustive subset
searches, explicit word enumeration and graph search.
"""

import math
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Set

import numpy as np


# ---- two-level i.i.d. sources: eigenvalue p0^(n-k) p1^k with multiplicity C(n, k)


def binary_entropy(p: float) -> float:
    return -sum(x * math.log(x) for x in (p, 1.0 - p) if x > 0)


def binomial_levels(p0: float, n: int):
    """(probability, multiplicity) for k = 0..n ones, largest probability first when p0 >= 1/2."""
    p1 = 1.0 - p0
    return [(p0 ** (n - k) * p1**k, math.comb(n, k)) for k in range(n + 1)]


def binomial_window(p0: float, n: int, s: float, half_width: float):
    """(count, mass) of atoms with ``e^{-n(s+w)} <= p <= e^{-n(s-w)}``."""
    lo, hi = math.exp(-n * (s + half_width)), math.exp(-n * (s - half_width))
    count, mass = 0, 0.0
    for p, m in binomial_levels(p0, n):
        if lo <= p <= hi:
            count += m
            mass += m * p
    return count, mass


def binomial_prefix_count(p0: float, n: int, epsilon: float) -> int:
    """Fewest atoms with mass ``>= 1 - epsilon``, filling whole levels in exact rational arithmetic."""
    target = 1 - Fraction(epsilon)
    q0 = Fraction(p0)
    q1 = 1 - q0
    levels = sorted(((q0 ** (n - k) * q1**k, math.comb(n, k)) for k in range(n + 1)), reverse=True)
    acc, count = Fraction(0), 0
    for p, m in levels:
        if acc + m * p >= target:
            need = math.ceil((target - acc) / p)
            return count + need
        acc += m * p
        count += m
    return count


def binomial_mass_threshold(p0: float, delta: float, n_max: int, delta_prime: Optional[float] = None):
    """Smallest n whose inner-window mass reaches ``1 - delta``."""
    s = binary_entropy(p0)
    w = delta / 2 if delta_prime is None else delta_prime
    for n in range(1, n_max + 1):
        if binomial_window(p0, n, s, w)[1] >= 1 - delta:
            return n
    return None


# ---- exhaustive subset searches


def exhaustive_min_cover(probs: Sequence[float], epsilon: float) -> int:
    """Smallest subset size with total mass ``>= 1 - epsilon``, over all nonempty subsets."""
    p = np.asarray(probs, dtype=float)
    d = p.size
    masks = np.arange(1, 1 << d, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(d)) & 1).astype(bool)
    sizes = bits.sum(axis=1)
    mass = np.array([math.fsum(p[b]) for b in bits])
    ok = mass >= 1.0 - epsilon
    return int(sizes[ok].min())


def exhaustive_projector_beta(rho, eigenvectors, epsilon: float) -> float:
    """min log tr q over projectors onto spans of eigenvector subsets with tr(rho q) >= 1 - epsilon."""
    rho = np.asarray(rho, dtype=complex)
    v = np.asarray(eigenvectors, dtype=complex)
    d = v.shape[1]
    # tr(rho P_S) = sum_{i in S} <v_i|rho|v_i> and tr P_S = |S| for orthonormal columns
    weights = np.einsum("ji,jk,ki->i", v.conj(), rho, v).real
    masks = np.arange(1, 1 << d, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(d)) & 1).astype(bool)
    mass = bits @ weights
    sizes = bits.sum(axis=1)
    return math.log(int(sizes[mass >= 1.0 - epsilon].min()))


# ---- Markov chains


def enumerate_words(transition, initial, n: int) -> Dict[tuple, float]:
    """Probability of every length-n word, by explicit products."""
    p = np.asarray(transition, dtype=float)
    init = np.asarray(initial, dtype=float)
    d = p.shape[0]
    out = {}
    for w in product(range(d), repeat=n):
        prob = init[w[0]]
        for a, b in zip(w, w[1:]):
            prob *= p[a, b]
        out[w] = float(prob)
    return out


def word_entropy(transition, initial, n: int) -> float:
    probs = enumerate_words(transition, initial, n).values()
    return -math.fsum(x * math.log(x) for x in probs if x > 0)


def _reachable_from(adj: np.ndarray, start: int) -> Set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in range(adj.shape[0]):
            if adj[u, v] and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def closed_classes_dfs(transition, steps: int = 1) -> List[frozenset]:
    """Closed communicating classes of the ``steps``-step chain, by repeated graph search."""
    p = np.linalg.matrix_power(np.asarray(transition, dtype=float), steps)
    adj = p > 1e-300
    d = adj.shape[0]
    reach = [_reachable_from(adj, i) for i in range(d)]
    classes = set()
    for i in range(d):
        cls = frozenset(j for j in reach[i] if i in reach[j])
        # closed: nothing reachable from the class lies outside it
        if all(reach[j] <= cls for j in cls):
            classes.add(cls)
    return sorted(classes, key=min)


def cycle_gcd(transition, max_len: int = 12) -> int:
    """gcd of all lengths <= max_len of closed walks through recurrent states."""
    p = np.asarray(transition, dtype=float)
    support = set().union(*closed_classes_dfs(p))
    g = 0
    walk = np.eye(p.shape[0])
    for k in range(1, max_len + 1):
        walk = walk @ p
        if any(walk[i, i] > 0 for i in support):
            g = math.gcd(g, k)
    return g

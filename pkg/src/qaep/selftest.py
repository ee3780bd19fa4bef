"""Oracle suites run by ``qaep selftest``."""

import logging
import math
from typing import Callable, List, Tuple

import numpy as np

from . import catalog, oracles
from .aep import alpha, beta, mass_threshold_n, spectrum_distribution, typical_projector
from .ergodic import (
    atypical_density,
    chain_period,
    component_entropy_check,
    ergodic_decompose,
    maximal_abelian_restriction,
)
from .linalg import hermitian_eig
from .states import block_density, block_entropy, entropy_nats, mean_entropy

log = logging.getLogger(__name__)

Check = Callable[[], Tuple[bool, str]]


def _binomial_window() -> Tuple[bool, str]:
    model = catalog.biased_qubit(0.9)
    s = mean_entropy(model)
    worst = 0.0
    for n in range(1, 13):
        tp = typical_projector(block_density(model, n), s, 0.1)
        count, mass = oracles.binomial_window(0.9, n, s, 0.05)
        if tp.count != count:
            return False, f"n={n}: typical count {tp.count} != oracle {count}"
        worst = max(worst, abs(tp.mass - mass))
    got = mass_threshold_n(model, 0.2, 80)
    want = oracles.binomial_mass_threshold(0.9, 0.2, 80)
    ok = worst <= 1e-12 and got == want
    return ok, f"max mass error {worst:.2e}; threshold n {got} (oracle {want})"


def _binomial_prefix() -> Tuple[bool, str]:
    model = catalog.biased_qubit(0.9)
    for n in range(1, 13):
        block = block_density(model, n)
        for eps in (0.1, 0.01):
            got = beta(block, eps).count
            want = oracles.binomial_prefix_count(0.9, n, eps)
            if got != want:
                return False, f"n={n}, eps={eps}: count {got} != oracle {want}"
    return True, "beta counts match exact binomial prefixes for n<=12"


def _subset_beta() -> Tuple[bool, str]:
    rng = np.random.default_rng(11)
    classical = [
        (catalog.biased_qubit(0.9), 4),
        (catalog.symmetric_flip_chain(0.2), 4),
        (catalog.period_two_chain(0.3), 2),
        (catalog.random_chain(3, rng), 2),
    ]
    checked = 0
    for model, n_max in classical:
        for n in range(1, n_max + 1):
            block = block_density(model, n)
            dist = spectrum_distribution(block)
            for eps in (0.05, 0.1, 0.25, 0.5):
                want = oracles.exhaustive_min_cover(block.word_probs, eps)
                b = beta(block, eps)
                if b.count != want or alpha(dist, eps) != b.beta:
                    return False, f"{model!r} n={n} eps={eps}: beta count {b.count}, oracle {want}"
                checked += 1
    for _ in range(5):
        model = catalog.random_dressed(2, rng)
        block = block_density(model, 3)
        rho = block.density.matrix
        e = hermitian_eig(rho)
        for eps in (0.1, 0.3):
            want = oracles.exhaustive_projector_beta(rho, e.eigenvectors, eps)
            if beta(block, eps).beta != want:
                return False, f"dressed block eps={eps}: beta {beta(block, eps).beta} != {want}"
            checked += 1
    return True, f"{checked} block/epsilon pairs agree with exhaustive subset minima"


def _communicating_classes() -> Tuple[bool, str]:
    rng = np.random.default_rng(5)
    chains = [
        catalog.period_two_chain(0.3),
        catalog.deterministic_cycle(3),
        catalog.symmetric_flip_chain(0.2),
        catalog.random_bipartite_chain(3, rng),
        catalog.random_chain(4, rng),
    ]
    for chain in chains:
        if chain_period(chain) != oracles.cycle_gcd(chain.transition, 12):
            return False, f"{chain!r}: period {chain_period(chain)} != cycle gcd"
        for l in range(1, 7):
            dec = ergodic_decompose(chain, l, verify=False)
            got = sorted((frozenset(c.residue_class) for c in dec), key=min)
            want = oracles.closed_classes_dfs(chain.transition, l)
            if got != want or not dec.spec.divides:
                return False, f"{chain!r} l={l}: classes {got} != {want}"
    return True, f"periods and P^l classes agree for {len(chains)} chains, l<=6"


def _word_enumeration() -> Tuple[bool, str]:
    chain = catalog.period_two_chain(0.3)
    p, pi = chain.transition, chain.stationary
    for n in range(1, 6):
        words = oracles.enumerate_words(p, pi, n)
        probs = np.array([words[w] for w in sorted(words)])
        if np.max(np.abs(block_density(chain, n).word_probs - probs)) > 1e-12:
            return False, f"word probabilities differ at n={n}"
    flip = catalog.symmetric_flip_chain(0.2)
    want = math.log(2) + oracles.binary_entropy(0.2)
    if abs(block_entropy(flip, 2) - want) > 1e-12:
        return False, "flip-chain 2-block entropy mismatch"
    worst = 0.0
    for l in (1, 2, 3):
        dec = ergodic_decompose(chain, l)
        for c in dec:
            rate = oracles.word_entropy(p, c.initial, 2 * l) - oracles.word_entropy(p, c.initial, l)
            worst = max(worst, abs(rate - c.entropy_rate_Gl))
    for r in atypical_density(chain, 6, 0.05):
        dec = ergodic_decompose(chain, r.l, verify=False)
        for c, s_x in zip(dec, r.s_finite):
            worst = max(worst, abs(oracles.word_entropy(p, c.initial, r.l) / r.l - s_x))
    check = component_entropy_check(chain, 2)
    ok = worst <= 1e-10 and check.equal_entropy and check.matches_target
    return ok, f"max entropy deviation {worst:.2e}"


def _spectral_identity() -> Tuple[bool, str]:
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(10):
        rho = catalog.random_density(int(rng.integers(2, 17)), rng)
        e = hermitian_eig(rho.matrix)
        worst = max(worst, abs(spectrum_distribution(rho).entropy() - entropy_nats(np.clip(e.eigenvalues, 0, 1))))
        u = catalog.random_unitary(rho.dim, rng)
        h_basis = maximal_abelian_restriction(rho, u).entropy()
        if h_basis < spectrum_distribution(rho).entropy() - 1e-8:
            return False, "measurement entropy fell below the von Neumann entropy"
    model = catalog.random_dressed(2, rng)
    block = block_density(model, 4)
    dense = hermitian_eig(block.density.matrix).eigenvalues
    worst = max(worst, float(np.max(np.abs(dense - block.eigenvalues))))
    return worst <= 1e-8, f"max deviation {worst:.2e}"


CHECKS: List[Tuple[str, Check]] = [
    ("binomial-window", _binomial_window),
    ("binomial-prefix", _binomial_prefix),
    ("subset-beta", _subset_beta),
    ("communicating-class", _communicating_classes),
    ("word-enumeration", _word_enumeration),
    ("spectral-identity", _spectral_identity),
]


def run_selftest() -> dict:
    results = []
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failed check, not a crashed run
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        log.debug("%s %s: %s", "PASS" if ok else "FAIL", name, detail)
        results.append({"name": name, "ok": bool(ok), "detail": detail})
    return {"passed": all(r["ok"] for r in results), "checks": results}

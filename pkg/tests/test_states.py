import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaep import catalog, oracles
from qaep.errors import CapacityError, ModelError, StructuralError
from qaep.linalg import partial_trace
from qaep.states import (
    BoxShape,
    ClassicalMarkov,
    DressedMarkov,
    IIDProduct,
    block_density,
    block_entropy,
    communicating_classes,
    entropy_nats,
    mean_entropy,
    stationary_distribution,
)

# closed form -(0.9 ln 0.9 + 0.1 ln 0.1)
S_BIASED = 0.3250829733914482


def _models(rng):
    return [
        catalog.biased_qubit(0.9),
        catalog.random_iid(2, rng),
        catalog.symmetric_flip_chain(0.2),
        catalog.period_two_chain(0.3),
        catalog.random_dressed(2, rng),
    ]


def test_box_shape():
    assert BoxShape.interval(5).volume == 5
    assert BoxShape((2, 3)).nu == 2
    with pytest.raises(StructuralError):
        block_density(catalog.biased_qubit(), BoxShape((2, 2)))


def test_iid_block_example():
    rho2 = block_density(catalog.biased_qubit(0.9), 2).density.matrix
    assert np.allclose(rho2, np.diag([0.81, 0.09, 0.09, 0.01]), atol=1e-15)


def test_markov_block_example():
    block = block_density(catalog.symmetric_flip_chain(0.2), 2)
    assert np.allclose(block.density.matrix, np.diag([0.4, 0.1, 0.1, 0.4]), atol=1e-15)


def test_mean_entropy_biased():
    assert abs(mean_entropy(catalog.biased_qubit(0.9)) - S_BIASED) < 1e-15
    assert abs(S_BIASED - oracles.binary_entropy(0.9)) < 1e-15


def test_flip_chain_two_block_entropy():
    want = math.log(2) + oracles.binary_entropy(0.2)
    assert abs(block_entropy(catalog.symmetric_flip_chain(0.2), 2) - want) < 1e-12


@pytest.mark.parametrize("n", range(1, 8))
def test_consistency_and_translation(rng, n):
    for model in _models(rng):
        if model.d ** (n + 1) > 4096:
            continue
        big = block_density(model, n + 1).density
        small = block_density(model, n).density.matrix
        dims = [model.d] * (n + 1)
        left = partial_trace(big, dims, range(n)).matrix
        right = partial_trace(big, dims, range(1, n + 1)).matrix
        assert np.allclose(left, small, atol=1e-12), model
        assert np.allclose(right, small, atol=1e-12), model


def test_subadditivity_and_rate(rng):
    for model in _models(rng):
        s = mean_entropy(model)
        ent = [0.0] + [block_entropy(model, n, max_dim=1 << 16) for n in range(1, 9)]
        for n in range(1, 5):
            for m in range(1, 5):
                assert ent[n + m] <= ent[n] + ent[m] + 1e-10
        for n in range(1, 9):
            assert s <= ent[n] / n + 1e-10


def test_markov_entropy_telescopes(rng):
    for chain in (catalog.symmetric_flip_chain(0.2), catalog.random_chain(3, rng), catalog.period_two_chain(0.3)):
        s = mean_entropy(chain)
        want = entropy_nats(chain.stationary) + 9 * s
        assert abs(block_entropy(chain, 10, max_dim=1 << 20) - want) < 1e-8


def test_dressed_spectrum_is_base_word_law(rng):
    model = catalog.random_dressed(3, rng)
    block = block_density(model, 3)
    dense = np.linalg.eigvalsh(block.density.matrix)[::-1]
    assert np.allclose(dense, np.sort(model.base.word_probs(3))[::-1], atol=1e-12)
    assert abs(block_entropy(model, 3) - block_entropy(model.base, 3)) < 1e-12


def test_eigenvectors_diagonalize(rng):
    block = block_density(catalog.random_iid(2, rng), 4)
    e = block.eig()
    assert np.allclose(e.reconstruct(), block.density.matrix, atol=1e-12)


def test_capacity_error():
    with pytest.raises(CapacityError, match="2\\^13 = 8192"):
        block_density(catalog.biased_qubit(), 13)
    assert block_density(catalog.biased_qubit(), 13, max_dim=1 << 13).dim == 8192


class TestChains:
    def test_stationary(self):
        chain = ClassicalMarkov([[0.5, 0.5], [0.25, 0.75]])
        assert np.allclose(chain.stationary, [1 / 3, 2 / 3], atol=1e-12)

    def test_periodic_stationary(self):
        assert np.allclose(catalog.deterministic_cycle(3).stationary, 1 / 3, atol=1e-12)
        assert np.allclose(catalog.period_two_chain().stationary, 0.25, atol=1e-12)

    def test_transient_state_gets_zero_weight(self):
        chain = ClassicalMarkov([[0.5, 0.5, 0.0], [0.0, 0.3, 0.7], [0.0, 0.6, 0.4]])
        assert chain.stationary[0] == 0
        assert np.allclose(chain.stationary @ chain.transition, chain.stationary, atol=1e-12)

    def test_rejects_two_closed_classes(self):
        with pytest.raises(ModelError, match="2 closed"):
            ClassicalMarkov(np.eye(2))

    def test_rejects_bad_rows(self):
        with pytest.raises(ModelError, match="row 1 sums"):
            ClassicalMarkov([[1.0, 0.0], [0.5, 0.6]])
        with pytest.raises(ModelError, match="negative"):
            ClassicalMarkov([[1.2, -0.2], [0.5, 0.5]])

    def test_classes_match_dfs(self, rng):
        for _ in range(10):
            p = np.where(rng.random((5, 5)) < 0.35, 1.0, 0.0)
            p_full = p + np.eye(5) * (p.sum(axis=1) == 0)[:, None]
            closed = sorted((frozenset(c) for c, ok in communicating_classes(p_full > 0) if ok), key=min)
            assert closed == oracles.closed_classes_dfs(p_full / p_full.sum(axis=1, keepdims=True))

    def test_word_probs_match_enumeration(self, rng):
        chain = catalog.random_chain(3, rng)
        words = oracles.enumerate_words(chain.transition, chain.stationary, 4)
        assert np.allclose(chain.word_probs(4), [words[w] for w in sorted(words)], atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**31), d=st.integers(2, 5))
    def test_stationary_property(self, seed, d):
        chain = catalog.random_chain(d, np.random.default_rng(seed))
        pi = stationary_distribution(chain.transition)
        assert abs(pi.sum() - 1) < 1e-12
        assert np.max(np.abs(pi @ chain.transition - pi)) < 1e-10


def test_iid_diagonal_keeps_basis():
    model = IIDProduct(np.diag([0.3, 0.7]))
    assert np.array_equal(model.site_basis, np.eye(2))
    assert np.allclose(model.site_probs, [0.3, 0.7])


def test_dressed_rejects_non_unitary():
    with pytest.raises(ModelError, match="not unitary"):
        DressedMarkov(catalog.symmetric_flip_chain(), [[1, 1], [0, 1]])


def test_pure_and_mixed_block_entropy():
    for n in (1, 4, 9):
        assert block_entropy(catalog.pure_qubit(), n) == 0
        assert abs(block_entropy(catalog.maximally_mixed_qubit(), n) - n * math.log(2)) < 1e-12


def test_markov_single_site_is_stationary():
    chain = ClassicalMarkov([[0.5, 0.5], [0.25, 0.75]])
    assert np.allclose(block_density(chain, 1).density.matrix, np.diag(chain.stationary))


def test_cycle_has_zero_rate():
    assert mean_entropy(catalog.deterministic_cycle(4)) == 0


def test_subadditivity_to_ten(rng):
    for model in (catalog.random_chain(2, rng), catalog.random_dressed(2, rng), catalog.random_iid(2, rng)):
        ent = [0.0] + [block_entropy(model, n) for n in range(1, 11)]
        s = mean_entropy(model)
        for n in range(1, 10):
            for m in range(1, 11 - n):
                assert ent[n + m] <= ent[n] + ent[m] + 1e-8
        assert all(s <= ent[n] / n + 1e-8 for n in range(1, 11))

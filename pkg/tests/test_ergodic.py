import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaep import catalog, oracles
from qaep.aep import von_neumann_entropy
from qaep.errors import ContractError, ParameterError
from qaep.ergodic import (
    SublatticeSpec,
    atypical_density,
    atypical_onset,
    chain_period,
    component_entropy_check,
    decompose_report,
    ergodic_decompose,
    maximal_abelian_restriction,
)
from qaep.states import mean_entropy

H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


class TestPeriod:
    def test_examples(self):
        assert chain_period(catalog.symmetric_flip_chain(0.2)) == 1
        assert chain_period(catalog.period_two_chain(0.3)) == 2
        assert chain_period(catalog.deterministic_cycle(3)) == 3

    def test_random_bipartite(self, rng):
        for half in (1, 2, 3):
            chain = catalog.random_bipartite_chain(half, rng)
            assert chain_period(chain) == oracles.cycle_gcd(chain.transition, 12) == 2

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**31), d=st.integers(2, 6))
    def test_matches_cycle_gcd(self, seed, d):
        chain = catalog.random_chain(d, np.random.default_rng(seed), density=0.2)
        assert chain_period(chain) == oracles.cycle_gcd(chain.transition, 3 * d)


class TestDecompose:
    @pytest.mark.parametrize("l,k", [(1, 1), (2, 2), (3, 1), (4, 2), (5, 1), (6, 2)])
    def test_period_two(self, period_two, l, k):
        dec = ergodic_decompose(period_two, l)
        assert dec.k == k and dec.spec.divides
        assert dec.mixture_error < 1e-12 and dec.translate_error < 1e-12
        # d = 4 words: the 2^20 budget stops at length 10 minus the shift
        assert dec.verified_length >= min(3 * l, 9)
        assert np.allclose(dec.weights, 1 / k)

    @pytest.mark.parametrize("l", range(1, 8))
    def test_cycle_gives_gcd(self, l):
        dec = ergodic_decompose(catalog.deterministic_cycle(3), l)
        assert dec.k == math.gcd(l, 3)

    def test_components_are_residue_classes(self, period_two):
        dec = ergodic_decompose(period_two, 2)
        assert [c.residue_class for c in dec] == [(0, 1), (2, 3)]

    def test_translate_by_hand(self, period_two):
        c0, c1 = ergodic_decompose(period_two, 2)
        # drop the first site of a 3-word of component 0
        shifted = c0.word_probs(3).reshape(4, 16).sum(axis=0)
        assert np.max(np.abs(shifted - c1.word_probs(2))) < 1e-15

    def test_mixture_by_enumeration(self, period_two):
        dec = ergodic_decompose(period_two, 2)
        words = oracles.enumerate_words(period_two.transition, period_two.stationary, 4)
        mix = sum(c.word_probs(4) for c in dec) / 2
        assert np.max(np.abs(mix - [words[w] for w in sorted(words)])) < 1e-15

    def test_iid_is_totally_ergodic(self, biased):
        for l in range(1, 6):
            dec = ergodic_decompose(biased, l)
            assert dec.k == 1 and not dec.basis_conjugated

    def test_dressed_flags_basis(self, rng):
        dec = ergodic_decompose(catalog.random_dressed(2, rng), 2)
        assert dec.basis_conjugated

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**31), half=st.integers(1, 3), l=st.integers(1, 6))
    def test_k_is_gcd_with_period(self, seed, half, l):
        chain = catalog.random_bipartite_chain(half, np.random.default_rng(seed))
        dec = ergodic_decompose(chain, l, verify=False)
        assert dec.k == math.gcd(l, 2)
        got = sorted((frozenset(c.residue_class) for c in dec), key=min)
        assert got == oracles.closed_classes_dfs(chain.transition, l)

    def test_bad_l(self, period_two):
        with pytest.raises(ParameterError):
            ergodic_decompose(period_two, 0)
        with pytest.raises(ParameterError):
            SublatticeSpec(0, 1)


class TestEntropy:
    @pytest.mark.parametrize("l", [1, 2, 3, 4])
    def test_rates_equal_l_times_s(self, period_two, l):
        check = component_entropy_check(period_two, l)
        assert check.equal_entropy and check.matches_target
        assert check.target == pytest.approx(l * mean_entropy(period_two), abs=1e-14)

    def test_rate_by_enumeration(self, rng):
        chain = catalog.random_bipartite_chain(2, rng)
        for l in (1, 2, 3):
            for c in ergodic_decompose(chain, l):
                want = oracles.word_entropy(chain.transition, c.initial, 2 * l) - oracles.word_entropy(
                    chain.transition, c.initial, l
                )
                assert c.entropy_rate_Gl == pytest.approx(want, abs=1e-10)

    def test_finite_box_entropy(self, period_two):
        for c in ergodic_decompose(period_two, 2):
            for m in range(1, 7):
                want = oracles.word_entropy(period_two.transition, c.initial, m)
                assert c.finite_box_entropy(m) == pytest.approx(want, abs=1e-12)


class TestAtypical:
    def test_matches_enumeration(self, period_two):
        s = mean_entropy(period_two)
        for r in atypical_density(period_two, 8, 0.05):
            dec = ergodic_decompose(period_two, r.l, verify=False)
            finite = [oracles.word_entropy(period_two.transition, c.initial, r.l) / r.l for c in dec]
            assert np.allclose(r.s_finite, finite, atol=1e-12)
            assert r.fraction == sum(v >= s + 0.05 for v in finite) / dec.k

    def test_onset(self, period_two):
        # odd l merge both parity classes and pay log 4 instead of log 2
        reports = atypical_density(period_two, 24, 0.05)
        odd_bad = [r.l for r in reports if r.fraction > 0]
        assert odd_bad == [1, 3, 5, 7, 9, 11, 13, 15]
        assert atypical_onset(reports) == 16

    def test_onset_none(self):
        assert atypical_onset([]) is None

    def test_report(self, period_two):
        rep = decompose_report(period_two, 4, 0.05)
        assert [r["k"] for r in rep["reports"]] == [1, 2, 1, 2]
        assert all(r["equal_entropy"] and r["divides_l"] for r in rep["reports"])
        assert rep["atypical_onset"] is None or rep["atypical_onset"] <= 4


class TestMaximalAbelian:
    def test_hadamard(self):
        dist = maximal_abelian_restriction(np.diag([1.0, 0.0]), H)
        assert np.allclose(dist.probs, [0.5, 0.5])

    def test_eigenbasis_attains_entropy(self, rng):
        rho = catalog.random_density(5, rng)
        assert maximal_abelian_restriction(rho).entropy() == pytest.approx(von_neumann_entropy(rho), abs=1e-12)

    def test_random_bases_bound(self, rng):
        for _ in range(20):
            rho = catalog.random_density(4, rng)
            u = catalog.random_unitary(4, rng)
            assert maximal_abelian_restriction(rho, u).entropy() >= von_neumann_entropy(rho) - 1e-8

    def test_rejects_bad_basis(self):
        with pytest.raises(ContractError):
            maximal_abelian_restriction(np.eye(2) / 2, [[1, 1], [0, 1]])
        with pytest.raises(ContractError):
            maximal_abelian_restriction(np.eye(2) / 2, "computational")


class TestSpecExamples:
    def test_alternation_point_masses(self):
        cyc = catalog.deterministic_cycle(2)
        dec = ergodic_decompose(cyc, 2)
        assert dec.k == 2
        assert [c.word_probs(4).max() for c in dec] == [1.0, 1.0]
        assert [c.entropy_rate_Gl for c in dec] == [0.0, 0.0]

    def test_k_divides_l(self, rng):
        chains = [catalog.period_two_chain(0.3), catalog.deterministic_cycle(3), catalog.random_bipartite_chain(2, rng)]
        for chain in chains:
            for l in range(1, 13):
                assert ergodic_decompose(chain, l, verify=False).spec.divides

    def test_aperiodic_single_component(self, rng):
        chain = catalog.random_chain(3, rng)
        for l in range(1, 7):
            dec = ergodic_decompose(chain, l)
            assert dec.k == 1 and np.allclose(dec.components[0].initial, chain.stationary)

    def test_no_atypical_components(self, biased):
        assert all(r.fraction == 0 for r in atypical_density(biased, 8, 0.05))

    def test_cycle_atypical_only_off_period(self):
        # l not divisible by 3 keeps one component with a uniform phase: s_x = log 3 / l
        reports = atypical_density(catalog.deterministic_cycle(3), 30, 0.05)
        for r in reports:
            want = 0.0 if r.l % 3 == 0 else math.log(3) / r.l
            assert r.s_finite == pytest.approx([want] * r.k, abs=1e-12)
            assert r.fraction == (1.0 if want >= 0.05 else 0.0)
        # l = 20 is the last atypical length; 21 is a multiple of 3
        assert atypical_onset(reports) == 21

    def test_computational_basis(self):
        rho = np.diag([0.7, 0.2, 0.1])
        assert np.allclose(maximal_abelian_restriction(rho, np.eye(3)).probs, [0.7, 0.2, 0.1])
        dist = maximal_abelian_restriction(np.diag([0.9, 0.1]), H)
        assert dist.entropy() == pytest.approx(math.log(2)) and dist.entropy() > von_neumann_entropy(np.diag([0.9, 0.1]))

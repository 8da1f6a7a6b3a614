"""Tests for uniform and prioritized replay."""

import numpy as np
import pytest

from configrl.errors import ContractError, InsufficientDataError
from configrl.replay import ReplayMemory, Transition


def tr(tag: int) -> Transition:
    return Transition(
        state=np.array([float(tag), 0.0]),
        action=0,
        next_state=np.array([0.0, float(tag)]),
        reward=np.array([-0.1]),
    )


def mem(capacity=16, mode="per", zeta=1.0, seed=0):
    return ReplayMemory(capacity, np.random.default_rng(seed), mode=mode, zeta=zeta)


def empirical_frequencies(m, draws):
    # sample() requires batch <= size, so draw in chunks of the live size.
    counts = {}
    done = 0
    while done < draws:
        chunk = min(len(m), draws - done)
        for entry_id, _ in m.sample(chunk):
            counts[entry_id] = counts.get(entry_id, 0) + 1
        done += chunk
    return {i: c / draws for i, c in counts.items()}


class TestTransition:
    def test_state_length_mismatch_rejected(self):
        with pytest.raises(ContractError):
            Transition(np.zeros(2), 0, np.zeros(3), np.array([0.0]))

    def test_negative_action_rejected(self):
        with pytest.raises(ContractError):
            Transition(np.zeros(2), -1, np.zeros(2), np.array([0.0]))


class TestPush:
    def test_push_to_empty(self):
        m = mem()
        m.push(tr(0))
        assert len(m) == 1

    def test_ring_eviction(self):
        m = mem(capacity=8)
        for i in range(9):
            m.push(tr(i), priority=1.0)
        assert len(m) == 8
        assert m.oldest_id == 1
        with pytest.raises(ContractError):
            m.update_priority(0, 1.0)

    def test_nonpositive_priority_rejected(self):
        m = mem()
        with pytest.raises(ContractError):
            m.push(tr(0), priority=0.0)

    def test_default_priority_is_current_max(self):
        m = mem(zeta=1.0)
        m.push(tr(0), priority=0.5)
        m.push(tr(1), priority=4.0)
        m.push(tr(2))  # unspecified -> max so far
        probs = m.probabilities()
        assert np.isclose(probs[1], probs[2])
        assert np.isclose(probs.sum(), 1.0)


class TestSample:
    def test_insufficient_data(self):
        m = mem()
        m.push(tr(0))
        with pytest.raises(InsufficientDataError):
            m.sample(2)

    def test_equal_priorities_are_symmetric(self):
        m = mem(zeta=1.0)
        m.push(tr(0), priority=1.0)
        m.push(tr(1), priority=1.0)
        freqs = empirical_frequencies(m, 100_000)
        assert abs(freqs[0] - 0.5) < 0.01
        assert abs(freqs[1] - 0.5) < 0.01

    def test_three_to_one_priorities(self):
        m = mem(zeta=1.0)
        m.push(tr(0), priority=3.0)
        m.push(tr(1), priority=1.0)
        freqs = empirical_frequencies(m, 100_000)
        assert abs(freqs[0] - 0.75) < 0.01
        assert abs(freqs[1] - 0.25) < 0.01

    def test_zeta_zero_collapses_to_uniform(self):
        m = mem(zeta=0.0)
        m.push(tr(0), priority=100.0)
        m.push(tr(1), priority=0.01)
        freqs = empirical_frequencies(m, 100_000)
        assert abs(freqs[0] - 0.5) < 0.01

    def test_uniform_mode_each_index_equally_likely(self):
        m = mem(mode="uniform")
        for i in range(4):
            m.push(tr(i))
        freqs = empirical_frequencies(m, 100_000)
        for i in range(4):
            assert abs(freqs[i] - 0.25) < 0.01

    def test_sample_returns_live_entries(self):
        m = mem(capacity=4, zeta=1.0)
        for i in range(7):
            m.push(tr(i), priority=1.0)
        for _ in range(16):
            for entry_id, item in m.sample(4):
                assert 3 <= entry_id < 7
                assert item.state[0] == float(entry_id)


class TestUpdatePriority:
    def test_dominating_priority(self):
        m = mem(zeta=1.0)
        m.push(tr(0), priority=1.0)
        m.push(tr(1), priority=1.0)
        m.update_priority(0, 1e6)
        freqs = empirical_frequencies(m, 10_000)
        assert freqs.get(0, 0.0) > 0.99

    def test_update_then_revert_restores_distribution(self):
        m = mem(zeta=0.7)
        m.push(tr(0), priority=2.0)
        m.push(tr(1), priority=5.0)
        before = m.probabilities().copy()
        m.update_priority(0, 9.0)
        m.update_priority(0, 2.0)
        assert np.allclose(m.probabilities(), before)

    def test_stale_index_rejected(self):
        m = mem(capacity=2, zeta=1.0)
        for i in range(3):
            m.push(tr(i), priority=1.0)
        with pytest.raises(ContractError):
            m.update_priority(0, 5.0)

    def test_nonpositive_priority_rejected(self):
        m = mem()
        m.push(tr(0))
        with pytest.raises(ContractError):
            m.update_priority(0, -1.0)


class TestProbabilities:
    def test_match_per_formula_analytically(self):
        rng = np.random.default_rng(3)
        for zeta in (0.0, 0.4, 1.0):
            m = mem(zeta=zeta, seed=5)
            priorities = rng.uniform(0.1, 8.0, size=12)
            for i, p in enumerate(priorities):
                m.push(tr(i), priority=float(p))
            expected = priorities**zeta / np.sum(priorities**zeta)
            got = m.probabilities()
            assert np.isclose(got.sum(), 1.0)
            assert np.allclose(got, expected)

    def test_eviction_keeps_fifo_order(self):
        m = mem(capacity=4, zeta=1.0)
        for i in range(10):
            m.push(tr(i), priority=float(i + 1))
        live = [m._entries[i % m.capacity].state[0] for i in range(m.oldest_id, m._pushes)]
        assert live == [6.0, 7.0, 8.0, 9.0]

    def test_zeta_zero_matches_uniform_chi_square(self):
        # Sanity: draw frequencies under zeta=0 PER vs uniform mode are
        # statistically indistinguishable at desk scale.
        per = mem(mode="per", zeta=0.0, seed=11)
        uni = mem(mode="uniform", seed=11)
        for i in range(8):
            per.push(tr(i), priority=float(2**i))
            uni.push(tr(i))
        n = 40_000
        f_per = empirical_frequencies(per, n)
        f_uni = empirical_frequencies(uni, n)
        chi2 = sum(
            (f_per.get(i, 0) * n - n / 8) ** 2 / (n / 8)
            + (f_uni.get(i, 0) * n - n / 8) ** 2 / (n / 8)
            for i in range(8)
        )
        # 14 degrees of freedom; 99.9th percentile is ~36.1
        assert chi2 < 36.1


class TestValidation:
    def test_bad_mode_rejected(self):
        with pytest.raises(ContractError):
            ReplayMemory(4, np.random.default_rng(0), mode="nope")

    def test_bad_zeta_rejected(self):
        with pytest.raises(ContractError):
            ReplayMemory(4, np.random.default_rng(0), zeta=1.5)

    def test_bad_capacity_rejected(self):
        with pytest.raises(ContractError):
            ReplayMemory(0, np.random.default_rng(0))

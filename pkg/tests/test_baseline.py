"""Tests for the epsilon-greedy bandit baseline."""

import numpy as np

from configrl.baseline import EGreedyBaseline


def test_initial_sweep_visits_every_config_once():
    bandit = EGreedyBaseline(42, seed=3)
    seen = [bandit.select_action() for _ in range(42)]
    assert sorted(seen) == list(range(42))
    assert bandit.phase == "greedy"


def test_post_sweep_argmax():
    bandit = EGreedyBaseline(42, seed=1, eps=0.0)
    for _ in range(42):
        bandit.select_action()
    bandit.values[:] = -1.0
    bandit.values[9] = -0.2
    assert all(bandit.select_action() == 9 for _ in range(20))


def test_argmax_tie_breaks_to_lowest_index():
    bandit = EGreedyBaseline(5, seed=1, eps=0.0)
    for _ in range(5):
        bandit.select_action()
    bandit.values[:] = -0.5
    assert bandit.select_action() == 0


def test_exploration_rate_expectation():
    # eps = 1e-4 means about one random pull per ten thousand steps.
    bandit = EGreedyBaseline(5, seed=7)
    for _ in range(5):
        bandit.select_action()
    bandit.values[:] = -1.0
    bandit.values[2] = -0.1
    pulls = [bandit.select_action() for _ in range(50_000)]
    explored = sum(1 for p in pulls if p != 2)
    assert explored < 30


def test_update_first_sample_sets_estimate():
    bandit = EGreedyBaseline(3, seed=1)
    bandit.update(0, -0.5)
    assert bandit.values[0] == -0.5


def test_update_running_mean():
    bandit = EGreedyBaseline(3, seed=1)
    bandit.update(1, -0.4)
    bandit.update(1, -0.6)
    assert np.isclose(bandit.values[1], -0.5)


def test_noisy_mean_concentrates():
    bandit = EGreedyBaseline(3, seed=1)
    rng = np.random.default_rng(5)
    for _ in range(1000):
        bandit.update(2, rng.normal(-0.3, 0.2))
    assert abs(bandit.values[2] - (-0.3)) < 0.02


def test_deterministic_given_seed():
    a = EGreedyBaseline(10, seed=4)
    b = EGreedyBaseline(10, seed=4)
    for _ in range(200):
        x, y = a.select_action(), b.select_action()
        assert x == y
        a.update(x, -0.1)
        b.update(y, -0.1)

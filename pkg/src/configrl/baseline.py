"""Epsilon-greedy baseline over the configuration catalog.

Sweeps every configuration exactly once in a seeded order, then
exploits the running-mean value estimates with a tiny exploration rate
(0.0001 by default, i.e. roughly one random pull per ten thousand
steps).
"""

from __future__ import annotations

import numpy as np

BASELINE_EPS = 0.0001


class EGreedyBaseline:
    """Value-estimate bandit with an initial one-pass sweep."""

    def __init__(self, n_actions: int, seed: int, eps: float = BASELINE_EPS):
        self.n_actions = n_actions
        self.eps = eps
        self.rng = np.random.default_rng(seed)
        self.values = np.zeros(n_actions)
        self.counts = np.zeros(n_actions, dtype=np.int64)
        self.sweep_order = self.rng.permutation(n_actions)
        self.steps = 0

    @property
    def phase(self) -> str:
        return "initial-sweep" if self.steps < self.n_actions else "greedy"

    def select_action(self, state=None) -> int:
        """Next configuration to try; the state argument is ignored."""
        if self.steps < self.n_actions:
            action = int(self.sweep_order[self.steps])
        elif self.rng.random() < self.eps:
            action = int(self.rng.integers(self.n_actions))
        else:
            action = int(np.argmax(self.values))
        self.steps += 1
        return action

    def update(self, action: int, scalar_reward: float) -> None:
        """Fold one observed reward into the running mean for ``action``."""
        self.counts[action] += 1
        self.values[action] += (scalar_reward - self.values[action]) / self.counts[action]

"""Tiny deterministic MDPs used to sanity-check the learners.

The chain is small enough that its optimal Q-table is computable by a
few lines of value iteration, which makes it a convergence oracle for
the DQN training loop.
"""

from __future__ import annotations

import numpy as np


class ChainMdp:
    """4-state, 2-action deterministic chain, continuing (no terminals).

    Action 1 moves right (capped at the last state), action 0 moves
    left (capped at the first). Staying put at the left end pays a small
    lure of 0.3; pushing right at the right end pays 1.0. With any
    discount above ~0.5 the optimal policy is to move right everywhere.
    """

    n_states = 4
    n_actions = 2

    def __init__(self):
        self.state = 0

    @staticmethod
    def transition(state: int, action: int) -> int:
        return min(state + 1, ChainMdp.n_states - 1) if action == 1 else max(state - 1, 0)

    @staticmethod
    def reward(state: int, action: int) -> float:
        if state == ChainMdp.n_states - 1 and action == 1:
            return 1.0
        if state == 0 and action == 0:
            return 0.3
        return 0.0

    @staticmethod
    def encode(state: int) -> np.ndarray:
        vec = np.zeros(ChainMdp.n_states)
        vec[state] = 1.0
        return vec

    def reset(self) -> np.ndarray:
        self.state = 0
        return self.encode(self.state)

    def step(self, action: int) -> tuple[np.ndarray, float]:
        r = self.reward(self.state, action)
        self.state = self.transition(self.state, action)
        return self.encode(self.state), r

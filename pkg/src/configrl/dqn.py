"""Single-objective deep Q-learning agent.

Epsilon-greedy action selection, squared-error regression onto Bellman
targets computed with a periodically synchronized target network, and
replay sampling (uniform or prioritized) from an owned memory. The task
is continuing, so targets always bootstrap; there is no terminal
masking.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from configrl import neuro
from configrl.errors import ContractError, TrainingDivergenceError
from configrl.neuro import Network, clone_into, init_network
from configrl.replay import ReplayMemory, Transition

PRIORITY_FLOOR = 1e-5


@dataclass
class Hyperparameters:
    """All run tunables, defaulting to the shipped configuration.

    ``learning_rate`` doubles as the mixing rate in the W-value update;
    the ``w_*`` fields only matter to the multi-objective agent.
    """

    memory_size: int = 10**6
    batch_size: int = 64
    learning_rate: float = 0.01
    discount: float = 0.99
    eps_start: float = 0.99
    eps_min: float = 0.001
    eps_decay: float = 0.99
    per_zeta: float = 0.6
    target_sync_interval: int = 50
    w_eps_start: float = 0.99
    w_eps_min: float = 0.001
    w_eps_decay: float = 0.99
    w_training_delay: int = 200
    # Mixing rate of the W-value update. Kept separate from the
    # optimizer learning rate: at 0.01 a W-value can move at most ~1%
    # of the way toward its update bracket per target sync, so it never
    # leaves its starting point within a 300-step episode.
    w_alpha: float = 0.5
    hidden_dims: tuple[int, ...] = (64, 64)
    replay_mode: str = "per"
    # Negate the bracketed term of the W-value update (see dwn module docs).
    w_negate_bracket: bool = False

    def __post_init__(self):
        if not 0.0 < self.discount < 1.0:
            raise ContractError(f"discount must be in (0, 1), got {self.discount}")
        for name in ("eps_start", "eps_min", "eps_decay", "w_eps_start", "w_eps_min", "w_eps_decay"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ContractError(f"{name} must be in (0, 1], got {v}")
        if self.eps_min > self.eps_start:
            raise ContractError("eps_min must not exceed eps_start")
        if self.w_eps_min > self.w_eps_start:
            raise ContractError("w_eps_min must not exceed w_eps_start")
        if self.batch_size > self.memory_size:
            raise ContractError("batch_size must not exceed memory_size")
        if not 0.0 <= self.w_alpha <= 1.0:
            raise ContractError(f"w_alpha must be in [0, 1], got {self.w_alpha}")


class DqnAgent:
    """One Q-learning policy over a discrete configuration space."""

    def __init__(self, state_dim: int, n_actions: int, hp: Hyperparameters, seed: int):
        self.hp = hp
        self.n_actions = n_actions
        self.rng = np.random.default_rng(seed)
        dims = [state_dim, *hp.hidden_dims, n_actions]
        self.q_net = init_network(dims, self.rng)
        self.target_net = _copy_structure(self.q_net)
        clone_into(self.q_net, self.target_net)
        self.memory = ReplayMemory(
            hp.memory_size, self.rng, mode=hp.replay_mode, zeta=hp.per_zeta
        )
        self.eps = hp.eps_start
        self.step_count = 0
        self.train_count = 0

    def select_action(self, state: np.ndarray) -> int:
        """Epsilon-greedy choice; called once per environment step.

        Decays epsilon multiplicatively after every call, floored at
        ``eps_min``. Greedy ties break toward the lowest action index.
        """
        if self.rng.random() < self.eps:
            action = int(self.rng.integers(self.n_actions))
        else:
            action = self.greedy_action(state)
        self.eps = max(self.hp.eps_min, self.eps * self.hp.eps_decay)
        self.step_count += 1
        return action

    def greedy_action(self, state: np.ndarray) -> int:
        return int(np.argmax(self.q_net.forward(state)))

    def observe(self, state, action, next_state, reward) -> int:
        """Store one transition; returns its replay entry id."""
        return self.memory.push(Transition(state, action, next_state, np.atleast_1d(reward)))

    def bellman_target(self, t: Transition) -> float:
        """r + discount * max_a target_net(next_state)[a], no terminal mask."""
        if t.reward.shape != (1,):
            raise ContractError(f"expected scalar reward, got shape {t.reward.shape}")
        bootstrap = float(np.max(self.target_net.forward(t.next_state)))
        return float(t.reward[0]) + self.hp.discount * bootstrap

    def train_step(self) -> float | None:
        """One batch update; returns the loss, or None before warm-up.

        Samples ``batch_size`` transitions, regresses the taken actions'
        Q-values onto frozen-target Bellman values, refreshes sampled
        entries' priorities with their new |TD error|, and syncs the
        target network every ``target_sync_interval`` training steps.
        """
        k = self.hp.batch_size
        if len(self.memory) < k:
            return None
        batch = self.memory.sample(k)
        ids = [i for i, _ in batch]
        states = np.stack([t.state for _, t in batch])
        next_states = np.stack([t.next_state for _, t in batch])
        actions = np.array([t.action for _, t in batch])
        rewards = np.array([t.reward[0] for _, t in batch])

        bootstrap = self.target_net.forward(next_states).max(axis=1)
        targets = rewards + self.hp.discount * bootstrap
        q_all = self.q_net.forward(states)
        td = q_all[np.arange(k), actions] - targets
        loss = float(np.mean(td**2))
        if not np.isfinite(loss):
            raise TrainingDivergenceError(f"non-finite training loss {loss}")

        upstream = np.zeros_like(q_all)
        upstream[np.arange(k), actions] = 2.0 * td / k
        grads = self.q_net.backward(states, upstream)
        self.q_net.adam_step(grads, self.hp.learning_rate)

        if self.memory.mode == "per":
            for entry_id, err in zip(ids, td):
                self.memory.update_priority(entry_id, abs(float(err)) + PRIORITY_FLOOR)

        self.train_count += 1
        if self.train_count % self.hp.target_sync_interval == 0:
            clone_into(self.q_net, self.target_net)
        return loss

    def save_checkpoint(self, directory, prefix: str = "dqn") -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        neuro.save_snapshot(self.q_net, directory / f"{prefix}_q.net")
        neuro.save_snapshot(self.target_net, directory / f"{prefix}_target.net")

    def load_checkpoint(self, directory, prefix: str = "dqn") -> None:
        directory = Path(directory)
        self.q_net = neuro.load_snapshot(directory / f"{prefix}_q.net")
        self.target_net = neuro.load_snapshot(directory / f"{prefix}_target.net")


def _copy_structure(net: Network) -> Network:
    return Network(
        layer_dims=list(net.layer_dims),
        weights=[w.copy() for w in net.weights],
        biases=[b.copy() for b in net.biases],
    )

"""Deep W-Network agent: per-objective DQN policies plus W-arbitration.

Each objective gets its own DQN policy and its own W-network mapping a
state to a scalar. Every step, all policies propose an epsilon-greedy
action; the policy with the highest W-value wins and its action
executes (with probability ``w_eps`` a uniformly random policy wins
instead). Only the losing policies record a W-memory entry for the
step, regressing their W-values toward

    (1 - a) * W_i(s) + a * [Q_i(s, a_exec) - (R_i + g * max_a Q_i(s', a))]

with ``a`` the W mixing rate (``w_alpha``), ``g`` the discount, and the
``W_i(s)`` mixing term read from the policy's frozen W-target copy. The
bracketed term is used exactly as written above by default;
``w_negate_bracket`` in the hyperparameters flips its sign for the
classic "expected loss" reading. W-networks start training only after
the Q-side has taken ``w_training_delay`` training steps, and keep
their own target copies synced on the Q-side interval.

W-network output layers start at exactly zero, so every policy opens
with the same indifferent W-value and arbitration is decided by
exploration and learning rather than by initialization noise. (With the
standard fan-in/fan-out init the scalar heads carry ~0.1-magnitude
per-state offsets, which can hand one policy the arbitration for an
entire episode before W-training can correct it.)

Random streams are kept separate on purpose: policy ``i`` draws from
the same generator a standalone DQN seeded ``seed + i`` would use, so a
single-objective DWN replays a DQN action trace exactly; arbitration
and W-training draw from their own tagged streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from configrl import neuro
from configrl.dqn import PRIORITY_FLOOR, DqnAgent, Hyperparameters
from configrl.errors import ContractError, TrainingDivergenceError
from configrl.neuro import clone_into, init_network
from configrl.replay import ReplayMemory

_ARB_STREAM = 104729
_WINIT_STREAM = 7919
_WMEM_STREAM = 13


@dataclass
class WTransition:
    """One arbitration outcome seen by a losing policy."""

    state: np.ndarray
    winner: int
    action: int
    reward: np.ndarray
    next_state: np.ndarray


class DwnAgent:
    """N per-objective policies arbitrated by per-policy W-values."""

    def __init__(
        self,
        state_dim: int,
        n_actions: int,
        hp: Hyperparameters,
        seed: int,
        n_objectives: int = 2,
    ):
        if n_objectives < 1:
            raise ContractError(f"need at least one objective, got {n_objectives}")
        self.hp = hp
        self.n_objectives = n_objectives
        self.n_actions = n_actions
        self.policies = [
            DqnAgent(state_dim, n_actions, hp, seed + i) for i in range(n_objectives)
        ]
        self.arb_rng = np.random.default_rng([seed, _ARB_STREAM])
        w_init_rng = np.random.default_rng([seed, _WINIT_STREAM])
        w_dims = [state_dim, *hp.hidden_dims, 1]
        self.w_nets = []
        self.w_target_nets = []
        for _ in range(n_objectives):
            net = init_network(w_dims, w_init_rng)
            net.weights[-1][:] = 0.0  # indifferent W head (see module docs)
            self.w_nets.append(net)
            copy = init_network(w_dims, w_init_rng)
            clone_into(net, copy)
            self.w_target_nets.append(copy)
        self.w_memories = [
            ReplayMemory(
                hp.memory_size,
                np.random.default_rng([seed, i, _WMEM_STREAM]),
                mode=hp.replay_mode,
                zeta=hp.per_zeta,
            )
            for i in range(n_objectives)
        ]
        self.w_eps = hp.w_eps_start
        self.train_counter = 0
        self.w_train_counts = [0] * n_objectives

    def w_values(self, state: np.ndarray) -> np.ndarray:
        return np.array([float(w.forward(state)[0]) for w in self.w_nets])

    def arbitrate(self, state: np.ndarray) -> tuple[int, int, list[int]]:
        """Pick the executing policy and its action for this step.

        Returns (winner index, executed action, all policies'
        suggestions). The winner is the W-value argmax (ties to the
        lowest index), replaced by a uniformly random policy with
        probability ``w_eps``, which then decays toward its floor.
        """
        suggestions = [p.select_action(state) for p in self.policies]
        if self.arb_rng.random() < self.w_eps:
            winner = int(self.arb_rng.integers(self.n_objectives))
        else:
            winner = int(np.argmax(self.w_values(state)))
        self.w_eps = max(self.hp.w_eps_min, self.w_eps * self.hp.w_eps_decay)
        return winner, suggestions[winner], suggestions

    def observe(self, state, action, winner, next_state, reward_vector) -> None:
        """Record one executed step in every policy's memories.

        Every policy's Q-memory gets the transition with its own reward
        component; only the losers' W-memories get the arbitration
        record.
        """
        reward_vector = np.asarray(reward_vector, dtype=np.float64)
        if reward_vector.shape != (self.n_objectives,):
            raise ContractError(
                f"reward vector shape {reward_vector.shape}, expected ({self.n_objectives},)"
            )
        for i, policy in enumerate(self.policies):
            policy.observe(state, action, next_state, [reward_vector[i]])
        for i in range(self.n_objectives):
            if i != winner:
                self.w_memories[i].push(
                    WTransition(
                        state=np.asarray(state, dtype=np.float64),
                        winner=winner,
                        action=action,
                        reward=reward_vector,
                        next_state=np.asarray(next_state, dtype=np.float64),
                    )
                )

    def w_target(self, policy_index: int, wt: WTransition) -> float:
        """Regression target for one losing policy's W-value."""
        if wt.winner == policy_index:
            raise ContractError(
                f"policy {policy_index} won this step; winners' W-values are not updated"
            )
        alpha = self.hp.w_alpha
        w_now = float(self.w_target_nets[policy_index].forward(wt.state)[0])
        q_net = self.policies[policy_index].q_net
        q_exec = float(q_net.forward(wt.state)[wt.action])
        bootstrap = float(np.max(q_net.forward(wt.next_state)))
        bracket = q_exec - (float(wt.reward[policy_index]) + self.hp.discount * bootstrap)
        if self.hp.w_negate_bracket:
            bracket = -bracket
        return (1.0 - alpha) * w_now + alpha * bracket

    def train(self) -> dict[str, list[float | None]]:
        """Train all Q-networks, then W-networks once past the delay.

        Returns per-network losses; ``None`` marks a network that did
        not train this call (warm-up or delay).
        """
        q_losses = [p.train_step() for p in self.policies]
        if any(loss is not None for loss in q_losses):
            self.train_counter += 1
        w_losses: list[float | None] = [None] * self.n_objectives
        if self.train_counter >= self.hp.w_training_delay:
            for i in range(self.n_objectives):
                w_losses[i] = self._train_w(i)
        return {"q": q_losses, "w": w_losses}

    def _train_w(self, i: int) -> float | None:
        mem = self.w_memories[i]
        k = self.hp.batch_size
        if len(mem) < k:
            return None
        batch = mem.sample(k)
        ids = [j for j, _ in batch]
        states = np.stack([wt.state for _, wt in batch])
        next_states = np.stack([wt.next_state for _, wt in batch])
        actions = np.array([wt.action for _, wt in batch])
        rewards_i = np.array([wt.reward[i] for _, wt in batch])

        alpha = self.hp.w_alpha
        w_now = self.w_target_nets[i].forward(states)[:, 0]
        q_all = self.policies[i].q_net.forward(states)
        q_exec = q_all[np.arange(k), actions]
        bootstrap = self.policies[i].q_net.forward(next_states).max(axis=1)
        bracket = q_exec - (rewards_i + self.hp.discount * bootstrap)
        if self.hp.w_negate_bracket:
            bracket = -bracket
        targets = (1.0 - alpha) * w_now + alpha * bracket

        pred = self.w_nets[i].forward(states)[:, 0]
        err = pred - targets
        loss = float(np.mean(err**2))
        if not np.isfinite(loss):
            raise TrainingDivergenceError(f"non-finite W loss {loss}")
        upstream = (2.0 * err / k)[:, None]
        grads = self.w_nets[i].backward(states, upstream)
        self.w_nets[i].adam_step(grads, self.hp.learning_rate)

        if mem.mode == "per":
            for entry_id, e in zip(ids, err):
                mem.update_priority(entry_id, abs(float(e)) + PRIORITY_FLOOR)

        self.w_train_counts[i] += 1
        if self.w_train_counts[i] % self.hp.target_sync_interval == 0:
            clone_into(self.w_nets[i], self.w_target_nets[i])
        return loss

    def save_checkpoint(self, directory, prefix: str = "dwn") -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for i, policy in enumerate(self.policies):
            policy.save_checkpoint(directory, prefix=f"{prefix}_policy{i}")
        for i, (w, wt) in enumerate(zip(self.w_nets, self.w_target_nets)):
            neuro.save_snapshot(w, directory / f"{prefix}_w{i}.net")
            neuro.save_snapshot(wt, directory / f"{prefix}_w{i}_target.net")

    def load_checkpoint(self, directory, prefix: str = "dwn") -> None:
        directory = Path(directory)
        for i, policy in enumerate(self.policies):
            policy.load_checkpoint(directory, prefix=f"{prefix}_policy{i}")
        for i in range(self.n_objectives):
            self.w_nets[i] = neuro.load_snapshot(directory / f"{prefix}_w{i}.net")
            self.w_target_nets[i] = neuro.load_snapshot(
                directory / f"{prefix}_w{i}_target.net"
            )

"""Experience storage: uniform replay and prioritized replay (PER).

Entries are held in a fixed-capacity ring; the index handed back by
``push``/``sample`` is a monotonically increasing entry id, so a stale id
(one whose entry was evicted) is detectable and rejected.

In PER mode entry ``i`` is drawn with probability ``p_i^zeta / sum_k
p_k^zeta``, with replacement. Weights ``p^zeta`` live in a binary sum
tree whose leaf count doubles on demand, so sampling and priority
updates stay O(log n) without preallocating the full capacity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from configrl.errors import ContractError, InsufficientDataError


@dataclass
class Transition:
    """One replay record: state, action taken, successor state, reward vector.

    ``reward`` holds one entry per objective (length 1 for scalar agents).
    """

    state: np.ndarray
    action: int
    next_state: np.ndarray
    reward: np.ndarray

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=np.float64)
        self.next_state = np.asarray(self.next_state, dtype=np.float64)
        self.reward = np.atleast_1d(np.asarray(self.reward, dtype=np.float64))
        if self.state.shape != self.next_state.shape:
            raise ContractError(
                f"state shape {self.state.shape} != next_state shape {self.next_state.shape}"
            )
        if self.action < 0:
            raise ContractError(f"negative action {self.action}")


class _SumTree:
    """Array-backed binary sum tree over slot weights, grown on demand."""

    def __init__(self, initial_capacity: int = 64):
        self.capacity = 1
        while self.capacity < initial_capacity:
            self.capacity *= 2
        self.tree = np.zeros(2 * self.capacity)

    @property
    def total(self) -> float:
        return float(self.tree[1])

    def set(self, slot: int, weight: float) -> None:
        if slot >= self.capacity:
            self._grow(slot + 1)
        i = self.capacity + slot
        self.tree[i] = weight
        i //= 2
        while i >= 1:
            self.tree[i] = self.tree[2 * i] + self.tree[2 * i + 1]
            i //= 2

    def _grow(self, needed: int) -> None:
        new_cap = self.capacity
        while new_cap < needed:
            new_cap *= 2
        old_leaves = self.tree[self.capacity : 2 * self.capacity].copy()
        self.capacity = new_cap
        self.tree = np.zeros(2 * new_cap)
        self.tree[new_cap : new_cap + len(old_leaves)] = old_leaves
        for i in range(new_cap - 1, 0, -1):
            self.tree[i] = self.tree[2 * i] + self.tree[2 * i + 1]

    def find(self, prefixes: np.ndarray) -> np.ndarray:
        """For each prefix sum, the slot it lands in (batched descent)."""
        if len(prefixes) < 32:
            # Scalar walks beat numpy's per-op overhead for tiny batches.
            tree = self.tree
            cap = self.capacity
            out = np.empty(len(prefixes), dtype=np.int64)
            for n, rest in enumerate(prefixes):
                idx = 1
                while idx < cap:
                    left = tree[2 * idx]
                    if rest < left:
                        idx = 2 * idx
                    else:
                        rest -= left
                        idx = 2 * idx + 1
                out[n] = idx - cap
            return out
        idx = np.ones(len(prefixes), dtype=np.int64)
        rest = prefixes.astype(np.float64).copy()
        while len(idx) and idx[0] < self.capacity:
            left = self.tree[2 * idx]
            go_left = rest < left
            rest = np.where(go_left, rest, rest - left)
            idx = np.where(go_left, 2 * idx, 2 * idx + 1)
        return idx - self.capacity


class ReplayMemory:
    """Ring of transitions with uniform or prioritized sampling.

    One memory serves one network's training loop; the sampling stream
    comes from the ``rng`` handed in, so a run is reproducible from its
    seed.
    """

    def __init__(
        self,
        capacity: int,
        rng: np.random.Generator,
        mode: str = "per",
        zeta: float = 0.6,
    ):
        if capacity <= 0:
            raise ContractError(f"capacity must be positive, got {capacity}")
        if mode not in ("per", "uniform"):
            raise ContractError(f"unknown replay mode {mode!r}")
        if not 0.0 <= zeta <= 1.0:
            raise ContractError(f"zeta must be in [0, 1], got {zeta}")
        self.capacity = capacity
        self.mode = mode
        self.zeta = zeta
        self.rng = rng
        self._entries: list = []
        self._priorities = np.zeros(0)
        self._tree = _SumTree()
        self._pushes = 0

    def __len__(self) -> int:
        return min(self._pushes, self.capacity)

    @property
    def oldest_id(self) -> int:
        return self._pushes - len(self)

    def push(self, item, priority: float | None = None) -> int:
        """Append an entry, evicting the oldest at capacity.

        In PER mode an unspecified priority defaults to the current
        maximum stored priority (1.0 for the first entry); in uniform
        mode the priority is ignored.
        """
        if self.mode == "per":
            if priority is None:
                priority = self._max_priority()
            elif priority <= 0.0:
                raise ContractError(f"priority must be positive, got {priority}")
        else:
            priority = 1.0

        slot = self._pushes % self.capacity
        if slot < len(self._entries):
            self._entries[slot] = item
            self._priorities[slot] = priority
        else:
            self._entries.append(item)
            self._priorities = np.append(self._priorities, priority)
        self._tree.set(slot, priority**self.zeta)
        entry_id = self._pushes
        self._pushes += 1
        return entry_id

    def sample(self, k: int) -> list[tuple[int, object]]:
        """Draw k entries with replacement; returns (entry_id, item) pairs."""
        n = len(self)
        if n < k:
            raise InsufficientDataError(f"memory holds {n} entries, need {k}")
        if self.mode == "uniform":
            offsets = self.rng.integers(0, n, size=k)
            ids = self.oldest_id + offsets
        else:
            prefixes = self.rng.random(k) * self._tree.total
            slots = self._tree.find(prefixes)
            # Float rounding at the right edge can land one leaf past the
            # live region; clamp back onto it.
            slots = np.minimum(slots, n - 1)
            ids = self._slot_to_id(slots)
        return [(int(i), self._entries[int(i) % self.capacity]) for i in ids]

    def update_priority(self, entry_id: int, priority: float) -> None:
        """Re-weight one stored entry; stale (evicted) ids are rejected."""
        if not self.oldest_id <= entry_id < self._pushes:
            raise ContractError(
                f"entry {entry_id} is not in the live window "
                f"[{self.oldest_id}, {self._pushes})"
            )
        if priority <= 0.0:
            raise ContractError(f"priority must be positive, got {priority}")
        slot = entry_id % self.capacity
        self._priorities[slot] = priority
        if self.mode == "per":
            self._tree.set(slot, priority**self.zeta)

    def probabilities(self) -> np.ndarray:
        """Analytic sampling distribution over live entries, oldest first."""
        n = len(self)
        ids = np.arange(self.oldest_id, self._pushes)
        p = self._priorities[ids % self.capacity]
        if self.mode == "uniform":
            return np.full(n, 1.0 / n)
        w = p**self.zeta
        return w / w.sum()

    def _max_priority(self) -> float:
        n = len(self)
        return float(self._priorities[:n].max()) if n else 1.0

    def _slot_to_id(self, slots: np.ndarray) -> np.ndarray:
        if self._pushes <= self.capacity:
            return slots
        # Ring has wrapped: map each slot to the live id congruent to it.
        return self._pushes - self.capacity + (slots - self._pushes) % self.capacity

"""Seeded simulator of the 42-configuration adaptation problem.

A scenario file declares the catalog: per configuration a fixed cost
and a latency model (truncated Gaussian around a mean). Each step the
agent picks a slot, the simulator switches to that slot's underlying
configuration and reports the window's average response time (sampled
from the latency model, clamped to [0, 1]) and the configuration's
cost. Cost is deterministic; only the response time is noisy.

``reset(run_seed)`` draws a per-run permutation of the catalog so slot
k points at a different underlying configuration each run. Run seed 0
is reserved for unit tests and keeps the identity mapping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from configrl.errors import ContractError, ScenarioError

N_CONFIGS = 42

_PERM_STREAM = 331
_NOISE_STREAM = 733


@dataclass(frozen=True)
class ConfigSpec:
    """One configuration: identity, cost, and latency model."""

    id: int
    label: str
    cost: float
    latency_mean: float
    latency_jitter: float


@dataclass(frozen=True)
class Scenario:
    name: str
    configs: tuple[ConfigSpec, ...]
    shuffle_seed: int = 0
    noise_seed: int = 0
    # Live mode only: wall-clock seconds that map to normalized T = 1.
    t_max_seconds: float = 0.05


@dataclass
class Observation:
    """Agent-facing view of one step: one-hot slot state, T and C in [0, 1]."""

    state: np.ndarray
    T: float
    C: float


def load_scenario(path) -> Scenario:
    """Load and validate a scenario file (see docs/ for the schema)."""
    path = Path(path)
    with open(path) as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"{path} is not valid JSON: {e}") from e

    if "configs" not in raw or "name" not in raw:
        raise ScenarioError(f"{path} must declare 'name' and 'configs'")
    entries = raw["configs"]
    if len(entries) != N_CONFIGS:
        raise ScenarioError(
            f"expected {N_CONFIGS} configurations, found {len(entries)}"
        )

    configs = []
    for entry in entries:
        try:
            cfg = ConfigSpec(
                id=int(entry["id"]),
                label=str(entry.get("label", f"config-{entry['id']}")),
                cost=float(entry["cost"]),
                latency_mean=float(entry["latency_mean"]),
                latency_jitter=float(entry.get("latency_jitter", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioError(f"malformed configuration entry {entry!r}: {e}") from e
        if not 0.0 <= cfg.cost <= 1.0:
            raise ScenarioError(f"config {cfg.id}: cost {cfg.cost} outside [0, 1]")
        if not 0.0 <= cfg.latency_mean <= 1.0:
            raise ScenarioError(
                f"config {cfg.id}: latency_mean {cfg.latency_mean} outside [0, 1]"
            )
        if cfg.latency_jitter < 0.0:
            raise ScenarioError(
                f"config {cfg.id}: latency_jitter {cfg.latency_jitter} negative"
            )
        configs.append(cfg)

    if sorted(c.id for c in configs) != list(range(N_CONFIGS)):
        raise ScenarioError(f"config ids must be exactly 0..{N_CONFIGS - 1}, each once")
    configs.sort(key=lambda c: c.id)

    return Scenario(
        name=str(raw["name"]),
        configs=tuple(configs),
        shuffle_seed=int(raw.get("shuffle_seed", 0)),
        noise_seed=int(raw.get("noise_seed", 0)),
        t_max_seconds=float(raw.get("t_max_seconds", 0.05)),
    )


def bundled_scenario_path(name: str = "conflict-42") -> Path:
    """Path of a scenario shipped inside the package."""
    return Path(__file__).resolve().parent.parent / "scenarios" / f"{name}.json"


def run_permutation(scenario: Scenario, run_seed: int) -> np.ndarray:
    """Per-run slot-to-configuration mapping; seed 0 keeps the identity."""
    if run_seed == 0:
        return np.arange(N_CONFIGS)
    perm_rng = np.random.default_rng([scenario.shuffle_seed, run_seed, _PERM_STREAM])
    return perm_rng.permutation(N_CONFIGS)


class SimEnv:
    """Simulated environment over one scenario; one instance per run."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.n_actions = N_CONFIGS
        self.state_dim = N_CONFIGS
        self._perm: np.ndarray | None = None
        self._noise_rng: np.random.Generator | None = None
        self._slot = 0

    def reset(self, run_seed: int) -> Observation:
        """Start a run: draw the slot permutation and the noise stream."""
        self._perm = run_permutation(self.scenario, run_seed)
        self._noise_rng = np.random.default_rng(
            [self.scenario.noise_seed, run_seed, _NOISE_STREAM]
        )
        self._slot = 0
        return self._observe()

    def step(self, action: int) -> Observation:
        """Switch to slot ``action`` and report the next window's T and C."""
        if self._perm is None:
            raise ContractError("environment not reset")
        action = int(action)
        if not 0 <= action < N_CONFIGS:
            raise ContractError(f"action {action} outside 0..{N_CONFIGS - 1}")
        self._slot = action
        return self._observe()

    def close(self) -> None:
        pass

    def _observe(self) -> Observation:
        cfg = self.scenario.configs[int(self._perm[self._slot])]
        t = self._noise_rng.normal(cfg.latency_mean, cfg.latency_jitter)
        t = float(np.clip(t, 0.0, 1.0))
        state = np.zeros(N_CONFIGS)
        state[self._slot] = 1.0
        return Observation(state=state, T=t, C=cfg.cost)

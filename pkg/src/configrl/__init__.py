"""Multi-objective RL toolkit for runtime server-configuration tuning.

Provides a minimal dense-network function approximator, uniform and
prioritized replay memories, single-objective DQN, multi-objective
Deep W-Network arbitration, reward shaping for the latency/cost
trade-off, a seeded simulator plus a live loopback-HTTP environment
over a 42-configuration catalog, an epsilon-greedy bandit baseline,
and an experiment harness with CSV logging and summary statistics.
"""

__version__ = "0.1.0"

from configrl.errors import (
    ContractError,
    InsufficientDataError,
    ScenarioError,
    TrainingDivergenceError,
)

__all__ = [
    "ContractError",
    "InsufficientDataError",
    "ScenarioError",
    "TrainingDivergenceError",
    "__version__",
]

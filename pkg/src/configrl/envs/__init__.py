"""Environments exposing the shared reset/step contract.

Both environments present 42 discrete actions (configuration slots),
return an ``Observation`` with a one-hot state vector and normalized
response time and cost in [0, 1], and apply a seeded per-run
permutation of the catalog so agents cannot memorize slot positions
across runs.
"""

from configrl.envs.sim import (
    N_CONFIGS,
    ConfigSpec,
    Observation,
    Scenario,
    SimEnv,
    load_scenario,
)

__all__ = [
    "N_CONFIGS",
    "ConfigSpec",
    "Observation",
    "Scenario",
    "SimEnv",
    "load_scenario",
]

"""Reward shaping for the latency/cost trade-off.

Each objective's shaped value equals the raw measurement while it stays
at or below 0.5 and jumps to a flat penalty of 2 above it, which keeps
either objective from being traded away entirely. Scalar agents get the
negated sum of both shaped values; the multi-objective agent gets the
negated pair.
"""

from __future__ import annotations

from dataclasses import dataclass

from configrl.errors import ContractError

PENALTY = 2.0
THRESHOLD = 0.5


@dataclass(frozen=True)
class ShapedReward:
    r_time: float
    r_cost: float

    @property
    def scalar(self) -> float:
        return -self.r_time - self.r_cost

    @property
    def tuple(self) -> tuple[float, float]:
        return (-self.r_time, -self.r_cost)


def shape(t: float, c: float) -> ShapedReward:
    """Shape one step's normalized response time and cost.

    Both inputs must already be normalized to [0, 1]; the environments
    guarantee that.
    """
    if not 0.0 <= t <= 1.0:
        raise ContractError(f"response time {t} outside [0, 1]")
    if not 0.0 <= c <= 1.0:
        raise ContractError(f"cost {c} outside [0, 1]")
    r_time = PENALTY if t > THRESHOLD else t
    r_cost = PENALTY if c > THRESHOLD else c
    return ShapedReward(r_time=r_time, r_cost=r_cost)

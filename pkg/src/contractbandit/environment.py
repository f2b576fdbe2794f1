"""The repeated-offer protocol between the learner and the hidden agent.

Each round the principal posts a contract; the agent best-responds privately;
one outcome is drawn from the chosen effort's distribution; the principal
observes only the outcome index and her net profit. Rejection is reported as
the distinguished outcome 0 with profit 0 — the principal necessarily knows
she paid nothing and earned nothing.

make_arm_set is the information boundary: it compiles the hidden agent's
responses into an opaque arm table and drops the agent, so nothing
learner-facing carries instance internals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .bandit import TabularArmSet
from .domain import AgentInstance, Contract, OutcomeModel
from .response import TIE_TOL, best_response
from .space import DiscretizedSpace


@dataclass(frozen=True)
class RoundResult:
    """What the principal sees: the outcome index (0 = rejection) and the
    net profit, which is outcome value minus wage, or 0 on rejection."""

    outcome: int
    net_profit: float


def _cdf(dist: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(dist)
    cdf[-1] = 1.0
    return cdf


def play_round(agent: AgentInstance, outcomes: OutcomeModel, w: Contract,
               rng: np.random.Generator) -> RoundResult:
    """One protocol round. Consumes exactly one uniform draw, rejection
    included, so sample counts line up across implementations."""
    u = rng.random()
    choice = best_response(agent, w)
    if choice.effort == 0:
        return RoundResult(0, 0.0)
    j = int(np.searchsorted(_cdf(agent.dists[choice.effort - 1]), u, side="right"))
    return RoundResult(j + 1, float(outcomes.values[j] - w.wages[j]))


def play_rounds(agent: AgentInstance, outcomes: OutcomeModel, w: Contract,
                n: int, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """n independent rounds at a fixed contract.

    Returns (counts, profit_sum) where counts has length k+1 and slot 0
    counts rejections. Equivalent to n play_round calls on the same stream.
    """
    choice = best_response(agent, w)
    counts = np.zeros(outcomes.k + 1, dtype=np.int64)
    if choice.effort == 0:
        rng.random(n)  # keep the one-uniform-per-round accounting
        counts[0] = n
        return counts, 0.0
    rewards = outcomes.values - w.wages
    total, outcome_counts = kernels.reward_sweep(
        rng.random(n), _cdf(agent.dists[choice.effort - 1]), rewards)
    counts[1:] = outcome_counts
    return counts, total


def make_arm_set(agent: AgentInstance, outcomes: OutcomeModel,
                 space: DiscretizedSpace, mode: str = "counts") -> TabularArmSet:
    """One arm per grid contract, sampling net profit per protocol round.

    Rewards live in [-2*cap, cap]: grid wages reach 2*cap while gross profit
    tops out at the largest outcome value. The returned arm set exposes only
    sampling; the agent instance itself is not retained anywhere on it.
    """
    if len(space) < 1:
        raise ValueError("discretized space is empty")
    if space.k != outcomes.k:
        raise ValueError("space and outcome model disagree on outcome count")
    _, efforts = kernels.profit_scan(
        space.wages, outcomes.values, agent.dists, agent.costs,
        kernels.family_code(agent.utility), agent.utility.rho, TIE_TOL)
    values = np.where(
        (efforts > 0)[:, None], outcomes.values[None, :] - space.wages, 0.0)
    probs = np.where(
        (efforts > 0)[:, None], agent.dists[np.maximum(efforts - 1, 0)], 0.0)
    probs[efforts == 0, 0] = 1.0  # rejection: profit 0 with certainty
    cap = outcomes.cap
    return TabularArmSet(values, probs, lo=-2 * cap, hi=cap, mode=mode)

"""Agent best response and the principal's exact expected profit.

Everything here is exact arithmetic over the instance's distributions; no
sampling. The learner never calls these functions (it only sees sampled
outcomes) — they serve the simulation environment and the ground-truth
oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import AgentInstance, Contract, OutcomeModel

# Absolute band for membership in the argmax set. Utilities this close are
# treated as tied and the tie goes to the highest effort index; the band must
# stay far below any economically meaningful utility gap.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class EffortChoice:
    """The effort level the agent picks and the utility it achieves."""

    effort: int
    utility: float


def _check_lengths(agent: AgentInstance, w: Contract) -> None:
    if w.k != agent.k:
        raise ValueError(f"contract covers {w.k} outcomes, agent has {agent.k}")


def effort_utilities(agent: AgentInstance, w: Contract) -> np.ndarray:
    """U(w, e) for e = 0..n; index 0 is the reject level, exactly zero."""
    _check_lengths(agent, w)
    out = np.empty(agent.n + 1)
    out[0] = 0.0
    out[1:] = agent.dists @ agent.utility.u(w.wages) - agent.costs
    return out


def agent_utility(agent: AgentInstance, w: Contract, e: int) -> float:
    """Expected utility of wages minus cost at effort e; e = 0 returns 0."""
    if not 0 <= e <= agent.n:
        raise ValueError(f"effort {e} out of range [0, {agent.n}]")
    if e == 0:
        return 0.0
    _check_lengths(agent, w)
    return float(agent.dists[e - 1] @ agent.utility.u(w.wages) - agent.costs[e - 1])


def best_response(agent: AgentInstance, w: Contract) -> EffortChoice:
    """The agent's chosen effort: maximize utility, ties to the highest index.

    Reject (effort 0, utility 0) takes part in the comparison, so the agent
    accepts whenever some effort ties with rejection.
    """
    utilities = effort_utilities(agent, w)
    top = utilities.max()
    effort = int(np.nonzero(utilities >= top - TIE_TOL)[0][-1])
    return EffortChoice(effort, float(utilities[effort]))


def exact_profit(agent: AgentInstance, outcomes: OutcomeModel, w: Contract) -> float:
    """Principal's expected net profit under the agent's best response.

    Zero when the agent rejects; otherwise the expectation of outcome value
    minus wage under the chosen effort's distribution.
    """
    if outcomes.k != agent.k:
        raise ValueError("outcome model and agent disagree on the outcome count")
    choice = best_response(agent, w)
    if choice.effort == 0:
        return 0.0
    return float(agent.dists[choice.effort - 1] @ (outcomes.values - w.wages))


def grossman_hart_gap(agent: AgentInstance, w1: Contract, w2: Contract) -> float:
    """sum_i (f_e1(i) - f_e2(i)) * (u(w1(i)) - u(w2(i))) for the two best
    responses e1, e2.

    Nonnegative for every contract pair whenever the best response is a true
    argmax: summing the two optimality inequalities cancels the costs. A
    rejecting best response contributes a zero distribution.
    """
    f1 = agent.dist(best_response(agent, w1).effort)
    f2 = agent.dist(best_response(agent, w2).effort)
    du = agent.utility.u(w1.wages) - agent.utility.u(w2.wages)
    return float((f1 - f2) @ du)

"""Ground-truth benchmarks by brute force.

grid_optimum densely grids the learnable contract set (first wage plus
nondecreasing increments capped by the outcome-value increments) and
evaluates the exact profit at every point. It is the reference every
learning-side accuracy claim is measured against.

The two shape searches cover the cases where theory pins the optimal
contract's form: with two outcomes, a base wage plus a fraction of the
outcome spread; with a risk-neutral agent, outcome value minus a constant.
Each reparametrizes a slice of the same set, so its best value must match the
full grid up to grid resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .domain import AgentInstance, Contract, OutcomeModel
from .response import TIE_TOL

_CHUNK = 65536
_EDGE = 1e-12  # keep boundary lattice points despite float rounding


@dataclass(frozen=True)
class GridOptimum:
    contract: Contract
    value: float
    m: int
    grid_step: float
    slack: float


@dataclass(frozen=True)
class TwoOutcomeShape:
    a: float
    w1: float
    value: float
    boundary_binds: bool


@dataclass(frozen=True)
class RiskNeutralShape:
    alpha: float
    value: float


def grid_step(outcomes: OutcomeModel, m: int) -> float:
    """Largest lattice spacing across all search axes."""
    spans = [outcomes.cap - outcomes.w0]
    if outcomes.k > 1:
        spans.append(float(np.diff(outcomes.values).max()))
    return max(spans) / (m - 1)


def grid_slack(outcomes: OutcomeModel, m: int) -> float:
    """Value tolerance for comparing two searches at resolution m.

    2*k*cap*step is a Lipschitz-style allowance: the profit is piecewise
    linear with unit-bounded wage gradients but jumps where the agent's
    effort switches, so agreement is asserted on values, never on argmaxes.
    """
    return 2 * outcomes.k * outcomes.cap * grid_step(outcomes, m)


def grid_optimum(agent: AgentInstance, outcomes: OutcomeModel, m: int) -> GridOptimum:
    """Exhaustive search of the learnable set at resolution m per axis.

    Parametrizes contracts by the first wage in [w0, cap] and increments in
    [0, outcome-value increment], dropping lattice points whose wages exceed
    the cap. Returns the first maximizer in lexicographic lattice order.
    """
    if m < 2:
        raise ValueError("grid resolution must be at least 2")
    if agent.k != outcomes.k:
        raise ValueError("agent and outcome model disagree on outcome count")
    k = outcomes.k
    axes = [np.linspace(outcomes.w0, outcomes.cap, m)]
    for dpi in np.diff(outcomes.values):
        axes.append(np.linspace(0.0, float(dpi), m))

    fam = kernels.family_code(agent.utility)
    total = m ** k
    best_value = -math.inf
    best_wages = None
    for start in range(0, total, _CHUNK):
        lin = np.arange(start, min(start + _CHUNK, total))
        idx = np.unravel_index(lin, (m,) * k)
        wages = np.empty((lin.size, k))
        wages[:, 0] = axes[0][idx[0]]
        for j in range(1, k):
            wages[:, j] = wages[:, j - 1] + axes[j][idx[j]]
        keep = wages[:, -1] <= outcomes.cap + _EDGE  # wages are nondecreasing
        if not np.any(keep):
            continue
        wages = wages[keep]
        values, _ = kernels.profit_scan(
            wages, outcomes.values, agent.dists, agent.costs,
            fam, agent.utility.rho, TIE_TOL)
        at = int(np.argmax(values))
        if values[at] > best_value:
            best_value = float(values[at])
            best_wages = wages[at].copy()

    step = grid_step(outcomes, m)
    return GridOptimum(
        contract=Contract(best_wages), value=best_value, m=m,
        grid_step=step, slack=grid_slack(outcomes, m),
    )


def two_outcome_shape_check(agent: AgentInstance, outcomes: OutcomeModel,
                            m: int) -> TwoOutcomeShape:
    """Best contract of the form w2 = w1 + a*(pi2 - pi1), a in [0, 1].

    Only defined for two outcomes. Points whose second wage exceeds the cap
    are skipped so the search stays inside the learnable set;
    ``boundary_binds`` reports whether relaxing the cap to twice its value
    would have found a strictly better contract.
    """
    if outcomes.k != 2 or agent.k != 2:
        raise ValueError("shape search requires exactly two outcomes")
    if m < 2:
        raise ValueError("grid resolution must be at least 2")
    spread = float(outcomes.values[1] - outcomes.values[0])
    w1 = np.repeat(np.linspace(outcomes.w0, outcomes.cap, m), m)
    a = np.tile(np.linspace(0.0, 1.0, m), m)
    wages = np.column_stack([w1, w1 + a * spread])
    values, _ = kernels.profit_scan(
        wages, outcomes.values, agent.dists, agent.costs,
        kernels.family_code(agent.utility), agent.utility.rho, TIE_TOL)

    inside = wages[:, 1] <= outcomes.cap + _EDGE
    masked = np.where(inside, values, -math.inf)
    at = int(np.argmax(masked))
    best_relaxed = float(values.max())  # every point is 2*cap-bounded already
    return TwoOutcomeShape(
        a=float(a[at]), w1=float(w1[at]), value=float(masked[at]),
        boundary_binds=best_relaxed > masked[at] + _EDGE,
    )


def risk_neutral_shape_check(agent: AgentInstance, outcomes: OutcomeModel,
                             m: int) -> RiskNeutralShape:
    """Best contract of the form w(i) = pi(i) - alpha with every wage at or
    above the floor, i.e. alpha in [0, pi(1) - w0].

    Only defined for the linear-utility agent. These contracts pay exactly
    the outcome increments, the boundary of the learnable set.
    """
    if not (agent.utility.family == "crra" and agent.utility.rho == 1.0):
        raise ValueError("shape search requires the risk-neutral agent")
    if m < 2:
        raise ValueError("grid resolution must be at least 2")
    ceiling = float(outcomes.values[0] - outcomes.w0)
    if ceiling < 0:
        raise ValueError("wage floor above the lowest outcome: no feasible shape contract")
    alphas = np.linspace(0.0, ceiling, m)
    wages = outcomes.values[None, :] - alphas[:, None]
    values, _ = kernels.profit_scan(
        wages, outcomes.values, agent.dists, agent.costs,
        kernels.CRRA_CODE, 1.0, TIE_TOL)
    at = int(np.argmax(values))
    return RiskNeutralShape(alpha=float(alphas[at]), value=float(values[at]))

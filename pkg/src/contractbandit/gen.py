"""Random problem instances with the dominance chain built constructively.

Higher-effort distributions are derived from lower ones by shifting
probability mass from each outcome to the next one up, which guarantees the
upper-tail dominance ordering by construction. Costs are nondecreasing in
effort and scaled to the utility range so generated corpora exercise both
acceptance and rejection.
"""

from __future__ import annotations

import numpy as np

from .domain import AgentInstance, Contract, OutcomeModel, UtilitySpec

UTILITY_MENU = (
    UtilitySpec.crra(0.3),
    UtilitySpec.crra(0.5),
    UtilitySpec.crra(1.0),
    UtilitySpec.log(),
)


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def random_outcomes(k: int, seed_or_rng, *, w0: float | None = None) -> OutcomeModel:
    rng = _rng(seed_or_rng)
    values = rng.uniform(0.5, 2.0) + np.concatenate(
        [[0.0], np.cumsum(rng.uniform(0.3, 1.5, size=k - 1))])
    if w0 is None:
        w0 = float(rng.uniform(0.2, 0.9) * values[0])
    return OutcomeModel(values, w0)


def shifted_chain(base: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Build n distributions where each one shifts mass upward from the last."""
    rows = [np.asarray(base, dtype=np.float64)]
    for _ in range(n - 1):
        f = rows[-1].copy()
        for i in range(f.size - 1):
            moved = rng.uniform(0.05, 0.5) * f[i]
            f[i] -= moved
            f[i + 1] += moved
        rows.append(f)
    return np.stack(rows)


def random_agent(outcomes: OutcomeModel, n: int, seed_or_rng,
                 utility: UtilitySpec | None = None) -> AgentInstance:
    rng = _rng(seed_or_rng)
    if utility is None:
        utility = UTILITY_MENU[int(rng.integers(len(UTILITY_MENU)))]
    base = rng.dirichlet(np.full(outcomes.k, 2.0))
    dists = shifted_chain(base, n, rng)
    # cost scale tied to the utility's reachable range so acceptance is
    # neither guaranteed nor impossible
    spread = max(float(utility.u(outcomes.cap)), 0.25)
    costs = np.cumsum(rng.uniform(0.0, 0.4 * spread / n, size=n))
    return AgentInstance(utility=utility, costs=costs, dists=dists)


def random_instance(k: int, n: int, seed_or_rng,
                    utility: UtilitySpec | None = None) -> tuple[OutcomeModel, AgentInstance]:
    rng = _rng(seed_or_rng)
    outcomes = random_outcomes(k, rng)
    return outcomes, random_agent(outcomes, n, rng, utility)


def random_monotone_smooth_contract(outcomes: OutcomeModel, seed_or_rng) -> Contract:
    """Uniformly rough draw from the learnable set: wage floor respected,
    increments within the outcome-value increments, capped at the largest
    outcome value."""
    rng = _rng(seed_or_rng)
    cap = outcomes.cap
    wages = np.empty(outcomes.k)
    wages[0] = rng.uniform(outcomes.w0, cap)
    for i, dpi in enumerate(np.diff(outcomes.values)):
        room = min(float(dpi), cap - wages[i])
        wages[i + 1] = wages[i] + rng.uniform(0.0, room)
    return Contract(wages)


def surplus_capped_risk_neutral(k: int, n: int, seed_or_rng,
                                ) -> tuple[OutcomeModel, AgentInstance]:
    """Risk-neutral instance whose full-information surplus fits under the
    wage floor's slack.

    Costs are set so the best achievable welfare equals a target below
    pi(1) - w0; then the seller-like contract that shifts all outcome risk to
    the agent is feasible at every extraction level up to the optimum, and
    the wage floor never distorts the optimal contract's shape.
    """
    rng = _rng(seed_or_rng)
    outcomes = random_outcomes(k, rng)
    base = rng.dirichlet(np.full(k, 2.0))
    dists = shifted_chain(base, n, rng)
    slack = outcomes.values[0] - outcomes.w0
    target = rng.uniform(0.2, 0.9) * slack
    gross = dists @ outcomes.values
    ranks = np.arange(1, n + 1) / n
    costs = gross - target * ranks  # welfare at effort e is target * e / n
    agent = AgentInstance(utility=UtilitySpec.crra(1.0), costs=costs, dists=dists)
    return outcomes, agent

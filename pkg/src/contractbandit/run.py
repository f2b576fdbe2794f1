"""End-to-end experiment plumbing: wire the accuracy target to a grid
resolution, learn over the arm set, and benchmark against the brute-force
oracle.

The wiring is eta = epsilon / (4 * k * cap): a grid at that coarseness
carries a contract within epsilon/2 of the best smooth bounded contract, and
running the eliminator at epsilon/2 loses at most another epsilon/2, so the
returned contract is epsilon-optimal with probability 1 - delta. Reports are
plain dicts ready for JSON and embed the instance digest, the full parameter
set, and the seed; identical inputs reproduce identical reports except for
wall-clock timing.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

from . import kernels
from .bandit import median_elimination, total_sample_count
from .domain import AgentInstance, OutcomeModel
from .environment import make_arm_set
from .oracle import grid_optimum
from .response import exact_profit
from .space import enumerate_space, max_eta, size_bound


class PreconditionRefused(RuntimeError):
    """A run parameter violates a precondition (CLI exit code 2)."""


def theorem_eta(outcomes: OutcomeModel, epsilon: float) -> float:
    return epsilon / (4 * outcomes.k * outcomes.cap)


def resolve_eta(outcomes: OutcomeModel, epsilon: float,
                eta_override: float | None = None) -> float:
    """The grid coarseness for a learn run, refusing invalid targets.

    Without an override the accuracy wiring requires epsilon < cap; past that
    the coarseness bound breaks (any accepted contract would already meet the
    target — use an explicit override to run anyway).
    """
    k = outcomes.k
    if eta_override is not None:
        if not 0 < eta_override < max_eta(k):
            raise PreconditionRefused(
                f"eta override must lie in (0, {max_eta(k)!r}) for k={k}")
        return float(eta_override)
    if epsilon <= 0:
        raise PreconditionRefused("epsilon must be positive")
    eta = theorem_eta(outcomes, epsilon)
    if not eta < max_eta(k):
        raise PreconditionRefused(
            f"epsilon={epsilon} needs eta={eta:.6g} >= 1/(4k)={max_eta(k):.6g}; "
            f"the wiring requires epsilon < {outcomes.cap} for this instance "
            "(pass --eta-override to run anyway)")
    return eta


def learn_run(outcomes: OutcomeModel, agent: AgentInstance, digest: str,
              epsilon: float, delta: float, seed: int, *,
              eta_override: float | None = None,
              prune_monotone_smooth: bool = False,
              sampler: str = "counts",
              space=None, arms=None) -> dict:
    """Discretize, run the eliminator at epsilon/2, and report.

    The exact value of the learned contract is computed in oracle mode (the
    only place the hidden agent is consulted directly) and the sample count
    is checked against the closed-form budget. ``space``/``arms`` allow a
    caller running many seeds to reuse the construction.
    """
    if not 0 < delta < 1:
        raise PreconditionRefused("delta must lie in (0, 1)")
    if seed < 0:
        raise PreconditionRefused("seed must be nonnegative")
    started = time.perf_counter()
    eta = resolve_eta(outcomes, epsilon, eta_override)
    if space is None:
        space = enumerate_space(outcomes, eta, prune_monotone_smooth=prune_monotone_smooth)
    if arms is None:
        arms = make_arm_set(agent, outcomes, space, mode=sampler)
    budget = total_sample_count(len(space), arms.breadth, epsilon / 2, delta)
    outcome = median_elimination(arms, epsilon / 2, delta, seed)
    assert outcome.trace.total_samples == budget
    learned = space.contract(outcome.best_arm)
    return {
        "kind": "learn",
        "instance_sha256": digest,
        "params": {
            "epsilon": epsilon,
            "delta": delta,
            "seed": seed,
            "eta": eta,
            "eta_matches_wiring": eta_override is None,
            "prune_monotone_smooth": bool(prune_monotone_smooth),
            "sampler": sampler,
        },
        "space": {
            "arm_count": len(space),
            "level_cap": space.cap,
            "size_bound": size_bound(outcomes.w0, 2 * outcomes.cap, eta, outcomes.k),
        },
        "budget": {
            "predicted_samples": budget,
            "reward_breadth": arms.breadth,
        },
        "result": {
            "arm_index": outcome.best_arm,
            "code": [int(x) for x in space.codes[outcome.best_arm]],
            "wages": [float(x) for x in learned.wages],
            "exact_value": exact_profit(agent, outcomes, learned),
            "samples": outcome.trace.total_samples,
            "rounds": len(outcome.trace.rounds),
        },
        "backend": kernels.active_backend(),
        "timing": {"wall_time_s": time.perf_counter() - started},
    }


def evaluate_run(outcomes: OutcomeModel, agent: AgentInstance, digest: str,
                 learn_report: dict, grid_m: int, *, oracle=None) -> dict:
    """Regret of a learn run against the grid oracle.

    Refuses reports produced from a different instance. Regret below zero
    (the learner beat the gridded optimum) is reported as zero; success means
    regret within epsilon plus the grid's value slack.
    """
    if learn_report.get("instance_sha256") != digest:
        raise ValueError("learn report was produced from a different instance")
    if oracle is None:
        oracle = grid_optimum(agent, outcomes, grid_m)
    epsilon = learn_report["params"]["epsilon"]
    learned_value = learn_report["result"]["exact_value"]
    raw = oracle.value - learned_value
    regret = max(0.0, raw)
    return {
        "kind": "evaluate",
        "instance_sha256": digest,
        "oracle_mode": True,
        "grid_m": grid_m,
        "epsilon": epsilon,
        "oracle": {
            "wages": [float(x) for x in oracle.contract.wages],
            "value": oracle.value,
            "slack": oracle.slack,
        },
        "learned": {
            "wages": learn_report["result"]["wages"],
            "value": learned_value,
        },
        "regret": regret,
        "raw_regret": raw,
        "success": bool(regret <= epsilon + oracle.slack),
    }


def batch_run(outcomes: OutcomeModel, agent: AgentInstance, digest: str,
              epsilon: float, delta: float, seeds, grid_m: int, *,
              eta_override: float | None = None,
              prune_monotone_smooth: bool = False,
              sampler: str = "counts", jobs: int = 1) -> list[dict]:
    """learn + evaluate across seeds, sharing the space, arms, and oracle.

    Returns one flat row dict per seed, in seed order.
    """
    eta = resolve_eta(outcomes, epsilon, eta_override)
    space = enumerate_space(outcomes, eta, prune_monotone_smooth=prune_monotone_smooth)
    arms = make_arm_set(agent, outcomes, space, mode=sampler)
    oracle = grid_optimum(agent, outcomes, grid_m)

    def one(seed: int) -> dict:
        report = learn_run(
            outcomes, agent, digest, epsilon, delta, seed,
            eta_override=eta_override, prune_monotone_smooth=prune_monotone_smooth,
            sampler=sampler, space=space, arms=arms)
        verdict = evaluate_run(outcomes, agent, digest, report, grid_m, oracle=oracle)
        return {
            "seed": seed,
            "epsilon": epsilon,
            "delta": delta,
            "eta": report["params"]["eta"],
            "arms": report["space"]["arm_count"],
            "samples": report["result"]["samples"],
            "value": report["result"]["exact_value"],
            "oracle_value": verdict["oracle"]["value"],
            "regret": verdict["regret"],
            "success": verdict["success"],
            "wall_time_s": report["timing"]["wall_time_s"],
        }

    seeds = list(seeds)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, seeds))
    else:
        rows = [one(seed) for seed in seeds]
    return rows

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contractbandit.domain import AgentInstance, Contract, OutcomeModel, UtilitySpec
from contractbandit.gen import random_instance, random_monotone_smooth_contract
from contractbandit.response import (
    TIE_TOL,
    agent_utility,
    best_response,
    effort_utilities,
    exact_profit,
    grossman_hart_gap,
)

W = Contract([0.25, 0.64])


def test_agent_utility_worked_example(instance_a):
    _, agent, _ = instance_a
    # 0.7*sqrt(0.25) + 0.3*sqrt(0.64) - 0.05 = 0.35 + 0.24 - 0.05
    assert agent_utility(agent, W, 1) == pytest.approx(0.54, abs=1e-12)
    assert agent_utility(agent, W, 2) == pytest.approx(0.48, abs=1e-12)


def test_agent_utility_reject_is_exact_zero(instance_a):
    _, agent, _ = instance_a
    assert agent_utility(agent, W, 0) == 0.0


def test_agent_utility_flat_wages_ignore_distribution():
    flat = Contract([0.49, 0.49])
    for dists in ([[0.7, 0.3], [0.4, 0.6]], [[0.1, 0.9], [0.05, 0.95]]):
        agent = AgentInstance(UtilitySpec.crra(0.5), [0.05, 0.2], dists)
        assert agent_utility(agent, flat, 1) == pytest.approx(0.7 - 0.05, abs=1e-12)
        assert agent_utility(agent, flat, 2) == pytest.approx(0.7 - 0.2, abs=1e-12)


def test_agent_utility_range_errors(instance_a):
    _, agent, _ = instance_a
    with pytest.raises(ValueError):
        agent_utility(agent, W, 3)
    with pytest.raises(ValueError):
        agent_utility(agent, W, -1)
    with pytest.raises(ValueError):
        agent_utility(agent, Contract([1.0]), 1)


def test_best_response_worked_example(instance_a):
    _, agent, _ = instance_a
    choice = best_response(agent, W)
    assert choice.effort == 1
    assert choice.utility == pytest.approx(0.54, abs=1e-12)


def test_best_response_tie_goes_up():
    agent = AgentInstance(
        UtilitySpec.crra(0.5), [0.1, 0.1], [[0.5, 0.5], [0.5, 0.5]])
    assert best_response(agent, Contract([0.3, 0.3])).effort == 2


def test_best_response_rejects_when_costs_dominate():
    agent = AgentInstance(
        UtilitySpec.crra(0.5), [5.0, 6.0], [[0.7, 0.3], [0.4, 0.6]])
    choice = best_response(agent, Contract([2.0, 2.0]))
    assert choice.effort == 0 and choice.utility == 0.0


def test_best_response_accepts_at_exact_zero_tie():
    # utility of the single effort is exactly u(1) - 1 = 0: tie with
    # rejection resolves to the positive effort
    agent = AgentInstance(UtilitySpec.crra(1.0), [1.0], [[1.0]])
    assert best_response(agent, Contract([1.0])).effort == 1


def test_exact_profit_worked_example(instance_a):
    outcomes, agent, _ = instance_a
    # effort 1: 0.7*(1-0.25) + 0.3*(2-0.64)
    assert exact_profit(agent, outcomes, W) == pytest.approx(0.933, abs=1e-12)


def test_exact_profit_rejection_is_zero(instance_a):
    outcomes, _, _ = instance_a
    agent = AgentInstance(UtilitySpec.crra(0.5), [5.0], [[0.5, 0.5]])
    assert exact_profit(agent, outcomes, Contract([1.0, 1.5])) == 0.0


def test_exact_profit_zero_margin(instance_a):
    outcomes, agent, _ = instance_a
    # paying exactly the outcome values nets zero under any accepted effort
    assert exact_profit(agent, outcomes, Contract(outcomes.values)) == pytest.approx(0.0, abs=1e-12)


def test_argmax_verified_by_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(200):
        outcomes, agent = random_instance(int(rng.integers(2, 5)), int(rng.integers(1, 5)), rng)
        w = Contract(rng.uniform(outcomes.w0, 2 * outcomes.cap, size=agent.k))
        choice = best_response(agent, w)
        utilities = effort_utilities(agent, w)
        assert choice.utility >= utilities.max() - TIE_TOL
        assert all(choice.utility >= agent_utility(agent, w, e) - TIE_TOL
                   for e in range(agent.n + 1))


def test_raising_wages_never_hurts_the_agent():
    rng = np.random.default_rng(12)
    for _ in range(200):
        outcomes, agent = random_instance(int(rng.integers(2, 4)), int(rng.integers(1, 4)), rng)
        w = rng.uniform(outcomes.w0, outcomes.cap, size=agent.k)
        bump = rng.uniform(0.0, 0.5, size=agent.k)
        before = best_response(agent, Contract(w)).utility
        after = best_response(agent, Contract(w + bump)).utility
        assert after >= before - 1e-12


def test_forced_higher_effort_helps_on_smooth_contracts():
    # with nondecreasing per-outcome margins, moving the expectation to a
    # dominating distribution cannot lower it
    rng = np.random.default_rng(13)
    for _ in range(200):
        outcomes, agent = random_instance(int(rng.integers(2, 4)), int(rng.integers(2, 5)), rng)
        w = random_monotone_smooth_contract(outcomes, rng)
        margins = outcomes.values - w.wages
        gains = agent.dists @ margins
        assert np.all(np.diff(gains) >= -1e-12)


def test_gap_identical_contracts_is_zero(instance_a):
    _, agent, _ = instance_a
    assert grossman_hart_gap(agent, W, W) == 0.0


def test_gap_same_effort_is_zero(instance_a):
    _, agent, _ = instance_a
    w2 = Contract([0.26, 0.65])
    assert best_response(agent, W).effort == best_response(agent, w2).effort
    assert grossman_hart_gap(agent, W, w2) == 0.0


def test_gap_nonnegative_randomized():
    rng = np.random.default_rng(14)
    for _ in range(1000):
        outcomes, agent = random_instance(int(rng.integers(2, 4)), int(rng.integers(1, 4)), rng)
        cap = outcomes.cap
        w1 = Contract(rng.uniform(0.05 * cap, 2 * cap, size=agent.k))
        w2 = Contract(rng.uniform(0.05 * cap, 2 * cap, size=agent.k))
        assert grossman_hart_gap(agent, w1, w2) >= -1e-12


def test_gap_with_rejection_side():
    # one contract rejected, one accepted: the zero distribution carries the
    # rejected side and the sign still holds
    agent = AgentInstance(UtilitySpec.crra(0.5), [0.6], [[0.5, 0.5]])
    poor = Contract([0.05, 0.05])
    rich = Contract([1.5, 1.8])
    assert best_response(agent, poor).effort == 0
    assert best_response(agent, rich).effort == 1
    assert grossman_hart_gap(agent, poor, rich) >= -1e-12
    assert grossman_hart_gap(agent, rich, poor) >= -1e-12


@st.composite
def agent_and_two_contracts(draw):
    k = draw(st.integers(2, 3))
    n = draw(st.integers(1, 3))
    seed = draw(st.integers(0, 10 ** 6))
    rng = np.random.default_rng(seed)
    outcomes, agent = random_instance(k, n, rng)
    quarters = st.integers(1, 16)
    w1 = np.array(draw(st.lists(quarters, min_size=k, max_size=k))) / 4.0
    w2 = np.array(draw(st.lists(quarters, min_size=k, max_size=k))) / 4.0
    return agent, Contract(w1), Contract(w2)


@given(agent_and_two_contracts())
@settings(max_examples=120, deadline=None)
def test_gap_nonnegative_property(case):
    agent, w1, w2 = case
    assert grossman_hart_gap(agent, w1, w2) >= -1e-12

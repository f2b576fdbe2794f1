import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contractbandit.domain import (
    AgentInstance,
    Contract,
    InvalidInstance,
    OutcomeModel,
    UtilitySpec,
    dominance_expectation_check,
    instance_digest,
    instance_from_dict,
    instance_to_dict,
    instance_violations,
    validate_bra,
    validate_fosd,
)
from contractbandit.gen import random_instance


def test_outcome_model_basic():
    out = OutcomeModel([1.0, 2.0], 0.1)
    assert out.k == 2 and out.cap == 2.0
    assert not out.values.flags.writeable


@pytest.mark.parametrize("values,w0", [
    ([2.0, 1.0], 0.1),      # not increasing
    ([0.0, 1.0], 0.1),      # not positive
    ([1.0, 1.0], 0.1),      # not strict
    ([1.0, 2.0], 0.0),      # zero floor
    ([1.0, 2.0], -1.0),
])
def test_outcome_model_rejects(values, w0):
    with pytest.raises(InvalidInstance):
        OutcomeModel(values, w0)


def test_contract_rejects_nonpositive():
    with pytest.raises(InvalidInstance):
        Contract([0.5, 0.0])
    with pytest.raises(InvalidInstance):
        Contract([])


def test_utility_families():
    crra = UtilitySpec.crra(0.5)
    assert crra.u(0.25) == pytest.approx(0.5)
    assert UtilitySpec.log().u(np.e) == pytest.approx(1.0)
    with pytest.raises(InvalidInstance):
        UtilitySpec.crra(0.0)
    with pytest.raises(InvalidInstance):
        UtilitySpec.crra(1.5)
    with pytest.raises(InvalidInstance):
        UtilitySpec("log", rho=0.5)
    with pytest.raises(InvalidInstance):
        UtilitySpec("exp")


@pytest.mark.parametrize("spec", [UtilitySpec.crra(0.3), UtilitySpec.crra(1.0), UtilitySpec.log()])
def test_utility_strictly_increasing(spec):
    grid = np.geomspace(1e-3, 50.0, 200)
    assert np.all(np.diff(spec.u(grid)) > 0)


def test_utility_dict_roundtrip():
    for spec in (UtilitySpec.crra(0.7), UtilitySpec.log()):
        assert UtilitySpec.from_dict(spec.as_dict()) == spec


# --- dominance validation -------------------------------------------------

def test_fosd_accepts_spec_example():
    ok, viol = validate_fosd(np.array([[0.7, 0.3], [0.4, 0.6]]))
    assert ok and viol is None


def test_fosd_reports_first_violation():
    ok, viol = validate_fosd(np.array([[0.4, 0.6], [0.7, 0.3]]))
    assert not ok
    assert viol == (2, 1, 2)


def test_fosd_single_effort_vacuous():
    ok, viol = validate_fosd(np.array([[0.2, 0.8]]))
    assert ok and viol is None


def test_bra_examples():
    # 0.5 * x**0.5 on (0.1, 1, 10): (0.158.., 0.5, 1.581..), nondecreasing
    probe = UtilitySpec.crra(0.5).scaled_marginal([0.1, 1.0, 10.0])
    assert probe == pytest.approx([0.15811, 0.5, 1.58114], rel=1e-4)
    grid = [0.1, 1.0, 10.0]
    assert validate_bra(UtilitySpec.crra(0.5), grid)
    assert validate_bra(UtilitySpec.log(), grid)      # constant 1
    assert validate_bra(UtilitySpec.crra(1.0), grid)  # identity
    with pytest.raises(ValueError):
        validate_bra(UtilitySpec.log(), [1.0, 0.5])
    with pytest.raises(ValueError):
        validate_bra(UtilitySpec.log(), [-1.0, 1.0])


def _agent_a():
    return AgentInstance(UtilitySpec.crra(0.5), [0.05, 0.2], [[0.7, 0.3], [0.4, 0.6]])


def test_dominance_expectation_examples():
    agent = _agent_a()
    assert dominance_expectation_check(agent, [0.0, 1.0])  # indicator: 0.6 >= 0.3
    assert dominance_expectation_check(agent, [5.0, 5.0])  # constant: equality
    with pytest.raises(ValueError):
        dominance_expectation_check(agent, [1.0, 0.5])
    with pytest.raises(ValueError):
        dominance_expectation_check(agent, [1.0, 2.0, 3.0])


def test_dominance_expectation_randomized():
    # executable form of the tail-sum equivalence: never falsified on valid
    # instances, any nondecreasing sequence
    rng = np.random.default_rng(7)
    for trial in range(300):
        _, agent = random_instance(int(rng.integers(2, 5)), int(rng.integers(1, 4)), rng)
        a = np.sort(rng.uniform(-3, 3, size=agent.k))
        assert dominance_expectation_check(agent, a)


# --- agent construction ---------------------------------------------------

def test_agent_instance_validates():
    agent = _agent_a()
    assert agent.n == 2 and agent.k == 2
    ok, _ = validate_fosd(agent)
    assert ok
    assert np.allclose(agent.dists.sum(axis=1), 1.0, atol=1e-12)


def test_agent_rejects_bad_normalization():
    with pytest.raises(InvalidInstance) as err:
        AgentInstance(UtilitySpec.log(), [0.1], [[0.5, 0.4]])
    assert any(v["check"] == "normalization" for v in err.value.violations)


def test_agent_rejects_dominance_violation():
    with pytest.raises(InvalidInstance) as err:
        AgentInstance(UtilitySpec.log(), [0.1, 0.2], [[0.4, 0.6], [0.7, 0.3]])
    viol = next(v for v in err.value.violations if v["check"] == "dominance")
    assert viol["efforts"] == [2, 1] and viol["outcome"] == 2


def test_agent_rejects_negative_cost():
    with pytest.raises(InvalidInstance) as err:
        AgentInstance(UtilitySpec.log(), [-0.1], [[1.0]])
    assert any(v["check"] == "costs" for v in err.value.violations)


def test_agent_dist_of_reject_is_zero():
    agent = _agent_a()
    assert np.array_equal(agent.dist(0), np.zeros(2))
    assert np.array_equal(agent.dist(2), np.array([0.4, 0.6]))


# --- instance files -------------------------------------------------------

def test_instance_roundtrip(instance_a):
    outcomes, agent, digest = instance_a
    doc = instance_to_dict(outcomes, agent)
    out2, agent2 = instance_from_dict(doc)
    assert np.array_equal(out2.values, outcomes.values)
    assert agent2.utility == agent.utility
    assert np.array_equal(agent2.dists, agent.dists)
    assert instance_digest(doc) == digest


def test_loader_reports_violations():
    doc = {
        "pi": [1.0, 2.0],
        "w0": 0.1,
        "utility": {"family": "crra", "rho": 0.5},
        "efforts": [
            {"cost": 0.05, "dist": [0.4, 0.6]},
            {"cost": -0.2, "dist": [0.8, 0.3]},
        ],
    }
    report = instance_violations(doc)
    checks = {v["check"] for v in report}
    assert {"costs", "normalization", "dominance"} <= checks
    with pytest.raises(InvalidInstance):
        instance_from_dict(doc)


def test_loader_missing_fields():
    report = instance_violations({"pi": [1.0]})
    assert all(v["check"] == "document" for v in report)
    assert len(report) == 3


def test_loader_rejects_length_mismatch():
    doc = {
        "pi": [1.0, 2.0, 3.0],
        "w0": 0.1,
        "utility": {"family": "log"},
        "efforts": [{"cost": 0.0, "dist": [0.5, 0.5]}],
    }
    assert any(v["check"] == "shape" for v in instance_violations(doc))


def test_digest_is_canonical():
    doc1 = {"pi": [1.0], "w0": 0.5, "utility": {"family": "log"}, "efforts": []}
    doc2 = {"efforts": [], "utility": {"family": "log"}, "w0": 0.5, "pi": [1.0]}
    assert instance_digest(doc1) == instance_digest(doc2)
    assert instance_digest({**doc1, "w0": 0.6}) != instance_digest(doc1)


# --- property tests on exact rational grids -------------------------------

Q = 64  # probability denominator; exact in binary floating point


@st.composite
def exact_chain_agents(draw):
    """Agents whose distributions live on the 1/64 grid with the dominance
    chain built by shifting whole grid units upward."""
    k = draw(st.integers(2, 4))
    n = draw(st.integers(1, 3))
    cuts = sorted(draw(st.lists(st.integers(0, Q), min_size=k - 1, max_size=k - 1)))
    parts = np.diff([0, *cuts, Q]).astype(np.int64)
    rows = [parts]
    for _ in range(n - 1):
        prev = rows[-1]
        nxt = prev.copy()
        for i in range(k - 1):
            moved = draw(st.integers(0, int(nxt[i])))
            nxt[i] -= moved
            nxt[i + 1] += moved
        rows.append(nxt)
    dists = np.stack(rows) / Q
    costs = np.cumsum(draw(st.lists(st.integers(0, 32), min_size=n, max_size=n))) / Q
    family = draw(st.sampled_from(["crra03", "crra1", "log"]))
    utility = {"crra03": UtilitySpec.crra(0.3), "crra1": UtilitySpec.crra(1.0),
               "log": UtilitySpec.log()}[family]
    return AgentInstance(utility, costs, dists)


@given(exact_chain_agents())
@settings(max_examples=80, deadline=None)
def test_constructed_chains_always_validate(agent):
    ok, viol = validate_fosd(agent)
    assert ok, viol
    assert dominance_expectation_check(agent, np.arange(agent.k, dtype=float))


@given(exact_chain_agents(), st.lists(st.integers(-8, 8), min_size=4, max_size=4))
@settings(max_examples=80, deadline=None)
def test_dominance_expectation_property(agent, raw):
    a = np.sort(np.array(raw, dtype=float))[: agent.k]
    a = np.pad(a, (0, agent.k - a.size), constant_values=float(a[-1]) if a.size else 0.0)
    a = np.sort(a)
    assert dominance_expectation_check(agent, a)

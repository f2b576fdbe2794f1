"""Core value types for the hidden-agent wage-setting problem.

Outcome values, wage contracts, utility families, and agent instances, plus
validators that turn every modelling assumption (dominance ordering of the
outcome distributions, bounded risk aversion of the utility) into a checkable
predicate. Instances that reach the simulation or learning layers have passed
every check here.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Probabilities are treated as exact up to this slack (normalization and
# upper-tail dominance checks).
PROB_TOL = 1e-12
# Slack for the nondecreasing x*u'(x) probe; the built-in families satisfy it
# analytically, the probe is a regression guard for new families.
BRA_TOL = 1e-10

CRRA = "crra"
LOG = "log"


class InvalidInstance(ValueError):
    """Instance data violates a structural assumption.

    ``violations`` holds one machine-readable dict per failed check, each with
    at least ``check`` and ``message`` keys.
    """

    def __init__(self, violations: list[dict]):
        self.violations = list(violations)
        super().__init__("; ".join(v["message"] for v in self.violations))


def _frozen(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OutcomeModel:
    """The principal's side: ordered outcome values and the wage floor.

    ``values`` must be strictly increasing and positive; the largest value
    caps the principal's per-round gross profit. ``w0`` is the smallest wage
    any contract may pay for an outcome.
    """

    values: np.ndarray
    w0: float

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "w0", float(self.w0))
        v = self.values
        bad = []
        if v.ndim != 1 or v.size < 1:
            bad.append({"check": "outcomes", "message": "need at least one outcome value"})
        elif not (v[0] > 0 and np.all(np.diff(v) > 0)):
            bad.append({
                "check": "outcomes_increasing",
                "message": "outcome values must be positive and strictly increasing",
            })
        if not self.w0 > 0:
            bad.append({"check": "minimum_wage", "message": "w0 must be positive"})
        if bad:
            raise InvalidInstance(bad)

    @property
    def k(self) -> int:
        return int(self.values.size)

    @property
    def cap(self) -> float:
        """Largest outcome value; bounds the principal's profit per round."""
        return float(self.values[-1])


@dataclass(frozen=True)
class Contract:
    """A wage vector: ``wages[i]`` is paid when outcome ``i+1`` is realized."""

    wages: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "wages", _frozen(self.wages))
        w = self.wages
        if w.ndim != 1 or w.size < 1 or not np.all(w > 0):
            raise InvalidInstance([
                {"check": "contract", "message": "wages must be a vector of positive reals"},
            ])

    @property
    def k(self) -> int:
        return int(self.wages.size)


@dataclass(frozen=True)
class UtilitySpec:
    """Agent utility-of-wage family.

    ``crra`` is u(x) = x**rho with rho in (0, 1]; ``log`` is u(x) = ln(x).
    Both are strictly increasing, concave, and keep x*u'(x) nondecreasing
    (relative risk aversion at most one), which is what makes the agent's
    behaviour stable under small multiplicative wage changes. rho = 1 is the
    risk-neutral agent.
    """

    family: str
    rho: float | None = None

    def __post_init__(self):
        if self.family not in (CRRA, LOG):
            raise InvalidInstance([
                {"check": "utility", "message": f"unknown utility family {self.family!r}"},
            ])
        if self.family == CRRA:
            if self.rho is None or not (0 < self.rho <= 1):
                raise InvalidInstance([
                    {"check": "utility", "message": "crra exponent must lie in (0, 1]"},
                ])
            object.__setattr__(self, "rho", float(self.rho))
        elif self.rho is not None:
            raise InvalidInstance([
                {"check": "utility", "message": "log utility takes no exponent"},
            ])

    @classmethod
    def crra(cls, rho: float) -> "UtilitySpec":
        return cls(CRRA, rho)

    @classmethod
    def log(cls) -> "UtilitySpec":
        return cls(LOG)

    def u(self, x):
        """Utility of wage, elementwise on arrays."""
        x = np.asarray(x, dtype=np.float64)
        if self.family == LOG:
            return np.log(x)
        return x ** self.rho

    def u_prime(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.family == LOG:
            return 1.0 / x
        return self.rho * x ** (self.rho - 1.0)

    def scaled_marginal(self, x):
        """x * u'(x), the quantity that must be nondecreasing."""
        x = np.asarray(x, dtype=np.float64)
        return x * self.u_prime(x)

    def as_dict(self) -> dict:
        if self.family == CRRA:
            return {"family": CRRA, "rho": self.rho}
        return {"family": LOG}

    @classmethod
    def from_dict(cls, doc: dict) -> "UtilitySpec":
        if not isinstance(doc, dict) or "family" not in doc:
            raise InvalidInstance([
                {"check": "utility", "message": "utility must be an object with a 'family' key"},
            ])
        if doc["family"] == CRRA:
            return cls(CRRA, doc.get("rho"))
        return cls(doc["family"])


@dataclass(frozen=True)
class AgentInstance:
    """Hidden ground truth: the agent's utility, effort costs, and outcome
    distributions.

    ``dists[e-1]`` is the probability vector over outcomes when the agent
    exerts effort e (1-based); ``costs[e-1]`` is its disutility. The implicit
    reject level e = 0 (utility exactly zero, no outcome) is not stored.
    Construction enforces normalization and the dominance chain: raising
    effort never shifts outcome mass downward.
    """

    utility: UtilitySpec
    costs: np.ndarray
    dists: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "costs", _frozen(self.costs))
        object.__setattr__(self, "dists", _frozen(self.dists))
        raise_on_violations(agent_violations(self.utility, self.costs, self.dists))

    @property
    def n(self) -> int:
        return int(self.costs.size)

    @property
    def k(self) -> int:
        return int(self.dists.shape[1])

    def dist(self, effort: int) -> np.ndarray:
        """Outcome distribution of an effort level; reject (0) carries none."""
        if effort == 0:
            return np.zeros(self.k)
        return self.dists[effort - 1]


# ---------------------------------------------------------------------------
# validators
# ---------------------------------------------------------------------------

def fosd_violation(dists: np.ndarray) -> tuple[int, int, int] | None:
    """First (e, e_low, j) whose upper-tail mass drops when effort rises.

    Efforts and outcome index are 1-based. Scans effort pairs in ascending
    order and outcomes left to right; returns None when the dominance chain
    holds everywhere within PROB_TOL.
    """
    dists = np.asarray(dists, dtype=np.float64)
    tails = dists[:, ::-1].cumsum(axis=1)[:, ::-1]
    n = dists.shape[0]
    for e in range(1, n):
        for lo in range(e):
            short = np.nonzero(tails[e] - tails[lo] < -PROB_TOL)[0]
            if short.size:
                return (e + 1, lo + 1, int(short[0]) + 1)
    return None


def validate_fosd(agent) -> tuple[bool, tuple[int, int, int] | None]:
    """Check the dominance chain across all ordered effort pairs.

    Accepts an AgentInstance or a raw (n, k) array of distributions. Returns
    (ok, first_violation) where the violation triple is (e, e_low, outcome),
    1-based, or None.
    """
    dists = agent.dists if isinstance(agent, AgentInstance) else agent
    viol = fosd_violation(dists)
    return (viol is None, viol)


def validate_bra(utility: UtilitySpec, probe_grid) -> bool:
    """True iff x*u'(x) is nondecreasing on the grid within BRA_TOL.

    The grid must be strictly positive and sorted ascending.
    """
    grid = np.asarray(probe_grid, dtype=np.float64)
    if grid.size < 1 or not np.all(grid > 0) or np.any(np.diff(grid) < 0):
        raise ValueError("probe grid must be strictly positive and sorted")
    y = utility.scaled_marginal(grid)
    return bool(np.all(np.diff(y) >= -BRA_TOL))


def dominance_expectation_check(agent: AgentInstance, a) -> bool:
    """Expected value of a nondecreasing sequence never drops as effort rises.

    This is the executable form of what the dominance chain guarantees: for
    every pair of efforts e > e', sum(f_e * a) >= sum(f_e' * a) - PROB_TOL.
    Rejects sequences that are not nondecreasing.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.shape != (agent.k,):
        raise ValueError(f"sequence must have length {agent.k}")
    if np.any(np.diff(a) < 0):
        raise ValueError("sequence must be nondecreasing")
    exp = agent.dists @ a
    for e in range(1, agent.n):
        if np.any(exp[e] < exp[:e] - PROB_TOL):
            return False
    return True


def agent_violations(utility: UtilitySpec, costs: np.ndarray, dists: np.ndarray) -> list[dict]:
    """All structural violations of an agent description, machine-readable."""
    costs = np.asarray(costs, dtype=np.float64)
    dists = np.asarray(dists, dtype=np.float64)
    out: list[dict] = []
    if costs.ndim != 1 or dists.ndim != 2 or dists.shape[0] != costs.size:
        out.append({
            "check": "shape",
            "message": "need one cost and one outcome distribution per effort level",
        })
        return out
    if costs.size < 1 or dists.shape[1] < 1:
        out.append({"check": "shape", "message": "need at least one effort and one outcome"})
        return out
    if np.any(costs < 0):
        out.append({"check": "costs", "message": "effort costs must be nonnegative"})
    if np.any(dists < 0):
        out.append({"check": "distributions", "message": "probabilities must be nonnegative"})
    off = np.abs(dists.sum(axis=1) - 1.0)
    if np.any(off > PROB_TOL):
        e = int(np.argmax(off)) + 1
        out.append({
            "check": "normalization",
            "effort": e,
            "message": f"distribution of effort {e} sums to {dists[e - 1].sum()!r}",
        })
    viol = fosd_violation(dists)
    if viol is not None:
        e, lo, j = viol
        out.append({
            "check": "dominance",
            "efforts": [e, lo],
            "outcome": j,
            "message": f"effort {e} loses upper-tail mass to effort {lo} at outcome {j}",
        })
    return out


def raise_on_violations(violations: list[dict]) -> None:
    if violations:
        raise InvalidInstance(violations)


# ---------------------------------------------------------------------------
# instance files
# ---------------------------------------------------------------------------
#
# On disk an instance is a single JSON object:
#   {"pi": [...], "w0": ..., "utility": {"family": "crra", "rho": 0.5},
#    "efforts": [{"cost": ..., "dist": [...]}, ...]}

def instance_to_dict(outcomes: OutcomeModel, agent: AgentInstance) -> dict:
    return {
        "pi": [float(x) for x in outcomes.values],
        "w0": float(outcomes.w0),
        "utility": agent.utility.as_dict(),
        "efforts": [
            {"cost": float(c), "dist": [float(p) for p in d]}
            for c, d in zip(agent.costs, agent.dists)
        ],
    }


def instance_violations(doc: dict) -> list[dict]:
    """Run every validator against a raw instance document."""
    out: list[dict] = []
    if not isinstance(doc, dict):
        return [{"check": "document", "message": "instance must be a JSON object"}]
    for key in ("pi", "w0", "utility", "efforts"):
        if key not in doc:
            out.append({"check": "document", "message": f"missing field {key!r}"})
    if out:
        return out
    try:
        OutcomeModel(doc["pi"], doc["w0"])
    except InvalidInstance as err:
        out.extend(err.violations)
    except (TypeError, ValueError):
        out.append({"check": "outcomes", "message": "pi/w0 are not numeric"})
    try:
        utility = UtilitySpec.from_dict(doc["utility"])
    except InvalidInstance as err:
        out.extend(err.violations)
        utility = None
    efforts = doc["efforts"]
    if not isinstance(efforts, list) or not efforts:
        out.append({"check": "efforts", "message": "efforts must be a non-empty array"})
        return out
    try:
        costs = np.array([e["cost"] for e in efforts], dtype=np.float64)
        dists = np.array([e["dist"] for e in efforts], dtype=np.float64)
    except (KeyError, TypeError, ValueError):
        out.append({"check": "efforts", "message": "each effort needs a cost and a dist array"})
        return out
    if dists.ndim != 2 or (isinstance(doc.get("pi"), list) and dists.shape[1] != len(doc["pi"])):
        out.append({
            "check": "shape",
            "message": "every effort distribution must cover exactly the outcomes",
        })
        return out
    if utility is not None:
        out.extend(agent_violations(utility, costs, dists))
    return out


def instance_from_dict(doc: dict) -> tuple[OutcomeModel, AgentInstance]:
    """Build validated model objects from a raw document.

    Raises InvalidInstance carrying the full violation report when anything
    fails, so callers can surface every problem at once.
    """
    raise_on_violations(instance_violations(doc))
    outcomes = OutcomeModel(doc["pi"], doc["w0"])
    agent = AgentInstance(
        utility=UtilitySpec.from_dict(doc["utility"]),
        costs=[e["cost"] for e in doc["efforts"]],
        dists=[e["dist"] for e in doc["efforts"]],
    )
    if agent.k != outcomes.k:
        raise InvalidInstance([
            {"check": "shape", "message": "distribution length differs from outcome count"},
        ])
    return outcomes, agent


def load_instance(path) -> tuple[OutcomeModel, AgentInstance]:
    with open(path) as fh:
        doc = json.load(fh)
    return instance_from_dict(doc)


def save_instance(path, outcomes: OutcomeModel, agent: AgentInstance) -> None:
    Path(path).write_text(dumps_instance(outcomes, agent))


def dumps_instance(outcomes: OutcomeModel, agent: AgentInstance) -> str:
    return json.dumps(instance_to_dict(outcomes, agent), indent=2) + "\n"


def instance_digest(doc: dict | OutcomeModel, agent: AgentInstance | None = None) -> str:
    """sha256 over the canonical JSON encoding of an instance."""
    if agent is not None:
        doc = instance_to_dict(doc, agent)
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()

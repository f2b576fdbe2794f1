"""Best-arm identification by median elimination over bounded-reward arms.

The schedule is fixed so runs are reproducible and budgets exactly
predictable: round one samples every arm

    n_1 = ceil(2 * B**2 * ln(3/delta_1) / (eps_1/2)**2),

with eps_1 = epsilon/4, delta_1 = delta/2 and B the reward breadth, keeps the
top ceil(|S|/2) arms by empirical mean, then tightens eps <- (3/4) eps,
delta <- delta/2 and repeats until one arm survives. The constant comes from
the standard Hoeffding analysis of the algorithm. Ties at the median cutoff
are broken toward the lower arm index so the survivor count halves exactly
every round.

Sampling within a round uses independent substreams keyed by
(seed, round, arm index): arms may be sampled concurrently and a rerun with
the same key reproduces the same draws.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels


def substream(seed: int, round_index: int, arm_index: int) -> np.random.Generator:
    """Counter-based generator for one (seed, round, arm) cell.

    Packs the key into Philox's 128-bit key space; rounds up to 2**16 and
    arm indices up to 2**48 are collision-free.
    """
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a nonnegative 64-bit integer")
    if round_index >= 2 ** 16 or arm_index >= 2 ** 48:
        raise ValueError("round/arm index out of keyable range")
    key = np.array([seed, (round_index << 48) | arm_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ---------------------------------------------------------------------------
# arm sets
# ---------------------------------------------------------------------------

class ArmSet:
    """A finite set of arms with rewards bounded in [lo, hi].

    Subclasses implement sample_sum; draws are independent across calls and
    the per-arm reward distribution never changes.
    """

    lo: float
    hi: float

    def __len__(self) -> int:
        raise NotImplementedError

    @property
    def breadth(self) -> float:
        return self.hi - self.lo

    def sample_sum(self, arm: int, n: int, rng: np.random.Generator) -> float:
        """Sum of n independent reward draws from one arm."""
        raise NotImplementedError

    def sample_one(self, arm: int, rng: np.random.Generator) -> float:
        return self.sample_sum(arm, 1, rng)


class FunctionArmSet(ArmSet):
    """Arms backed by per-arm callables rng -> reward."""

    def __init__(self, samplers, lo: float, hi: float):
        if not samplers:
            raise ValueError("need at least one arm")
        if not hi > lo:
            raise ValueError("reward bounds must satisfy hi > lo")
        self._samplers = list(samplers)
        self.lo = float(lo)
        self.hi = float(hi)

    def __len__(self):
        return len(self._samplers)

    def sample_sum(self, arm, n, rng):
        fn = self._samplers[arm]
        return float(sum(fn(rng) for _ in range(n)))


class TabularArmSet(ArmSet):
    """Arms with explicit discrete reward tables.

    Row ``arm`` of ``values``/``probs`` gives the support and probabilities of
    that arm's reward. Two sampling modes produce identically distributed
    empirical sums: ``draws`` simulates every pull through the inverse CDF
    (one uniform per pull), ``counts`` draws the multinomial pull counts
    directly and is O(support) per batch regardless of n.
    """

    def __init__(self, values, probs, lo: float, hi: float, mode: str = "draws"):
        values = np.asarray(values, dtype=np.float64)
        probs = np.asarray(probs, dtype=np.float64)
        if values.ndim != 2 or values.shape != probs.shape or values.shape[0] < 1:
            raise ValueError("values and probs must be matching (n_arms, support) arrays")
        if not hi > lo:
            raise ValueError("reward bounds must satisfy hi > lo")
        if np.any(values < lo) or np.any(values > hi):
            raise ValueError("reward support must lie within [lo, hi]")
        if mode not in ("draws", "counts"):
            raise ValueError("mode must be 'draws' or 'counts'")
        self._values = values
        self._probs = probs / probs.sum(axis=1, keepdims=True)
        self._cdfs = np.cumsum(self._probs, axis=1)
        self._cdfs[:, -1] = 1.0  # guarantee every uniform in [0,1) lands
        self.lo = float(lo)
        self.hi = float(hi)
        self.mode = mode

    def __len__(self):
        return int(self._values.shape[0])

    def sample_sum(self, arm, n, rng):
        if self.mode == "counts":
            counts = rng.multinomial(n, self._probs[arm])
            return float(counts @ self._values[arm])
        total, _ = kernels.reward_sweep(rng.random(n), self._cdfs[arm], self._values[arm])
        return total


# ---------------------------------------------------------------------------
# schedule and elimination
# ---------------------------------------------------------------------------

def schedule_rounds(n_arms: int, breadth: float, epsilon: float, delta: float):
    """Yield (round_index, survivor_count, samples_per_arm) until one arm is left."""
    if n_arms < 1:
        raise ValueError("need at least one arm")
    if epsilon <= 0 or not 0 < delta < 1 or breadth <= 0:
        raise ValueError("need epsilon > 0, 0 < delta < 1, breadth > 0")
    survivors = n_arms
    eps_l = epsilon / 4
    delta_l = delta / 2
    round_index = 1
    while survivors > 1:
        per_arm = math.ceil(2 * breadth * breadth * math.log(3 / delta_l) / (eps_l / 2) ** 2)
        yield round_index, survivors, per_arm
        survivors = math.ceil(survivors / 2)
        eps_l *= 0.75
        delta_l /= 2
        round_index += 1


def total_sample_count(n_arms: int, breadth: float, epsilon: float, delta: float) -> int:
    """Deterministic total number of pulls the elimination schedule consumes."""
    return sum(s * n for _, s, n in schedule_rounds(n_arms, breadth, epsilon, delta))


@dataclass(frozen=True)
class TraceRound:
    round_index: int
    samples_per_arm: int
    arms: np.ndarray        # surviving arms entering the round
    means: np.ndarray       # their empirical means this round
    kept: np.ndarray
    eliminated: np.ndarray


@dataclass(frozen=True)
class EliminationTrace:
    rounds: tuple[TraceRound, ...]
    total_samples: int

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "arm", "samples", "empirical_mean", "eliminated"])
            for rnd in self.rounds:
                gone = set(int(a) for a in rnd.eliminated)
                for arm, mean in zip(rnd.arms, rnd.means):
                    writer.writerow([
                        rnd.round_index, int(arm), rnd.samples_per_arm,
                        repr(float(mean)), int(arm) in gone,
                    ])


@dataclass(frozen=True)
class EliminationResult:
    best_arm: int
    trace: EliminationTrace


def median_elimination(arms: ArmSet, epsilon: float, delta: float,
                       seed: int) -> EliminationResult:
    """Identify an epsilon-optimal arm with probability at least 1 - delta.

    Deterministic given (arms, epsilon, delta, seed): the sampling schedule
    is closed-form and every pull comes from a keyed substream. Within a
    round all survivors share the same pull count, so elimination compares
    reward sums directly — shifting every reward by a constant cannot change
    any decision.
    """
    n_arms = len(arms)
    if n_arms < 1:
        raise ValueError("need at least one arm")
    if n_arms == 1:
        return EliminationResult(0, EliminationTrace(rounds=(), total_samples=0))

    survivors = np.arange(n_arms, dtype=np.int64)
    rounds = []
    total = 0
    for round_index, count, per_arm in schedule_rounds(n_arms, arms.breadth, epsilon, delta):
        assert count == survivors.size
        sums = np.empty(count)
        for i, arm in enumerate(survivors):
            rng = substream(seed, round_index, int(arm))
            sums[i] = arms.sample_sum(int(arm), per_arm, rng)
        total += count * per_arm

        keep_n = math.ceil(count / 2)
        # order by sum descending, then arm index ascending (deterministic
        # cutoff among median ties; lexsort treats its last key as primary)
        order = np.lexsort((survivors, -sums))
        kept = np.sort(survivors[order[:keep_n]])
        eliminated = np.sort(survivors[order[keep_n:]])
        rounds.append(TraceRound(
            round_index=round_index,
            samples_per_arm=per_arm,
            arms=survivors,
            means=sums / per_arm,
            kept=kept,
            eliminated=eliminated,
        ))
        survivors = kept

    assert survivors.size == 1
    return EliminationResult(int(survivors[0]), EliminationTrace(tuple(rounds), total))

"""Ratio-coarse wage grids: predicates, enumeration, and the rounding map.

A coarse contract fixes integer exponents (l_0, ..., l_{k-1}) and pays
w(1) = w0*exp(eta*l_0), w(i+1) = w(i)*exp(eta*l_i). The enumerated grid holds
every such contract whose wages stay at or below twice the largest outcome
value. Rounding lifts an arbitrary smooth bounded contract onto the grid by
taking ceilings of the log wage ratios, which can only raise wages — and by
construction never by more than the factor exp(eta*i) at position i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import Contract, OutcomeModel

# Log-ratios within this distance of an integer are treated as exact before
# taking ceilings/floors, so contracts already on the grid round to
# themselves despite float noise.
SNAP_TOL = 1e-9


def _snap_ceil(x: float) -> int:
    r = round(x)
    if abs(x - r) <= SNAP_TOL:
        return int(r)
    return math.ceil(x)


def _snap_floor(x: float) -> int:
    r = round(x)
    if abs(x - r) <= SNAP_TOL:
        return int(r)
    return math.floor(x)


def max_eta(k: int) -> float:
    """Largest usable step exponent for k outcomes (exclusive bound)."""
    return 1.0 / (4 * k)


def is_monotone_smooth(outcomes: OutcomeModel, w: Contract) -> bool:
    """Wage increments sit in [0, outcome-value increment], exact closed
    intervals, so the principal's per-outcome margin is nondecreasing."""
    if w.k != outcomes.k:
        raise ValueError("contract and outcome model disagree on length")
    dw = np.diff(w.wages)
    dpi = np.diff(outcomes.values)
    return bool(np.all(dw >= 0) and np.all(dw <= dpi))


def is_bounded(w: Contract, w0: float, bound: float) -> bool:
    """All wages in [w0, bound], boundaries included."""
    return bool(np.all(w.wages >= w0) and np.all(w.wages <= bound))


@dataclass(frozen=True)
class CoarseCode:
    """Integer exponents of a coarse contract, in wage order."""

    exponents: tuple[int, ...]

    def decode(self, w0: float, eta: float) -> Contract:
        return Contract(decode_wages(w0, eta, self.exponents))


def decode_wages(w0: float, eta: float, exponents) -> np.ndarray:
    # cumulative form of w(i+1) = w(i) * exp(eta * l_i); algebraically
    # identical, better conditioned than repeated multiplication
    sums = np.cumsum(np.asarray(exponents, dtype=np.int64))
    return w0 * np.exp(eta * sums)


def level_cap(w0: float, bound: float, eta: float) -> int:
    """Largest cumulative exponent s with w0*exp(eta*s) <= bound."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    if not w0 < bound:
        raise ValueError("wage floor must sit below the bound")
    return _snap_floor(math.log(bound / w0) / eta)


def size_bound(w0: float, bound: float, eta: float, k: int) -> int:
    """(floor(log(bound/w0)/eta) + 1) ** k, an upper bound on the grid size.

    Counts independent per-outcome wage levels; the real grid is smaller
    because cumulative exponents share the same cap.
    """
    return (level_cap(w0, bound, eta) + 1) ** k


@dataclass(frozen=True)
class DiscretizedSpace:
    """The finite arm set: every coarse contract under the wage bound.

    Contracts are stored as parallel arrays in lexicographic code order, so
    arm indices are stable across runs with identical parameters.
    ``decode_steps`` counts wage evaluations spent during construction.
    """

    eta: float
    w0: float
    bound: float
    cap: int
    codes: np.ndarray   # (M, k) int64, lexicographic
    wages: np.ndarray   # (M, k) float64
    decode_steps: int
    _lookup: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        self.codes.setflags(write=False)
        self.wages.setflags(write=False)
        object.__setattr__(
            self, "_lookup",
            {tuple(map(int, row)): i for i, row in enumerate(self.codes)},
        )

    def __len__(self) -> int:
        return int(self.codes.shape[0])

    @property
    def k(self) -> int:
        return int(self.codes.shape[1])

    def contract(self, i: int) -> Contract:
        return Contract(self.wages[i])

    def code(self, i: int) -> CoarseCode:
        return CoarseCode(tuple(int(x) for x in self.codes[i]))

    def index_of(self, code) -> int | None:
        exps = code.exponents if isinstance(code, CoarseCode) else tuple(code)
        return self._lookup.get(tuple(int(x) for x in exps))

    def members(self):
        """(Contract, CoarseCode) pairs in enumeration order."""
        for i in range(len(self)):
            yield self.contract(i), self.code(i)


def enumerate_space(outcomes: OutcomeModel, eta: float, *,
                    prune_monotone_smooth: bool = False) -> DiscretizedSpace:
    """Construct every coarse contract bounded by twice the outcome cap.

    Depth-first over exponent positions in lexicographic order; a contract is
    kept iff its largest (last) wage stays under the bound, which because
    wages are nondecreasing covers all positions. With
    ``prune_monotone_smooth`` the grid is additionally filtered to contracts
    whose increments respect the outcome-value increments.

    Any positive eta is accepted here — the grid is well defined regardless —
    while the rounding map and the learner enforce eta < 1/(4k).
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    w0 = outcomes.w0
    bound = 2 * outcomes.cap
    k = outcomes.k
    cap = level_cap(w0, bound, eta)

    codes: list[tuple[int, ...]] = []
    wages: list[tuple[float, ...]] = []
    code_buf = [0] * k
    wage_buf = [0.0] * k
    steps = 0

    def walk(pos: int, total: int) -> None:
        nonlocal steps
        for l in range(cap - total + 1):
            s = total + l
            code_buf[pos] = l
            wage_buf[pos] = w0 * math.exp(eta * s)
            steps += 1
            if pos == k - 1:
                codes.append(tuple(code_buf))
                wages.append(tuple(wage_buf))
            else:
                walk(pos + 1, s)

    walk(0, 0)
    code_arr = np.array(codes, dtype=np.int64).reshape(len(codes), k)
    wage_arr = np.array(wages, dtype=np.float64).reshape(len(wages), k)

    if prune_monotone_smooth:
        dw = np.diff(wage_arr, axis=1)
        dpi = np.diff(outcomes.values)
        keep = np.all(dw <= dpi, axis=1)  # increments are nonnegative already
        code_arr, wage_arr = code_arr[keep], wage_arr[keep]

    return DiscretizedSpace(
        eta=eta, w0=w0, bound=bound, cap=cap,
        codes=code_arr, wages=wage_arr, decode_steps=steps,
    )


def round_to_coarse(outcomes: OutcomeModel, eta: float,
                    w: Contract) -> tuple[Contract, CoarseCode]:
    """Lift a smooth, cap-bounded contract onto the coarse grid.

    Takes ceilings of the log wage ratios, so the result dominates the input
    pointwise, dominates its consecutive wage ratios, and pays at most
    exp(eta*i) times the input at position i. With eta < 1/(4k) the result
    stays under twice the outcome cap and is therefore a grid member.
    """
    k = outcomes.k
    if not 0 < eta < max_eta(k):
        raise ValueError(f"eta must lie in (0, {max_eta(k)}) for {k} outcomes")
    if not is_monotone_smooth(outcomes, w):
        raise ValueError("contract is not monotone-smooth")
    if not is_bounded(w, outcomes.w0, outcomes.cap):
        raise ValueError("contract wages must lie within [w0, cap]")

    exps = [_snap_ceil(math.log(w.wages[0] / outcomes.w0) / eta)]
    for i in range(k - 1):
        exps.append(_snap_ceil(math.log(w.wages[i + 1] / w.wages[i]) / eta))
    code = CoarseCode(tuple(exps))
    return code.decode(outcomes.w0, eta), code

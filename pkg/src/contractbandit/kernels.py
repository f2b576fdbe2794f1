"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

Two loops dominate runtime: turning a block of uniform draws into sampled
rewards, and scanning a batch of candidate contracts for the agent's response
and the resulting profit. Both carry an @njit implementation and a vectorised
numpy twin.

The backend is picked at import time from the CONTRACTBANDIT_BACKEND
environment variable ("numba" or "numpy"; default numba when importable) and
can be switched at runtime with set_backend(). The two backends agree up to
floating-point summation order; benchmarks/bench_kernels.py compares them.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

ENV_VAR = "CONTRACTBANDIT_BACKEND"

# family codes shared with domain.UtilitySpec
CRRA_CODE = 0
LOG_CODE = 1

_PROFIT_CHUNK = 16384


def _default_backend() -> str:
    want = os.environ.get(ENV_VAR, "").strip().lower()
    if want == "numpy":
        return "numpy"
    if want == "numba" and numba is None:
        raise RuntimeError(f"{ENV_VAR}=numba but numba is not importable")
    if want not in ("", "numba", "numpy"):
        raise RuntimeError(f"{ENV_VAR} must be 'numba' or 'numpy', got {want!r}")
    return "numba" if numba is not None else "numpy"


_backend = _default_backend()


def active_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy'")
    if name == "numba" and numba is None:
        raise RuntimeError("numba backend requested but numba is not importable")
    _backend = name


def family_code(utility) -> int:
    return LOG_CODE if utility.family == "log" else CRRA_CODE


# ---------------------------------------------------------------------------
# reward sweep: uniforms -> (sum of rewards, outcome counts)
# ---------------------------------------------------------------------------

def _reward_sweep_np(uniforms, cdf, rewards):
    idx = np.searchsorted(cdf, uniforms, side="right")
    counts = np.bincount(idx, minlength=cdf.shape[0]).astype(np.int64)
    return float(counts @ rewards), counts


if numba is not None:

    @numba.njit(cache=True)
    def _reward_sweep_nb(uniforms, cdf, rewards):  # pragma: no cover - jitted
        counts = np.zeros(cdf.shape[0], dtype=np.int64)
        total = 0.0
        for t in range(uniforms.shape[0]):
            u = uniforms[t]
            j = 0
            while u >= cdf[j]:
                j += 1
            total += rewards[j]
            counts[j] += 1
        return total, counts


def reward_sweep(uniforms: np.ndarray, cdf: np.ndarray, rewards: np.ndarray):
    """Map uniform draws through an inverse CDF and accumulate rewards.

    ``cdf`` must be nondecreasing with its final entry exactly 1.0, so every
    draw in [0, 1) lands on an outcome. Returns (reward sum, per-outcome
    counts).
    """
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdf = np.ascontiguousarray(cdf, dtype=np.float64)
    rewards = np.ascontiguousarray(rewards, dtype=np.float64)
    if _backend == "numba":
        total, counts = _reward_sweep_nb(uniforms, cdf, rewards)
        return float(total), counts
    return _reward_sweep_np(uniforms, cdf, rewards)


# ---------------------------------------------------------------------------
# profit scan: batch of wage vectors -> (profit, chosen effort) per vector
# ---------------------------------------------------------------------------

def _profit_scan_np(wages, pi, dists, costs, fam, rho, tie_tol):
    p_total, k = wages.shape
    values = np.empty(p_total)
    efforts = np.empty(p_total, dtype=np.int64)
    for start in range(0, p_total, _PROFIT_CHUNK):
        block = wages[start:start + _PROFIT_CHUNK]
        uw = np.log(block) if fam == LOG_CODE else block ** rho
        utilities = np.empty((block.shape[0], costs.size + 1))
        utilities[:, 0] = 0.0
        utilities[:, 1:] = uw @ dists.T - costs
        top = utilities.max(axis=1)
        within = utilities >= (top - tie_tol)[:, None]
        # highest qualifying index = last True column
        chosen = utilities.shape[1] - 1 - np.argmax(within[:, ::-1], axis=1)
        f = np.where((chosen > 0)[:, None], dists[np.maximum(chosen - 1, 0)], 0.0)
        values[start:start + block.shape[0]] = np.einsum("ij,ij->i", f, pi[None, :] - block)
        efforts[start:start + block.shape[0]] = chosen
    return values, efforts


if numba is not None:

    @numba.njit(cache=True, parallel=True)
    def _profit_scan_nb(wages, pi, dists, costs, fam, rho, tie_tol):  # pragma: no cover - jitted
        p_total, k = wages.shape
        n = costs.shape[0]
        values = np.empty(p_total)
        efforts = np.empty(p_total, dtype=np.int64)
        for p in numba.prange(p_total):
            uw = np.empty(k)
            for j in range(k):
                wj = wages[p, j]
                uw[j] = math.log(wj) if fam == LOG_CODE else wj ** rho
            utilities = np.empty(n + 1)
            utilities[0] = 0.0
            top = 0.0
            for e in range(n):
                ue = -costs[e]
                for j in range(k):
                    ue += dists[e, j] * uw[j]
                utilities[e + 1] = ue
                if ue > top:
                    top = ue
            chosen = 0
            for e in range(n + 1):
                if utilities[e] >= top - tie_tol:
                    chosen = e
            if chosen == 0:
                values[p] = 0.0
            else:
                v = 0.0
                for j in range(k):
                    v += dists[chosen - 1, j] * (pi[j] - wages[p, j])
                values[p] = v
            efforts[p] = chosen
        return values, efforts


def profit_scan(wages, pi, dists, costs, fam: int, rho: float, tie_tol: float):
    """Best-response effort and exact expected profit for a batch of wage rows.

    ``wages`` is (P, k); returns (values (P,), efforts (P,)) where effort 0
    means the agent rejects and the profit is zero. Ties within ``tie_tol``
    go to the highest effort index, matching the scalar best_response.
    """
    wages = np.ascontiguousarray(wages, dtype=np.float64)
    pi = np.ascontiguousarray(pi, dtype=np.float64)
    dists = np.ascontiguousarray(dists, dtype=np.float64)
    costs = np.ascontiguousarray(costs, dtype=np.float64)
    rho = 0.0 if rho is None else float(rho)
    if _backend == "numba":
        return _profit_scan_nb(wages, pi, dists, costs, fam, rho, tie_tol)
    return _profit_scan_np(wages, pi, dists, costs, fam, rho, tie_tol)

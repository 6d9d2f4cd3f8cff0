"""Sender's platform/deceit best response and the strictest effective regulation.

The sender utility on B is piecewise linear in beta: increasing while the
equilibrium adopter set stays constant, with downward jumps where the set
shrinks or a user stops trusting. Because adopter sets are nested and
monotone in beta, the breakpoints are found by set-identity bisection (or in
closed form on cascade trees); the optimum is then a finite-candidate max.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .adoption import (
    batch_final_b_sets,
    cascade_final_b_sets,
    _beta_primes,
)
from .errors import InvariantViolationError
from .graph import Network, through_platform_distances
from .model import ModelParams, Platform, TIE_TOL

BISECT_WIDTH = 1e-9
GRID_FALLBACK_STEP = 1e-4


class RegulationKind(Enum):
    NO_EFFECTIVE_REGULATION = "NoEffectiveRegulation"
    ANY_REGULATION = "AnyRegulation"
    MODERATE = "Moderate"


@dataclass(frozen=True)
class SenderDecision:
    platform: Platform
    beta_star: float
    utility: float


@dataclass(frozen=True)
class RegulationResult:
    kind: RegulationKind
    rho_se: float | None
    u_star_b: float
    beta_star_b: float
    sum_p_a: float

    def rho_or(self, no_effective_value: float) -> float:
        """Numeric view: 0 for AnyRegulation, the cap substitute otherwise."""
        if self.kind is RegulationKind.NO_EFFECTIVE_REGULATION:
            return no_effective_value
        return self.rho_se if self.rho_se is not None else 0.0


def _all_a_receive(network: Network, params: ModelParams) -> np.ndarray:
    dist = through_platform_distances(
        network, np.ones((network.n_users, 1), dtype=bool)
    )[:, 0]
    with np.errstate(over="ignore"):
        return np.where(dist >= 0, params.p ** np.maximum(dist, 0), 0.0)


def utility_on_A(network: Network, params: ModelParams, beta: float) -> float:
    """Sender utility when it stays on A and all users stay with it.

    Sums receive probabilities over users whose individual trust threshold
    admits beta; homogeneous users reduce to (mu + (1-mu)beta) * sum_i p_iA.
    """
    p_a = _all_a_receive(network, params)
    bp = _beta_primes(network, params)
    mask = beta <= bp + TIE_TOL
    return (params.mu + (1.0 - params.mu) * beta) * float(p_a[mask].sum())


def _utility_at(
    params: ModelParams, beta: float, on_b: np.ndarray, dist: np.ndarray, bp: np.ndarray
) -> float:
    with np.errstate(over="ignore"):
        p_recv = np.where(dist >= 0, params.p ** np.maximum(dist, 0), 0.0)
    mask = on_b & (beta <= bp + TIE_TOL)
    return (params.mu + (1.0 - params.mu) * beta) * float(p_recv[mask].sum())


class _SetCache:
    """Equilibrium adopter sets keyed by beta, evaluated in batches."""

    def __init__(self, network: Network, params: ModelParams):
        self.network = network
        self.params = params
        self.use_cascade = network.is_cascade_tree
        self._data: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def ensure(self, betas) -> None:
        new = sorted({float(b) for b in betas} - self._data.keys())
        if not new:
            return
        arr = np.array(new, dtype=np.float64)
        if self.use_cascade:
            on_b, dist = cascade_final_b_sets(self.network, self.params, arr)
        else:
            on_b, dist, _, _ = batch_final_b_sets(self.network, self.params, arr)
        for k, b in enumerate(new):
            self._data[b] = (on_b[:, k], dist[:, k])

    def set_key(self, beta: float) -> bytes:
        return self._data[beta][0].tobytes()

    def at(self, beta: float) -> tuple[np.ndarray, np.ndarray]:
        return self._data[beta]

    def betas(self) -> list[float]:
        return sorted(self._data)


def _candidate_betas(cache: _SetCache, bp: np.ndarray) -> list[float]:
    """Candidate deceit levels for the sender's optimum on B.

    Exact candidates are 0, every distinct trust threshold, and (on cascade
    trees) every distinct wave threshold; on general networks the remaining
    adopter-set breakpoints are bracketed to width BISECT_WIDTH by bisection,
    refining only intervals whose endpoint sets differ. Within a constant-set
    piece the utility increases with beta, so the right end of each piece
    dominates it and ties adopt at equality.
    """
    beta_max = float(bp.max())
    base = {0.0, beta_max}
    base.update(float(x) for x in np.unique(bp))
    if cache.use_cascade:
        from .adoption import cascade_thresholds

        _, m = cascade_thresholds(cache.network, cache.params)
        base.update(float(x) for x in np.unique(m) if 0.0 <= x <= beta_max)
        cache.ensure(base)
        return cache.betas()

    points = sorted(base)
    cache.ensure(points)
    intervals = [
        (lo, hi)
        for lo, hi in zip(points, points[1:])
        if cache.set_key(lo) != cache.set_key(hi) and hi - lo > BISECT_WIDTH
    ]
    while intervals:
        mids = [(lo + hi) / 2.0 for lo, hi in intervals]
        cache.ensure(mids)
        refined = []
        for (lo, hi), mid in zip(intervals, mids):
            k_lo, k_mid, k_hi = cache.set_key(lo), cache.set_key(mid), cache.set_key(hi)
            if k_mid != k_lo and mid - lo > BISECT_WIDTH:
                refined.append((lo, mid))
            if k_mid != k_hi and hi - mid > BISECT_WIDTH:
                refined.append((mid, hi))
        intervals = refined
    return cache.betas()


def optimal_B(
    network: Network, params: ModelParams, grid_fallback: bool = False
) -> SenderDecision:
    """Sender's best deceit level and utility on the unregulated platform B.

    grid_fallback replaces the breakpoint search with a dense beta grid
    (step GRID_FALLBACK_STEP) for cross-checking.
    """
    bp = _beta_primes(network, params)
    cache = _SetCache(network, params)
    if grid_fallback:
        beta_max = float(bp.max())
        grid = np.arange(0.0, beta_max + GRID_FALLBACK_STEP, GRID_FALLBACK_STEP)
        grid = np.clip(grid, 0.0, beta_max)
        cache.ensure(list(grid) + [float(x) for x in np.unique(bp)])
        candidates = cache.betas()
    else:
        candidates = _candidate_betas(cache, bp)
    best_beta, best_u = 0.0, -1.0
    for b in candidates:
        on_b, dist = cache.at(b)
        u = _utility_at(params, b, on_b, dist, bp)
        if u > best_u + TIE_TOL:
            best_beta, best_u = b, u
    if best_u <= 0.0:
        best_beta, best_u = 0.0, max(best_u, 0.0)
    return SenderDecision(Platform.B, best_beta, best_u)


def strictest_effective_regulation(
    network: Network, params: ModelParams, grid_fallback: bool = False
) -> RegulationResult:
    """Classify regulation on platform A against the sender's outside option.

    NoEffectiveRegulation: even the unregulated optimum on A cannot beat the
    best the sender gets on B. AnyRegulation: the truthful cap beta=0 already
    retains the sender (boundary equality included, so a computed cap of
    exactly 0 lands here). Moderate: the smallest cap rho with
    U_A(rho) >= U*_B, which for homogeneous users is
    (U*_B / sum_i p_iA - mu) / (1 - mu).
    """
    p_a = _all_a_receive(network, params)
    bp = _beta_primes(network, params)
    sum_p_a = float(p_a.sum())
    decision = optimal_B(network, params, grid_fallback=grid_fallback)
    u_star_b = decision.utility

    weight = lambda b: params.mu + (1.0 - params.mu) * b
    kinks = [float(x) for x in np.unique(bp)]
    tier_sum = {k: float(p_a[k <= bp + TIE_TOL].sum()) for k in kinks}
    u_a_unregulated = max(weight(k) * tier_sum[k] for k in kinks)
    u_a0 = params.mu * sum_p_a

    if u_a_unregulated <= u_star_b + TIE_TOL:
        return RegulationResult(
            RegulationKind.NO_EFFECTIVE_REGULATION, None, u_star_b,
            decision.beta_star, sum_p_a,
        )
    if u_a0 >= u_star_b - TIE_TOL:
        return RegulationResult(
            RegulationKind.ANY_REGULATION, 0.0, u_star_b, decision.beta_star, sum_p_a
        )
    # moderate: walk trust tiers upward; within a tier the utility is linear
    prev = 0.0
    for k in kinks:
        t = tier_sum[k]
        if t > 0.0:
            rho = (u_star_b / t - params.mu) / (1.0 - params.mu)
            if rho <= k + TIE_TOL:
                rho = min(max(rho, 0.0), k)
                return RegulationResult(
                    RegulationKind.MODERATE, rho, u_star_b, decision.beta_star, sum_p_a
                )
        prev = k
    raise InvariantViolationError(
        "moderate regulation requested but no trust tier reaches U*_B"
    )


def sender_equilibrium(network: Network, params: ModelParams) -> SenderDecision:
    """Full game outcome under the cap params.rho_a: the sender stays on A
    whenever its best admissible utility there at least ties platform B."""
    bp = _beta_primes(network, params)
    p_a = _all_a_receive(network, params)
    cap = params.rho_a
    candidates = sorted({cap} | {float(x) for x in np.unique(bp) if x <= cap + TIE_TOL})
    best_beta_a, best_u_a = 0.0, -1.0
    for b in candidates:
        u = (params.mu + (1.0 - params.mu) * b) * float(p_a[b <= bp + TIE_TOL].sum())
        if u > best_u_a + TIE_TOL:
            best_beta_a, best_u_a = b, u
    decision_b = optimal_B(network, params)
    if best_u_a >= decision_b.utility - TIE_TOL:
        return SenderDecision(Platform.A, best_beta_a, best_u_a)
    return decision_b

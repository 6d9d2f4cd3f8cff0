"""Synchronous best-response adoption from the all-in-A state.

The engine is vectorized over a batch of deceit levels: platform search in
the regulation module evaluates many beta values against the same network,
and every column of the batch is an independent run of the exact same
synchronous update. A scalar wrapper provides the public trace-carrying
operation.

On connected acyclic networks with a single sender link the process is a
root-to-leaf wave (each user decides exactly once, when its parent has just
switched), so adopter sets have a closed form; cascade_thresholds exposes it
as a fast path that the regulation module uses for those networks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError, InvariantViolationError
from .graph import Network, UNREACHED, receive_probs, through_platform_distances, validate_profiles
from .model import ModelParams, Platform, TIE_TOL

ITERATION_CAP_SLACK = 1  # cap = n_users + 1, loud failure beyond it


@dataclass(eq=False)
class Assignment:
    """Per-user platform choices (boolean: True = platform B) plus the
    sender's platform."""

    on_b: np.ndarray
    sender_platform: Platform

    def __post_init__(self):
        self.on_b = np.asarray(self.on_b, dtype=bool)

    @classmethod
    def all_a(cls, n_users: int, sender_platform: Platform) -> "Assignment":
        return cls(np.zeros(n_users, dtype=bool), sender_platform)

    @classmethod
    def from_platforms(cls, platforms, sender_platform: Platform) -> "Assignment":
        on_b = np.array([p is Platform.B or p == "B" for p in platforms], dtype=bool)
        return cls(on_b, sender_platform)

    def platform_of(self, user: int) -> Platform:
        return Platform.B if self.on_b[user] else Platform.A

    def platforms(self) -> list[Platform]:
        return [Platform.B if x else Platform.A for x in self.on_b]

    @property
    def n_users(self) -> int:
        return self.on_b.size


@dataclass(eq=False)
class EquilibriumOutcome:
    assignment: Assignment
    p_recv: np.ndarray
    iterations: int
    trace: list[frozenset]
    converged: bool


def _beta_primes(network: Network, params: ModelParams) -> np.ndarray:
    validate_profiles(network, params)
    c = network.c_values
    return params.mu * (1.0 - c) / ((1.0 - params.mu) * c)


def _news_gain(params: ModelParams, c: np.ndarray, betas: np.ndarray) -> np.ndarray:
    # expected estimation gain per unit receive probability, trusting branch
    return params.mu * (1.0 - c[:, None]) - (1.0 - params.mu) * betas[None, :] * c[:, None]


def batch_final_b_sets(
    network: Network,
    params: ModelParams,
    betas: np.ndarray,
    collect_trace: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[list[frozenset]]]:
    """Run the synchronous adoption (sender on B) for a batch of beta values.

    Returns (on_b, dist, productive_rounds, traces): membership and distance
    matrices of shape (n_users, len(betas)), per-column productive round
    counts, and per-column switch-set traces when requested.

    Raises InvariantViolationError if any column exceeds n_users + 1 rounds
    or a user ever prefers flipping B back to A beyond tolerance; either
    would falsify the one-way migration property this process relies on.
    """
    betas = np.asarray(betas, dtype=np.float64)
    n = network.n_users
    n_cols = betas.size
    bp = _beta_primes(network, params)
    c = network.c_values
    trusting = betas[None, :] <= bp[:, None] + TIE_TOL
    gain = _news_gain(params, c, betas)
    deg = network.degrees.astype(np.float64)[:, None]
    adj_f = network.adjacency_f

    on_b = np.zeros((n, n_cols), dtype=bool)
    traces: list[list[frozenset]] = [[] for _ in range(n_cols)] if collect_trace else []
    rounds = np.zeros(n_cols, dtype=np.int64)

    total_rounds = 0
    while True:
        dist = through_platform_distances(network, on_b)
        with np.errstate(over="ignore"):
            p_recv = np.where(dist >= 0, params.p ** np.maximum(dist, 0), 0.0)
        psi_gain = np.where(trusting, p_recv * gain, 0.0)
        n_b = adj_f @ on_b
        # V_B - V_A; the A side earns the no-signal payoff, which cancels
        # against the trusting-branch base term of Psi_B
        diff = n_b * params.b_b - (deg - n_b) * params.b_a + psi_gain
        if (on_b & (diff < -TIE_TOL)).any():
            raise InvariantViolationError("a user on B strictly prefers A; one-way migration violated")
        # exact ties go to the sender's platform, but only for users with an
        # attachment there (direct link or a friend already on it): a user
        # indifferent between two platforms it has no connection to stays put
        attached = network.sender_mask[:, None] | (n_b >= 0.5)
        switch = (~on_b) & ((diff > TIE_TOL) | ((np.abs(diff) <= TIE_TOL) & attached))
        if not switch.any():
            break
        total_rounds += 1
        if total_rounds > n + ITERATION_CAP_SLACK:
            raise InvariantViolationError(
                f"adoption exceeded the {n + ITERATION_CAP_SLACK}-round cap"
            )
        cols = switch.any(axis=0)
        rounds[cols] += 1
        if collect_trace:
            for j in np.nonzero(cols)[0]:
                traces[j].append(frozenset(np.nonzero(switch[:, j])[0].tolist()))
        on_b |= switch
    return on_b, dist, rounds, traces


def run_adoption(
    network: Network, params: ModelParams, beta: float, sender_platform: Platform
) -> EquilibriumOutcome:
    """Public scalar adoption run from the all-in-A initial state.

    With the sender on A the initial state is already the equilibrium. The
    trace is 0-indexed: on acyclic networks the users switching at trace
    position t sit exactly t edges from the sender.
    """
    if not 0.0 <= beta <= 1.0:
        raise InvalidParamsError(f"beta must lie in [0, 1], got {beta}")
    n = network.n_users
    if sender_platform is Platform.A:
        assignment = Assignment.all_a(n, Platform.A)
        return EquilibriumOutcome(
            assignment=assignment,
            p_recv=receive_probs(network, params, assignment),
            iterations=0,
            trace=[],
            converged=True,
        )
    on_b, dist, rounds, traces = batch_final_b_sets(
        network, params, np.array([beta]), collect_trace=True
    )
    assignment = Assignment(on_b[:, 0], Platform.B)
    with np.errstate(over="ignore"):
        p_recv = np.where(dist[:, 0] >= 0, params.p ** np.maximum(dist[:, 0], 0), 0.0)
    p_recv[~assignment.on_b] = 0.0
    return EquilibriumOutcome(
        assignment=assignment,
        p_recv=p_recv,
        iterations=int(rounds[0]),
        trace=traces[0],
        converged=True,
    )


def platform_values(
    network: Network, params: ModelParams, beta: float, assignment: Assignment
) -> tuple[np.ndarray, np.ndarray]:
    """Per-user utilities (V_A, V_B) under an assignment.

    For users on the sender's platform the sender-side value uses their
    actual receive probability; for everyone else it uses the hypothetical
    probability they would get by moving alone. Off-sender values carry no
    signal payoff beyond the default guess.
    """
    bp = _beta_primes(network, params)
    c = network.c_values
    on_side = assignment.on_b if assignment.sender_platform is Platform.B else ~assignment.on_b
    dist = through_platform_distances(network, on_side[:, None])[:, 0]
    with np.errstate(over="ignore"):
        p_eff = np.where(dist >= 0, params.p ** np.maximum(dist, 0), 0.0)
    base = (1.0 - params.mu) * c
    gain = np.where(
        beta <= bp + TIE_TOL,
        p_eff * (params.mu * (1.0 - c) - (1.0 - params.mu) * beta * c),
        0.0,
    )
    n_b = network.adjacency_f @ assignment.on_b.astype(np.float64)
    n_a = network.degrees - n_b
    v_a = n_a * params.b_a + base
    v_b = n_b * params.b_b + base
    if assignment.sender_platform is Platform.B:
        v_b = v_b + gain
    else:
        v_a = v_a + gain
    return v_a, v_b


def best_response(
    network: Network, params: ModelParams, beta: float, assignment: Assignment, user: int
) -> Platform:
    """Single-user best response.

    Exact ties go to the sender's platform when the user has an attachment
    there (a direct sender link or at least one friend on it); a user with
    no connection to either option of a zero-value tie keeps its platform.
    """
    v_a, v_b = platform_values(network, params, beta, assignment)
    d = v_b[user] - v_a[user]
    if abs(d) <= TIE_TOL:
        side = assignment.sender_platform
        on_side = assignment.on_b if side is Platform.B else ~assignment.on_b
        attached = bool(network.sender_mask[user]) or bool(
            (network.adjacency[user] & on_side).any()
        )
        return side if attached else assignment.platform_of(user)
    return Platform.B if d > 0 else Platform.A


def nash_check(
    network: Network, params: ModelParams, beta: float, assignment: Assignment
) -> list[int]:
    """Users whose unilateral platform switch strictly improves their utility
    beyond tolerance. Empty list == the assignment is an equilibrium."""
    v_a, v_b = platform_values(network, params, beta, assignment)
    gain = np.where(assignment.on_b, v_a - v_b, v_b - v_a)
    return np.nonzero(gain > TIE_TOL)[0].tolist()


def cascade_thresholds(
    network: Network, params: ModelParams
) -> tuple[np.ndarray, np.ndarray]:
    """Exact per-user adoption thresholds on a cascade tree.

    Returns (depth, m) where m[u] is the largest beta at which user u ends up
    on B when the sender sits on B: the wave reaches u iff beta <= m[u]. m is
    the running minimum, along the path from the root, of each user's own
    switch threshold evaluated at its decision round (parent just switched,
    children still on A).
    """
    if not network.is_cascade_tree:
        raise InvariantViolationError("cascade thresholds need a connected acyclic single-link network")
    bp = _beta_primes(network, params)
    c = network.c_values
    root = network.sender_links[0]
    depth = through_platform_distances(
        network, np.ones((network.n_users, 1), dtype=bool)
    )[:, 0].astype(np.int64)

    deg = network.degrees
    gap = (deg - 1) * params.b_a - params.b_b
    gap[root] = deg[root] * params.b_a
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        thr = (
            params.mu * (1.0 - c) - gap / params.p ** depth.astype(np.float64)
        ) / ((1.0 - params.mu) * c)
    thr = np.where(gap <= TIE_TOL, np.inf, thr)

    # propagate the prefix minimum outward from the root
    order = np.argsort(depth, kind="stable")
    m = thr.copy()
    adjacency = network.adjacency
    for u in order:
        if u == root:
            continue
        parents = np.nonzero(adjacency[u] & (depth == depth[u] - 1))[0]
        m[u] = min(m[u], m[parents[0]])
    return depth, m


def cascade_final_b_sets(
    network: Network, params: ModelParams, betas: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form counterpart of batch_final_b_sets for cascade trees."""
    depth, m = cascade_thresholds(network, params)
    betas = np.asarray(betas, dtype=np.float64)
    on_b = m[:, None] >= betas[None, :]
    dist = np.where(on_b, depth[:, None], UNREACHED).astype(np.int32)
    return on_b, dist

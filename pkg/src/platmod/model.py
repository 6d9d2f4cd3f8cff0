"""Scalar parameters and closed-form payoff/utility formulas.

All randomness of the signaling interaction (world state, signal, user
estimates) is marginalized analytically; the functions below return
expectations. A Monte-Carlo oracle for the underlying game lives in the
test suite only.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import ContractViolationError, InvalidParamsError

# Absolute tolerance for tie detection in utility comparisons. Thresholds
# like F(K) are exact rationals in tests but floats in sweeps.
TIE_TOL = 1e-12


class Platform(Enum):
    A = "A"
    B = "B"

    def other(self) -> "Platform":
        return Platform.B if self is Platform.A else Platform.A


@dataclass(frozen=True)
class ModelParams:
    """World and platform parameters.

    mu     -- prior probability of the surprising world state (0 < mu < 1/2)
    p      -- information diffusiveness per edge (0 < p < 1)
    b_a    -- social-interaction quality per friend on platform A (>= 0)
    b_b    -- social-interaction quality per friend on platform B (>= 0)
    rho_a  -- deceit cap enforced by platform A, in [0, 1]
    rho_b  -- fixed at 1: the alternative platform never regulates
    """

    mu: float
    p: float
    b_a: float
    b_b: float
    rho_a: float = 1.0
    rho_b: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.mu < 0.5:
            raise InvalidParamsError(f"mu must lie in (0, 1/2), got {self.mu}")
        if not 0.0 < self.p < 1.0:
            raise InvalidParamsError(f"p must lie in (0, 1), got {self.p}")
        if self.b_a < 0.0 or self.b_b < 0.0:
            raise InvalidParamsError("platform qualities b_a, b_b must be >= 0")
        if not 0.0 <= self.rho_a <= 1.0:
            raise InvalidParamsError(f"rho_a must lie in [0, 1], got {self.rho_a}")
        if self.rho_b != 1.0:
            raise InvalidParamsError("rho_b is fixed at 1")


@dataclass(frozen=True)
class UserProfile:
    """Per-user payoff for guessing the unsurprising state, plus a community label.

    The domain constraint mu < c < 1/2 couples c to ModelParams.mu and is
    checked by validate_profiles() whenever a network meets concrete params.
    """

    c: float
    community: int = 0

    def __post_init__(self):
        if not 0.0 < self.c < 0.5:
            raise InvalidParamsError(f"c must lie in (0, 1/2), got {self.c}")
        if self.community < 0:
            raise InvalidParamsError("community label must be >= 0")


def trust_threshold(mu: float, c: float) -> float:
    """Largest deceit level at which a signal is still worth acting on.

    Equals mu*(1-c) / ((1-mu)*c) and lies in (0, 1) on the valid domain
    mu < c < 1/2.
    """
    if not 0.0 < mu < c < 0.5:
        raise InvalidParamsError(f"need 0 < mu < c < 1/2, got mu={mu}, c={c}")
    return mu * (1.0 - c) / ((1.0 - mu) * c)


def trusts(beta: float, beta_prime: float) -> bool:
    """Tie at beta == beta_prime counts as trusting (closed upper interval)."""
    return beta <= beta_prime + TIE_TOL


def news_payoff(mu: float, c: float, beta: float, p_recv: float) -> float:
    """Expected payoff from estimating the world state.

    A user who may receive the signal (probability p_recv) and trusts it
    (beta at or below their trust threshold) follows it; otherwise they keep
    the default guess and earn (1-mu)*c regardless of p_recv.
    """
    if not 0.0 <= beta <= 1.0:
        raise InvalidParamsError(f"beta must lie in [0, 1], got {beta}")
    if not 0.0 <= p_recv <= 1.0:
        raise InvalidParamsError(f"p_recv must lie in [0, 1], got {p_recv}")
    if trusts(beta, trust_threshold(mu, c)):
        return mu * p_recv * (1.0 - c) + (1.0 - mu) * (1.0 - beta * p_recv) * c
    return (1.0 - mu) * c


def social_payoff(n_friends: int, b: float) -> float:
    """n_friends * b: linear in the same-platform friend count."""
    if n_friends < 0:
        raise InvalidParamsError("friend count must be >= 0")
    return n_friends * b


def user_utility(
    profile: UserProfile,
    params: ModelParams,
    beta: float,
    platform: Platform,
    sender_platform: Platform,
    n_friends_on_platform: int,
    p_recv: float,
) -> float:
    """Total utility on a platform: social payoff plus news payoff.

    Callers must pass p_recv = 0 whenever platform differs from the sender's;
    a nonzero value there is a contract violation, not a parameter error.
    """
    if platform is not sender_platform and p_recv != 0.0:
        raise ContractViolationError(
            "p_recv must be 0 off the sender's platform "
            f"(platform={platform.value}, sender={sender_platform.value}, p_recv={p_recv})"
        )
    b = params.b_a if platform is Platform.A else params.b_b
    return social_payoff(n_friends_on_platform, b) + news_payoff(
        params.mu, profile.c, beta, p_recv
    )


def sender_utility(
    mu: float, beta: float, receivers: Iterable[tuple[float, float]]
) -> float:
    """Expected number of persuaded users.

    receivers holds (p_recv, beta_prime) pairs; only users whose individual
    threshold admits beta contribute. With homogeneous thresholds this is the
    all-or-nothing payoff of the basic game.
    """
    if not 0.0 <= beta <= 1.0:
        raise InvalidParamsError(f"beta must lie in [0, 1], got {beta}")
    weight = mu + (1.0 - mu) * beta
    return weight * sum(p for p, bp in receivers if trusts(beta, bp))

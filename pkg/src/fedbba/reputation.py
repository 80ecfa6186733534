"""Per-client reputation from action history and gradient stability.

Each round a client's base score blends its historical fraction of benign
placements with a stability transform of the variance of its recent update
norms; the round's reward or penalty is then applied multiplicatively and
the result capped. A short probation keeps new clients from being wiped out
by early false positives: while it lasts, a suspicious flag freezes the
score at its initial value instead of penalizing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig, InvalidInput


@dataclass(frozen=True)
class ReputationParams:
    alpha: float = 0.5  # weight of the historical-behavior component
    beta: float = 0.5  # weight of the gradient-stability component
    gamma: float = 0.05  # reward factor
    delta: float = 0.5  # penalty factor
    window: int = 5  # gradient-norm history length
    initial: float = 0.5
    r_max: float = 1.0
    probation_rounds: int = 2

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or abs(self.alpha + self.beta - 1.0) > 1e-9:
            raise InvalidConfig("ReputationParams: need alpha, beta >= 0 with sum 1")
        if self.gamma < 0:
            raise InvalidConfig("ReputationParams: gamma must be >= 0")
        if not 0.0 <= self.delta <= 1.0:
            raise InvalidConfig("ReputationParams: delta must be in [0, 1]")
        if self.window < 1:
            raise InvalidConfig("ReputationParams: window must be >= 1")
        if not 0.0 <= self.initial <= self.r_max:
            raise InvalidConfig("ReputationParams: initial outside [0, r_max]")
        if self.probation_rounds < 0:
            raise InvalidConfig("ReputationParams: probation_rounds must be >= 0")


@dataclass
class ClientReputation:
    """Mutable per-client record, owned by the round loop."""

    reputation: float
    correct_actions: int = 0
    total_actions: int = 0
    participations: int = 0
    grad_norms: deque = field(default_factory=deque)


class ReputationState:
    """Reputation book for a fixed population of clients."""

    def __init__(self, n_clients: int, params: ReputationParams):
        self.params = params
        self.clients = {
            i: ClientReputation(reputation=params.initial) for i in range(n_clients)
        }

    def reputations(self) -> np.ndarray:
        return np.array(
            [self.clients[i].reputation for i in sorted(self.clients)], dtype=float
        )

    def record_round(self, client_id: int, flagged: bool, grad_norm: float) -> float:
        """Fold one round's observation into the client's score.

        The base score is recomputed from accumulated history, then the
        round's reward (benign placement) or penalty (suspicious placement)
        is applied. Returns the new reputation.
        """
        c = self.clients[client_id]
        p = self.params
        c.participations += 1
        c.total_actions += 1
        if not flagged:
            c.correct_actions += 1
        c.grad_norms.append(float(grad_norm))
        while len(c.grad_norms) > p.window:
            c.grad_norms.popleft()

        base = reputation_score(
            historical_score(c.correct_actions, c.total_actions),
            gradient_variation(list(c.grad_norms)),
            p,
        )
        if flagged:
            if c.participations <= p.probation_rounds:
                c.reputation = p.initial  # probation: no penalty yet
            else:
                c.reputation = penalize(base, p)
        else:
            c.reputation = reward(base, p)
        return c.reputation


def historical_score(correct: int, total: int) -> float:
    """Fraction of benign placements; 0.5 when nothing is known yet."""
    if correct < 0 or total < 0 or correct > total:
        raise InvalidInput("historical_score: need 0 <= correct <= total")
    if total == 0:
        return 0.5
    return correct / total


def gradient_variation(window) -> float:
    """Population variance of the recorded update norms."""
    w = np.asarray(window, dtype=float)
    if w.size == 0:
        raise InvalidInput("gradient_variation: empty window")
    return float(np.mean((w - w.mean()) ** 2))


def reputation_score(h: float, g: float, params: ReputationParams) -> float:
    """Blend history with stability: alpha*H + beta/(1+G), capped.

    Raw variance added positively would reward erratic clients, so the
    stability term inverts it; zero variance maps to a full stability score.
    """
    if not 0.0 <= h <= 1.0:
        raise InvalidInput("reputation_score: H must be in [0, 1]")
    if g < 0.0:
        raise InvalidInput("reputation_score: G must be >= 0")
    score = params.alpha * h + params.beta * (1.0 / (1.0 + g))
    return float(min(max(score, 0.0), params.r_max))


def reward(r: float, params: ReputationParams) -> float:
    """Multiplicative boost, capped at r_max."""
    if not 0.0 <= r <= params.r_max:
        raise InvalidInput("reward: reputation outside [0, r_max]")
    return min(r + params.gamma * r, params.r_max)


def penalize(r: float, params: ReputationParams) -> float:
    """Multiplicative cut."""
    if not 0.0 <= r <= params.r_max:
        raise InvalidInput("penalize: reputation outside [0, r_max]")
    return r - params.delta * r

"""Minimax interaction between the aggregation server and the attackers.

The server picks a defense sensitivity lambda inside a closed interval; each
compromised client picks a poisoning ratio in [0, 1]. Client weights fall
linearly in lambda * rho, the joint objective is the poisoning mass that
survives weighting, and the game is zero-sum. Closed forms exist for both
best responses under the separable surrogate; `verify_saddle` certifies the
saddle inequalities numerically on a grid instead of relying on the theory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CriterionViolated, DegenerateWeights, InvalidConfig, InvalidInput


@dataclass(frozen=True)
class GameParams:
    theta: float = 0.5  # similarity baseline
    lambda_min: float = 0.75
    lambda_max: float = 1.0
    r_max: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.lambda_min <= self.lambda_max:
            raise InvalidConfig("GameParams: need 0 < lambda_min <= lambda_max")
        if self.theta > 1.0:
            raise InvalidConfig("GameParams: theta must be <= 1")


@dataclass
class GameState:
    """One round's strategic snapshot over the participating clients."""

    reputations: np.ndarray
    rho: np.ndarray  # 0 for benign clients
    lam: float
    compromised: tuple[int, ...]

    def __post_init__(self):
        self.reputations = np.asarray(self.reputations, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        if self.reputations.shape != self.rho.shape:
            raise InvalidInput("GameState: reputations and rho misaligned")
        if np.any(self.rho < 0) or np.any(self.rho > 1):
            raise InvalidInput("GameState: rho outside [0, 1]")


def similarity_score(rho_i: float, lam: float, theta: float) -> float:
    """Linear anomaly model: theta - lambda * rho."""
    if not 0.0 <= rho_i <= 1.0:
        raise InvalidInput("similarity_score: rho outside [0, 1]")
    return theta - lam * rho_i


def aggregation_weights(reputations, rho, lam: float, theta: float) -> np.ndarray:
    """Normalized weights max(R_i + theta - lambda*rho_i, 0) / sum.

    Negative numerators can occur away from equilibrium, so they are floored
    at zero before normalizing. Raises DegenerateWeights when every numerator
    floors out (callers fall back to uniform weighting).
    """
    R = np.asarray(reputations, dtype=float)
    p = np.asarray(rho, dtype=float)
    if R.shape != p.shape:
        raise InvalidInput("aggregation_weights: length mismatch")
    raw = np.maximum(R + theta - lam * p, 0.0)
    total = float(raw.sum())
    if total <= 0.0:
        raise DegenerateWeights("aggregation_weights: all numerators floored to zero")
    return raw / total


def joint_objective(state: GameState, theta: float) -> float:
    """Poisoning mass surviving aggregation: sum over compromised of w_i*rho_i.

    The server's utility is the negation; the attacker's utility is the value
    itself (zero-sum).
    """
    w = aggregation_weights(state.reputations, state.rho, state.lam, theta)
    idx = list(state.compromised)
    return float(np.sum(w[idx] * state.rho[idx])) if idx else 0.0


def best_response_rho(r_i: float, theta: float, lam: float) -> float:
    """Attacker's constrained optimum min{(R + theta) / (2 lambda), 1}."""
    if lam <= 0:
        raise InvalidInput("best_response_rho: lambda must be > 0")
    return min((r_i + theta) / (2.0 * lam), 1.0)


def optimal_lambda(params: GameParams) -> float:
    """Server's optimum: the upper end of the sensitivity interval.

    Raises CriterionViolated when even lambda_max cannot deter full
    poisoning, i.e. lambda_max < (r_max + theta) / 2.
    """
    bound = (params.r_max + params.theta) / 2.0
    if params.lambda_max < bound:
        raise CriterionViolated(
            f"lambda_max={params.lambda_max} below deterrence bound {bound}"
        )
    return params.lambda_max


@dataclass
class SaddleCertificate:
    """Grid certification of the surrogate saddle inequalities."""

    passed: bool
    lambda_star: float
    rho_star: tuple[float, ...]
    worst_adversary_violation: float
    worst_server_violation: float
    max_argmax_gap: float
    criterion_satisfied: bool
    tolerance: float
    grid_step: float
    n_lambda_points: int
    n_rho_points: int

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "lambda_star": self.lambda_star,
            "rho_star": list(self.rho_star),
            "worst_adversary_violation": self.worst_adversary_violation,
            "worst_server_violation": self.worst_server_violation,
            "max_argmax_gap": self.max_argmax_gap,
            "criterion_satisfied": self.criterion_satisfied,
            "tolerance": self.tolerance,
            "grid_step": self.grid_step,
            "n_lambda_points": self.n_lambda_points,
            "n_rho_points": self.n_rho_points,
        }


def surrogate_objective(reputations, rho, lam: float, theta: float) -> float:
    """Separable surrogate: sum_i [(R_i + theta) rho_i - lambda rho_i^2] / C.

    C is the fixed normalizer sum_j (R_j + theta) over all clients, which
    stands in for the weight denominator and keeps the game separable.
    """
    R = np.asarray(reputations, dtype=float)
    p = np.asarray(rho, dtype=float)
    C = float(np.sum(R + theta))
    if C <= 0:
        raise InvalidInput("surrogate_objective: nonpositive normalizer")
    return float(np.sum((R + theta) * p - lam * p * p) / C)


def verify_saddle(
    params: GameParams,
    reputations,
    grid_step: float,
    compromised: tuple[int, ...] | None = None,
    tolerance: float = 1e-9,
) -> SaddleCertificate:
    """Check the saddle inequalities of the surrogate game on a grid.

    With lambda* = lambda_max and rho* the per-client closed-form best
    response, certifies that no grid deviation helps either player:
    J(lambda*, rho) <= J(lambda*, rho*) <= J(lambda, rho*). Separability
    makes the adversary check per-client, so the grid stays linear in size.
    Never raises on certification failure; the report carries the verdict.
    """
    if grid_step <= 0:
        raise InvalidInput("verify_saddle: grid_step must be > 0")
    R_all = np.asarray(reputations, dtype=float)
    idx = tuple(range(R_all.size)) if compromised is None else tuple(compromised)
    lam_star = params.lambda_max
    criterion_ok = params.lambda_max >= (params.r_max + params.theta) / 2.0
    C = float(np.sum(R_all + params.theta))

    rho_grid = np.arange(0.0, 1.0 + grid_step / 2, grid_step)
    rho_grid = np.clip(rho_grid, 0.0, 1.0)
    n_lam = max(int(round((params.lambda_max - params.lambda_min) / grid_step)) + 1, 2)
    lam_grid = np.linspace(params.lambda_min, params.lambda_max, n_lam)

    rho_star = np.zeros(R_all.size)
    worst_adv = 0.0
    max_gap = 0.0
    for i in idx:
        coef = R_all[i] + params.theta
        rho_star[i] = best_response_rho(R_all[i], params.theta, lam_star)
        star_val = (coef * rho_star[i] - lam_star * rho_star[i] ** 2) / C
        grid_vals = (coef * rho_grid - lam_star * rho_grid**2) / C
        worst_adv = max(worst_adv, float(grid_vals.max() - star_val))
        max_gap = max(
            max_gap, abs(float(rho_grid[int(np.argmax(grid_vals))]) - rho_star[i])
        )

    if not idx:
        rho_star_sel = ()
        worst_server = 0.0
    else:
        rho_star_sel = tuple(float(rho_star[i]) for i in idx)
        star_total = surrogate_objective(R_all, rho_star, lam_star, params.theta)
        server_vals = np.array(
            [
                surrogate_objective(R_all, rho_star, lam, params.theta)
                for lam in lam_grid
            ]
        )
        worst_server = float(star_total - server_vals.min())

    passed = worst_adv <= tolerance and worst_server <= tolerance
    return SaddleCertificate(
        passed=passed,
        lambda_star=lam_star,
        rho_star=rho_star_sel,
        worst_adversary_violation=worst_adv,
        worst_server_violation=worst_server,
        max_argmax_gap=max_gap,
        criterion_satisfied=criterion_ok,
        tolerance=tolerance,
        grid_step=grid_step,
        n_lambda_points=int(n_lam),
        n_rho_points=int(rho_grid.size),
    )

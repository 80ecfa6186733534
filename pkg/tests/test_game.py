import numpy as np
import pytest

from fedbba.errors import CriterionViolated, DegenerateWeights, InvalidConfig, InvalidInput
from fedbba.game import (
    GameParams,
    GameState,
    aggregation_weights,
    best_response_rho,
    joint_objective,
    optimal_lambda,
    similarity_score,
    surrogate_objective,
    verify_saddle,
)
from fedbba.numerics import RngStream


# ------------------------------------------------------------------ similarity

def test_similarity_score_values():
    assert similarity_score(0.0, 1.0, 0.5) == pytest.approx(0.5)
    assert similarity_score(0.5, 1.0, 0.5) == pytest.approx(0.0)
    assert similarity_score(1.0, 1.0, 0.5) == pytest.approx(-0.5)


# --------------------------------------------------------------------- weights

def test_weights_symmetric_case():
    w = aggregation_weights([0.5, 0.5], [0.0, 0.0], 1.0, 0.5)
    np.testing.assert_allclose(w, [0.5, 0.5])


def test_weights_hand_evaluated():
    w = aggregation_weights([0.5, 0.5], [0.0, 0.5], 1.0, 0.5)
    np.testing.assert_allclose(w, [2.0 / 3.0, 1.0 / 3.0])


def test_weights_sum_to_one():
    rng = RngStream(1).gen
    for _ in range(25):
        n = int(rng.integers(2, 12))
        R = rng.uniform(0, 1, n)
        rho = rng.uniform(0, 1, n)
        lam = float(rng.uniform(0.1, 2.0))
        try:
            w = aggregation_weights(R, rho, lam, 0.5)
        except DegenerateWeights:
            continue
        assert abs(w.sum() - 1.0) <= 1e-9
        assert np.all(w >= 0.0)


def test_weights_monotone_in_rho():
    R = np.array([0.5, 0.5, 0.5])
    lam, theta = 1.0, 0.5
    prev = aggregation_weights(R, [0.2, 0.0, 0.0], lam, theta)[0]
    for rho0 in (0.4, 0.6, 0.8):
        cur = aggregation_weights(R, [rho0, 0.0, 0.0], lam, theta)[0]
        assert cur < prev
        prev = cur


def test_weights_degenerate():
    with pytest.raises(DegenerateWeights):
        aggregation_weights([0.0, 0.0], [1.0, 1.0], 2.0, 0.5)


# ------------------------------------------------------------- joint objective

def test_joint_objective_no_poisoning():
    state = GameState([0.5, 0.5], [0.0, 0.0], 1.0, compromised=(0,))
    assert joint_objective(state, 0.5) == pytest.approx(0.0)


def test_joint_objective_hand_evaluated():
    state = GameState([0.5, 0.5], [0.5, 0.0], 1.0, compromised=(0,))
    assert joint_objective(state, 0.5) == pytest.approx(1.0 / 6.0)


def test_joint_objective_grid_argmax_matches_best_response():
    # brute force over the actual (non-surrogate) objective, one attacker in
    # a desk-sized cohort; with enough clients the weight denominator is
    # nearly constant and the closed form lands on the grid argmax
    n = 20
    R = np.full(n, 0.5)
    lam, theta = 1.0, 0.5
    grid = np.round(np.arange(0.0, 1.0001, 0.01), 10)
    vals = []
    for r in grid:
        rho = np.zeros(n)
        rho[0] = r
        vals.append(joint_objective(GameState(R, rho, lam, (0,)), theta))
    rho_hat = float(grid[int(np.argmax(vals))])
    assert abs(rho_hat - best_response_rho(0.5, theta, lam)) <= 0.01 + 1e-12


def test_surrogate_grid_argmax_matches_best_response():
    theta = 0.5
    grid = np.arange(0.0, 1.0001, 0.01)
    for r_i, lam in [(0.5, 1.0), (1.0, 1.0), (0.2, 0.8), (0.9, 2.0)]:
        R = np.array([r_i])
        vals = [surrogate_objective(R, [r], lam, theta) for r in grid]
        rho_hat = float(grid[int(np.argmax(vals))])
        assert abs(rho_hat - best_response_rho(r_i, theta, lam)) <= 0.01


def test_zero_sum_payoffs():
    state = GameState([0.5, 0.7], [0.3, 0.0], 1.0, compromised=(0,))
    j = joint_objective(state, 0.5)
    assert -j + j == 0.0


# --------------------------------------------------------------- best response

def test_best_response_values():
    assert best_response_rho(1.0, 1.0, 1.0) == pytest.approx(1.0)
    assert best_response_rho(0.5, 0.5, 1.0) == pytest.approx(0.5)
    with pytest.raises(InvalidInput):
        best_response_rho(0.5, 0.5, 0.0)


def test_surrogate_concavity_second_differences():
    grid = np.arange(0.0, 1.0001, 0.01)
    vals = np.array([surrogate_objective([0.7], [r], 1.0, 0.5) for r in grid])
    second = vals[2:] - 2 * vals[1:-1] + vals[:-2]
    assert np.all(second <= 1e-12)


# -------------------------------------------------------------- optimal lambda

def test_optimal_lambda_is_upper_bound():
    assert optimal_lambda(GameParams(theta=0.5, lambda_max=1.0, r_max=1.0)) == 1.0


def test_optimal_lambda_criterion_violated():
    with pytest.raises(CriterionViolated):
        optimal_lambda(GameParams(theta=1.0, lambda_min=0.5, lambda_max=0.9, r_max=1.0))


def test_deterrence_bound():
    params = GameParams(theta=0.5, lambda_max=1.0, r_max=1.0)
    lam = optimal_lambda(params)
    bound = (params.r_max + params.theta) / (2 * lam)
    assert bound <= 1.0
    for r in np.linspace(0.0, params.r_max, 11):
        assert best_response_rho(float(r), params.theta, lam) <= bound + 1e-12


# ---------------------------------------------------------------- verify_saddle

def test_saddle_certified_single_client():
    params = GameParams(theta=0.5, lambda_min=0.75, lambda_max=1.0)
    report = verify_saddle(params, [0.5], grid_step=0.01)
    assert report.passed
    assert report.criterion_satisfied
    assert report.lambda_star == pytest.approx(1.0)
    assert report.rho_star[0] == pytest.approx(0.5)
    assert report.max_argmax_gap <= 0.01


def test_saddle_certified_mixed_population():
    params = GameParams()
    R = [0.9, 0.3, 0.5, 0.7]
    report = verify_saddle(params, R, grid_step=0.01, compromised=(1, 3))
    assert report.passed
    assert len(report.rho_star) == 2


def test_saddle_trivial_without_attackers():
    report = verify_saddle(GameParams(), [0.5, 0.5], grid_step=0.05, compromised=())
    assert report.passed
    assert report.rho_star == ()


def test_saddle_report_serializable():
    report = verify_saddle(GameParams(), [0.5], grid_step=0.05)
    d = report.to_dict()
    assert d["passed"] is True
    assert isinstance(d["rho_star"], list)


def test_game_state_validation():
    with pytest.raises(InvalidInput):
        GameState([0.5], [1.5], 1.0, compromised=(0,))
    with pytest.raises(InvalidConfig):
        GameParams(lambda_min=0.0)

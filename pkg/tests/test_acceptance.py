"""Acceptance suite: one test per criterion, each printing a verdict line.

Desk configuration throughout: 60 clients, 20 per round, 40 rounds, 30%
malicious, multi-round injection at a fixed 0.5 poisoning ratio unless a
criterion says otherwise. Experiment results are cached per (defense,
family, seed) because several criteria share runs.
"""

import json
import time

import numpy as np
import pytest

from fedbba.attacks import AttackFamily, build_partial_trigger_testset
from fedbba.cli import main
from fedbba.datamodel import generate_dataset, loss_and_grad, init_params, MlpShape
from fedbba.datamodel import HIDDEN_UNITS
from fedbba.engine import Defense, attack_success_rate, make_config, run_experiment
from fedbba.game import GameParams, best_response_rho, verify_saddle
from fedbba.numerics import RngStream, kurtosis
from fedbba.reputation import (
    ReputationParams,
    gradient_variation,
    historical_score,
    penalize,
    reputation_score,
    reward,
)

SEEDS = (7, 8, 9)
_CACHE = {}


def desk_run(defense, family, seed):
    """Cached desk-scale experiment."""
    key = (defense, family, seed)
    if key not in _CACHE:
        kwargs = {}
        if family is None:
            kwargs = dict(family=None, malicious_fraction=0.0)
        else:
            kwargs = dict(family=family)
        t0 = time.monotonic()
        result = run_experiment(make_config(defense=defense, seed=seed, **kwargs))
        _CACHE[key] = (result, time.monotonic() - t0)
    return _CACHE[key]


def verdict(name, ok, detail):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------- A1

def test_a1_undefended_vulnerability():
    worst_asr, worst_time = 1.0, 0.0
    for seed in SEEDS:
        result, elapsed = desk_run(Defense.VANILLA, AttackFamily.ONE_TO_ONE, seed)
        asr30 = result.reports[29].attack_success_rate
        worst_asr = min(worst_asr, asr30)
        worst_time = max(worst_time, elapsed)
    verdict(
        "A1",
        worst_asr >= 0.90 and worst_time <= 120.0,
        f"vanilla one-to-one asr@30 >= 0.90 on {len(SEEDS)} seeds "
        f"(worst {worst_asr:.3f}), slowest run {worst_time:.1f}s <= 120s",
    )


# ---------------------------------------------------------------------- A2

def test_a2_fedbba_suppression():
    worst_asr, worst_gap = 0.0, 0.0
    for seed in SEEDS:
        defended, _ = desk_run(Defense.FEDBBA, AttackFamily.ONE_TO_ONE, seed)
        baseline, _ = desk_run(Defense.VANILLA, None, seed)
        asr = defended.summary["asr_last5_mean"]
        gap = abs(
            baseline.summary["accuracy_last5_mean"]
            - defended.summary["accuracy_last5_mean"]
        )
        worst_asr = max(worst_asr, asr)
        worst_gap = max(worst_gap, gap)
    verdict(
        "A2",
        worst_asr <= 0.15 and worst_gap <= 0.03,
        f"fedbba final-5 asr <= 0.15 (worst {worst_asr:.3f}) and accuracy within "
        f"3 points of the no-attack baseline (worst gap {worst_gap:.3f})",
    )


# ---------------------------------------------------------------------- A3

def test_a3_attack_family_coverage():
    failures = []
    control_detail = ""
    for family in (AttackFamily.ONE_TO_N, AttackFamily.N_TO_ONE):
        for seed in SEEDS:
            vanilla, _ = desk_run(Defense.VANILLA, family, seed)
            defended, _ = desk_run(Defense.FEDBBA, family, seed)
            baseline, _ = desk_run(Defense.VANILLA, None, seed)
            if vanilla.reports[29].attack_success_rate < 0.90:
                failures.append(f"{family.value}/{seed}: vanilla asr@30")
            if defended.summary["asr_last5_mean"] > 0.15:
                failures.append(f"{family.value}/{seed}: fedbba asr")
            gap = abs(
                baseline.summary["accuracy_last5_mean"]
                - defended.summary["accuracy_last5_mean"]
            )
            if gap > 0.03:
                failures.append(f"{family.value}/{seed}: accuracy gap {gap:.3f}")

    # negative control: all-but-one trigger must stay at chance on the
    # defended model (chance = 1/K for the 10-class desk set)
    defended, _ = desk_run(Defense.FEDBBA, AttackFamily.N_TO_ONE, SEEDS[0])
    cfg = make_config(defense=Defense.FEDBBA, family=AttackFamily.N_TO_ONE, seed=SEEDS[0])
    control = build_partial_trigger_testset(defended.state.test_set, cfg.attack)
    asr_control = attack_success_rate(defended.final_model, control)
    chance = 1.0 / cfg.dataset.n_classes
    if abs(asr_control - chance) > 0.1:
        failures.append(f"negative control asr {asr_control:.3f}")
    control_detail = f", control asr {asr_control:.3f} within 0.1 of {chance:.1f}"
    verdict(
        "A3",
        not failures,
        "one-to-n and n-to-one repeat A1+A2 on all seeds" + control_detail
        if not failures
        else "; ".join(failures),
    )


# ---------------------------------------------------------------------- A4

def test_a4_separation_experiment(tmp_path):
    worst_mkpp, worst_margin = 1.0, 1.0
    for seed in (1, 2, 3):
        out = tmp_path / f"sep{seed}"
        code = main(["separation", "--seed", str(seed), "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        s_mk = summary["silhouette_mkpp"]
        s_pc = summary["silhouette_pca"]
        worst_mkpp = min(worst_mkpp, s_mk)
        worst_margin = min(worst_margin, s_mk - s_pc)
    verdict(
        "A4",
        worst_mkpp >= 0.5 and worst_margin > 0.0,
        f"pursuit silhouette >= 0.5 (worst {worst_mkpp:.3f}) and strictly above "
        f"PCA on 3 seeds (worst margin {worst_margin:+.3f})",
    )


# ---------------------------------------------------------------------- A5

def test_a5_equilibrium_certification(tmp_path):
    t0 = time.monotonic()
    out = tmp_path / "cert"
    code = main(["certify", "--out", str(out)])
    payload = json.loads((out / "certificate.json").read_text())
    grid_ok = (
        code == 0
        and payload["passed"]
        and payload["worst_adversary_violation"] <= 1e-9
        and payload["worst_server_violation"] <= 1e-9
    )

    rng = RngStream(2024).gen
    closed_form_ok = True
    worst_gap = 0.0
    grid = np.round(np.arange(0.0, 1.0001, 0.01), 10)
    for _ in range(20):
        r_i = float(rng.uniform(0.0, 1.0))
        theta = float(rng.uniform(0.0, 1.0))
        lam = float(rng.uniform((r_i + theta) / 2.0, (r_i + theta) / 2.0 + 1.0))
        lam = max(lam, 1e-6)
        values = (r_i + theta) * grid - lam * grid**2
        rho_grid = float(grid[int(np.argmax(values))])
        gap = abs(rho_grid - best_response_rho(r_i, theta, lam))
        worst_gap = max(worst_gap, gap)
        closed_form_ok = closed_form_ok and gap <= 0.01
    elapsed = time.monotonic() - t0
    verdict(
        "A5",
        grid_ok and closed_form_ok and elapsed <= 10.0,
        f"saddle grid inequalities within 1e-9, closed-form best response within "
        f"0.01 of grid argmax on 20 triples (worst {worst_gap:.4f}), "
        f"runtime {elapsed:.1f}s <= 10s",
    )


# ---------------------------------------------------------------------- A6

def test_a6_formula_unit_suite():
    checks = []

    # kurtosis examples
    checks.append(abs(kurtosis([-1.0, 1.0, -1.0, 1.0]) - 1.0) < 1e-12)
    checks.append(abs(kurtosis([0.0, 0.0, 0.0, 1.0]) - 7.0 / 3.0) < 1e-12)
    checks.append(2.8 <= kurtosis(RngStream(41).gen.standard_normal(10000)) <= 3.2)

    # reputation examples
    P = ReputationParams()
    checks.append(historical_score(3, 4) == 0.75)
    checks.append(historical_score(0, 0) == 0.5)
    checks.append(gradient_variation([0.0, 2.0]) == 1.0)
    checks.append(abs(reputation_score(0.75, 0.0, P) - 0.875) < 1e-12)
    checks.append(abs(reputation_score(1.0, 1.0, P) - 0.75) < 1e-12)
    checks.append(abs(reward(0.8, ReputationParams(gamma=0.1)) - 0.88) < 1e-12)
    checks.append(reward(0.99, ReputationParams(gamma=0.05)) == 1.0)
    checks.append(abs(penalize(0.8, P) - 0.4) < 1e-12)

    # weight vector and best responses
    from fedbba.game import GameState, aggregation_weights, joint_objective

    w = aggregation_weights([0.5, 0.5], [0.0, 0.5], 1.0, 0.5)
    checks.append(np.allclose(w, [2.0 / 3.0, 1.0 / 3.0], atol=1e-12))
    checks.append(best_response_rho(1.0, 1.0, 1.0) == 1.0)
    checks.append(best_response_rho(0.5, 0.5, 1.0) == 0.5)
    state = GameState([0.5, 0.5], [0.5, 0.0], 1.0, compromised=(0,))
    checks.append(abs(joint_objective(state, 0.5) - 1.0 / 6.0) < 1e-12)

    # grid argmax of the round objective agrees with the closed form at
    # desk cohort size, within grid resolution
    grid = np.round(np.arange(0.0, 1.0001, 0.01), 10)
    vals = []
    for r in grid:
        rho = np.zeros(20)
        rho[0] = r
        vals.append(
            joint_objective(GameState(np.full(20, 0.5), rho, 1.0, (0,)), 0.5)
        )
    rho_hat = float(grid[int(np.argmax(vals))])
    checks.append(abs(rho_hat - best_response_rho(0.5, 0.5, 1.0)) <= 0.01 + 1e-12)

    # dbscan oracle equivalence on small instances lives in the unit suite;
    # re-run a condensed version here
    from fedbba.clustering import DbscanParams, dbscan
    from tests.test_clustering import _oracle_dbscan

    oracle_ok = True
    for seed in range(12):
        rng = RngStream(9000 + seed).gen
        n = int(rng.integers(1, 13))
        pts = rng.normal(size=(n, int(rng.integers(1, 4))))
        eps = float(rng.uniform(0.2, 2.0))
        mp = int(rng.integers(1, 6))
        got = dbscan(pts, DbscanParams(eps=eps, min_pts=mp)).labels
        oracle_ok = oracle_ok and np.array_equal(got, _oracle_dbscan(pts, eps, mp))
    checks.append(oracle_ok)

    # gradient finite-difference check at 1e-4 relative
    shape = MlpShape(6, HIDDEN_UNITS, 3)
    rng = RngStream(16)
    flat = init_params(shape, rng).flat
    X = rng.gen.uniform(size=(9, 6))
    y = rng.gen.integers(0, 3, size=9)
    _, grad = loss_and_grad(flat, shape, X, y)
    fd_ok = True
    h = 1e-5
    for k in rng.gen.choice(shape.n_params, size=10, replace=False):
        plus, minus = flat.copy(), flat.copy()
        plus[k] += h
        minus[k] -= h
        fd = (
            loss_and_grad(plus, shape, X, y)[0] - loss_and_grad(minus, shape, X, y)[0]
        ) / (2 * h)
        fd_ok = fd_ok and abs(fd - grad[k]) / max(abs(fd), abs(grad[k]), 1e-8) <= 1e-4
    checks.append(fd_ok)

    verdict(
        "A6",
        all(checks),
        f"{sum(checks)}/{len(checks)} formula example groups hold at stated "
        "tolerances (full suite in the per-module tests)",
    )


# ---------------------------------------------------------------------- A7

def test_a7_sensitivity_harness(tmp_path):
    out = tmp_path / "sens"
    code = main(["sensitivity", "--seed", "3", "--out", str(out)])
    assert code == 0
    lines = (out / "sensitivity.csv").read_text().splitlines()
    rows = [line.split(",") for line in lines[1:]]
    alphas = [float(r[0]) for r in rows]
    asrs = [float(r[3]) for r in rows]
    balanced = asrs[alphas.index(0.5)]
    ok = len(rows) == 9 and balanced < max(asrs)
    verdict(
        "A7",
        ok,
        f"9-row alpha/beta grid; balanced-row asr {balanced:.3f} below column "
        f"max {max(asrs):.3f}",
    )


# ---------------------------------------------------------------------- A8

def test_a8_determinism(tmp_path):
    cfg_text = """
[experiment]
total_clients = 16
per_round = 8
rounds = 2
seed = 13
"""
    cfg_path = tmp_path / "small.toml"
    cfg_path.write_text(cfg_text)

    identical = True
    for command, extra in (
        (["run", "--config", str(cfg_path)], ("rounds.csv", "summary.json")),
        (["sensitivity", "--config", str(cfg_path)], ("sensitivity.csv",)),
        (["separation", "--config", str(cfg_path), "--seed", "2"], ("mkpp_scores.csv", "pca_scores.csv", "summary.json")),
        (["certify"], ("certificate.json",)),
    ):
        out_a = tmp_path / f"{command[0]}_a"
        out_b = tmp_path / f"{command[0]}_b"
        assert main(command + ["--out", str(out_a)]) in (0, 1)
        assert main(command + ["--out", str(out_b)]) in (0, 1)
        for name in extra:
            if (out_a / name).read_bytes() != (out_b / name).read_bytes():
                identical = False
    verdict(
        "A8",
        identical,
        "repeated run/sensitivity/separation/certify invocations produce "
        "byte-identical CSV and summary files",
    )

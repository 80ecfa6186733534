"""Round loop: selection, local training, scoring, clustering, reputation,
weighted aggregation, payoffs and metrics.

Server-side decisions (scores, clusters, reputations, weights) never see the
ground-truth malicious flags; those flags only reach reports and payoff
metrics through `_truth_flags` / the behavioral rho vector, and a test pins
that separation by corrupting them and checking the model trajectory is
unchanged.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .attacks import (
    AttackFamily,
    AttackPlan,
    InjectionStrategy,
    build_triggered_testset,
    craft_replacement_update,
    default_plan,
    poison_dataset,
)
from .clustering import (
    DbscanParams,
    dbscan,
    identify_suspicious,
    standardize_columns,
)
from .datamodel import (
    HIDDEN_UNITS,
    ImageDataset,
    MlpShape,
    ModelParams,
    TrainConfig,
    evaluate,
    generate_dataset,
    init_params,
    partition_noniid,
    predict,
    train_local,
)
from .errors import DegenerateDistribution, DegenerateWeights, InvalidConfig, InvalidInput
from .game import (
    GameParams,
    GameState,
    aggregation_weights,
    best_response_rho,
    joint_objective,
    optimal_lambda,
    verify_saddle,
)
from .mkpp import MkppConfig, mkpp, pca_scores
from .numerics import RngStream
from .reputation import ReputationParams, ReputationState

logger = logging.getLogger(__name__)

# flat stream-id layout under the master seed
_STREAM_POOL = 1
_STREAM_TEST = 2
_STREAM_PARTITION = 3
_STREAM_MALICIOUS = 4
_STREAM_INIT = 5
_STREAM_SELECT = 100_000
_STREAM_MKPP = 200_000
_STREAM_TRAIN = 1_000_000
_STREAM_POISON = 2_000_000


class Defense(enum.Enum):
    FEDBBA = "fedbba"
    VANILLA = "vanilla"
    PCA = "pca"


@dataclass(frozen=True)
class DatasetConfig:
    n_classes: int = 10
    height: int = 8
    width: int = 8
    noise_sigma: float = 0.05
    pool_per_class: int = 100
    test_per_class: int = 50
    classes_per_client: tuple[int, int] = (4, 6)
    samples_per_class: tuple[int, int] = (30, 34)

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise InvalidConfig("DatasetConfig: noise_sigma must be >= 0")
        if self.pool_per_class < 1 or self.test_per_class < 1:
            raise InvalidConfig("DatasetConfig: per-class sizes must be >= 1")


@dataclass
class ExperimentConfig:
    total_clients: int = 60
    per_round: int = 20
    malicious_fraction: float = 0.3
    rounds: int = 40
    defense: Defense = Defense.FEDBBA
    attack: AttackPlan | None = None
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    training: TrainConfig = field(default_factory=TrainConfig)
    reputation: ReputationParams = field(default_factory=ReputationParams)
    game: GameParams = field(default_factory=GameParams)
    mkpp: MkppConfig = field(default_factory=MkppConfig)
    dbscan: DbscanParams = field(default_factory=DbscanParams)
    seed: int = 0

    def __post_init__(self):
        if self.per_round < 2 or self.per_round > self.total_clients:
            raise InvalidConfig(
                f"ExperimentConfig: per_round={self.per_round} must be in "
                f"[2, total_clients={self.total_clients}]"
            )
        if not 0.0 <= self.malicious_fraction < 0.5:
            raise InvalidConfig(
                f"ExperimentConfig: malicious_fraction={self.malicious_fraction} "
                "outside [0, 0.5) (threat model caps malicious participation)"
            )
        if self.rounds < 1:
            raise InvalidConfig("ExperimentConfig: rounds must be >= 1")
        if self.mkpp.p > self.per_round - 1:
            raise InvalidConfig("ExperimentConfig: mkpp p too large for per_round")


@dataclass
class ClientRound:
    client_id: int
    is_malicious: bool
    weight: float
    reputation: float
    scores: np.ndarray
    cluster: int
    flagged: bool


@dataclass
class RoundReport:
    round_index: int
    clean_accuracy: float
    attack_success_rate: float
    clients: list[ClientRound]
    server_payoff: float
    attacker_payoff: float
    no_confidence: bool = False
    weight_fallback: bool = False


@dataclass
class ExperimentState:
    shards: list[ImageDataset]
    malicious: frozenset[int]
    test_set: ImageDataset
    triggered_test: ImageDataset | None
    reputation: ReputationState
    lambda_star: float
    replacement_round: int | None
    round_index: int = 0
    last_updates: np.ndarray | None = None
    last_selected: np.ndarray | None = None


@dataclass
class ExperimentResult:
    reports: list[RoundReport]
    summary: dict
    final_model: ModelParams
    state: ExperimentState


def aggregate(models: list[ModelParams], weights) -> ModelParams:
    """Convex combination of parameter vectors."""
    if not models:
        raise InvalidInput("aggregate: no models")
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(models),):
        raise InvalidInput("aggregate: weight count mismatch")
    if abs(w.sum() - 1.0) > 1e-9:
        raise InvalidInput(f"aggregate: weights sum to {w.sum()!r}, not 1")
    shape = models[0].shape
    for m in models[1:]:
        if m.shape != shape:
            raise InvalidInput("aggregate: mismatched model shapes")
    stack = np.stack([m.flat for m in models])
    return ModelParams(flat=w @ stack, shape=shape)


def attack_success_rate(model: ModelParams, triggered: ImageDataset) -> float:
    """Fraction of triggered samples classified as their attack target."""
    if len(triggered) == 0:
        raise InvalidInput("attack_success_rate: empty triggered set")
    return float(np.mean(predict(model, triggered.images) == triggered.labels))


def _truth_flags(state: ExperimentState, selected: np.ndarray) -> list[bool]:
    """Ground-truth malicious markers; reporting and payoff metrics only."""
    return [int(cid) in state.malicious for cid in selected]


def suspicion_ratios(scores: np.ndarray, flagged=None) -> np.ndarray:
    """Map pursuit scores to per-client suspicion in [0, 1].

    The row norms are standardized robustly (median/MAD, so the reference
    is the benign bulk rather than statistics the outliers themselves
    inflate) and clipped: the bulk sits near zero, outlying rows saturate
    toward one. Clients the clustering flagged are pinned at full
    suspicion; when nearly half the cohort is hostile their block can
    swallow the median, and the cluster verdict is the robust signal left.
    """
    norms = np.linalg.norm(scores, axis=1)
    center = float(np.median(norms))
    mad = float(np.median(np.abs(norms - center)))
    scale = 1.4826 * mad
    if scale <= 1e-12:
        sd = float(norms.std())
        if sd <= 1e-12:
            ratios = np.zeros(len(norms))
            if flagged is not None:
                ratios[np.asarray(flagged, dtype=bool)] = 1.0
            return ratios
        scale = sd
    ratios = np.clip((norms - center) / scale, 0.0, 1.0)
    if flagged is not None:
        ratios[np.asarray(flagged, dtype=bool)] = 1.0
    return ratios


def _resolve_rho(plan: AttackPlan, reputation: float, lam: float, theta: float) -> float:
    if plan.adaptive:
        return best_response_rho(reputation, theta, lam)
    return plan.rho


def _client_update(
    cfg: ExperimentConfig,
    state: ExperimentState,
    global_model: ModelParams,
    cid: int,
    round_index: int,
) -> tuple[ModelParams, float]:
    """Local behavior of one selected client. Returns (model, rho used)."""
    ds = state.shards[cid]
    train_rng = RngStream(cfg.seed, _STREAM_TRAIN + round_index * cfg.total_clients + cid)
    tcfg = cfg.training.with_rng(train_rng)
    plan = cfg.attack
    if plan is None or cid not in state.malicious:
        return train_local(global_model, ds, tcfg), 0.0

    rep = state.reputation.clients[cid].reputation
    if plan.strategy is InjectionStrategy.MULTI_ROUND:
        rho = _resolve_rho(plan, rep, state.lambda_star, cfg.game.theta)
        poisoned = poison_dataset(
            ds,
            plan,
            rho,
            RngStream(cfg.seed, _STREAM_POISON + round_index * cfg.total_clients + cid),
        )
        return train_local(global_model, poisoned, tcfg), rho

    # model replacement: behave cleanly until the strike round
    if round_index != state.replacement_round:
        return train_local(global_model, ds, tcfg), 0.0
    rho = _resolve_rho(plan, rep, state.lambda_star, cfg.game.theta)
    poisoned = poison_dataset(
        ds,
        plan,
        rho,
        RngStream(cfg.seed, _STREAM_POISON + round_index * cfg.total_clients + cid),
    )
    boost = plan.boost if plan.boost is not None else float(cfg.per_round)
    return craft_replacement_update(global_model, poisoned, tcfg, boost), rho


def _score_updates(
    cfg: ExperimentConfig, deltas: np.ndarray, round_index: int
) -> tuple[np.ndarray, bool]:
    """Projection scores for the cohort; degenerate data yields zeros."""
    try:
        if cfg.defense is Defense.FEDBBA:
            rng = RngStream(cfg.seed, _STREAM_MKPP + round_index)
            return mkpp(deltas, cfg.mkpp, rng).scores, False
        return pca_scores(deltas, cfg.mkpp.p), False
    except DegenerateDistribution:
        logger.debug("round %d: degenerate update matrix, scoring skipped", round_index)
        return np.zeros((deltas.shape[0], cfg.mkpp.p)), True


def run_round(
    global_model: ModelParams, state: ExperimentState, cfg: ExperimentConfig
) -> tuple[ModelParams, RoundReport]:
    r = state.round_index
    select_rng = RngStream(cfg.seed, _STREAM_SELECT + r)
    selected = np.sort(
        select_rng.gen.choice(cfg.total_clients, size=cfg.per_round, replace=False)
    )

    models = []
    rhos = np.zeros(cfg.per_round)
    for pos, cid in enumerate(selected):
        model_i, rho_i = _client_update(cfg, state, global_model, int(cid), r)
        models.append(model_i)
        rhos[pos] = rho_i
    deltas = np.stack([m.flat - global_model.flat for m in models])

    # server-side defense
    n = cfg.per_round
    flagged = np.zeros(n, dtype=bool)
    clusters = np.zeros(n, dtype=int)
    scores = np.zeros((n, cfg.mkpp.p))
    no_confidence = False
    fallback = False
    reputations_pre = np.array(
        [state.reputation.clients[int(cid)].reputation for cid in selected]
    )

    if cfg.defense is Defense.VANILLA:
        weights = np.full(n, 1.0 / n)
    else:
        scores, degenerate = _score_updates(cfg, deltas, r)
        if degenerate:
            no_confidence = True
        else:
            standardized = standardize_columns(scores)
            labels = dbscan(standardized, cfg.dbscan)
            clusters = labels.labels
            suspicion = identify_suspicious(labels, standardized)
            no_confidence = suspicion.no_confidence
            for pos in suspicion.suspicious:
                flagged[pos] = True
        # weights use the pre-update reputation snapshot
        rho_hat = (
            np.zeros(n) if no_confidence else suspicion_ratios(scores, flagged)
        )
        try:
            weights = aggregation_weights(
                reputations_pre, rho_hat, state.lambda_star, cfg.game.theta
            )
        except DegenerateWeights:
            weights = np.full(n, 1.0 / n)
            fallback = True
        # reputation reacts to this round's placements
        for pos, cid in enumerate(selected):
            state.reputation.record_round(
                int(cid), bool(flagged[pos]), float(np.linalg.norm(deltas[pos]))
            )

    new_global = aggregate(models, weights)

    truth = _truth_flags(state, selected)
    compromised = tuple(pos for pos, mal in enumerate(truth) if mal)
    try:
        payoff = joint_objective(
            GameState(reputations_pre, rhos, state.lambda_star, compromised),
            cfg.game.theta,
        )
    except DegenerateWeights:
        payoff = 0.0

    clean_acc = evaluate(new_global, state.test_set)
    asr = (
        attack_success_rate(new_global, state.triggered_test)
        if state.triggered_test is not None
        else 0.0
    )
    report = RoundReport(
        round_index=r,
        clean_accuracy=clean_acc,
        attack_success_rate=asr,
        clients=[
            ClientRound(
                client_id=int(cid),
                is_malicious=truth[pos],
                weight=float(weights[pos]),
                reputation=float(
                    state.reputation.clients[int(cid)].reputation
                ),
                scores=scores[pos].copy(),
                cluster=int(clusters[pos]),
                flagged=bool(flagged[pos]),
            )
            for pos, cid in enumerate(selected)
        ],
        server_payoff=-payoff,
        attacker_payoff=payoff,
        no_confidence=no_confidence,
        weight_fallback=fallback,
    )
    state.last_updates = deltas
    state.last_selected = selected
    state.round_index += 1
    return new_global, report


def setup_experiment(cfg: ExperimentConfig) -> tuple[ModelParams, ExperimentState]:
    d = cfg.dataset
    pool = generate_dataset(
        d.n_classes, d.pool_per_class, d.height, d.width, d.noise_sigma,
        RngStream(cfg.seed, _STREAM_POOL),
    )
    test_set = generate_dataset(
        d.n_classes, d.test_per_class, d.height, d.width, d.noise_sigma,
        RngStream(cfg.seed, _STREAM_TEST),
    )
    shards = partition_noniid(
        pool, cfg.total_clients, d.classes_per_client, d.samples_per_class,
        RngStream(cfg.seed, _STREAM_PARTITION),
    )
    n_mal = int(round(cfg.malicious_fraction * cfg.total_clients))
    mal_rng = RngStream(cfg.seed, _STREAM_MALICIOUS)
    malicious = frozenset(
        int(i) for i in mal_rng.gen.choice(cfg.total_clients, size=n_mal, replace=False)
    )
    triggered = build_triggered_testset(test_set, cfg.attack) if cfg.attack else None
    replacement_round = None
    if cfg.attack and cfg.attack.strategy is InjectionStrategy.MODEL_REPLACEMENT:
        replacement_round = (
            cfg.attack.replacement_round
            if cfg.attack.replacement_round is not None
            else max(cfg.rounds - 5, 0)
        )
    shape = MlpShape(d.height * d.width, HIDDEN_UNITS, d.n_classes)
    global0 = init_params(shape, RngStream(cfg.seed, _STREAM_INIT))
    state = ExperimentState(
        shards=shards,
        malicious=malicious,
        test_set=test_set,
        triggered_test=triggered,
        reputation=ReputationState(cfg.total_clients, cfg.reputation),
        lambda_star=optimal_lambda(cfg.game),
        replacement_round=replacement_round,
    )
    return global0, state


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """All rounds end to end; fully deterministic given the master seed."""
    model, state = setup_experiment(cfg)
    reports: list[RoundReport] = []
    for _ in range(cfg.rounds):
        model, report = run_round(model, state, cfg)
        reports.append(report)
        logger.debug(
            "round %d: acc=%.3f asr=%.3f flagged=%d",
            report.round_index,
            report.clean_accuracy,
            report.attack_success_rate,
            sum(c.flagged for c in report.clients),
        )

    tail = reports[-5:]
    final_reps = state.reputation.reputations()
    cert = verify_saddle(
        cfg.game,
        final_reps,
        grid_step=0.01,
        compromised=tuple(sorted(state.malicious)),
    )
    summary = {
        "defense": cfg.defense.value,
        "seed": cfg.seed,
        "rounds": cfg.rounds,
        "final_accuracy": reports[-1].clean_accuracy,
        "final_asr": reports[-1].attack_success_rate,
        "accuracy_last5_mean": float(np.mean([t.clean_accuracy for t in tail])),
        "asr_last5_mean": float(np.mean([t.attack_success_rate for t in tail])),
        "final_server_payoff": reports[-1].server_payoff,
        "final_attacker_payoff": reports[-1].attacker_payoff,
        "saddle_certificate": cert.to_dict(),
        "final_reputations": [float(v) for v in final_reps],
        "malicious_clients": sorted(state.malicious),
    }
    return ExperimentResult(
        reports=reports, summary=summary, final_model=model, state=state
    )


def make_config(
    defense: Defense = Defense.FEDBBA,
    family: AttackFamily | None = AttackFamily.ONE_TO_ONE,
    strategy: InjectionStrategy = InjectionStrategy.MULTI_ROUND,
    rho: float | None = 0.5,
    seed: int = 0,
    **overrides,
) -> ExperimentConfig:
    """Desk-scale configuration with the stock attack layout."""
    ds = overrides.pop("dataset", DatasetConfig())
    attack = (
        default_plan(family, ds.width, ds.height, strategy=strategy, rho=rho)
        if family is not None
        else None
    )
    return ExperimentConfig(
        defense=defense, attack=attack, dataset=ds, seed=seed, **overrides
    )

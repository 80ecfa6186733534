"""Desk-scale federated learning lab: backdoor attacks and the FedBBA defense.

The defense stacks kurtosis projection pursuit over client updates, density
clustering of the scores, a capped reputation system, and minimax-derived
aggregation weights. Attacks cover one-to-one, one-to-N and N-to-one
triggers injected over multiple rounds or by boosted model replacement.
"""

__version__ = "0.1.0"

from .attacks import (
    AttackFamily,
    AttackPlan,
    InjectionStrategy,
    TriggerSpec,
    apply_trigger,
    build_partial_trigger_testset,
    build_triggered_testset,
    craft_replacement_update,
    default_plan,
    poison_dataset,
    row_trigger,
)
from .clustering import (
    ClusterLabels,
    DbscanParams,
    SuspicionResult,
    dbscan,
    identify_suspicious,
    silhouette,
    standardize_columns,
)
from .datamodel import (
    ImageDataset,
    MlpShape,
    ModelParams,
    TrainConfig,
    evaluate,
    generate_dataset,
    init_params,
    partition_noniid,
    train_local,
)
from .engine import (
    DatasetConfig,
    Defense,
    ExperimentConfig,
    ExperimentResult,
    RoundReport,
    aggregate,
    attack_success_rate,
    make_config,
    run_experiment,
    run_round,
    setup_experiment,
)
from .errors import (
    CriterionViolated,
    DegenerateDistribution,
    DegenerateWeights,
    FedbbaError,
    InvalidConfig,
    InvalidInput,
)
from .game import (
    GameParams,
    GameState,
    SaddleCertificate,
    aggregation_weights,
    best_response_rho,
    joint_objective,
    optimal_lambda,
    similarity_score,
    verify_saddle,
)
from .mkpp import MkppConfig, MkppResult, SearchDirection, StepVariant, mkpp, pca_scores
from .numerics import RngStream, SvdResult, kurtosis, mean_center, svd
from .reputation import (
    ReputationParams,
    ReputationState,
    gradient_variation,
    historical_score,
    penalize,
    reputation_score,
    reward,
)

"""fdsim: a deterministic simulator for distillation-based federated
learning with synchronized soft-label caching, sharpened aggregation,
and exact communication accounting."""

from .aggregation import (
    AggregationPolicy,
    aggregate,
    log_ratio_enhanced_era,
    log_ratio_era,
    majorization_holds,
    power_sharpen,
    temperature_sharpen,
)
from .cache import (
    CacheProtocolError,
    CacheSignal,
    CatchUpPackage,
    GlobalCache,
    LocalCache,
    ProtocolDesyncError,
    RoundUpdatePackage,
    StaleCacheError,
    apply_catch_up,
    assemble_round_batch,
    build_catch_up,
    build_round_package,
    compute_request_list,
    update_global_cache,
    update_local_cache,
)
from .cache_sim import HitSimConfig, simulate_hit_ratio
from .comm import EncodingModel, RoundCost, cost_downlink, cost_uplink, cumulative
from .config import ConfigError, dump_config, load_config, parse_config
from .data import (
    LabeledPool,
    PartitionSpec,
    SyntheticTaskSpec,
    generate_task,
    partition_dirichlet,
    split_validation,
)
from .learner import (
    LinearSoftmaxModel,
    TrainConfig,
    distill,
    loss_and_gradient,
    predict_soft_labels,
    train_local,
)
from .orchestrator import (
    DSFL,
    INDIVIDUAL,
    SCARLET,
    ExperimentConfig,
    RoundMetrics,
    evaluate,
    initialize_state,
    run_experiment,
    run_round,
    schedule_participants,
)
from .soft_labels import SoftLabelBatch, entropy, mean_soft_labels

__version__ = "0.1.0"

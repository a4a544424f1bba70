"""Round-loop driver for the caching protocol (SCARLET), the
full-retransmission baseline (DSFL), and isolated local training
(INDIVIDUAL), with per-round metric collection and byte accounting.

Per round the server samples a public subset and a request list,
broadcasts the previous round's update (and catch-up packages for stale
clients), participating clients distill against the reconstructed
previous-round labels and then train locally, the server aggregates their
uploads, distills its own model, and refreshes the global cache. Client
reconstructions are checked bit-exactly against the server's batch every
round; a mismatch aborts the run.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .aggregation import AggregationPolicy, aggregate, power_sharpen, temperature_sharpen
from .cache import (
    CacheProtocolError,
    CatchUpPackage,
    GlobalCache,
    LocalCache,
    RoundUpdatePackage,
    apply_catch_up,
    assemble_round_batch,
    build_catch_up,
    build_round_package,
    compute_request_list,
    update_global_cache,
    update_local_cache,
)
from .cache_sim import PUBLIC_SAMPLING_STREAM
from .comm import EncodingModel, RoundCost, cost_uplink, cumulative, write_comm_csv
from .data import (
    LabeledPool,
    PartitionSpec,
    SyntheticTaskSpec,
    draw_class_proportions,
    generate_task,
    partition_by_proportions,
    split_unlabeled,
    split_validation,
)
from .learner import (
    CROSS_ENTROPY,
    KL_TO_TEACHER,
    LinearSoftmaxModel,
    TrainConfig,
    distill,
    loss_and_gradient,
    predict_soft_labels,
    train_local,
)
from .rng import derive_seed, sample_round_indices, substream
from .soft_labels import SoftLabelBatch

__all__ = [
    "SCARLET",
    "DSFL",
    "INDIVIDUAL",
    "ExperimentConfig",
    "RoundMetrics",
    "ExperimentState",
    "DesyncAbort",
    "schedule_participants",
    "initialize_state",
    "run_round",
    "evaluate",
    "run_experiment",
    "write_metrics_csv",
    "METRICS_CSV_COLUMNS",
]

SCARLET = "SCARLET"
DSFL = "DSFL"
INDIVIDUAL = "INDIVIDUAL"
METHODS = (SCARLET, DSFL, INDIVIDUAL)


@dataclass(frozen=True)
class ExperimentConfig:
    method: str = SCARLET
    rounds: int = 300
    task: SyntheticTaskSpec = field(default_factory=SyntheticTaskSpec)
    partition: PartitionSpec = field(default_factory=lambda: PartitionSpec(20, 0.05))
    train: TrainConfig = field(default_factory=TrainConfig)
    aggregation: AggregationPolicy = field(default_factory=AggregationPolicy.plain_mean)
    cache_duration: int = 50
    per_round_public: int = 200
    participation_ratio: float = 1.0
    validation_fraction: float = 0.1
    seed: int = 0
    eval_every: int = 1
    transport_only: bool = False
    encoding: EncodingModel = field(default_factory=EncodingModel)

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.rounds <= 0:
            raise ValueError("rounds must be positive")
        if self.cache_duration < 0:
            raise ValueError("cache_duration must be non-negative")
        if not 0.0 < self.participation_ratio <= 1.0:
            raise ValueError("participation_ratio must lie in (0, 1]")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must lie in [0, 1)")
        if self.per_round_public <= 0:
            raise ValueError("per_round_public must be positive")
        if self.eval_every < 0:
            raise ValueError("eval_every must be non-negative (0 disables)")


@dataclass
class RoundMetrics:
    round: int
    server_test_accuracy: float | None
    mean_client_test_accuracy: float | None
    mean_client_global_test_accuracy: float | None
    server_public_validation_loss: float | None
    mean_client_private_validation_loss: float | None
    cache_hit_ratio: float
    cost: RoundCost


class DesyncAbort(CacheProtocolError):
    """A client failed to reconstruct the server's batch; carries context."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def schedule_participants(
    num_clients: int, ratio: float, round_index: int, seed: int
) -> np.ndarray:
    """Uniformly sample ceil(ratio * K) distinct clients for one round.

    Deterministic per (seed, round); returned in ascending id order, which
    is also the order aggregation consumes uploads in.
    """
    if not 0.0 < ratio <= 1.0:
        raise ValueError("participation ratio must lie in (0, 1]")
    count = max(1, math.ceil(ratio * num_clients - 1e-9))
    gen = substream(seed, "participation", round_index)
    return np.sort(sample_round_indices(gen, num_clients, count))


@dataclass
class ExperimentState:
    cfg: ExperimentConfig
    public_train: np.ndarray
    public_val: np.ndarray
    test_pool: LabeledPool
    client_train: list[LabeledPool]
    client_val: list[LabeledPool]
    client_test_indices: list[np.ndarray]
    client_models: list[LinearSoftmaxModel]
    server_model: LinearSoftmaxModel
    global_cache: GlobalCache
    local_caches: list[LocalCache]
    shared_local_cache: LocalCache | None
    last_participated: np.ndarray
    public_gen: np.random.Generator
    prev_package: RoundUpdatePackage | None = None
    prev_indices: np.ndarray | None = None
    prev_server_batch: SoftLabelBatch | None = None
    costs: list[RoundCost] = field(default_factory=list)
    metrics: list[RoundMetrics] = field(default_factory=list)

    @property
    def num_clients(self) -> int:
        return len(self.client_models)


def initialize_state(cfg: ExperimentConfig) -> ExperimentState:
    """Round-0 setup: data generation, partitioning, splits, models, caches."""
    private, public, test = generate_task(cfg.task)
    num_clients = cfg.partition.num_clients

    proportions = draw_class_proportions(cfg.task.num_classes, cfg.partition)
    private_shards = partition_by_proportions(private.labels, proportions, cfg.partition.seed)
    test_shards = partition_by_proportions(
        test.labels, proportions, derive_seed(cfg.partition.seed, "test-partition")
    )

    client_train: list[LabeledPool] = []
    client_val: list[LabeledPool] = []
    for shard in private_shards:
        pool = private.subset(shard)
        if cfg.validation_fraction > 0.0 and len(pool) > 0:
            train, val = split_validation(pool, cfg.validation_fraction)
        else:
            train, val = pool, LabeledPool(np.empty((0, cfg.task.feature_dim)), np.empty(0, dtype=np.int64))
        client_train.append(train)
        client_val.append(val)

    if cfg.validation_fraction > 0.0:
        train_idx, val_idx = split_unlabeled(len(public), cfg.validation_fraction)
        public_train, public_val = public[train_idx], public[val_idx]
    else:
        public_train, public_val = public, public[:0]
    if cfg.per_round_public > len(public_train):
        raise ValueError(
            f"per_round_public={cfg.per_round_public} exceeds the public training "
            f"pool ({len(public_train)} samples after the validation split)"
        )

    client_models = [
        LinearSoftmaxModel.initialize(
            cfg.task.num_classes, cfg.task.feature_dim, derive_seed(cfg.seed, "client-init", k)
        )
        for k in range(num_clients)
    ]
    server_model = LinearSoftmaxModel.initialize(
        cfg.task.num_classes, cfg.task.feature_dim, derive_seed(cfg.seed, "server-init")
    )

    # With full participation every local cache evolves identically, so a
    # single shared replica is exact and much cheaper than per-client copies.
    full = cfg.participation_ratio >= 1.0
    return ExperimentState(
        cfg=cfg,
        public_train=public_train,
        public_val=public_val,
        test_pool=test,
        client_train=client_train,
        client_val=client_val,
        client_test_indices=test_shards,
        client_models=client_models,
        server_model=server_model,
        global_cache=GlobalCache(duration=cfg.cache_duration),
        local_caches=[] if full else [LocalCache() for _ in range(num_clients)],
        shared_local_cache=LocalCache() if full else None,
        last_participated=np.full(num_clients, -1, dtype=np.int64),
        public_gen=substream(cfg.seed, PUBLIC_SAMPLING_STREAM),
    )


def _client_teacher(
    state: ExperimentState, k: int, t: int, catch_up: CatchUpPackage | None
) -> SoftLabelBatch:
    """Reconstruct the previous round's batch for client k and verify it."""
    cache = state.shared_local_cache if state.shared_local_cache is not None else state.local_caches[k]
    try:
        if catch_up is not None:
            apply_catch_up(cache, catch_up)
        reconstructed = update_local_cache(cache, state.prev_package)
    except CacheProtocolError as err:
        raise DesyncAbort(
            f"round {t}, client {k}: {err}",
            _desync_diagnostics(state, t, k, str(err)),
        ) from err
    server_batch = state.prev_server_batch
    if not (
        np.array_equal(reconstructed.probs, server_batch.probs)
        and np.array_equal(reconstructed.sample_indices, server_batch.sample_indices)
    ):
        raise DesyncAbort(
            f"round {t}, client {k}: reconstructed batch differs from the server's",
            _desync_diagnostics(state, t, k, "bit-exact reconstruction check failed"),
        )
    return reconstructed


def _desync_diagnostics(state: ExperimentState, t: int, k: int, reason: str) -> dict:
    return {
        "round": t,
        "client": k,
        "reason": reason,
        "method": state.cfg.method,
        "cache_duration": state.cfg.cache_duration,
        "global_cache_entries": len(state.global_cache.entries),
        "last_participated": state.last_participated.tolist(),
        "seed": state.cfg.seed,
    }


def _uniform_batch(num_rows: int, num_classes: int, indices: np.ndarray) -> SoftLabelBatch:
    return SoftLabelBatch(np.full((num_rows, num_classes), 1.0 / num_classes), indices)


def run_round(
    state: ExperimentState, t: int, executor: ThreadPoolExecutor | None = None
) -> RoundMetrics:
    """Execute communication round ``t`` (1-based) and record its metrics."""
    cfg = state.cfg
    n_classes = cfg.task.num_classes
    enc = cfg.encoding

    participants = schedule_participants(
        state.num_clients, cfg.participation_ratio, t, cfg.seed
    )

    if cfg.method == INDIVIDUAL:
        _run_individual_round(state, t, participants, executor)
        cost = RoundCost(round=t)
        state.costs.append(cost)
        metrics = _collect_metrics(state, t, cost)
        state.metrics.append(metrics)
        return metrics

    caching = cfg.method == SCARLET
    round_indices = sample_round_indices(
        state.public_gen, len(state.public_train), cfg.per_round_public
    )
    if caching:
        requested = compute_request_list(state.global_cache, round_indices, t)
    else:
        requested = round_indices

    # Downlink for round t carries the previous round's update package.
    prev_fresh = len(state.prev_package.fresh_labels) if (caching and state.prev_package) else 0
    prev_signals = len(state.prev_package.signals) if (caching and state.prev_package) else 0
    prev_count = len(state.prev_indices) if state.prev_indices is not None else 0

    catch_ups: dict[int, CatchUpPackage] = {}
    if caching and t > 1:
        for k in participants:
            if state.last_participated[k] < t - 1:
                catch_ups[int(k)] = build_catch_up(
                    state.global_cache, int(state.last_participated[k]), t
                )

    if cfg.transport_only:
        fresh_agg = _transport_only_uploads(state, t, requested, round_indices, caching)
    else:
        uploads = _run_client_phase(
            state, t, participants, requested, round_indices, catch_ups, executor
        )
        fresh_agg = aggregate(uploads, cfg.aggregation)

    if caching:
        assembled = assemble_round_batch(state.global_cache, fresh_agg, round_indices, t)
    else:
        assembled = fresh_agg

    if not cfg.transport_only:
        state.server_model = distill(
            state.server_model,
            state.public_train[assembled.sample_indices],
            assembled,
            cfg.train,
            gen=substream(cfg.seed, "server-distill", t),
        )

    if caching:
        signals = update_global_cache(state.global_cache, assembled, t)
        state.prev_package = build_round_package(assembled, signals)
    state.prev_indices = round_indices
    state.prev_server_batch = assembled
    state.last_participated[participants] = t

    # Same expression as the standalone simulator so the traces match bit-for-bit.
    hit_ratio = (len(round_indices) - len(requested)) / len(round_indices) if caching else 0.0
    num_participants = len(participants)
    if caching:
        cost = RoundCost(
            round=t,
            uplink_softlabel_bytes=num_participants * len(requested) * n_classes * enc.bytes_per_prob,
            uplink_index_bytes=num_participants * len(requested) * enc.bytes_per_index,
            downlink_softlabel_bytes=num_participants * prev_fresh * n_classes * enc.bytes_per_prob,
            downlink_index_bytes=num_participants
            * (len(requested) + prev_fresh)
            * enc.bytes_per_index,
            downlink_signal_bytes=num_participants * prev_signals * enc.bytes_per_signal,
            downlink_catchup_bytes=sum(len(p.backfill) for p in catch_ups.values())
            * enc.label_bytes(n_classes),
            cache_hit_ratio=hit_ratio,
        )
    else:
        # Baseline: labels ride index-free in the order of the index list
        # broadcast the round before.
        cost = RoundCost(
            round=t,
            uplink_softlabel_bytes=num_participants * len(requested) * n_classes * enc.bytes_per_prob,
            uplink_index_bytes=num_participants * len(requested) * enc.bytes_per_index,
            downlink_softlabel_bytes=num_participants * prev_count * n_classes * enc.bytes_per_prob,
            downlink_index_bytes=num_participants * len(round_indices) * enc.bytes_per_index,
            cache_hit_ratio=0.0,
        )
    assert cost.uplink_bytes == cost_uplink(num_participants, len(requested), n_classes, enc)
    state.costs.append(cost)

    metrics = _collect_metrics(state, t, cost)
    state.metrics.append(metrics)
    return metrics


def _transport_only_uploads(
    state: ExperimentState,
    t: int,
    requested: np.ndarray,
    round_indices: np.ndarray,
    caching: bool,
) -> SoftLabelBatch:
    """Synthesize the aggregation result for transport-only accounting runs.

    Byte accounting depends only on message counts, never on label values,
    so a single uniform upload stands in for every client. Cache state is
    still advanced exactly as in a learning run.
    """
    cfg = state.cfg
    if caching and state.shared_local_cache is not None and state.prev_package is not None:
        # Keep the replica client in lockstep so protocol checks stay active.
        _client_teacher(state, 0, t, None)
    target = requested if caching else round_indices
    return aggregate(
        [_uniform_batch(len(target), cfg.task.num_classes, target)], cfg.aggregation
    )


def _run_individual_round(
    state: ExperimentState,
    t: int,
    participants: np.ndarray,
    executor: ThreadPoolExecutor | None,
) -> None:
    cfg = state.cfg

    def step(k: int) -> tuple[int, LinearSoftmaxModel]:
        model = state.client_models[k]
        train = state.client_train[k]
        if len(train) > 0:
            model = train_local(
                model, train.features, train.labels, cfg.train,
                gen=substream(cfg.seed, "client-train", t, k),
            )
        return k, model

    for k, model in _map_clients(step, participants, executor):
        state.client_models[k] = model


def _run_client_phase(
    state: ExperimentState,
    t: int,
    participants: np.ndarray,
    requested: np.ndarray,
    round_indices: np.ndarray,
    catch_ups: dict[int, CatchUpPackage],
    executor: ThreadPoolExecutor | None,
) -> list[SoftLabelBatch]:
    """Distill, train, and predict for every participant; uploads in id order."""
    cfg = state.cfg
    caching = cfg.method == SCARLET
    upload_indices = requested if caching else round_indices

    shared_teacher: SoftLabelBatch | None = None
    if t > 1:
        if not caching:
            shared_teacher = state.prev_server_batch
        elif state.shared_local_cache is not None:
            shared_teacher = _client_teacher(state, int(participants[0]), t, None)

    def step(k: int) -> tuple[int, LinearSoftmaxModel, SoftLabelBatch]:
        model = state.client_models[k]
        if t > 1:
            teacher = shared_teacher
            if teacher is None:
                teacher = _client_teacher(state, k, t, catch_ups.get(k))
            model = distill(
                model,
                state.public_train[state.prev_indices],
                teacher,
                cfg.train,
                gen=substream(cfg.seed, "client-distill", t, k),
            )
        train = state.client_train[k]
        if len(train) > 0:
            model = train_local(
                model, train.features, train.labels, cfg.train,
                gen=substream(cfg.seed, "client-train", t, k),
            )
        upload = predict_soft_labels(model, state.public_train[upload_indices], upload_indices)
        return k, model, upload

    uploads: list[SoftLabelBatch] = []
    for k, model, upload in _map_clients(step, participants, executor):
        state.client_models[k] = model
        uploads.append(upload)
    return uploads


def _map_clients(step, participants: np.ndarray, executor: ThreadPoolExecutor | None):
    """Run per-client work, serially or on a thread pool, yielding results
    in ascending client-id order either way."""
    ids = [int(k) for k in participants]
    if executor is None or len(ids) <= 1:
        return [step(k) for k in ids]
    results = list(executor.map(step, ids))
    return sorted(results, key=lambda item: item[0])


def _stacked_client_predictions(
    models: list[LinearSoftmaxModel], features: np.ndarray
) -> np.ndarray:
    """(K, M, N) logits for all client models on one feature batch."""
    weights = np.stack([m.weights for m in models])
    biases = np.stack([m.bias for m in models])
    return np.einsum("md,knd->kmn", features, weights) + biases[:, None, :]


def evaluate(state: ExperimentState) -> dict:
    """Accuracy and validation-loss metrics for the current models.

    Server accuracy uses the full test pool; client accuracy is averaged
    over each client's Dirichlet-matched test shard (and, separately, over
    the full pool). Validation losses follow the held-out splits: clients
    report cross-entropy on private validation data, the server reports
    KL against the aggregated client labels on the public validation
    split. Monitoring traffic is not billed to the ledger.
    """
    cfg = state.cfg
    test = state.test_pool
    server_pred = predict_soft_labels(state.server_model, test.features).probs.argmax(axis=1)
    server_acc = float((server_pred == test.labels).mean())

    client_logits = _stacked_client_predictions(state.client_models, test.features)
    client_pred = client_logits.argmax(axis=2)
    global_accs = (client_pred == test.labels[None, :]).mean(axis=1)
    shard_accs = [
        float((client_pred[k, idx] == test.labels[idx]).mean())
        for k, idx in enumerate(state.client_test_indices)
        if len(idx) > 0
    ]

    val_losses = []
    for k, val in enumerate(state.client_val):
        if len(val) > 0:
            loss, _ = loss_and_gradient(
                state.client_models[k], val.features, val.labels, CROSS_ENTROPY
            )
            val_losses.append(loss)

    server_val_loss = None
    if cfg.method != INDIVIDUAL and len(state.public_val) > 0:
        logits = _stacked_client_predictions(state.client_models, state.public_val)
        shifted = logits - logits.max(axis=2, keepdims=True)
        probs = np.exp(shifted)
        probs /= probs.sum(axis=2, keepdims=True)
        averaged = probs.mean(axis=0)
        if cfg.aggregation.kind == "era":
            teacher = temperature_sharpen(averaged, cfg.aggregation.temperature)
        elif cfg.aggregation.kind == "enhanced_era":
            teacher = power_sharpen(averaged, cfg.aggregation.beta)
        else:
            teacher = averaged
        server_val_loss, _ = loss_and_gradient(
            state.server_model, state.public_val, teacher, KL_TO_TEACHER
        )

    return {
        "server_test_accuracy": server_acc,
        "mean_client_test_accuracy": float(np.mean(shard_accs)) if shard_accs else None,
        "mean_client_global_test_accuracy": float(global_accs.mean()),
        "server_public_validation_loss": server_val_loss,
        "mean_client_private_validation_loss": float(np.mean(val_losses)) if val_losses else None,
    }


def _collect_metrics(state: ExperimentState, t: int, cost: RoundCost) -> RoundMetrics:
    cfg = state.cfg
    due = cfg.eval_every > 0 and (t % cfg.eval_every == 0 or t == cfg.rounds)
    if due and not cfg.transport_only:
        fields_ = evaluate(state)
    else:
        fields_ = dict.fromkeys(
            (
                "server_test_accuracy",
                "mean_client_test_accuracy",
                "mean_client_global_test_accuracy",
                "server_public_validation_loss",
                "mean_client_private_validation_loss",
            )
        )
    return RoundMetrics(round=t, cache_hit_ratio=cost.cache_hit_ratio, cost=cost, **fields_)


METRICS_CSV_COLUMNS = [
    "round",
    "server_test_accuracy",
    "mean_client_test_accuracy",
    "mean_client_global_test_accuracy",
    "server_public_validation_loss",
    "mean_client_private_validation_loss",
    "cache_hit_ratio",
    "uplink_bytes",
    "downlink_bytes",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_metrics_csv(path: str, metrics: list[RoundMetrics]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_CSV_COLUMNS)
        for m in metrics:
            writer.writerow(
                [
                    m.round,
                    _fmt(m.server_test_accuracy),
                    _fmt(m.mean_client_test_accuracy),
                    _fmt(m.mean_client_global_test_accuracy),
                    _fmt(m.server_public_validation_loss),
                    _fmt(m.mean_client_private_validation_loss),
                    _fmt(float(m.cache_hit_ratio)),
                    m.cost.uplink_bytes,
                    m.cost.downlink_bytes,
                ]
            )


def _resolve_workers(max_workers: int | None) -> int:
    if max_workers is None:
        env = os.environ.get("FDSIM_THREADS", "")
        max_workers = int(env) if env.strip() else 0
    if max_workers == 0:
        # Auto: per-client work on the linear learner is far too small to
        # amortize thread handoffs, so auto means serial; set FDSIM_THREADS
        # explicitly to force a pool.
        return 1
    return max(1, max_workers)


def run_experiment(
    cfg: ExperimentConfig, out_dir: str | None = None, max_workers: int | None = None
) -> ExperimentState:
    """Run a full experiment; optionally write metrics.csv, comm.csv, and
    summary.txt into ``out_dir``. Returns the final state."""
    workers = _resolve_workers(max_workers)
    state = initialize_state(cfg)
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for t in range(1, cfg.rounds + 1):
            run_round(state, t, executor=executor)
    finally:
        if executor is not None:
            executor.shutdown()
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_metrics_csv(os.path.join(out_dir, "metrics.csv"), state.metrics)
        write_comm_csv(os.path.join(out_dir, "comm.csv"), state.costs)
        with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
            fh.write(summarize(state))
    return state


def final_evaluated(state: ExperimentState) -> RoundMetrics | None:
    for m in reversed(state.metrics):
        if m.server_test_accuracy is not None:
            return m
    return None


def summarize(state: ExperimentState) -> str:
    """Human-readable run summary: final metrics, totals, config echo."""
    cfg = state.cfg
    totals = cumulative(state.costs)
    final = final_evaluated(state)
    lines = [
        f"method: {cfg.method}",
        f"rounds: {cfg.rounds}",
        f"seed: {cfg.seed}",
        f"final_server_test_accuracy: {_fmt(final.server_test_accuracy if final else None)}",
        f"final_mean_client_test_accuracy: {_fmt(final.mean_client_test_accuracy if final else None)}",
        f"final_mean_client_global_test_accuracy: "
        f"{_fmt(final.mean_client_global_test_accuracy if final else None)}",
        f"cumulative_uplink_bytes: {totals.total_uplink}",
        f"cumulative_downlink_bytes: {totals.total_downlink}",
        "",
        "[config]",
        f"method = {cfg.method}",
        f"rounds = {cfg.rounds}",
        f"seed = {cfg.seed}",
        f"cache_duration = {cfg.cache_duration}",
        f"per_round_public = {cfg.per_round_public}",
        f"participation_ratio = {cfg.participation_ratio!r}",
        f"validation_fraction = {cfg.validation_fraction!r}",
        f"eval_every = {cfg.eval_every}",
        f"transport_only = {cfg.transport_only}",
        f"aggregation = {cfg.aggregation}",
        f"task = {cfg.task}",
        f"partition = {cfg.partition}",
        f"train = {cfg.train}",
        "",
    ]
    return "\n".join(lines)


def with_overrides(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    """Copy a config with selected fields replaced."""
    return replace(cfg, **kwargs)

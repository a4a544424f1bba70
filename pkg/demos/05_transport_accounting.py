"""Per-round byte accounting without any learning (transport-only mode).

Synthesizes uploads so no SGD runs, but drives the real sampling, cache,
and ledger machinery; useful for validating cost models at full scale
(100 clients, 1,000 public samples per round) in seconds.
"""
import numpy as np

from fdsim.data import PartitionSpec, SyntheticTaskSpec
from fdsim.orchestrator import DSFL, SCARLET, ExperimentConfig, run_experiment


def transport(method, duration, rounds):
    cfg = ExperimentConfig(
        method=method,
        rounds=rounds,
        cache_duration=duration,
        per_round_public=1_000,
        task=SyntheticTaskSpec(
            num_classes=10, feature_dim=4, private_pool_size=100,
            public_pool_size=20_000, test_pool_size=50, seed=0,
        ),
        partition=PartitionSpec(num_clients=100, dirichlet_alpha=1.0, seed=1),
        validation_fraction=0.0,
        seed=2,
        eval_every=0,
        transport_only=True,
    )
    return run_experiment(cfg)


baseline = transport(DSFL, 0, 200)
up = np.array([c.uplink_bytes for c in baseline.costs]) / 1e6
down = np.array([c.downlink_bytes for c in baseline.costs]) / 1e6
print("full retransmission baseline (100 clients x 1000 samples x 10 classes):")
print(f"  uplink   {up.mean():.2f} MB/round (constant)")
print(f"  downlink {down.mean():.2f} MB/round once the label stream starts")

for duration in (25, 50, 100):
    state = transport(SCARLET, duration, 1_000)
    up = np.array([c.uplink_bytes for c in state.costs]) / 1e6
    down = np.array([c.downlink_bytes for c in state.costs]) / 1e6
    hit = np.array([c.cache_hit_ratio for c in state.costs])
    print(f"\ncaching, duration={duration}:")
    print(f"  uplink   mean {up.mean():.2f} MB  max {up.max():.2f} MB")
    print(f"  downlink mean {down.mean():.2f} MB  max {down.max():.2f} MB")
    print(f"  hit ratio mean {hit.mean():.3f}")

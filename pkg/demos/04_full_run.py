"""A complete federated distillation run at desk scale, three ways.

Runs the caching protocol, the full-retransmission baseline, and isolated
local training on the same task and seed, then prints the accuracy and
communication trade-off.
"""
from fdsim.aggregation import AggregationPolicy
from fdsim.comm import cumulative
from fdsim.data import PartitionSpec, SyntheticTaskSpec
from fdsim.learner import TrainConfig
from fdsim.orchestrator import DSFL, INDIVIDUAL, SCARLET, ExperimentConfig, run_experiment

ROUNDS = 150


def config(method, policy):
    return ExperimentConfig(
        method=method,
        rounds=ROUNDS,
        cache_duration=50,
        per_round_public=200,
        task=SyntheticTaskSpec(seed=1),
        partition=PartitionSpec(num_clients=20, dirichlet_alpha=0.05, seed=2),
        train=TrainConfig(seed=3),
        aggregation=policy,
        validation_fraction=0.1,
        seed=4,
        eval_every=25,
    )


print(f"{'method':<12} {'server acc':>10} {'client acc':>10} {'uplink MB':>10} {'downlink MB':>11}")
for method in (SCARLET, DSFL, INDIVIDUAL):
    state = run_experiment(config(method, AggregationPolicy.enhanced_era(1.5)))
    final = state.metrics[-1]
    totals = cumulative(state.costs)
    print(
        f"{method:<12} {final.server_test_accuracy:>10.3f} "
        f"{final.mean_client_test_accuracy:>10.3f} "
        f"{totals.total_uplink / 1e6:>10.2f} {totals.total_downlink / 1e6:>11.2f}"
    )

print("\ncaching run, accuracy trajectory (round: server / mean client):")
state = run_experiment(config(SCARLET, AggregationPolicy.enhanced_era(1.5)))
for m in state.metrics:
    if m.server_test_accuracy is not None:
        print(
            f"  {m.round:>4}: {m.server_test_accuracy:.3f} / "
            f"{m.mean_client_test_accuracy:.3f}  (hit ratio {m.cache_hit_ratio:.2f})"
        )

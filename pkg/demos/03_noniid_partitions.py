"""What the Dirichlet concentration parameter does to client data skew.

Small alpha concentrates each class onto a handful of clients; large
alpha approaches an even split. The same drawn proportions are reused to
shard the test pool, so each client is evaluated on its own skew.
"""
import numpy as np

from fdsim.data import (
    PartitionSpec,
    SyntheticTaskSpec,
    draw_class_proportions,
    generate_task,
    partition_by_proportions,
)

task = SyntheticTaskSpec(private_pool_size=5_000, test_pool_size=2_000, seed=0)
private, _, test = generate_task(task)

for alpha in (0.05, 0.3, 1.0, 100.0):
    spec = PartitionSpec(num_clients=10, dirichlet_alpha=alpha, seed=7)
    proportions = draw_class_proportions(task.num_classes, spec)
    shards = partition_by_proportions(private.labels, proportions, seed=7)
    test_shards = partition_by_proportions(test.labels, proportions, seed=8)
    sizes = [len(s) for s in shards]
    classes_held = [
        int((np.bincount(private.labels[s], minlength=10) >= 5).sum()) for s in shards
    ]
    print(f"alpha={alpha}")
    print(f"  shard sizes:        {sizes}")
    print(f"  classes (>=5 ea):   {classes_held}")
    k = int(np.argmax(sizes))
    train_mix = np.bincount(private.labels[shards[k]], minlength=10) / max(1, sizes[k])
    test_mix = np.bincount(test.labels[test_shards[k]], minlength=10) / max(
        1, len(test_shards[k])
    )
    print(f"  client {k} class mix, train vs test:")
    print("    " + " ".join(f"{v:.2f}" for v in train_mix))
    print("    " + " ".join(f"{v:.2f}" for v in test_mix))

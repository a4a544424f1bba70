"""Synthetic classification tasks, Dirichlet non-IID partitioning, and
train/validation splitting.

The task generator produces Gaussian class-conditional clusters: a labeled
private pool and test pool drawn from identical class centers, plus an
unlabeled public pool drawn from centers offset by a configurable shift
(so the public data resembles, but does not match, the private data).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .rng import substream

__all__ = [
    "LabeledPool",
    "SyntheticTaskSpec",
    "PartitionSpec",
    "generate_task",
    "draw_class_proportions",
    "partition_by_proportions",
    "partition_dirichlet",
    "split_validation",
    "split_unlabeled",
    "save_task",
    "load_task",
]

_MAGIC = b"FDSIM1"


@dataclass
class LabeledPool:
    """A batch of samples: features (M, d) float and labels (M,) int."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.labels.ndim != 1:
            raise ValueError("features must be (M, d) and labels (M,)")
        if len(self.features) != len(self.labels):
            raise ValueError("features and labels must be parallel")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")
        if len(self.labels) and self.labels.min() < 0:
            raise ValueError("labels must be non-negative class indices")

    def __len__(self) -> int:
        return len(self.labels)

    def subset(self, indices: np.ndarray) -> "LabeledPool":
        return LabeledPool(self.features[indices], self.labels[indices])


@dataclass(frozen=True)
class SyntheticTaskSpec:
    """Parameters of the Gaussian cluster task.

    Class centers sit on a sphere of radius ``class_center_separation``;
    samples add isotropic noise of scale ``noise_sigma``. The public pool
    uses centers displaced by ``public_shift`` along per-class random
    directions, modeling a related-but-distinct transfer set.
    """

    num_classes: int = 10
    feature_dim: int = 32
    private_pool_size: int = 2000
    public_pool_size: int = 2000
    test_pool_size: int = 1000
    class_center_separation: float = 4.0
    noise_sigma: float = 1.0
    public_shift: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_classes < 2:
            raise ValueError("need at least 2 classes")
        if min(self.private_pool_size, self.public_pool_size, self.test_pool_size) <= 0:
            raise ValueError("pool sizes must be positive")
        if self.feature_dim <= 0:
            raise ValueError("feature_dim must be positive")
        if self.class_center_separation <= 0 or self.noise_sigma < 0:
            raise ValueError("separation must be positive and noise_sigma non-negative")
        if self.public_shift < 0:
            raise ValueError("public_shift must be non-negative")


@dataclass(frozen=True)
class PartitionSpec:
    num_clients: int
    dirichlet_alpha: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_clients < 1:
            raise ValueError("need at least one client")
        if self.dirichlet_alpha <= 0:
            raise ValueError("dirichlet_alpha must be positive")


def _unit_rows(gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    v = gen.normal(size=(n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _draw_pool(
    gen: np.random.Generator, centers: np.ndarray, size: int, sigma: float
) -> LabeledPool:
    n_classes, d = centers.shape
    labels = gen.integers(0, n_classes, size=size)
    features = centers[labels] + sigma * gen.normal(size=(size, d))
    return LabeledPool(features, labels)


def generate_task(spec: SyntheticTaskSpec) -> tuple[LabeledPool, np.ndarray, LabeledPool]:
    """Generate (private_pool, public_features, test_pool) for a task spec.

    Private and test pools share class centers; the public pool is
    unlabeled and drawn from shifted centers. Deterministic per seed.
    """
    gen = substream(spec.seed, "task-centers")
    centers = spec.class_center_separation * _unit_rows(gen, spec.num_classes, spec.feature_dim)
    public_centers = centers + spec.public_shift * _unit_rows(
        gen, spec.num_classes, spec.feature_dim
    )
    private = _draw_pool(
        substream(spec.seed, "task-private"), centers, spec.private_pool_size, spec.noise_sigma
    )
    public = _draw_pool(
        substream(spec.seed, "task-public"), public_centers, spec.public_pool_size, spec.noise_sigma
    ).features
    test = _draw_pool(
        substream(spec.seed, "task-test"), centers, spec.test_pool_size, spec.noise_sigma
    )
    return private, public, test


def draw_class_proportions(num_classes: int, spec: PartitionSpec) -> np.ndarray:
    """Draw per-class client proportions, one Dirichlet vector per class.

    Returns an (num_classes, num_clients) array whose rows sum to 1.
    Reusing the same proportions to split both the private and the test
    pool gives each client a test shard mirroring its training skew.
    """
    gen = substream(spec.seed, "dirichlet-proportions")
    alpha = spec.dirichlet_alpha * np.ones(spec.num_clients)
    return np.stack([gen.dirichlet(alpha) for _ in range(num_classes)])


def _largest_remainder_counts(p: np.ndarray, total: int) -> np.ndarray:
    """Integer counts summing to ``total`` with proportions ``p``."""
    ideal = p * total
    counts = np.floor(ideal).astype(np.int64)
    leftover = total - int(counts.sum())
    if leftover > 0:
        remainders = ideal - counts
        # Ties broken by index for determinism.
        order = np.lexsort((np.arange(len(p)), -remainders))
        counts[order[:leftover]] += 1
    return counts


def partition_by_proportions(
    labels: np.ndarray, proportions: np.ndarray, seed: int
) -> list[np.ndarray]:
    """Split sample indices among clients class by class.

    For each class, its samples are shuffled once (seeded) and dealt to
    clients in contiguous runs sized by largest-remainder rounding of the
    class's proportion row. Every sample lands in exactly one shard.
    """
    labels = np.asarray(labels)
    num_classes, num_clients = proportions.shape
    shards: list[list[int]] = [[] for _ in range(num_clients)]
    for c in range(num_classes):
        class_idx = np.flatnonzero(labels == c)
        if len(class_idx) == 0:
            continue
        gen = substream(seed, "partition-assign", c)
        class_idx = gen.permutation(class_idx)
        counts = _largest_remainder_counts(proportions[c], len(class_idx))
        start = 0
        for k in range(num_clients):
            shards[k].extend(class_idx[start : start + counts[k]].tolist())
            start += counts[k]
    return [np.asarray(sorted(s), dtype=np.int64) for s in shards]


def partition_dirichlet(pool: LabeledPool, spec: PartitionSpec) -> list[LabeledPool]:
    """Dirichlet non-IID partition of a labeled pool across clients.

    Smaller alpha concentrates each class on fewer clients; shards may be
    near-empty at extreme skew and are not resampled. Deterministic per
    seed, and exhaustive: every sample appears in exactly one shard.
    """
    if len(pool) == 0:
        raise ValueError("cannot partition an empty pool")
    num_classes = int(pool.labels.max()) + 1
    proportions = draw_class_proportions(num_classes, spec)
    shards = partition_by_proportions(pool.labels, proportions, spec.seed)
    return [pool.subset(s) for s in shards]


def _spread_indices(n: int, count: int) -> np.ndarray:
    """``count`` distinct indices evenly spread over range(n)."""
    return ((np.arange(count) + 0.5) * n / count).astype(np.int64)


def _validation_size(n: int, fraction: float) -> int:
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    return max(1, int(np.floor(fraction * n + 0.5)))


def split_validation(pool: LabeledPool, fraction: float) -> tuple[LabeledPool, LabeledPool]:
    """Deterministic stratified train/validation split of a labeled pool.

    The validation part holds round(fraction * size) samples (at least
    one), allocated across classes by largest remainder and picked evenly
    spaced within each class, so repeated calls always agree.
    """
    n = len(pool)
    if n == 0:
        raise ValueError("cannot split an empty pool")
    n_val = min(_validation_size(n, fraction), n - 1) if n > 1 else 1
    classes, class_counts = np.unique(pool.labels, return_counts=True)
    quotas = _largest_remainder_counts(class_counts / n, n_val)
    # Largest-remainder can overshoot a class with few samples; push the
    # excess onto the largest classes.
    excess = quotas - class_counts
    while np.any(excess > 0):
        over = int(np.argmax(excess))
        quotas[over] = class_counts[over]
        room = class_counts - quotas
        take = int(np.argmax(room))
        quotas[take] += min(int(excess[over]), int(room[take]))
        excess = quotas - class_counts
    val_mask = np.zeros(n, dtype=bool)
    for cls, quota in zip(classes, quotas):
        if quota == 0:
            continue
        class_idx = np.flatnonzero(pool.labels == cls)
        val_mask[class_idx[_spread_indices(len(class_idx), int(quota))]] = True
    return pool.subset(np.flatnonzero(~val_mask)), pool.subset(np.flatnonzero(val_mask))


def split_unlabeled(n: int, fraction: float) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic (train_indices, val_indices) split of an unlabeled pool."""
    if n < 2:
        raise ValueError("need at least 2 samples to split")
    n_val = min(_validation_size(n, fraction), n - 1)
    val = _spread_indices(n, n_val)
    mask = np.zeros(n, dtype=bool)
    mask[val] = True
    return np.flatnonzero(~mask), val


def save_task(
    path: str, private: LabeledPool, public_features: np.ndarray, test: LabeledPool
) -> None:
    """Write a generated task to a flat little-endian binary file.

    Layout: magic ``FDSIM1``; u32 num_classes, feature_dim, private,
    public, and test counts; then f32 private features, u32 private
    labels, f32 public features, f32 test features, u32 test labels.
    """
    num_classes = int(max(private.labels.max(), test.labels.max())) + 1
    d = private.features.shape[1]
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(
            struct.pack(
                "<5I", num_classes, d, len(private), len(public_features), len(test)
            )
        )
        fh.write(private.features.astype("<f4").tobytes())
        fh.write(private.labels.astype("<u4").tobytes())
        fh.write(np.asarray(public_features).astype("<f4").tobytes())
        fh.write(test.features.astype("<f4").tobytes())
        fh.write(test.labels.astype("<u4").tobytes())


def load_task(path: str) -> tuple[LabeledPool, np.ndarray, LabeledPool]:
    """Read a task written by :func:`save_task`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"not a task file (bad magic {magic!r})")
        _, d, n_private, n_public, n_test = struct.unpack("<5I", fh.read(20))

        def read_f32(rows: int) -> np.ndarray:
            raw = np.frombuffer(fh.read(rows * d * 4), dtype="<f4")
            return raw.reshape(rows, d).astype(np.float64)

        def read_u32(count: int) -> np.ndarray:
            return np.frombuffer(fh.read(count * 4), dtype="<u4").astype(np.int64)

        private = LabeledPool(read_f32(n_private), read_u32(n_private))
        public = read_f32(n_public)
        test = LabeledPool(read_f32(n_test), read_u32(n_test))
    return private, public, test

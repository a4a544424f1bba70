import numpy as np
import pytest

from fdsim.data import (
    LabeledPool,
    PartitionSpec,
    SyntheticTaskSpec,
    draw_class_proportions,
    generate_task,
    load_task,
    partition_by_proportions,
    partition_dirichlet,
    save_task,
    split_unlabeled,
    split_validation,
)


def small_task(**overrides):
    defaults = dict(
        num_classes=5,
        feature_dim=8,
        private_pool_size=500,
        public_pool_size=400,
        test_pool_size=300,
        class_center_separation=4.0,
        noise_sigma=1.0,
        public_shift=1.0,
        seed=0,
    )
    defaults.update(overrides)
    return SyntheticTaskSpec(**defaults)


class TestGenerateTask:
    def test_shapes_and_determinism(self):
        spec = small_task()
        private, public, test = generate_task(spec)
        assert private.features.shape == (500, 8)
        assert public.shape == (400, 8)
        assert test.features.shape == (300, 8)
        private2, public2, test2 = generate_task(spec)
        assert np.array_equal(private.features, private2.features)
        assert np.array_equal(public, public2)
        assert np.array_equal(test.labels, test2.labels)

    def test_zero_shift_matches_private_distribution(self):
        spec = small_task(public_shift=0.0, private_pool_size=4000, public_pool_size=4000)
        private, public, _ = generate_task(spec)
        # Same centers and noise: overall mean and scale agree closely.
        assert np.linalg.norm(private.features.mean(axis=0) - public.mean(axis=0)) < 0.3
        assert abs(private.features.std() - public.std()) < 0.05

    def test_noiseless_task_is_perfectly_separable_by_centroids(self):
        spec = small_task(noise_sigma=1e-9)
        private, _, test = generate_task(spec)
        centroids = np.stack(
            [private.features[private.labels == c].mean(axis=0) for c in range(5)]
        )
        dists = np.linalg.norm(test.features[:, None, :] - centroids[None], axis=2)
        assert (dists.argmin(axis=1) == test.labels).mean() == 1.0

    def test_centralized_linear_model_reaches_95_percent(self):
        # End-to-end oracle tying the task to the learner module.
        from fdsim.learner import LinearSoftmaxModel, TrainConfig, predict_soft_labels, train_local

        spec = SyntheticTaskSpec(seed=3)
        private, _, test = generate_task(spec)
        model = LinearSoftmaxModel.initialize(spec.num_classes, spec.feature_dim, seed=1)
        cfg = TrainConfig(local_epochs=200, seed=2)
        model = train_local(model, private.features, private.labels, cfg)
        pred = predict_soft_labels(model, test.features).probs.argmax(axis=1)
        assert (pred == test.labels).mean() >= 0.95


class TestPartition:
    def test_single_client_gets_whole_pool(self):
        private, _, _ = generate_task(small_task())
        shards = partition_dirichlet(private, PartitionSpec(1, 0.5, seed=1))
        assert len(shards) == 1
        assert len(shards[0]) == len(private)

    def test_partition_is_exhaustive_and_disjoint(self):
        private, _, _ = generate_task(small_task())
        props = draw_class_proportions(5, PartitionSpec(7, 0.2, seed=2))
        shards = partition_by_proportions(private.labels, props, seed=2)
        combined = np.concatenate(shards)
        assert len(combined) == len(private)
        assert len(np.unique(combined)) == len(private)

    def test_large_alpha_concentrates_to_uniform(self):
        private, _, _ = generate_task(small_task(private_pool_size=5000))
        shards = partition_dirichlet(private, PartitionSpec(10, 10000.0, seed=3))
        for shard in shards:
            for c in range(5):
                class_total = int((private.labels == c).sum())
                share = int((shard.labels == c).sum())
                assert abs(share - class_total / 10) <= 0.2 * class_total / 10 + 1

    def test_small_alpha_gives_few_classes_per_client(self):
        # Monte-Carlo over 30 seeds: at alpha=0.05 with 100 clients and 10
        # classes, the median client sees at most 3 classes with >= 5 samples.
        rng_labels = np.random.default_rng(4).integers(0, 10, size=20000)
        medians = []
        for seed in range(30):
            props = draw_class_proportions(10, PartitionSpec(100, 0.05, seed=seed))
            shards = partition_by_proportions(rng_labels, props, seed=seed)
            counts = []
            for shard in shards:
                labels, tally = np.unique(rng_labels[shard], return_counts=True)
                counts.append(int((tally >= 5).sum()))
            medians.append(np.median(counts))
        assert np.median(medians) <= 3

    def test_same_seed_same_shards(self):
        private, _, _ = generate_task(small_task())
        spec = PartitionSpec(6, 0.1, seed=5)
        a = partition_dirichlet(private, spec)
        b = partition_dirichlet(private, spec)
        for left, right in zip(a, b):
            assert np.array_equal(left.features, right.features)

    def test_test_pool_mirrors_private_skew(self):
        private, _, test = generate_task(small_task(private_pool_size=5000, test_pool_size=5000))
        spec = PartitionSpec(4, 0.1, seed=6)
        props = draw_class_proportions(5, spec)
        private_shards = partition_by_proportions(private.labels, props, seed=1)
        test_shards = partition_by_proportions(test.labels, props, seed=2)
        for shard_p, shard_t in zip(private_shards, test_shards):
            if len(shard_p) < 50 or len(shard_t) < 50:
                continue
            p_frac = np.bincount(private.labels[shard_p], minlength=5) / len(shard_p)
            t_frac = np.bincount(test.labels[shard_t], minlength=5) / len(shard_t)
            assert np.abs(p_frac - t_frac).max() < 0.1


class TestSplits:
    def test_ninety_ten_split(self):
        pool = LabeledPool(np.zeros((500, 2)), np.arange(500) % 5)
        train, val = split_validation(pool, 0.1)
        assert (len(train), len(val)) == (450, 50)

    def test_minimum_one_validation_sample(self):
        pool = LabeledPool(np.zeros((9, 2)), np.arange(9) % 3)
        train, val = split_validation(pool, 0.1)
        assert (len(train), len(val)) == (8, 1)

    def test_unlabeled_public_split(self):
        train_idx, val_idx = split_unlabeled(10000, 0.1)
        assert (len(train_idx), len(val_idx)) == (9000, 1000)
        assert len(np.intersect1d(train_idx, val_idx)) == 0

    def test_split_is_stratified(self):
        labels = np.repeat(np.arange(4), 100)
        pool = LabeledPool(np.zeros((400, 2)), labels)
        _, val = split_validation(pool, 0.1)
        assert np.bincount(val.labels, minlength=4).tolist() == [10, 10, 10, 10]

    def test_split_deterministic(self):
        pool = LabeledPool(np.random.default_rng(0).normal(size=(73, 3)), np.arange(73) % 4)
        a_train, a_val = split_validation(pool, 0.2)
        b_train, b_val = split_validation(pool, 0.2)
        assert np.array_equal(a_train.features, b_train.features)
        assert np.array_equal(a_val.features, b_val.features)

    def test_invalid_fraction_rejected(self):
        pool = LabeledPool(np.zeros((10, 2)), np.zeros(10, dtype=int))
        with pytest.raises(ValueError):
            split_validation(pool, 1.5)


class TestBinaryRoundTrip:
    def test_save_load_round_trip(self, tmp_path):
        private, public, test = generate_task(small_task())
        path = tmp_path / "task.bin"
        save_task(str(path), private, public, test)
        loaded_private, loaded_public, loaded_test = load_task(str(path))
        # float32 on disk: equality after one round of down-casting.
        assert np.array_equal(
            loaded_private.features, private.features.astype(np.float32).astype(np.float64)
        )
        assert np.array_equal(loaded_private.labels, private.labels)
        assert np.array_equal(
            loaded_public, public.astype(np.float32).astype(np.float64)
        )
        assert np.array_equal(loaded_test.labels, test.labels)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOTFD1" + b"\x00" * 40)
        with pytest.raises(ValueError):
            load_task(str(path))

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fdsim.soft_labels import (
    MisalignedBatchError,
    SoftLabelBatch,
    as_probability_rows,
    entropy,
    mean_soft_labels,
)


def batch(rows, indices=None):
    return SoftLabelBatch(np.asarray(rows, dtype=np.float64), indices)


class TestEntropy:
    def test_uniform_is_log_n(self):
        assert_allclose(entropy(np.full(4, 0.25)), np.log(4), rtol=0, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 10, 100])
    def test_one_hot_is_zero(self, n):
        p = np.zeros(n)
        p[n // 2] = 1.0
        assert entropy(p) == 0.0

    def test_two_point_symmetry(self):
        assert_allclose(entropy([0.5, 0.5, 0.0, 0.0]), np.log(2), rtol=0, atol=1e-12)

    def test_batch_shape_and_range(self):
        rng = np.random.default_rng(0)
        p = rng.dirichlet(np.ones(6), size=50)
        h = entropy(p)
        assert h.shape == (50,)
        assert np.all(h >= 0) and np.all(h <= np.log(6) + 1e-12)


class TestValidation:
    def test_renormalizes_small_drift(self):
        p = np.array([0.5, 0.5 + 3e-7])
        out = as_probability_rows(p)
        assert_allclose(out.sum(), 1.0, rtol=0, atol=1e-12)

    def test_rejects_large_drift(self):
        with pytest.raises(ValueError):
            as_probability_rows(np.array([0.5, 0.6]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            as_probability_rows(np.array([-0.1, 1.1]))

    def test_rejects_single_class(self):
        with pytest.raises(ValueError):
            as_probability_rows(np.array([1.0]))

    def test_rejects_duplicate_indices(self):
        with pytest.raises(ValueError):
            batch([[0.5, 0.5], [0.5, 0.5]], indices=[3, 3])

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(MisalignedBatchError):
            batch([[0.5, 0.5], [0.5, 0.5]], indices=[1, 2, 3])


class TestMean:
    def test_single_batch_identity(self):
        b = batch([[0.2, 0.8], [0.7, 0.3]], indices=[4, 9])
        out = mean_soft_labels([b])
        assert np.array_equal(out.probs, b.probs)
        assert np.array_equal(out.sample_indices, b.sample_indices)

    def test_two_point_symmetry(self):
        out = mean_soft_labels([batch([[1.0, 0.0]]), batch([[0.0, 1.0]])])
        assert_allclose(out.probs, [[0.5, 0.5]], rtol=0, atol=1e-15)

    def test_three_client_mean_matches_direct_oracle(self):
        rows = [[0.6, 0.4], [0.2, 0.8], [0.1, 0.9]]
        out = mean_soft_labels([batch([r]) for r in rows])
        oracle = np.mean(np.asarray(rows), axis=0)
        assert_allclose(out.probs[0], oracle, rtol=0, atol=1e-15)
        assert_allclose(out.probs[0], [0.3, 0.7], rtol=0, atol=1e-12)

    def test_misaligned_indices_rejected(self):
        a = batch([[0.5, 0.5]], indices=[1])
        b = batch([[0.5, 0.5]], indices=[2])
        with pytest.raises(MisalignedBatchError):
            mean_soft_labels([a, b])

    def test_mean_preserves_simplex(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            k = rng.integers(1, 9)
            n = rng.integers(2, 40)
            m = rng.integers(1, 12)
            idx = rng.choice(1000, size=m, replace=False)
            batches = [batch(rng.dirichlet(np.ones(n), size=m), idx) for _ in range(k)]
            out = mean_soft_labels(batches)
            assert_allclose(out.probs.sum(axis=1), 1.0, rtol=0, atol=1e-9)
            assert np.all(out.probs >= 0)

    def test_entropy_of_self_mean_is_exact(self):
        rng = np.random.default_rng(2)
        p = batch(rng.dirichlet(np.ones(7), size=5))
        out = mean_soft_labels([p, p])
        assert entropy(out.probs).tolist() == entropy(p.probs).tolist()

    def test_client_order_permutation_invariance(self):
        rng = np.random.default_rng(3)
        idx = np.arange(6)
        batches = [batch(rng.dirichlet(np.ones(5), size=6), idx) for _ in range(8)]
        forward = mean_soft_labels(batches)
        shuffled = mean_soft_labels(batches[::-1])
        assert np.max(np.abs(forward.probs - shuffled.probs)) <= 1e-12

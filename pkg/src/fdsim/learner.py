"""The pluggable local model: a linear softmax classifier trained with
plain mini-batch SGD, either on labeled data (cross-entropy) or against
teacher soft-labels (KL distillation).

The model is deliberately small: the caching and aggregation machinery is
model-agnostic, and a linear learner keeps full experiments to seconds
while exercising every protocol path.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .rng import substream
from .soft_labels import SoftLabelBatch

__all__ = [
    "LinearSoftmaxModel",
    "TrainConfig",
    "ModelGradient",
    "predict_soft_labels",
    "train_local",
    "distill",
    "loss_and_gradient",
]

CROSS_ENTROPY = "cross_entropy"
KL_TO_TEACHER = "kl_to_teacher"


@dataclass
class LinearSoftmaxModel:
    """Weights (N, d) and bias (N,) of a softmax-linear classifier."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.ndim != 1:
            raise ValueError("weights must be (N, d) and bias (N,)")
        if self.weights.shape[0] != self.bias.shape[0]:
            raise ValueError("weights and bias disagree on the class count")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("model parameters must be finite")

    @classmethod
    def initialize(cls, num_classes: int, feature_dim: int, seed: int, scale: float = 0.01):
        gen = substream(seed, "model-init")
        return cls(gen.normal(0.0, scale, size=(num_classes, feature_dim)), np.zeros(num_classes))

    @classmethod
    def zeros(cls, num_classes: int, feature_dim: int):
        return cls(np.zeros((num_classes, feature_dim)), np.zeros(num_classes))

    def copy(self) -> "LinearSoftmaxModel":
        return LinearSoftmaxModel(self.weights.copy(), self.bias.copy())

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class TrainConfig:
    local_lr: float = 0.1
    distill_lr: float = 0.1
    local_epochs: int = 5
    distill_epochs: int = 1
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if self.local_lr <= 0 or self.distill_lr <= 0:
            raise ValueError("learning rates must be positive")
        if self.local_epochs < 0 or self.distill_epochs < 0:
            raise ValueError("epoch counts must be non-negative")
        if self.batch_size <= 0:
            raise ValueError("batch_size must be positive")


class ModelGradient(NamedTuple):
    weights: np.ndarray
    bias: np.ndarray


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _forward(model: LinearSoftmaxModel, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != model.feature_dim:
        raise ValueError(
            f"features must be (M, {model.feature_dim}), got {features.shape}"
        )
    return features @ model.weights.T + model.bias


def predict_soft_labels(
    model: LinearSoftmaxModel, features: np.ndarray, indices: np.ndarray | None = None
) -> SoftLabelBatch:
    """Softmax predictions for a feature batch, stabilized by max-shift."""
    return SoftLabelBatch(_softmax(_forward(model, features)), indices)


def loss_and_gradient(
    model: LinearSoftmaxModel,
    features: np.ndarray,
    targets: np.ndarray,
    loss_kind: str,
) -> tuple[float, ModelGradient]:
    """Mean loss over the batch and its analytic parameter gradient.

    ``cross_entropy`` expects integer class labels; ``kl_to_teacher``
    expects teacher probability rows and measures KL(teacher || student),
    whose value includes the (constant) negative teacher entropy so that
    one-hot teachers give exactly the cross-entropy loss.
    """
    logits = _forward(model, features)
    log_probs = _log_softmax(logits)
    probs = _softmax(logits)
    m = len(features)
    if loss_kind == CROSS_ENTROPY:
        labels = np.asarray(targets, dtype=np.int64)
        loss = -float(log_probs[np.arange(m), labels].mean())
        target_probs = np.zeros_like(probs)
        target_probs[np.arange(m), labels] = 1.0
    elif loss_kind == KL_TO_TEACHER:
        teacher = np.asarray(targets, dtype=np.float64)
        if teacher.shape != probs.shape:
            raise ValueError("teacher labels must align with the feature batch")
        entropy_terms = np.where(teacher > 0.0, teacher * np.log(np.where(teacher > 0.0, teacher, 1.0)), 0.0)
        loss = float((entropy_terms - teacher * log_probs).sum(axis=1).mean())
        target_probs = teacher
    else:
        raise ValueError(f"unknown loss kind {loss_kind!r}")
    dlogits = (probs - target_probs) / m
    return loss, ModelGradient(dlogits.T @ np.asarray(features, dtype=np.float64), dlogits.sum(axis=0))


def _sgd_epochs(
    model: LinearSoftmaxModel,
    features: np.ndarray,
    targets: np.ndarray,
    loss_kind: str,
    epochs: int,
    lr: float,
    batch_size: int,
    gen: np.random.Generator,
) -> LinearSoftmaxModel:
    # Inlined gradient of the mean loss (same formula loss_and_gradient
    # exposes: (softmax - target) / batch); this loop runs millions of
    # small steps per experiment, so it skips the loss value entirely.
    out = model.copy()
    n = len(features)
    labels = np.asarray(targets) if loss_kind == CROSS_ENTROPY else None
    for _ in range(epochs):
        order = gen.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            x = features[batch]
            dlogits = _softmax(x @ out.weights.T + out.bias)
            if labels is not None:
                dlogits[np.arange(len(batch)), labels[batch]] -= 1.0
            else:
                dlogits -= targets[batch]
            dlogits /= len(batch)
            out.weights -= lr * (dlogits.T @ x)
            out.bias -= lr * dlogits.sum(axis=0)
    return out


def train_local(
    model: LinearSoftmaxModel,
    features: np.ndarray,
    labels: np.ndarray,
    cfg: TrainConfig,
    gen: np.random.Generator | None = None,
) -> LinearSoftmaxModel:
    """Mini-batch SGD on mean cross-entropy for ``cfg.local_epochs`` epochs.

    Returns an updated copy; the input model is untouched. The shuffle
    stream defaults to one derived from ``cfg.seed``, so equal seeds give
    bit-identical results.
    """
    if len(features) == 0:
        raise ValueError("training data must be non-empty")
    if gen is None:
        gen = substream(cfg.seed, "local-train")
    return _sgd_epochs(
        model, np.asarray(features, dtype=np.float64), np.asarray(labels),
        CROSS_ENTROPY, cfg.local_epochs, cfg.local_lr, cfg.batch_size, gen,
    )


def distill(
    model: LinearSoftmaxModel,
    public_features: np.ndarray,
    teacher: SoftLabelBatch,
    cfg: TrainConfig,
    gen: np.random.Generator | None = None,
) -> LinearSoftmaxModel:
    """Mini-batch SGD on mean KL(teacher || student) toward teacher labels."""
    public_features = np.asarray(public_features, dtype=np.float64)
    if len(public_features) != len(teacher):
        raise ValueError("teacher batch must align with the public features")
    if gen is None:
        gen = substream(cfg.seed, "distill")
    return _sgd_epochs(
        model, public_features, teacher.probs,
        KL_TO_TEACHER, cfg.distill_epochs, cfg.distill_lr, cfg.batch_size, gen,
    )

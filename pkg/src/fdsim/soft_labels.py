"""Probability-vector primitives: validation, entropy, and client averaging.

A soft-label is a normalized probability vector over the task's classes;
batches of soft-labels aligned with public-pool sample indices are the
unit of exchange between clients and the server.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MisalignedBatchError",
    "SoftLabelBatch",
    "as_probability_rows",
    "entropy",
    "mean_soft_labels",
]

# Row sums farther than this from 1 indicate a logic bug, not float drift.
SUM_REJECT_TOL = 1e-6
# Drift below this is accepted verbatim; in between, rows are renormalized.
SUM_ACCEPT_TOL = 1e-12


class MisalignedBatchError(ValueError):
    """Raised when batches that must share sample indices do not."""


def as_probability_rows(probs: np.ndarray) -> np.ndarray:
    """Validate an (M, N) array of probability rows, renormalizing tiny drift.

    Rows whose sum deviates from 1 by at most ``SUM_REJECT_TOL`` are
    renormalized (drift beyond ``SUM_ACCEPT_TOL``) or accepted verbatim;
    larger deviations, negative entries, entries above 1, and N < 2 are
    rejected.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim == 1:
        probs = probs[None, :]
    if probs.ndim != 2 or probs.shape[1] < 2:
        raise ValueError("soft-labels need at least 2 classes per row")
    if not np.all(np.isfinite(probs)):
        raise ValueError("soft-label entries must be finite")
    if np.any(probs < 0.0) or np.any(probs > 1.0 + SUM_REJECT_TOL):
        raise ValueError("soft-label entries must lie in [0, 1]")
    sums = probs.sum(axis=1)
    drift = np.abs(sums - 1.0)
    if np.any(drift > SUM_REJECT_TOL):
        worst = float(drift.max())
        raise ValueError(f"soft-label row sum deviates from 1 by {worst:.3g}")
    needs_renorm = drift > SUM_ACCEPT_TOL
    if np.any(needs_renorm):
        probs = probs.copy()
        probs[needs_renorm] /= sums[needs_renorm, None]
    return probs


@dataclass
class SoftLabelBatch:
    """Ordered soft-labels paired with their public-pool sample indices.

    ``probs`` has shape (M, N); ``sample_indices`` has shape (M,) and holds
    distinct non-negative indices into the public pool, parallel to rows.
    """

    probs: np.ndarray
    sample_indices: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.probs = as_probability_rows(self.probs)
        if self.sample_indices is None:
            self.sample_indices = np.arange(self.probs.shape[0], dtype=np.int64)
        self.sample_indices = np.asarray(self.sample_indices, dtype=np.int64)
        if self.sample_indices.ndim != 1 or len(self.sample_indices) != self.probs.shape[0]:
            raise MisalignedBatchError("sample_indices must be parallel to probs rows")
        if np.any(self.sample_indices < 0):
            raise ValueError("sample indices must be non-negative")
        if len(np.unique(self.sample_indices)) != len(self.sample_indices):
            raise ValueError("sample indices must not contain duplicates")

    def __len__(self) -> int:
        return self.probs.shape[0]

    @property
    def num_classes(self) -> int:
        return self.probs.shape[1]


def entropy(probs: np.ndarray) -> float | np.ndarray:
    """Shannon entropy in nats, with the convention 0 * ln 0 = 0.

    Accepts a single probability vector or an (M, N) batch; returns a
    scalar or a length-M array accordingly. Values lie in [0, ln N].
    """
    p = np.asarray(probs, dtype=np.float64)
    safe = np.where(p > 0.0, p, 1.0)
    terms = -p * np.log(safe)
    out = terms.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def mean_soft_labels(batches: list[SoftLabelBatch]) -> SoftLabelBatch:
    """Arithmetic mean of aligned batches across the client axis.

    All batches must share identical sample indices in identical order.
    Accumulation is compensated (Kahan) in the given batch order, so the
    result is bit-reproducible regardless of how client work was scheduled.
    """
    if not batches:
        raise ValueError("need at least one batch to average")
    first = batches[0]
    for other in batches[1:]:
        if not np.array_equal(other.sample_indices, first.sample_indices):
            raise MisalignedBatchError("batches do not share identical sample indices")
        if other.probs.shape != first.probs.shape:
            raise MisalignedBatchError("batches do not share the same shape")
    if len(batches) == 1:
        return SoftLabelBatch(first.probs.copy(), first.sample_indices.copy())
    total = np.zeros_like(first.probs)
    comp = np.zeros_like(first.probs)
    for batch in batches:
        y = batch.probs - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return SoftLabelBatch(total / len(batches), first.sample_indices.copy())

"""Server-side soft-label aggregation: plain averaging, temperature
sharpening (ERA), and power sharpening (Enhanced ERA), plus the
majorization and log-ratio diagnostics that characterize their behavior.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .soft_labels import SoftLabelBatch, mean_soft_labels

__all__ = [
    "AggregationPolicy",
    "aggregate",
    "temperature_sharpen",
    "power_sharpen",
    "majorization_holds",
    "log_ratio_era",
    "log_ratio_enhanced_era",
]

PLAIN_MEAN = "plain_mean"
ERA = "era"
ENHANCED_ERA = "enhanced_era"

MAJORIZATION_TOL = 1e-12


@dataclass(frozen=True)
class AggregationPolicy:
    """How averaged client soft-labels are sharpened before distillation.

    ``era`` applies a temperature softmax to the averaged probabilities,
    ``enhanced_era`` applies power normalization with exponent beta, and
    ``plain_mean`` leaves the average untouched.
    """

    kind: str
    temperature: float | None = None
    beta: float | None = None

    def __post_init__(self) -> None:
        if self.kind == ERA:
            if self.temperature is None or self.temperature <= 0.0:
                raise ValueError("ERA requires a positive temperature")
        elif self.kind == ENHANCED_ERA:
            if self.beta is None or self.beta <= 0.0:
                raise ValueError("Enhanced ERA requires a positive beta")
        elif self.kind != PLAIN_MEAN:
            raise ValueError(f"unknown aggregation kind {self.kind!r}")

    @classmethod
    def era(cls, temperature: float) -> "AggregationPolicy":
        return cls(ERA, temperature=temperature)

    @classmethod
    def enhanced_era(cls, beta: float) -> "AggregationPolicy":
        return cls(ENHANCED_ERA, beta=beta)

    @classmethod
    def plain_mean(cls) -> "AggregationPolicy":
        return cls(PLAIN_MEAN)


def temperature_sharpen(values: np.ndarray, temperature: float) -> np.ndarray:
    """Row-wise softmax(values / T).

    Note the inputs here are averaged probabilities in [0, 1], not raw
    logits; that is deliberate and reproduces the baseline aggregation
    faithfully.
    """
    v = np.asarray(values, dtype=np.float64)
    shifted = v - v.max(axis=-1, keepdims=True)
    e = np.exp(shifted / temperature)
    return e / e.sum(axis=-1, keepdims=True)


def power_sharpen(values: np.ndarray, beta: float) -> np.ndarray:
    """Row-wise power normalization v_i^beta / sum_j v_j^beta.

    Inputs are non-negative and may be unnormalized: the transform is
    scale-invariant. Zeros map to zero for every beta > 0 (no smoothing
    epsilon is added). Rows are pre-scaled by their maximum so that large
    beta cannot underflow every entry at once.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    v = np.asarray(values, dtype=np.float64)
    peak = v.max(axis=-1, keepdims=True)
    assert np.all(peak > 0.0), "power sharpening is undefined when every entry is zero"
    powered = np.power(v / peak, beta)
    return powered / powered.sum(axis=-1, keepdims=True)


def aggregate(client_batches: list[SoftLabelBatch], policy: AggregationPolicy) -> SoftLabelBatch:
    """Average aligned client batches, then sharpen per the policy."""
    averaged = mean_soft_labels(client_batches)
    if policy.kind == PLAIN_MEAN:
        return averaged
    if policy.kind == ERA:
        probs = temperature_sharpen(averaged.probs, policy.temperature)
    else:
        probs = power_sharpen(averaged.probs, policy.beta)
    return SoftLabelBatch(probs, averaged.sample_indices)


def majorization_holds(x: np.ndarray, beta1: float, beta2: float) -> bool:
    """Check that power sharpening with the larger exponent is majorized.

    ``x`` must be sorted non-decreasing with entries in [0, 1] summing
    to 1; for beta2 > beta1 > 0 every normalized prefix sum of x^beta2
    must not exceed the corresponding prefix sum of x^beta1 (within a
    1e-12 slack for float round-off).
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.diff(x) < 0.0):
        raise ValueError("input must be sorted non-decreasing")
    if not (beta2 > beta1 > 0.0):
        raise ValueError("exponents must satisfy beta2 > beta1 > 0")
    p1 = np.power(x, beta1)
    p2 = np.power(x, beta2)
    prefix1 = np.cumsum(p1) / p1.sum()
    prefix2 = np.cumsum(p2) / p2.sum()
    return bool(np.all(prefix2 <= prefix1 + MAJORIZATION_TOL))


def log_ratio_era(z_bar_i: float, z_bar_j: float, temperature: float) -> float:
    """Log-ratio of two temperature-sharpened entries: (z_i - z_j) / T.

    The output depends on the absolute difference of the inputs, so the
    transform is scale-dependent and its sensitivity to T grows as 1/T^2.
    """
    return (z_bar_i - z_bar_j) / temperature


def log_ratio_enhanced_era(z_bar_i: float, z_bar_j: float, beta: float) -> float:
    """Log-ratio of two power-sharpened entries: beta * ln(z_i / z_j).

    The output depends only on the ratio of the inputs (scale-invariant)
    and is linear in beta, so the sensitivity to beta is constant.
    """
    return beta * float(np.log(z_bar_i / z_bar_j))

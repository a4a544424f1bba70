"""Training-free simulation of the cache hit ratio as a function of the
cache duration.

Models only the per-round random sampling of the public pool and the TTL
expiry rule, so the effect of a candidate duration can be previewed in
milliseconds instead of running the full federated process. The index
stream comes from the same named substream the orchestrator uses, so for
equal (seed, pool, per-round) settings the simulated trace matches the
orchestrator's measured trace exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import sample_round_indices, substream

__all__ = ["HitSimConfig", "simulate_hit_ratio", "PUBLIC_SAMPLING_STREAM"]

PUBLIC_SAMPLING_STREAM = "public-sampling"


@dataclass(frozen=True)
class HitSimConfig:
    pool_size: int
    per_round: int
    duration: int
    rounds: int
    seed: int

    def __post_init__(self) -> None:
        if self.pool_size <= 0 or self.per_round <= 0 or self.rounds <= 0:
            raise ValueError("pool_size, per_round, and rounds must be positive")
        if self.per_round > self.pool_size:
            raise ValueError("per_round cannot exceed pool_size")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")


def simulate_hit_ratio(cfg: HitSimConfig) -> np.ndarray:
    """Per-round cache hit ratios over ``cfg.rounds`` rounds.

    Each round samples ``per_round`` distinct indices uniformly without
    replacement and classifies every index as a miss (no stamp yet, or
    stamp older than the duration; both re-stamp at the current round) or
    a hit (stamp within the duration, left untouched). Duration 0 short-
    circuits to an all-zero trace. Deterministic per seed.
    """
    if cfg.duration == 0:
        return np.zeros(cfg.rounds, dtype=np.float64)
    gen = substream(cfg.seed, PUBLIC_SAMPLING_STREAM)
    stamps = np.full(cfg.pool_size, np.iinfo(np.int64).min // 2, dtype=np.int64)
    stamped = np.zeros(cfg.pool_size, dtype=bool)
    ratios = np.empty(cfg.rounds, dtype=np.float64)
    for t in range(1, cfg.rounds + 1):
        idx = sample_round_indices(gen, cfg.pool_size, cfg.per_round)
        hits = stamped[idx] & (t - stamps[idx] <= cfg.duration)
        misses = idx[~hits]
        stamps[misses] = t
        stamped[misses] = True
        ratios[t - 1] = hits.sum() / cfg.per_round
    return ratios

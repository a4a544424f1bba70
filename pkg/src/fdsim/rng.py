"""Named, seedable PRNG substreams for reproducible simulation.

Every source of randomness in the simulator draws from its own named
substream derived from a root seed, so changing one knob (say, the
participation ratio) never perturbs an unrelated stream (say, the public
subset selection), and results are bit-reproducible at any parallelism
level.
"""
from __future__ import annotations

import zlib

import numpy as np

__all__ = ["substream", "derive_seed", "sample_round_indices"]


def _key_words(path: tuple) -> list[int]:
    words = []
    for part in path:
        if isinstance(part, str):
            words.append(zlib.crc32(part.encode("utf-8")))
        elif isinstance(part, (int, np.integer)):
            words.append(int(part) & 0xFFFFFFFFFFFFFFFF)
        else:
            raise TypeError(f"stream path parts must be str or int, got {part!r}")
    return words


def substream(seed: int, *path: str | int) -> np.random.Generator:
    """Return a Generator for the substream named by ``path`` under ``seed``.

    The same (seed, path) always yields the same stream; distinct paths
    yield statistically independent streams.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *_key_words(path)])
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *path: str | int) -> int:
    """Derive a child 64-bit seed for an independently seeded sub-experiment."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *_key_words(path)])
    return int(ss.generate_state(1, np.uint64)[0])


def sample_round_indices(gen: np.random.Generator, pool_size: int, count: int) -> np.ndarray:
    """Sample ``count`` distinct indices from ``[0, pool_size)``.

    This is the single shared sampler for per-round public-subset
    selection; the cache-hit simulator and the orchestrator both call it
    so their index streams coincide exactly for equal (seed, pool, count).
    """
    if count > pool_size:
        raise ValueError(f"cannot sample {count} distinct indices from a pool of {pool_size}")
    return gen.choice(pool_size, size=count, replace=False).astype(np.int64)

"""Synchronized soft-label caching between the server and clients.

The server keeps a global cache of aggregated soft-labels with insertion
round stamps and a TTL ``duration``; clients keep plain index-to-label
caches. Each round the server broadcasts one signal per sampled index
(NEWLY_CACHED, CACHED, or EXPIRED) plus a FIFO queue of fresh labels, and
every synchronized client replays the signals to reconstruct the full
aggregated batch bit-exactly. Clients that skipped rounds are first
re-synchronized with a catch-up package of the cache writes they missed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .soft_labels import SoftLabelBatch

__all__ = [
    "CacheSignal",
    "GlobalCache",
    "LocalCache",
    "RoundUpdatePackage",
    "CatchUpPackage",
    "CacheProtocolError",
    "ProtocolDesyncError",
    "StaleCacheError",
    "CoverageError",
    "compute_request_list",
    "update_global_cache",
    "assemble_round_batch",
    "build_round_package",
    "update_local_cache",
    "build_catch_up",
    "apply_catch_up",
]


class CacheProtocolError(RuntimeError):
    """Base class for cache synchronization failures."""


class ProtocolDesyncError(CacheProtocolError):
    """The signal stream and the fresh-label queue disagree."""


class StaleCacheError(CacheProtocolError):
    """A CACHED signal referenced an entry this client does not hold."""


class CoverageError(CacheProtocolError):
    """An aggregated batch failed to cover every index it must."""


class CacheSignal(enum.IntEnum):
    """Per-sample cache status broadcast each round; 1 byte on the wire."""

    NEWLY_CACHED = 0
    CACHED = 1
    EXPIRED = 2


@dataclass
class GlobalCache:
    """Server-side store of aggregated soft-labels with round stamps.

    ``entries`` maps a public-pool index to (label row, cached_round).
    An entry is a valid hit at round t while t - cached_round <= duration;
    beyond that it is expired and must be refreshed before reuse.
    """

    duration: int
    entries: dict[int, tuple[np.ndarray, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.duration < 0:
            raise ValueError("cache duration must be non-negative")

    def is_hit(self, index: int, current_round: int) -> bool:
        entry = self.entries.get(index)
        return entry is not None and current_round - entry[1] <= self.duration


@dataclass
class LocalCache:
    """Client-side mirror of the soft-labels the server has shipped it."""

    entries: dict[int, np.ndarray] = field(default_factory=dict)
    last_participated_round: int = -1


@dataclass
class RoundUpdatePackage:
    """Broadcast that lets a synchronized client rebuild one round's batch.

    ``signals`` is parallel to ``indices`` (the round's sampled index
    list); ``fresh_labels`` is the FIFO queue of aggregated labels for the
    non-CACHED positions, in index-list order.
    """

    signals: list[CacheSignal]
    fresh_labels: np.ndarray
    indices: np.ndarray

    def __post_init__(self) -> None:
        fresh_needed = sum(1 for s in self.signals if s != CacheSignal.CACHED)
        if fresh_needed != len(self.fresh_labels):
            raise ProtocolDesyncError(
                f"{fresh_needed} non-CACHED signals but {len(self.fresh_labels)} fresh labels"
            )
        if len(self.signals) != len(self.indices):
            raise ProtocolDesyncError("signals must be parallel to indices")


@dataclass
class CatchUpPackage:
    """Differential cache backfill for a client that skipped rounds.

    ``backfill`` holds the still-live cache writes the client missed;
    ``live_indices`` is the set of indices currently live in the global
    cache, so the client can drop local entries that died while it was
    away. Only the backfill labels are billed on the downlink.
    """

    backfill: dict[int, np.ndarray]
    live_indices: frozenset[int]


def compute_request_list(
    cache: GlobalCache, round_indices: np.ndarray, current_round: int
) -> np.ndarray:
    """Indices of the round's samples that need fresh client soft-labels.

    A sample is requested when it has no cache entry or its entry has
    outlived the duration; order follows ``round_indices``. With
    duration 0 every revisited entry is already expired, so the whole
    round is requested and caching degenerates to the baseline transport.
    """
    requested = [
        int(i) for i in round_indices if not cache.is_hit(int(i), current_round)
    ]
    return np.asarray(requested, dtype=np.int64)


def update_global_cache(
    cache: GlobalCache, aggregated: SoftLabelBatch, current_round: int
) -> list[CacheSignal]:
    """Fold one round's assembled batch into the global cache.

    Per index, in batch order: absent entries are inserted and signalled
    NEWLY_CACHED; entries within the duration are kept untouched and
    signalled CACHED; entries past the duration are replaced by the fresh
    aggregated value (stamped with the current round) and signalled
    EXPIRED. The fresh value for an EXPIRED index travels in the same
    FIFO queue as NEWLY_CACHED ones.
    """
    signals: list[CacheSignal] = []
    for pos, index in enumerate(aggregated.sample_indices):
        i = int(index)
        entry = cache.entries.get(i)
        if entry is None:
            cache.entries[i] = (aggregated.probs[pos].copy(), current_round)
            signals.append(CacheSignal.NEWLY_CACHED)
        elif current_round - entry[1] <= cache.duration:
            signals.append(CacheSignal.CACHED)
        else:
            cache.entries[i] = (aggregated.probs[pos].copy(), current_round)
            signals.append(CacheSignal.EXPIRED)
    return signals


def assemble_round_batch(
    cache: GlobalCache,
    fresh: SoftLabelBatch,
    round_indices: np.ndarray,
    current_round: int,
) -> SoftLabelBatch:
    """Assemble the full per-round batch from fresh labels plus cache hits.

    ``fresh`` must cover exactly the requested indices; every other index
    must be a live cache hit. Raises CoverageError if an index is covered
    by neither, and ProtocolDesyncError if a stale entry would be emitted
    to distillation (the TTL bound).
    """
    fresh_by_index = {int(i): pos for pos, i in enumerate(fresh.sample_indices)}
    rows = np.empty((len(round_indices), fresh.num_classes), dtype=np.float64)
    for pos, index in enumerate(round_indices):
        i = int(index)
        fresh_pos = fresh_by_index.get(i)
        if fresh_pos is not None:
            rows[pos] = fresh.probs[fresh_pos]
            continue
        entry = cache.entries.get(i)
        if entry is None:
            raise CoverageError(f"index {i} is neither fresh nor cached")
        label, cached_round = entry
        if current_round - cached_round > cache.duration:
            raise ProtocolDesyncError(
                f"stale label for index {i} (age {current_round - cached_round} "
                f"> duration {cache.duration}) would reach distillation"
            )
        rows[pos] = label
    return SoftLabelBatch(rows, np.asarray(round_indices, dtype=np.int64))


def build_round_package(
    assembled: SoftLabelBatch, signals: list[CacheSignal]
) -> RoundUpdatePackage:
    """Pack one round's signals and fresh labels for broadcast."""
    fresh_mask = np.fromiter(
        (s != CacheSignal.CACHED for s in signals), dtype=bool, count=len(signals)
    )
    return RoundUpdatePackage(
        signals=list(signals),
        fresh_labels=assembled.probs[fresh_mask].copy(),
        indices=assembled.sample_indices.copy(),
    )


def update_local_cache(cache: LocalCache, pkg: RoundUpdatePackage) -> SoftLabelBatch:
    """Replay a round's signals against the local cache.

    Reconstructs the round's aggregated batch over ``pkg.indices``:
    NEWLY_CACHED pops the queue and stores; CACHED emits the stored entry;
    EXPIRED drops the stored entry, then pops and stores the replacement.
    The queue must be consumed exactly; any mismatch means the client and
    server caches have diverged.
    """
    queue = np.asarray(pkg.fresh_labels, dtype=np.float64)
    if queue.ndim != 2:
        raise ProtocolDesyncError("fresh_labels must be a (count, classes) array")
    pos = 0
    rows = np.empty((len(pkg.indices), queue.shape[1]), dtype=np.float64)
    for row, (signal, index) in enumerate(zip(pkg.signals, pkg.indices)):
        i = int(index)
        if signal == CacheSignal.CACHED:
            stored = cache.entries.get(i)
            if stored is None:
                raise StaleCacheError(
                    f"CACHED signal for index {i} but no local entry; "
                    "client must take the catch-up path first"
                )
            rows[row] = stored
            continue
        if pos >= len(queue):
            raise ProtocolDesyncError("fresh-label queue underflow")
        if signal == CacheSignal.EXPIRED:
            cache.entries.pop(i, None)
        label = queue[pos].copy()
        pos += 1
        cache.entries[i] = label
        rows[row] = label
    if pos != len(queue):
        raise ProtocolDesyncError(
            f"fresh-label queue not fully consumed ({pos} of {len(queue)})"
        )
    return SoftLabelBatch(rows, np.asarray(pkg.indices, dtype=np.int64))


def build_catch_up(
    cache: GlobalCache, client_last_round: int, current_round: int
) -> CatchUpPackage:
    """Collect the cache writes a returning client missed.

    A client that last participated at round r received cache writes only
    through round r - 1 (round r's writes are broadcast at round r + 1),
    so the backfill covers live entries stamped in [r, current_round - 2];
    entries stamped at current_round - 1 travel in the normal round
    package's queue and are not duplicated here.
    """
    reference_round = current_round - 1
    backfill = {
        i: label.copy()
        for i, (label, stamped) in cache.entries.items()
        if client_last_round <= stamped < reference_round
        and reference_round - stamped <= cache.duration
    }
    live = frozenset(
        i
        for i, (_, stamped) in cache.entries.items()
        if reference_round - stamped <= cache.duration
    )
    return CatchUpPackage(backfill=backfill, live_indices=live)


def apply_catch_up(cache: LocalCache, pkg: CatchUpPackage) -> None:
    """Bring a stale local cache back in sync with the global cache.

    Local entries that are no longer live anywhere are dropped; backfill
    entries are inserted or overwritten. Afterwards the normal round
    package replay succeeds with no staleness error.
    """
    dead = [i for i in cache.entries if i not in pkg.live_indices]
    for i in dead:
        del cache.entries[i]
    for i, label in pkg.backfill.items():
        cache.entries[i] = label.copy()

"""Exact per-round, per-direction byte accounting for protocol messages.

The encoding model is fixed per run: float32 probabilities, 64-bit
unsigned sample indices, 1-byte cache signals. Under it, the baseline
full-retransmission uplink at 100 clients x 1000 samples x 10 classes is
exactly 4.80 MB/round. Downlink fresh labels carry their indices in the
caching protocol (the client cannot infer the round's full index list);
in the baseline they travel index-free in the order of the previously
broadcast index list. Monitoring traffic and the one-time public-pool
distribution are excluded.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EncodingModel",
    "RoundCost",
    "CumulativeCosts",
    "cost_uplink",
    "cost_downlink",
    "cumulative",
    "write_comm_csv",
    "COMM_CSV_COLUMNS",
]


@dataclass(frozen=True)
class EncodingModel:
    bytes_per_prob: int = 4
    bytes_per_index: int = 8
    bytes_per_signal: int = 1

    def __post_init__(self) -> None:
        if min(self.bytes_per_prob, self.bytes_per_index, self.bytes_per_signal) <= 0:
            raise ValueError("encoding byte sizes must be positive")

    def label_bytes(self, num_classes: int, with_index: bool = True) -> int:
        """Wire size of one soft-label (optionally with its sample index)."""
        return num_classes * self.bytes_per_prob + (self.bytes_per_index if with_index else 0)


@dataclass(frozen=True)
class RoundCost:
    """One round's transmission bytes, split by direction and message kind."""

    round: int
    uplink_softlabel_bytes: int = 0
    uplink_index_bytes: int = 0
    downlink_softlabel_bytes: int = 0
    downlink_index_bytes: int = 0
    downlink_signal_bytes: int = 0
    downlink_catchup_bytes: int = 0
    cache_hit_ratio: float = 0.0

    @property
    def uplink_bytes(self) -> int:
        return self.uplink_softlabel_bytes + self.uplink_index_bytes

    @property
    def downlink_bytes(self) -> int:
        return (
            self.downlink_softlabel_bytes
            + self.downlink_index_bytes
            + self.downlink_signal_bytes
            + self.downlink_catchup_bytes
        )


def cost_uplink(num_clients: int, requested: int, num_classes: int, enc: EncodingModel) -> int:
    """Bytes for all clients to upload soft-labels for the requested samples."""
    if num_clients < 0 or requested < 0:
        raise ValueError("counts must be non-negative")
    return num_clients * requested * enc.label_bytes(num_classes)


def cost_downlink(
    num_clients: int,
    request_list_len: int,
    fresh_count: int,
    signal_count: int,
    catch_up_entries_per_client: list[int],
    num_classes: int,
    enc: EncodingModel,
) -> int:
    """Bytes for one round's broadcast under the caching protocol.

    Every participating client receives the request list (indices), the
    fresh-label queue (labels with indices), and one signal per sampled
    index; stale clients additionally receive their catch-up backfill
    (labels with indices).
    """
    if min(num_clients, request_list_len, fresh_count, signal_count) < 0:
        raise ValueError("counts must be non-negative")
    per_client = (
        request_list_len * enc.bytes_per_index
        + fresh_count * enc.label_bytes(num_classes)
        + signal_count * enc.bytes_per_signal
    )
    catch_up = sum(catch_up_entries_per_client) * enc.label_bytes(num_classes)
    return num_clients * per_client + catch_up


@dataclass
class CumulativeCosts:
    """Prefix sums of per-round costs; monotone non-decreasing."""

    uplink_bytes: np.ndarray
    downlink_bytes: np.ndarray

    @property
    def total_uplink(self) -> int:
        return int(self.uplink_bytes[-1]) if len(self.uplink_bytes) else 0

    @property
    def total_downlink(self) -> int:
        return int(self.downlink_bytes[-1]) if len(self.downlink_bytes) else 0


def cumulative(costs: list[RoundCost]) -> CumulativeCosts:
    up = np.cumsum([c.uplink_bytes for c in costs]).astype(np.int64)
    down = np.cumsum([c.downlink_bytes for c in costs]).astype(np.int64)
    return CumulativeCosts(up, down)


COMM_CSV_COLUMNS = [
    "round",
    "uplink_bytes",
    "downlink_bytes",
    "uplink_softlabel_bytes",
    "uplink_index_bytes",
    "downlink_softlabel_bytes",
    "downlink_index_bytes",
    "downlink_signal_bytes",
    "downlink_catchup_bytes",
    "cache_hit_ratio",
]


def write_comm_csv(path: str, costs: list[RoundCost]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COMM_CSV_COLUMNS)
        for c in costs:
            writer.writerow(
                [
                    c.round,
                    c.uplink_bytes,
                    c.downlink_bytes,
                    c.uplink_softlabel_bytes,
                    c.uplink_index_bytes,
                    c.downlink_softlabel_bytes,
                    c.downlink_index_bytes,
                    c.downlink_signal_bytes,
                    c.downlink_catchup_bytes,
                    repr(float(c.cache_hit_ratio)),
                ]
            )

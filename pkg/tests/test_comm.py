import numpy as np
import pytest

from fdsim.comm import (
    COMM_CSV_COLUMNS,
    EncodingModel,
    RoundCost,
    cost_downlink,
    cost_uplink,
    cumulative,
    write_comm_csv,
)

ENC = EncodingModel()
MB = 1_000_000


class TestUplink:
    def test_full_cache_hit_costs_nothing(self):
        assert cost_uplink(100, 0, 10, ENC) == 0

    def test_baseline_full_retransmission_is_4_80_mb(self):
        assert cost_uplink(100, 1000, 10, ENC) == 4_800_000

    def test_partial_request_scales_linearly(self):
        per_sample = 10 * ENC.bytes_per_prob + ENC.bytes_per_index
        assert cost_uplink(100, 285, 10, ENC) == 100 * 285 * per_sample
        assert cost_uplink(100, 285, 10, ENC) / MB == pytest.approx(1.368, abs=1e-9)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            cost_uplink(-1, 10, 10, ENC)


class TestDownlink:
    def test_cold_round_is_5_70_mb(self):
        total = cost_downlink(100, 1000, 1000, 1000, [], 10, ENC)
        assert total == 100 * (8000 + 48000 + 1000)
        assert total / MB == pytest.approx(5.70)

    def test_zero_clients_cost_nothing(self):
        assert cost_downlink(0, 1000, 1000, 1000, [], 10, ENC) == 0

    def test_all_cached_round_carries_only_indices_and_signals(self):
        total = cost_downlink(50, 200, 0, 1000, [], 10, ENC)
        assert total == 50 * (200 * 8 + 1000 * 1)

    def test_catch_up_entries_billed_per_stale_client(self):
        base = cost_downlink(10, 100, 50, 100, [], 10, ENC)
        with_catchup = cost_downlink(10, 100, 50, 100, [30, 0, 12], 10, ENC)
        assert with_catchup - base == (30 + 12) * (10 * 4 + 8)


class TestRoundCost:
    def test_breakdown_sums_to_totals(self):
        cost = RoundCost(
            round=3,
            uplink_softlabel_bytes=400,
            uplink_index_bytes=80,
            downlink_softlabel_bytes=120,
            downlink_index_bytes=64,
            downlink_signal_bytes=10,
            downlink_catchup_bytes=48,
        )
        assert cost.uplink_bytes == 480
        assert cost.downlink_bytes == 242


class TestCumulative:
    def test_empty_is_zero(self):
        totals = cumulative([])
        assert totals.total_uplink == 0
        assert totals.total_downlink == 0

    def test_constant_rounds_accumulate(self):
        costs = [
            RoundCost(round=t, uplink_softlabel_bytes=MB, downlink_softlabel_bytes=MB)
            for t in range(1, 11)
        ]
        totals = cumulative(costs)
        assert totals.total_uplink == 10 * MB
        assert np.all(np.diff(totals.uplink_bytes) >= 0)

    def test_baseline_3000_round_structure(self):
        # 4.80 MB up and (1000 indices + 1000 index-free labels) down per round.
        up = cost_uplink(100, 1000, 10, ENC)
        down = 100 * (1000 * ENC.bytes_per_index + 1000 * 10 * ENC.bytes_per_prob)
        costs = [
            RoundCost(
                round=t,
                uplink_softlabel_bytes=100 * 1000 * 40,
                uplink_index_bytes=100 * 1000 * 8,
                downlink_softlabel_bytes=100 * 1000 * 40,
                downlink_index_bytes=100 * 1000 * 8,
            )
            for t in range(1, 3001)
        ]
        totals = cumulative(costs)
        assert totals.total_uplink == 3000 * up == 3000 * int(4.8 * MB)
        assert totals.total_downlink == 3000 * down == 3000 * int(4.8 * MB)


class TestCsv:
    def test_header_and_row_count(self, tmp_path):
        path = tmp_path / "comm.csv"
        costs = [RoundCost(round=t, cache_hit_ratio=0.5) for t in range(1, 4)]
        write_comm_csv(str(path), costs)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(COMM_CSV_COLUMNS)
        assert len(lines) == 4

import numpy as np
import pytest

from fdsim.cli import main
from fdsim.config import ConfigError, dump_config, load_config, parse_config

SMOKE_CONFIG = """
[experiment]
method = SCARLET
rounds = 10
seed = 11
cache_duration = 4
per_round_public = 30
participation_ratio = 1.0
validation_fraction = 0.1
eval_every = 5

[task]
num_classes = 4
feature_dim = 6
private_pool_size = 200
public_pool_size = 240
test_pool_size = 100
seed = 1

[partition]
num_clients = 4
dirichlet_alpha = 0.5
seed = 2

[train]
local_epochs = 2
distill_epochs = 1
seed = 3

[aggregation]
kind = enhanced_era
beta = 1.5
"""


@pytest.fixture
def smoke_config(tmp_path):
    path = tmp_path / "smoke.ini"
    path.write_text(SMOKE_CONFIG)
    return path


class TestConfigParsing:
    def test_round_trip_through_dump(self):
        cfg = parse_config(SMOKE_CONFIG)
        assert parse_config(dump_config(cfg)) == cfg

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("[experiment]\nrunds = 3\n")

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[experimnt]\nrounds = 3\n")

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("[experiment]\nrounds = soon\n")

    def test_missing_file_names_path(self):
        with pytest.raises(ConfigError, match="no/such/file.ini"):
            load_config("no/such/file.ini")

    def test_defaults_without_sections(self):
        cfg = parse_config("")
        assert cfg.method == "SCARLET"
        assert cfg.aggregation.kind == "plain_mean"


class TestRunCommand:
    def test_missing_config_exits_1_and_names_path(self, tmp_path, capsys):
        code = main(["run", "--config", str(tmp_path / "absent.ini"), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "absent.ini" in capsys.readouterr().err

    def test_smoke_run_writes_exact_row_counts(self, smoke_config, tmp_path):
        out = tmp_path / "run1"
        assert main(["run", "--config", str(smoke_config), "--out", str(out)]) == 0
        metrics = (out / "metrics.csv").read_text().splitlines()
        comm = (out / "comm.csv").read_text().splitlines()
        assert len(metrics) == 11  # header + 10 rounds
        assert len(comm) == 11
        assert (out / "summary.txt").exists()
        assert (out / "config_echo.ini").exists()

    def test_same_seed_twice_is_byte_identical(self, smoke_config, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", str(smoke_config), "--out", str(out1)]) == 0
        assert main(["run", "--config", str(smoke_config), "--out", str(out2)]) == 0
        assert (out1 / "metrics.csv").read_bytes() == (out2 / "metrics.csv").read_bytes()
        assert (out1 / "comm.csv").read_bytes() == (out2 / "comm.csv").read_bytes()

    def test_method_override(self, smoke_config, tmp_path):
        out = tmp_path / "ind"
        assert main([
            "run", "--config", str(smoke_config), "--out", str(out), "--method", "INDIVIDUAL",
        ]) == 0
        rows = (out / "comm.csv").read_text().splitlines()[1:]
        assert all(row.split(",")[1] == "0" for row in rows)

    def test_bad_method_override_exits_1(self, smoke_config, tmp_path, capsys):
        code = main([
            "run", "--config", str(smoke_config), "--out", str(tmp_path / "x"), "--method", "FEDAVG",
        ])
        assert code == 1

    def test_desync_abort_exits_2_with_dump(self, smoke_config, tmp_path, capsys, monkeypatch):
        import fdsim.cli as cli
        from fdsim.orchestrator import DesyncAbort

        def boom(cfg, out_dir=None, max_workers=None):
            raise DesyncAbort("round 3, client 1: forced", {"round": 3, "client": 1})

        monkeypatch.setattr(cli, "run_experiment", boom)
        out = tmp_path / "crash"
        code = main(["run", "--config", str(smoke_config), "--out", str(out)])
        assert code == 2
        assert "desync_dump.txt" in capsys.readouterr().err
        dump = (out / "desync_dump.txt").read_text()
        assert "round: 3" in dump and "client: 1" in dump


class TestCachesimCommand:
    def test_zero_duration_column_is_all_zero(self, tmp_path):
        out = tmp_path / "sim"
        assert main([
            "cachesim", "--pool", "500", "--per-round", "50", "--durations", "0",
            "--rounds", "100", "--seed", "5", "--out", str(out),
        ]) == 0
        rows = (out / "hit_ratio_D0.csv").read_text().splitlines()
        assert rows[0] == "round,hit_ratio"
        assert all(row.endswith(",0.0") for row in rows[1:])
        assert len(rows) == 101

    def test_multiple_durations_write_multiple_files(self, tmp_path):
        out = tmp_path / "sim2"
        assert main([
            "cachesim", "--pool", "500", "--per-round", "50", "--durations", "50,200",
            "--rounds", "200", "--seed", "5", "--out", str(out),
        ]) == 0
        assert (out / "hit_ratio_D50.csv").exists()
        assert (out / "hit_ratio_D200.csv").exists()

    def test_long_duration_reaches_near_full_hits(self, tmp_path):
        out = tmp_path / "sim3"
        assert main([
            "cachesim", "--pool", "2000", "--per-round", "200", "--durations", "200",
            "--rounds", "1000", "--seed", "0", "--out", str(out),
        ]) == 0
        rows = (out / "hit_ratio_D200.csv").read_text().splitlines()[1:]
        ratios = np.array([float(r.split(",")[1]) for r in rows])
        assert ratios.max() >= 0.99

    def test_invalid_arguments_exit_1(self, tmp_path, capsys):
        code = main([
            "cachesim", "--pool", "10", "--per-round", "50", "--durations", "5",
            "--out", str(tmp_path / "bad"),
        ])
        assert code == 1


class TestSweepCommand:
    def test_duration_sweep_writes_summary_rows(self, smoke_config, tmp_path):
        out = tmp_path / "sweep"
        assert main([
            "sweep", "--config", str(smoke_config), "--axis", "duration",
            "--values", "0,4", "--out", str(out),
        ]) == 0
        rows = (out / "sweep_summary.csv").read_text().splitlines()
        assert rows[0].startswith("value,final_server_accuracy")
        assert len(rows) == 3
        assert (out / "duration=0" / "metrics.csv").exists()
        assert (out / "duration=4" / "metrics.csv").exists()

    def test_empty_values_exit_1(self, smoke_config, tmp_path, capsys):
        code = main([
            "sweep", "--config", str(smoke_config), "--axis", "beta",
            "--values", " ", "--out", str(tmp_path / "s"),
        ])
        assert code == 1

    def test_unknown_axis_exit_1(self, smoke_config, tmp_path):
        code = main([
            "sweep", "--config", str(smoke_config), "--axis", "epochs",
            "--values", "1,2", "--out", str(tmp_path / "s"),
        ])
        assert code == 1

"""Command-line front end: run experiments, sweep a parameter axis, or
preview cache-hit ratios, emitting CSVs and a run summary.

Exit codes: 0 on success, 1 on configuration errors, 2 when a run aborts
on a protocol desynchronization (a diagnostic dump path is printed).
The FDSIM_THREADS environment variable caps per-round client parallelism
(0 or unset means auto).
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace

from .cache_sim import HitSimConfig, simulate_hit_ratio
from .comm import cumulative
from .config import ConfigError, dump_config, load_config
from .orchestrator import (
    DesyncAbort,
    ExperimentConfig,
    final_evaluated,
    run_experiment,
)
from .rng import derive_seed

__all__ = ["main", "cmd_run", "cmd_cachesim", "cmd_sweep"]

SWEEP_AXES = ("beta", "duration", "alpha", "participation")


def _apply_overrides(cfg: ExperimentConfig, seed: int | None, method: str | None) -> ExperimentConfig:
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if method is not None:
        cfg = replace(cfg, method=method)
    return cfg


def _write_desync_dump(out_dir: str, err: DesyncAbort) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "desync_dump.txt")
    with open(path, "w") as fh:
        fh.write(f"error: {err}\n")
        for key, value in err.diagnostics.items():
            fh.write(f"{key}: {value}\n")
    return path


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = _apply_overrides(load_config(args.config), args.seed, args.method)
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    try:
        run_experiment(cfg, out_dir=args.out)
    except DesyncAbort as err:
        path = _write_desync_dump(args.out, err)
        print(f"error: protocol desynchronization; diagnostics at {path}", file=sys.stderr)
        return 2
    with open(os.path.join(args.out, "config_echo.ini"), "w") as fh:
        fh.write(dump_config(cfg))
    return 0


def _parse_values(text: str) -> list[str]:
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise ConfigError("values list is empty")
    return values


def cmd_cachesim(args: argparse.Namespace) -> int:
    try:
        durations = [int(v) for v in _parse_values(args.durations)]
        configs = [
            HitSimConfig(
                pool_size=args.pool,
                per_round=args.per_round,
                duration=d,
                rounds=args.rounds,
                seed=args.seed,
            )
            for d in durations
        ]
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    os.makedirs(args.out, exist_ok=True)
    for cfg in configs:
        ratios = simulate_hit_ratio(cfg)
        path = os.path.join(args.out, f"hit_ratio_D{cfg.duration}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["round", "hit_ratio"])
            for t, ratio in enumerate(ratios, start=1):
                writer.writerow([t, repr(float(ratio))])
    return 0


def _sweep_config(cfg: ExperimentConfig, axis: str, raw: str) -> ExperimentConfig:
    value = float(raw)
    seed = derive_seed(cfg.seed, "sweep", axis, raw)
    if axis == "beta":
        from .aggregation import AggregationPolicy

        return replace(cfg, aggregation=AggregationPolicy.enhanced_era(value), seed=seed)
    if axis == "duration":
        return replace(cfg, cache_duration=int(value), seed=seed)
    if axis == "alpha":
        return replace(cfg, partition=replace(cfg.partition, dirichlet_alpha=value), seed=seed)
    if axis == "participation":
        return replace(cfg, participation_ratio=value, seed=seed)
    raise ConfigError(f"unknown sweep axis {axis!r} (choose from {SWEEP_AXES})")


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        base = _apply_overrides(load_config(args.config), args.seed, args.method)
        if args.axis not in SWEEP_AXES:
            raise ConfigError(f"unknown sweep axis {args.axis!r} (choose from {SWEEP_AXES})")
        values = _parse_values(args.values)
        configs = [(v, _sweep_config(base, args.axis, v)) for v in values]
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    rows = []
    for raw, cfg in configs:
        sub_dir = os.path.join(args.out, f"{args.axis}={raw}")
        try:
            state = run_experiment(cfg, out_dir=sub_dir)
        except DesyncAbort as err:
            path = _write_desync_dump(sub_dir, err)
            print(f"error: protocol desynchronization; diagnostics at {path}", file=sys.stderr)
            return 2
        totals = cumulative(state.costs)
        final = final_evaluated(state)
        rows.append(
            [
                raw,
                repr(final.server_test_accuracy) if final else "",
                repr(final.mean_client_test_accuracy) if final else "",
                totals.total_uplink,
                totals.total_downlink,
            ]
        )
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "sweep_summary.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "value",
                "final_server_accuracy",
                "final_client_accuracy",
                "cumulative_uplink_bytes",
                "cumulative_downlink_bytes",
            ]
        )
        writer.writerows(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdsim",
        description="Deterministic simulator for distillation-based federated learning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a config file")
    run_p.add_argument("--config", required=True, help="path to an INI config file")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--seed", type=int, default=None, help="override the experiment seed")
    run_p.add_argument("--method", default=None, help="override the method (SCARLET/DSFL/INDIVIDUAL)")
    run_p.set_defaults(func=cmd_run)

    sim_p = sub.add_parser("cachesim", help="simulate cache hit ratios per duration")
    sim_p.add_argument("--pool", type=int, required=True, help="public pool size")
    sim_p.add_argument("--per-round", type=int, required=True, dest="per_round")
    sim_p.add_argument("--durations", required=True, help="comma-separated durations")
    sim_p.add_argument("--rounds", type=int, default=2000)
    sim_p.add_argument("--seed", type=int, default=0)
    sim_p.add_argument("--out", required=True, help="output directory")
    sim_p.set_defaults(func=cmd_cachesim)

    sweep_p = sub.add_parser("sweep", help="run one experiment per axis value")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--axis", required=True, help="|".join(SWEEP_AXES))
    sweep_p.add_argument("--values", required=True, help="comma-separated values")
    sweep_p.add_argument("--out", required=True)
    sweep_p.add_argument("--seed", type=int, default=None)
    sweep_p.add_argument("--method", default=None)
    sweep_p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

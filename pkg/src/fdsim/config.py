"""Experiment configuration files: INI-style sections mirroring the
config dataclasses, parsed strictly (unknown sections or keys are errors,
so typos fail fast instead of silently running defaults).
"""
from __future__ import annotations

import configparser
import os

from .aggregation import AggregationPolicy
from .comm import EncodingModel
from .data import PartitionSpec, SyntheticTaskSpec
from .learner import TrainConfig
from .orchestrator import ExperimentConfig

__all__ = ["ConfigError", "load_config", "parse_config", "dump_config"]


class ConfigError(ValueError):
    """A configuration file could not be read or validated."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_SCHEMA: dict[str, dict[str, type | object]] = {
    "experiment": {
        "method": str,
        "rounds": int,
        "seed": int,
        "cache_duration": int,
        "per_round_public": int,
        "participation_ratio": float,
        "validation_fraction": float,
        "eval_every": int,
        "transport_only": _parse_bool,
    },
    "task": {
        "num_classes": int,
        "feature_dim": int,
        "private_pool_size": int,
        "public_pool_size": int,
        "test_pool_size": int,
        "class_center_separation": float,
        "noise_sigma": float,
        "public_shift": float,
        "seed": int,
    },
    "partition": {
        "num_clients": int,
        "dirichlet_alpha": float,
        "seed": int,
    },
    "train": {
        "local_lr": float,
        "distill_lr": float,
        "local_epochs": int,
        "distill_epochs": int,
        "batch_size": int,
        "seed": int,
    },
    "aggregation": {
        "kind": str,
        "temperature": float,
        "beta": float,
    },
    "encoding": {
        "bytes_per_prob": int,
        "bytes_per_index": int,
        "bytes_per_signal": int,
    },
}


def _section_kwargs(parser: configparser.ConfigParser, section: str) -> dict:
    if not parser.has_section(section):
        return {}
    schema = _SCHEMA[section]
    kwargs = {}
    for key, raw in parser.items(section):
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        try:
            kwargs[key] = schema[key](raw)
        except ValueError as err:
            raise ConfigError(f"bad value for {section}.{key}: {err}") from err
    return kwargs


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """Parse configuration text into an ExperimentConfig."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as err:
        raise ConfigError(f"{source}: {err}") from err
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}] in {source}")

    task = SyntheticTaskSpec(**_section_kwargs(parser, "task"))
    partition_kwargs = _section_kwargs(parser, "partition")
    train = TrainConfig(**_section_kwargs(parser, "train"))
    agg_kwargs = _section_kwargs(parser, "aggregation")
    encoding = EncodingModel(**_section_kwargs(parser, "encoding"))
    experiment_kwargs = _section_kwargs(parser, "experiment")

    try:
        partition = PartitionSpec(**partition_kwargs) if partition_kwargs else PartitionSpec(20, 0.05)
        aggregation = (
            AggregationPolicy(**agg_kwargs) if agg_kwargs else AggregationPolicy.plain_mean()
        )
        return ExperimentConfig(
            task=task,
            partition=partition,
            train=train,
            aggregation=aggregation,
            encoding=encoding,
            **experiment_kwargs,
        )
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{source}: {err}") from err


def load_config(path: str) -> ExperimentConfig:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        return parse_config(fh.read(), source=path)


def dump_config(cfg: ExperimentConfig) -> str:
    """Serialize a config back to the INI format ``parse_config`` accepts."""
    agg_lines = [f"kind = {cfg.aggregation.kind}"]
    if cfg.aggregation.temperature is not None:
        agg_lines.append(f"temperature = {cfg.aggregation.temperature!r}")
    if cfg.aggregation.beta is not None:
        agg_lines.append(f"beta = {cfg.aggregation.beta!r}")
    return "\n".join(
        [
            "[experiment]",
            f"method = {cfg.method}",
            f"rounds = {cfg.rounds}",
            f"seed = {cfg.seed}",
            f"cache_duration = {cfg.cache_duration}",
            f"per_round_public = {cfg.per_round_public}",
            f"participation_ratio = {cfg.participation_ratio!r}",
            f"validation_fraction = {cfg.validation_fraction!r}",
            f"eval_every = {cfg.eval_every}",
            f"transport_only = {cfg.transport_only}",
            "",
            "[task]",
            f"num_classes = {cfg.task.num_classes}",
            f"feature_dim = {cfg.task.feature_dim}",
            f"private_pool_size = {cfg.task.private_pool_size}",
            f"public_pool_size = {cfg.task.public_pool_size}",
            f"test_pool_size = {cfg.task.test_pool_size}",
            f"class_center_separation = {cfg.task.class_center_separation!r}",
            f"noise_sigma = {cfg.task.noise_sigma!r}",
            f"public_shift = {cfg.task.public_shift!r}",
            f"seed = {cfg.task.seed}",
            "",
            "[partition]",
            f"num_clients = {cfg.partition.num_clients}",
            f"dirichlet_alpha = {cfg.partition.dirichlet_alpha!r}",
            f"seed = {cfg.partition.seed}",
            "",
            "[train]",
            f"local_lr = {cfg.train.local_lr!r}",
            f"distill_lr = {cfg.train.distill_lr!r}",
            f"local_epochs = {cfg.train.local_epochs}",
            f"distill_epochs = {cfg.train.distill_epochs}",
            f"batch_size = {cfg.train.batch_size}",
            f"seed = {cfg.train.seed}",
            "",
            "[aggregation]",
            *agg_lines,
            "",
            "[encoding]",
            f"bytes_per_prob = {cfg.encoding.bytes_per_prob}",
            f"bytes_per_index = {cfg.encoding.bytes_per_index}",
            f"bytes_per_signal = {cfg.encoding.bytes_per_signal}",
            "",
        ]
    )

# SPDX-License-Identifier: Apache-2.0
"""Sensing-aided mmWave drone beam prediction."""

import json

from ._beampred import (
    BeampredError,
    Codebook,
    Config,
    ConfigError,
    DataError,
    Model,
    NumericError,
    RawData,
    build_codebook,
    config_keys,
    downsample_power,
    load_config,
    load_model,
    los_power_vector,
    optimal_beam,
    overhead_ratio,
    read_csv,
    run_cli,
    simulate,
    steering_vector,
    topk_accuracy,
    topk_beams,
    train,
)
from . import _beampred

__version__ = "0.1.0"

FEATURE_SETS = ("position", "position-height", "position-height-distance", "visual")


def make_config(**overrides):
    """Config with dotted keys given as keyword arguments, e.g. train__epochs=5."""
    cfg = Config()
    for key, value in overrides.items():
        cfg.set(key.replace("__", "."), _format(value))
    return cfg


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


def evaluate(model, data, ks=(1, 2, 3, 5)):
    """Report dict for a trained model on the test split of `data`."""
    return json.loads(_beampred.evaluate_json(model, data, list(ks)))


def compare(data, config, seed=0):
    """One report dict per feature set, trained on a shared split."""
    return json.loads(_beampred.compare_json(data, config, seed))["reports"]


__all__ = [name for name in dir() if not name.startswith("_")]

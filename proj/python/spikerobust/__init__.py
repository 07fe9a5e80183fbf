"""Spiking network training and input perturbation experiments."""

import json as _json

from ._core import (
    Error,
    Network,
    Sample,
    default_config,
    encode_xor,
    perturb,
    spike_response,
    spike_response_derivative,
    train,
)
from . import _core

__version__ = "0.1.0"


def run_experiment(config, data_dir):
    """Run a config (dict of key/value strings) and return the report dict."""
    return _json.loads(_core.run_experiment({k: str(v) for k, v in config.items()}, str(data_dir)))


def reproduce(table, data_dir, seed=None, repetitions=None, subsample=False, jobs=1):
    return _json.loads(_core.reproduce(table, str(data_dir), seed, repetitions, subsample, jobs))

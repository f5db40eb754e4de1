"""Python bindings for the hocm simulator and criterion engine."""

import json

from . import _core
from ._core import (
    AlgebraError,
    ConfigError,
    CriteriaError,
    QuadratureError,
    commutator,
    normal_order,
    ppt_min_eig,
    required_pump_cutoff,
)

__all__ = [
    "AlgebraError",
    "ConfigError",
    "CriteriaError",
    "QuadratureError",
    "builtin_config",
    "builtin_names",
    "commutator",
    "normal_order",
    "ppt_min_eig",
    "required_pump_cutoff",
    "scan",
    "verify",
]


def builtin_names():
    return list(_core.builtin_names())


def builtin_config(name):
    """Scenario config of a builtin as a dict, editable and accepted by scan()."""
    return json.loads(_core.builtin_config_json(name))


def _config_text(config):
    if isinstance(config, str):
        return _core.builtin_config_json(config)
    return json.dumps(config)


def scan(config, refine=True, threads=0):
    """Sweep a builtin name or config dict; returns rows, thresholds and per-point diagnostics."""
    return json.loads(_core.scan_json(_config_text(config), refine, threads))


def verify(config, fast=False, threads=0):
    return json.loads(_core.verify_json(_config_text(config), fast, threads))

"""Tests for the default resolver in ``cli/conventions.py``.

Pure-function tests: no I/O and no env reads. Every shipped config under
``configs/`` must resolve, defaults fill every omission, and explicit
values win in the documented order.
"""

from __future__ import annotations

import json
from copy import deepcopy
from pathlib import Path
from typing import Any, Dict

import pytest

from discrete_interaction.cli.conventions import DEFAULT_PARAMETERS, ResolvedExperiment, resolve
from discrete_interaction.utils.constants import Experiment, OutputFormat


REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIGS_DIR = REPO_ROOT / "configs"
CONFIGS = sorted(p.name for p in CONFIGS_DIR.glob("*.json"))


def _load(name: str) -> Dict[str, Any]:
    return json.loads((CONFIGS_DIR / name).read_text(encoding="utf-8"))


def test_one_shipped_config_per_experiment():
    assert sorted(Path(name).stem for name in CONFIGS) == sorted(Experiment.get_all_experiments())


@pytest.mark.parametrize("name", CONFIGS)
def test_shipped_config_resolves(name):
    raw = _load(name)
    resolved = resolve(raw)
    assert isinstance(resolved, ResolvedExperiment)
    assert resolved.experiment == Path(name).stem
    assert set(resolved.parameters) == set(DEFAULT_PARAMETERS[resolved.experiment])
    for key, value in (raw.get("parameters") or {}).items():
        assert resolved.parameters[key] == value


def test_bare_config_gets_every_default():
    resolved = resolve({"experiment": Experiment.UNCERTAINTY})
    assert resolved.parameters == DEFAULT_PARAMETERS[Experiment.UNCERTAINTY]
    assert resolved.output_dir == "results"
    assert resolved.format == OutputFormat.CSV


def test_config_parameters_win():
    resolved = resolve({"experiment": Experiment.PACKET_SPREAD, "parameters": {"dt": 0.004}})
    assert resolved.parameters["dt"] == 0.004
    assert resolved.parameters["sigma0"] == DEFAULT_PARAMETERS[Experiment.PACKET_SPREAD]["sigma0"]


def test_resolve_does_not_alias_defaults():
    before = deepcopy(DEFAULT_PARAMETERS)
    resolved = resolve({"experiment": Experiment.KERNEL_CONSISTENCY})
    resolved.parameters["widths"].append(1)
    raw = {"experiment": Experiment.DIRAC_MODES, "parameters": {"omegas": [1.0]}}
    resolve(raw).parameters["omegas"].append(2.0)
    assert DEFAULT_PARAMETERS == before
    assert raw["parameters"]["omegas"] == [1.0]


@pytest.mark.parametrize(
    "config,out,fmt,expected_dir,expected_format",
    [
        ({}, None, None, "env-dir", "json"),
        ({"output_dir": "cfg-dir", "format": "csv"}, None, None, "cfg-dir", "csv"),
        ({"output_dir": "cfg-dir", "format": "csv"}, "flag-dir", "json", "flag-dir", "json"),
        ({"format": "csv"}, "flag-dir", None, "flag-dir", "csv"),
    ],
)
def test_output_precedence(config, out, fmt, expected_dir, expected_format):
    body = {"experiment": Experiment.DIRAC_MODES, **config}
    resolved = resolve(body, out=out, fmt=fmt, default_output_dir="env-dir", default_format="json")
    assert resolved.output_dir == expected_dir
    assert resolved.format == expected_format


def test_null_parameters_mean_defaults():
    resolved = resolve({"experiment": Experiment.FIELD_CCR, "parameters": None})
    assert resolved.parameters == DEFAULT_PARAMETERS[Experiment.FIELD_CCR]

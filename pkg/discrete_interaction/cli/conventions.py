"""Translate a validated experiment config into a fully resolved run.

The schema (``schema/experiment.v1.json``) defines what a config may say;
this module defines what every omission means. A config naming only
``experiment: uncertainty`` runs with::

    parameters  = DEFAULT_PARAMETERS["uncertainty"]
    output_dir  = --out, else config output_dir, else DI_OUTPUT_DIR ("results")
    format      = --format, else config format, else DI_OUTPUT_FORMAT ("csv")

The function is pure (no I/O, no env reads); the caller passes the
environment-derived fallbacks explicitly.

Pre-condition: the input dict has already passed ``jsonschema`` validation.
``resolve()`` does not re-validate.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from ..utils.constants import Experiment, OutputFormat


# ---------------------------------------------------------------------------
# Shared parameter blocks
# ---------------------------------------------------------------------------

_FIELD_MODE_COMMON: Dict[str, Any] = {
    "cutoff": 20,
    "levels": 6,
    "commutator_cutoff": 6,
    "heisenberg_cutoff": 10,
    "heisenberg_step": 2.5e-4,
    "grid_n": 256,
    "grid_x_max": 10.0,
    "propagator_T": 1.0,
    "propagator_slices": 256,
    "x0": 1.0,
    "hermite_orders": [4, 8, 16],
    "hermite_shift": 1.0,
}


# ---------------------------------------------------------------------------
# Default parameters per experiment. Single source of truth for the CLI,
# the sample configs under ``configs/`` and the tests.
# ---------------------------------------------------------------------------

DEFAULT_PARAMETERS: Dict[str, Dict[str, Any]] = {
    Experiment.GPROB_BORN: {
        "seed": 0,
        "triples": 1000,
        "states": 1000,
        "pair_spaces": 100,
        "labels": 5,
        "pair_shape": [3, 4],
    },
    Experiment.UNCERTAINTY: {
        "hbar": None,
        "n": 256,
        "x_max": 40.0,
        "sigmas": [2.0, 3.0, 4.0],
        "random_states": 500,
        "random_n": 64,
        "seed": 0,
        "convergence_n": [64, 128],
        "convergence_mode": 3,
        "generator_n": 64,
        "charge_q": 2,
        "ladder_modes": 3,
    },
    Experiment.KERNEL_CONSISTENCY: {
        "hbar": None,
        "n": 1024,
        "x_max": 512.0,
        "sigma": 48.0,
        "mass": 1.0,
        "T": 100.0,
        "dt": 0.2,
        "widths": [16, 8, 4, 2],
        "min_order": 2.0,
        "min_ratio": 3.0,
        "roundtrip_masses": [0.5, 1.0, 2.0, 5.0],
        "rotation_r0": 1.0,
        "rotation_steps": 4000,
        "norm_steps": 1000,
    },
    Experiment.PACKET_SPREAD: {
        "hbar": None,
        "mass": 1.0,
        "n": 1024,
        "x_max": 100.0,
        "sigma0": 2.0,
        "dt": 0.008,
        "width_samples": 10,
        "norm_steps": 10000,
    },
    Experiment.STATIONARY_STATES: {
        "hbar": None,
        "mass": 1.0,
        "omega": 1.0,
        "n": 512,
        "x_max": 10.0,
        "levels": 6,
        "gauge_shift": 3.7,
        "well_width": 10.0,
        "well_margin": 1.0,
        "well_n": 400,
        "well_levels": 4,
        "cube_n": 16,
        "cube_x_max": 6.0,
    },
    Experiment.EHRENFEST: {
        "hbar": None,
        "mass": 1.0,
        "n": 256,
        "x_max": 10.0,
        "sigma": 1.0,
        "k0": 1.0,
        "slope": 0.5,
        "omega": 1.0,
        "x0": 2.0,
        "T": 2.0,
        "dt": 1e-3,
        "sample_every": 10,
    },
    Experiment.PROPAGATOR_COMPARE: {
        "hbar": None,
        "mass": 1.0,
        "n": 512,
        "x_max": 40.0,
        "sigma0": 2.0,
        "T": 4.0,
        "n_slices": 256,
        "harmonic_n": 256,
        "harmonic_x_max": 10.0,
        "omega": 1.0,
        "x0": 2.0,
        "harmonic_T": 1.0,
        "slices": [4, 8, 16, 32],
    },
    Experiment.LEAST_ACTION: {
        "mass": 1.0,
        "T": 1.0,
        "x1": 0.5,
        "x2": 1.5,
        "knots": 2001,
        "slope": 0.5,
        "omega": 1.0,
        "hbar_scan": [1.0, 0.1, 0.01, 0.001],
    },
    Experiment.KG_MODES: {
        "mass": 1.0,
        "k_list": [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]],
        **_FIELD_MODE_COMMON,
    },
    Experiment.MAXWELL_MODES: {
        "mass": 0.0,
        "k_list": [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [1.0, 1.0, 1.0]],
        **_FIELD_MODE_COMMON,
    },
    Experiment.PROCA_MODES: {
        "mass": 0.5,
        "k_list": [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 2.0]],
        **_FIELD_MODE_COMMON,
    },
    Experiment.FIELD_CCR: {
        "spacing": 1.0,
        "cutoff": 4,
        "mass": 1.0,
        "kg_sites": 3,
        "maxwell_sites": 2,
    },
    Experiment.FERMI_OSCILLATOR: {
        "omegas": [0.5, 1.0, 2.0],
        "times": [0.3, 1.1],
    },
    Experiment.DIRAC_MODES: {
        "omega": 1.0,
        "omegas": [0.5, 1.0, 1.5],
    },
}


# ---------------------------------------------------------------------------
# Resolved configuration: what the runner actually consumes.
# ---------------------------------------------------------------------------

@dataclass
class ResolvedExperiment:
    """A fully resolved experiment run.

    Config values win over the experiment defaults; every parameter the
    experiment reads is present.
    """

    experiment: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    output_dir: str = "results"
    format: str = OutputFormat.CSV


def resolve(
    config: Dict[str, Any],
    out: Optional[str] = None,
    fmt: Optional[str] = None,
    default_output_dir: str = "results",
    default_format: str = OutputFormat.CSV,
) -> ResolvedExperiment:
    """Translate a validated config dict into a :class:`ResolvedExperiment`.

    Args:
        config: Parsed config body, already schema-validated
        out: ``--out`` flag value, wins over the config
        fmt: ``--format`` flag value, wins over the config
        default_output_dir: Fallback when neither flag nor config name a directory
        default_format: Fallback when neither flag nor config name a format

    Returns:
        ResolvedExperiment with defaults filled in
    """
    name = config["experiment"]
    parameters = copy.deepcopy(DEFAULT_PARAMETERS[name])
    parameters.update(copy.deepcopy(config.get("parameters") or {}))
    return ResolvedExperiment(
        experiment=name,
        parameters=parameters,
        output_dir=out or config.get("output_dir") or default_output_dir,
        format=fmt or config.get("format") or default_format,
    )


__all__ = [
    "DEFAULT_PARAMETERS",
    "ResolvedExperiment",
    "resolve",
]

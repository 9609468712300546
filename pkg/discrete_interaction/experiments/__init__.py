"""Experiments Module.

Batch experiments exercised by the ``di-lab`` CLI. Each one turns resolved
parameters into metric tables and a list of built-in checks: g-probability
and operator algebra, kernel and grid dynamics, sliced propagators and least
action, bosonic field modes, and Grassmann-algebra fermions.
"""

from .base import BaseExperiment, CheckResult, ExperimentResult
from .algebra import GProbBornExperiment, UncertaintyExperiment
from .dynamics import (
    EhrenfestExperiment,
    KernelConsistencyExperiment,
    PacketSpreadExperiment,
    StationaryStatesExperiment,
)
from .propagators import LeastActionExperiment, PropagatorCompareExperiment
from .bosonic import (
    FieldCCRExperiment,
    KleinGordonModesExperiment,
    MaxwellModesExperiment,
    ProcaModesExperiment,
)
from .fermionic import DiracModesExperiment, FermiOscillatorExperiment

__all__ = [
    "BaseExperiment",
    "CheckResult",
    "ExperimentResult",
    "GProbBornExperiment",
    "UncertaintyExperiment",
    "KernelConsistencyExperiment",
    "PacketSpreadExperiment",
    "StationaryStatesExperiment",
    "EhrenfestExperiment",
    "PropagatorCompareExperiment",
    "LeastActionExperiment",
    "KleinGordonModesExperiment",
    "MaxwellModesExperiment",
    "ProcaModesExperiment",
    "FieldCCRExperiment",
    "FermiOscillatorExperiment",
    "DiracModesExperiment",
]

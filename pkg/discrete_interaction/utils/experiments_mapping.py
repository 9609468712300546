from typing import List, Tuple

from discrete_interaction.experiments.base import BaseExperiment
from discrete_interaction.experiments.algebra import GProbBornExperiment, UncertaintyExperiment
from discrete_interaction.experiments.dynamics import (
    EhrenfestExperiment,
    KernelConsistencyExperiment,
    PacketSpreadExperiment,
    StationaryStatesExperiment,
)
from discrete_interaction.experiments.propagators import (
    LeastActionExperiment,
    PropagatorCompareExperiment,
)
from discrete_interaction.experiments.bosonic import (
    FieldCCRExperiment,
    KleinGordonModesExperiment,
    MaxwellModesExperiment,
    ProcaModesExperiment,
)
from discrete_interaction.experiments.fermionic import (
    DiracModesExperiment,
    FermiOscillatorExperiment,
)
from discrete_interaction.utils.constants import Experiment


def map_experiment(name: str) -> BaseExperiment:
    if name == Experiment.GPROB_BORN:
        return GProbBornExperiment()
    elif name == Experiment.UNCERTAINTY:
        return UncertaintyExperiment()
    elif name == Experiment.KERNEL_CONSISTENCY:
        return KernelConsistencyExperiment()
    elif name == Experiment.PACKET_SPREAD:
        return PacketSpreadExperiment()
    elif name == Experiment.STATIONARY_STATES:
        return StationaryStatesExperiment()
    elif name == Experiment.EHRENFEST:
        return EhrenfestExperiment()
    elif name == Experiment.PROPAGATOR_COMPARE:
        return PropagatorCompareExperiment()
    elif name == Experiment.LEAST_ACTION:
        return LeastActionExperiment()
    elif name == Experiment.KG_MODES:
        return KleinGordonModesExperiment()
    elif name == Experiment.MAXWELL_MODES:
        return MaxwellModesExperiment()
    elif name == Experiment.PROCA_MODES:
        return ProcaModesExperiment()
    elif name == Experiment.FIELD_CCR:
        return FieldCCRExperiment()
    elif name == Experiment.FERMI_OSCILLATOR:
        return FermiOscillatorExperiment()
    elif name == Experiment.DIRAC_MODES:
        return DiracModesExperiment()
    else:
        raise ValueError(f"Unknown experiment: {name}")


def list_experiments() -> List[Tuple[str, str]]:
    """(name, description) for every experiment, in listing order."""
    return [(name, map_experiment(name).description) for name in Experiment.get_all_experiments()]

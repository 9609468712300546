"""Discrete Interaction Package.

Numerical building blocks for the discrete-interaction picture of quantum
mechanics: g-probability algebra, grid operators, transition-kernel and
Schroedinger evolution, sliced path-integral propagators, truncated bosonic
field modes and Grassmann-algebra fermions. The ``di-lab`` command runs
config-driven batch experiments over them.
"""

from .config import Config
from .errors import DIError
from .gprob import Amplitude, EventPair, GState, born, chain, density, exact_testing
from .operators import Grid1D, HermitianOp, WaveFunction, momentum_op, position_op
from .kernel_evolution import SplitState, TransitionKernel, moments, to_dynamics
from .schrod import EvolConfig, evolve, stationary
from .pathint import LagrangianSpec, Slicing, classical_action, propagator
from .fields import FockSpaceTrunc, Lattice, build_modes, equal_time_ccr
from .grassmann import GAlgebra, Multivector, fermi_oscillator

# Single source of truth for the package version. setup.py parses this
# literal (see _read_version in setup.py); bump here only.
__version__ = "0.1.0"

__all__ = [
    "Config",
    "DIError",
    "Amplitude",
    "EventPair",
    "GState",
    "born",
    "chain",
    "density",
    "exact_testing",
    "Grid1D",
    "HermitianOp",
    "WaveFunction",
    "momentum_op",
    "position_op",
    "SplitState",
    "TransitionKernel",
    "moments",
    "to_dynamics",
    "EvolConfig",
    "evolve",
    "stationary",
    "LagrangianSpec",
    "Slicing",
    "classical_action",
    "propagator",
    "FockSpaceTrunc",
    "Lattice",
    "build_modes",
    "equal_time_ccr",
    "GAlgebra",
    "Multivector",
    "fermi_oscillator",
]

"""
Constants used throughout the application.
"""

# Tolerances shared by constructors and checks
HERMITIAN_TOL = 1e-12
NORMALIZATION_TOL = 1e-9
# Norm slack accepted by evolve on entry; leapfrog drift stays below it
EVOLVE_NORM_TOL = 1e-6
ORTHONORMAL_TOL = 1e-8
PIVOT_TOL = 1e-10
DEGENERACY_GAP = 1e-9
PHASE_FIX_TOL = 1e-12

# Hard walls are emulated by a large potential, in units of hbar^2 / (m dx^2)
WALL_HEIGHT_FACTOR = 1e6

# Free-kernel resolution guidance: hbar * dt / (m * dx^2) below this is flagged
RESOLUTION_GUIDANCE = 1.0

# Sampled free kernels are cut off beyond this many widths sqrt(hbar dt / m)
FREE_KERNEL_WIDTHS = 6.0

# Desk-scale guards
MAX_FIELD_OSCILLATORS = 3
MAX_FIELD_CUTOFF = 6
MAX_GRASSMANN_GENERATORS = 12


class Experiment:
    """
    Enumeration of the batch experiments exposed by the CLI.
    """

    GPROB_BORN = "gprob-born"
    UNCERTAINTY = "uncertainty"
    KERNEL_CONSISTENCY = "kernel-consistency"
    PACKET_SPREAD = "packet-spread"
    STATIONARY_STATES = "stationary-states"
    EHRENFEST = "ehrenfest"
    PROPAGATOR_COMPARE = "propagator-compare"
    LEAST_ACTION = "least-action"
    KG_MODES = "kg-modes"
    MAXWELL_MODES = "maxwell-modes"
    PROCA_MODES = "proca-modes"
    FIELD_CCR = "field-ccr"
    FERMI_OSCILLATOR = "fermi-oscillator"
    DIRAC_MODES = "dirac-modes"

    @classmethod
    def get_all_experiments(cls) -> list[str]:
        """
        Returns a list of all experiment names, in listing order.
        """
        return [
            cls.GPROB_BORN,
            cls.UNCERTAINTY,
            cls.KERNEL_CONSISTENCY,
            cls.PACKET_SPREAD,
            cls.STATIONARY_STATES,
            cls.EHRENFEST,
            cls.PROPAGATOR_COMPARE,
            cls.LEAST_ACTION,
            cls.KG_MODES,
            cls.MAXWELL_MODES,
            cls.PROCA_MODES,
            cls.FIELD_CCR,
            cls.FERMI_OSCILLATOR,
            cls.DIRAC_MODES,
        ]

    @classmethod
    def is_valid_experiment(cls, name: str) -> bool:
        """
        Check if a given experiment name is known.

        Args:
            name: The experiment string to validate

        Returns:
            bool: True if the experiment exists, False otherwise
        """
        return name in cls.get_all_experiments()


class Boundary:
    """
    Enumeration of grid boundary conditions.
    """

    PERIODIC = "periodic"
    VANISHING = "vanishing"

    @classmethod
    def get_all_boundaries(cls) -> list[str]:
        return [cls.PERIODIC, cls.VANISHING]


class FieldKind:
    """
    Enumeration of the free bosonic field kinds.
    """

    KLEIN_GORDON = "klein_gordon"
    MAXWELL = "maxwell"
    PROCA = "proca"

    @classmethod
    def get_all_kinds(cls) -> list[str]:
        return [cls.KLEIN_GORDON, cls.MAXWELL, cls.PROCA]

    @classmethod
    def polarization_count(cls, kind: str) -> int:
        """
        Number of independent polarizations carried by each mode of ``kind``.
        """
        return {cls.KLEIN_GORDON: 1, cls.MAXWELL: 2, cls.PROCA: 3}[kind]


class FreeFactor:
    """
    Enumeration of the free-particle factors a propagator slice can use.
    """

    SPECTRAL = "spectral"
    SAMPLED = "sampled"

    @classmethod
    def get_all_factors(cls) -> list[str]:
        return [cls.SPECTRAL, cls.SAMPLED]


class OutputFormat:
    """
    Enumeration of artifact formats.
    """

    CSV = "csv"
    JSON = "json"

    @classmethod
    def get_all_formats(cls) -> list[str]:
        return [cls.CSV, cls.JSON]

    @classmethod
    def is_valid_format(cls, format: str) -> bool:
        return format in cls.get_all_formats()


# ANSI color codes
RESET = "\033[0m"
BOLD = "\033[1m"
GREEN = "\033[92m"
RED = "\033[91m"


class LogLevel:
    """
    Enumeration of supported log levels.
    """

    DEBUG = 10
    INFO = 20
    WARNING = 30
    ERROR = 40
    CRITICAL = 50

    LEVEL_CODES = {
        "DEBUG": DEBUG,
        "INFO": INFO,
        "WARNING": WARNING,
        "ERROR": ERROR,
        "CRITICAL": CRITICAL,
    }

    @classmethod
    def get_level_code(cls, level: str) -> int:
        """
        Get the level code for a given level.
        """
        return cls.LEVEL_CODES.get(level, cls.WARNING)

"""Exception types raised by the numerical modules.

All of them derive from ``ValueError`` so callers that already guard
numerics with ``except ValueError`` keep working. Each carries the
diagnostic payload its message refers to (offending index, step,
residual, bound) as an attribute for programmatic use.
"""

from typing import Optional


class DIError(ValueError):
    """Base class for every library error."""


# ----- g-probability -----

class DegenerateStateError(DIError):
    def __init__(self, message: str = "degenerate state") -> None:
        super().__init__(message)


class NormalizationError(DIError):
    def __init__(self, deviation: float, what: str = "state") -> None:
        self.deviation = deviation
        super().__init__(
            f"{what} is not normalized: total weight deviates from 1 by {deviation:.3e}"
        )


# ----- operators -----

class GridMismatchError(DIError):
    pass


class LinearDependenceError(DIError):
    def __init__(self, index: int, pivot: float) -> None:
        self.index = index
        self.pivot = pivot
        super().__init__(
            f"function at index {index} is linearly dependent on its predecessors "
            f"(pivot norm {pivot:.3e})"
        )


class NotOrthonormalError(DIError):
    pass


class NotHermitianError(DIError):
    pass


class BoundaryError(DIError):
    pass


# ----- kernels and time stepping -----

class KernelError(DIError):
    pass


class StabilityError(DIError):
    def __init__(self, dt: float, bound: float) -> None:
        self.dt = dt
        self.bound = bound
        super().__init__(
            f"time step {dt:.3e} violates the stability bound {bound:.3e}"
        )


class NumericalBlowupError(DIError):
    def __init__(self, step: int) -> None:
        self.step = step
        super().__init__(f"non-finite values appeared at step {step}")


class ConvergenceError(DIError):
    def __init__(self, iterations: int, residual: float) -> None:
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )


class SlicingError(DIError):
    pass


class TimeMismatchError(DIError):
    pass


# ----- fields and Grassmann algebra -----

class DimensionGuardError(DIError):
    def __init__(self, message: str, limit: Optional[int] = None) -> None:
        self.limit = limit
        super().__init__(message)


class InfraredModeError(DIError):
    def __init__(self, message: str = "infrared mode excluded") -> None:
        super().__init__(message)


class AlgebraMismatchError(DIError):
    pass


class GeneratorIndexError(DIError):
    pass

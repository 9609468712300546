"""Time-sliced propagators, least-action paths and analytic kernels.

Each slice is the symmetric split ``D K_free D`` with
``D = exp(-i R dt / 2 hbar)``. By default the free factor is the exact free
evolution of the band-limited periodic grid, built spectrally, and the split
carries only the usual second-order commutator error in ``dt``. The
alternative ``FreeFactor.SAMPLED`` samples the continuum Gaussian kernel at
minimum-image separations and cuts it off beyond ``FREE_KERNEL_WIDTHS``
widths; it is neither unitary nor pointwise convergent at practical
resolutions, so sampled propagators are judged by their matrix elements
between smooth functions (``kernel_matrix_defect``).

``sliced_kernel`` evaluates the same time-sliced product at a single pair of
endpoints without a grid, integrating the interior knots in closed form.

Propagator matrices are stored as kernels ``K(x_out, x_in)`` with the
transfer matrix equal to ``K dx``, so ``K`` tends to ``identity / dx`` as
the elapsed time goes to zero.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from .config import Config
from .errors import (
    BoundaryError,
    ConvergenceError,
    GridMismatchError,
    SlicingError,
    TimeMismatchError,
)
from .operators import Grid1D, WaveFunction
from .schrod import Potential, TrajectoryLog
from .utils.constants import FREE_KERNEL_WIDTHS, RESOLUTION_GUIDANCE, Boundary, FreeFactor

logger = logging.getLogger(__name__)
config = Config()

ACTION_TOL = 1e-7
MAX_NEWTON_ITERATIONS = 50


@dataclass(frozen=True)
class LagrangianSpec:
    mass: float
    R: Potential
    hbar: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")

    @property
    def resolved_hbar(self) -> float:
        return config.resolve_hbar(self.hbar)


@dataclass(frozen=True)
class Slicing:
    t1: float
    t2: float
    n_slices: int

    def __post_init__(self) -> None:
        if not self.t2 > self.t1:
            raise SlicingError(f"slicing needs t2 > t1, got [{self.t1}, {self.t2}]")
        if self.n_slices < 1:
            raise SlicingError(f"slicing needs at least one slice, got {self.n_slices}")

    @property
    def duration(self) -> float:
        return self.t2 - self.t1

    @property
    def dt(self) -> float:
        return self.duration / self.n_slices


@dataclass(frozen=True)
class PropagatorMatrix:
    matrix: np.ndarray
    grid: Grid1D
    t1: float
    t2: float
    n_slices: int = 1
    under_resolved: bool = False

    @property
    def transfer(self) -> np.ndarray:
        return self.matrix * self.grid.dx

    def apply(self, psi: WaveFunction) -> WaveFunction:
        if psi.grid != self.grid:
            raise GridMismatchError("wave function and propagator live on different grids")
        return WaveFunction(self.grid, self.transfer @ psi.samples)

    def unitarity_defect(self) -> float:
        """max |T^dagger T - I| for the transfer matrix T = K dx."""
        t = self.transfer
        return float(np.max(np.abs(t.conj().T @ t - np.eye(self.grid.n))))


def free_transfer(grid: Grid1D, dt: float, mass: float, hbar: float) -> np.ndarray:
    """Exact free evolution over ``dt`` on the periodic grid, as a matrix."""
    k = grid.wavenumbers
    phase = np.exp(-1j * hbar * k ** 2 * dt / (2.0 * mass))
    return np.fft.ifft(phase[:, None] * np.fft.fft(np.eye(grid.n), axis=0), axis=0)


def sampled_free_transfer(grid: Grid1D, dt: float, mass: float, hbar: float) -> np.ndarray:
    """Continuum free kernel at minimum-image separations times ``dx``, zero
    beyond ``FREE_KERNEL_WIDTHS`` widths sqrt(hbar dt / m)."""
    sep = grid.points[:, None] - grid.points[None, :]
    sep = sep - grid.length * np.round(sep / grid.length)
    window = FREE_KERNEL_WIDTHS * math.sqrt(hbar * dt / mass)
    kernel = free_kernel(sep, 0.0, dt, mass, hbar)
    return np.where(np.abs(sep) <= window, kernel, 0.0) * grid.dx


def propagator(spec: LagrangianSpec, s: Slicing, grid: Grid1D,
               free_factor: str = FreeFactor.SPECTRAL) -> PropagatorMatrix:
    if free_factor not in FreeFactor.get_all_factors():
        raise ValueError(f"unknown free factor {free_factor!r}; expected one of {FreeFactor.get_all_factors()}")
    if grid.boundary != Boundary.PERIODIC:
        raise BoundaryError("sliced propagators are built on periodic grids only")
    if spec.R.grid != grid:
        raise GridMismatchError("potential and propagator grid differ")
    hbar = spec.resolved_hbar
    dt = s.dt
    resolution = hbar * dt / (spec.mass * grid.dx ** 2)
    under_resolved = resolution < RESOLUTION_GUIDANCE
    if under_resolved:
        logger.warning(
            "slice dt=%.3e under-resolves the free kernel (hbar dt / m dx^2 = %.3f < %.1f)",
            dt, resolution, RESOLUTION_GUIDANCE,
        )
    half = np.exp(-1j * spec.R.samples * dt / (2.0 * hbar))
    if free_factor == FreeFactor.SAMPLED:
        free = sampled_free_transfer(grid, dt, spec.mass, hbar)
    else:
        free = free_transfer(grid, dt, spec.mass, hbar)
    step = half[:, None] * free * half[None, :]
    total = np.linalg.matrix_power(step, s.n_slices)
    logger.debug("%s propagator over %.4g in %d slices, n=%d", free_factor, s.duration, s.n_slices, grid.n)
    return PropagatorMatrix(total / grid.dx, grid, s.t1, s.t2, s.n_slices, under_resolved)


def compose(later: PropagatorMatrix, earlier: PropagatorMatrix) -> PropagatorMatrix:
    """K(t1, t3) = K(t2, t3) K(t1, t2) dx."""
    if later.grid != earlier.grid:
        raise GridMismatchError("cannot compose propagators on different grids")
    if not math.isclose(earlier.t2, later.t1, rel_tol=1e-12, abs_tol=1e-12):
        raise TimeMismatchError(
            f"propagators do not chain: first ends at {earlier.t2}, second starts at {later.t1}"
        )
    return PropagatorMatrix(
        later.matrix @ earlier.matrix * later.grid.dx,
        later.grid,
        earlier.t1,
        later.t2,
        earlier.n_slices + later.n_slices,
        earlier.under_resolved or later.under_resolved,
    )


def compare(K: PropagatorMatrix, psi0: WaveFunction, via_schrod: Tuple[WaveFunction, TrajectoryLog]) -> float:
    """max |K psi0 - psi_evolved| against a grid-evolution result."""
    evolved, log = via_schrod
    if psi0.grid != K.grid or evolved.grid != K.grid:
        raise GridMismatchError("propagator, initial state and evolved state must share a grid")
    elapsed = K.t2 - K.t1
    if not math.isclose(log.t[-1], elapsed, rel_tol=1e-9, abs_tol=1e-12):
        raise TimeMismatchError(
            f"evolution ran for {log.t[-1]}, propagator spans {elapsed}"
        )
    return float(np.max(np.abs(K.apply(psi0).samples - evolved.samples)))


def kernel_matrix_defect(K: PropagatorMatrix, reference: np.ndarray, basis: np.ndarray) -> float:
    """max |<f_a|K|f_b> - <f_a|reference|f_b>| over the rows f of ``basis``,
    relative to the largest reference element.

    ``reference`` is a kernel sampled on ``K.grid`` (e.g. ``free_kernel`` on
    the grid points); ``basis`` holds smooth test functions as rows.
    """
    basis = np.atleast_2d(np.asarray(basis))
    reference = np.asarray(reference)
    if basis.shape[1] != K.grid.n or reference.shape != K.matrix.shape:
        raise GridMismatchError(
            f"basis {basis.shape} and reference {reference.shape} do not fit a grid of {K.grid.n} points"
        )
    cell = K.grid.dx ** 2
    ours = basis.conj() @ K.matrix @ basis.T * cell
    theirs = basis.conj() @ reference @ basis.T * cell
    return float(np.max(np.abs(ours - theirs)) / np.max(np.abs(theirs)))


# ----------------------------------------------------------------------
# Least action
# ----------------------------------------------------------------------

def discrete_action(spec: LagrangianSpec, path: np.ndarray, T: float) -> float:
    """Sum of [m/2 (dx/dt)^2 - R] dt with trapezoid weights on R."""
    dt = T / (path.size - 1)
    kinetic = 0.5 * spec.mass * np.sum(np.diff(path) ** 2) / dt
    r = spec.R.value(path)
    potential = dt * (np.sum(r) - 0.5 * (r[0] + r[-1]))
    return float(kinetic - potential)


def euler_lagrange_residual(spec: LagrangianSpec, path: np.ndarray, T: float) -> np.ndarray:
    """m x'' + R'(x) at interior knots, with x'' the centred second difference."""
    dt = T / (path.size - 1)
    accel = (path[2:] - 2.0 * path[1:-1] + path[:-2]) / dt ** 2
    return spec.mass * accel + spec.R.gradient(path[1:-1])


def classical_action(spec: LagrangianSpec, x1: float, x2: float, T: float,
                     n_knots: int = 2001) -> Tuple[np.ndarray, float]:
    """Stationary discrete path between fixed endpoints and its action.

    Newton iteration on the interior knots from the straight line; the
    Hessian of the discrete action is tridiagonal. Near a focal time the
    Hessian is singular and the solve fails with ``ConvergenceError``.
    """
    if n_knots < 3:
        raise ValueError(f"need at least 3 knots, got {n_knots}")
    if not T > 0:
        raise ValueError(f"duration must be positive, got {T}")
    dt = T / (n_knots - 1)
    path = np.linspace(x1, x2, n_knots)
    m = spec.mass
    residual = math.inf
    for iteration in range(1, MAX_NEWTON_ITERATIONS + 1):
        el = euler_lagrange_residual(spec, path, T)
        residual = float(np.max(np.abs(el)))
        if residual < ACTION_TOL:
            break
        # action gradient on interior knots is -el * dt, so Newton adds H^-1 el dt
        bands = np.zeros((3, n_knots - 2))
        bands[0, 1:] = -m / dt
        bands[1, :] = 2.0 * m / dt - spec.R.second_derivative(path[1:-1]) * dt
        bands[2, :-1] = -m / dt
        try:
            step = linalg.solve_banded((1, 1), bands, el * dt)
        except (linalg.LinAlgError, ValueError) as exc:
            raise ConvergenceError(iteration, residual) from exc
        if not np.all(np.isfinite(step)):
            raise ConvergenceError(iteration, residual)
        path[1:-1] = path[1:-1] + step
    else:
        el = euler_lagrange_residual(spec, path, T)
        residual = float(np.max(np.abs(el)))
        if residual >= ACTION_TOL:
            raise ConvergenceError(MAX_NEWTON_ITERATIONS, residual)
    return path, discrete_action(spec, path, T)


def sliced_kernel(spec: LagrangianSpec, x2: float, x1: float, T: float, n_slices: int) -> complex:
    """Time-sliced kernel K_N(x2, x1; T) with the interior knots integrated out.

    The sliced action is expanded to second order about its stationary path,
    which is exact for potentials at most quadratic and the leading
    stationary-phase term otherwise. The Gaussian integral contributes
    sqrt(2 pi hbar / |lambda|) and a phase of +-pi/4 per Hessian eigenvalue;
    each slice prefactor sqrt(m / 2 pi i hbar dt) contributes -pi/4.
    """
    if n_slices < 1:
        raise SlicingError(f"slicing needs at least one slice, got {n_slices}")
    if not T > 0:
        raise ValueError(f"duration must be positive, got {T}")
    hbar = spec.resolved_hbar
    m = spec.mass
    dt = T / n_slices
    if n_slices == 1:
        S = discrete_action(spec, np.array([x1, x2], dtype=float), T)
        eigenvalues = np.zeros(0)
    else:
        path, S = classical_action(spec, x1, x2, T, n_slices + 1)
        diagonal = 2.0 * m / dt - spec.R.second_derivative(path[1:-1]) * dt
        if diagonal.size == 1:
            eigenvalues = diagonal
        else:
            eigenvalues = linalg.eigvalsh_tridiagonal(diagonal, np.full(diagonal.size - 1, -m / dt))
        if np.any(np.abs(eigenvalues) < 1e-12 * m / dt):
            raise SlicingError(f"sliced action Hessian is singular: T = {T} is a focal time for {n_slices} slices")
    positive = int(np.sum(eigenvalues > 0))
    negative = eigenvalues.size - positive
    log_modulus = (0.5 * n_slices * math.log(m / (2.0 * math.pi * hbar * dt))
                   + 0.5 * (n_slices - 1) * math.log(2.0 * math.pi * hbar)
                   - 0.5 * float(np.sum(np.log(np.abs(eigenvalues)))))
    phase = S / hbar + 0.25 * math.pi * (positive - negative - n_slices)
    logger.debug("sliced kernel: %d slices, %d negative modes, S = %.10g", n_slices, negative, S)
    return complex(np.exp(log_modulus + 1j * phase))


def sliced_phase_defect(spec: LagrangianSpec, x1: float, x2: float, T: float, n_slices: int,
                        action: float) -> float:
    """|arg K_N(x2, x1; T) - (action / hbar - pi/4)| wrapped to [0, pi]."""
    value = sliced_kernel(spec, x2, x1, T, n_slices)
    return abs(_wrap(float(np.angle(value)) - (action / spec.resolved_hbar - math.pi / 4.0)))


# ----------------------------------------------------------------------
# Analytic oracles
# ----------------------------------------------------------------------

def free_packet(x: np.ndarray, t: float, sigma0: float, mass: float = 1.0,
                hbar: Optional[float] = None, x0: float = 0.0, k0: float = 0.0) -> np.ndarray:
    """Freely spreading Gaussian; at t = 0 it equals ``WaveFunction.gaussian``."""
    hbar = config.resolve_hbar(hbar)
    tau = hbar * t / (2.0 * mass * sigma0 ** 2)
    y = np.asarray(x, dtype=float) - x0
    exponent = (-(y ** 2) / (4.0 * sigma0 ** 2) + 1j * k0 * y - 1j * sigma0 ** 2 * k0 ** 2 * tau) / (1.0 + 1j * tau)
    prefactor = (2.0 * np.pi * sigma0 ** 2) ** -0.25 / np.sqrt(1.0 + 1j * tau)
    return prefactor * np.exp(exponent + 1j * k0 * x0)


def free_kernel(x: np.ndarray, x_in: np.ndarray, t: float, mass: float = 1.0,
                hbar: Optional[float] = None) -> np.ndarray:
    hbar = config.resolve_hbar(hbar)
    prefactor = np.sqrt(mass / (2j * np.pi * hbar * t))
    return prefactor * np.exp(1j * mass * (np.asarray(x) - np.asarray(x_in)) ** 2 / (2.0 * hbar * t))


def harmonic_action(x1: float, x2: float, T: float, omega: float, mass: float = 1.0) -> float:
    s = math.sin(omega * T)
    return mass * omega / (2.0 * s) * ((x1 ** 2 + x2 ** 2) * math.cos(omega * T) - 2.0 * x1 * x2)


def harmonic_kernel(x: np.ndarray, x_in: np.ndarray, t: float, omega: float, mass: float = 1.0,
                    hbar: Optional[float] = None) -> np.ndarray:
    """Mehler kernel; valid away from the focal times omega t = n pi."""
    hbar = config.resolve_hbar(hbar)
    s = math.sin(omega * t)
    c = math.cos(omega * t)
    x = np.asarray(x, dtype=float)
    x_in = np.asarray(x_in, dtype=float)
    prefactor = np.sqrt(mass * omega / (2j * np.pi * hbar * s))
    phase = mass * omega * ((x ** 2 + x_in ** 2) * c - 2.0 * x * x_in) / (2.0 * hbar * s)
    return prefactor * np.exp(1j * phase)


def coherent_state(x: np.ndarray, t: float, x0: float, omega: float, mass: float = 1.0,
                   hbar: Optional[float] = None) -> np.ndarray:
    """Displaced oscillator ground state released from rest at ``x0``."""
    hbar = config.resolve_hbar(hbar)
    q = x0 * math.cos(omega * t)
    p = -mass * omega * x0 * math.sin(omega * t)
    x = np.asarray(x, dtype=float)
    norm = (mass * omega / (math.pi * hbar)) ** 0.25
    exponent = (-mass * omega * (x - q) ** 2 / (2.0 * hbar) + 1j * p * x / hbar
                - 1j * p * q / (2.0 * hbar) - 0.5j * omega * t)
    return norm * np.exp(exponent)


def _wrap(angle: float) -> float:
    return float((angle + math.pi) % (2.0 * math.pi) - math.pi)


def stationary_phase_defect(x1: float, x2: float, T: float, omega: float, action: float,
                            mass: float = 1.0, hbar: Optional[float] = None) -> float:
    """|arg K_harmonic(x2, x1; T) - (S / hbar - pi/4)| wrapped to [0, pi].

    For 0 < omega T < pi the kernel phase is exactly the classical action
    over hbar plus the constant prefactor phase -pi/4, for every hbar.
    """
    hbar = config.resolve_hbar(hbar)
    kernel_phase = float(np.angle(harmonic_kernel(x2, x1, T, omega, mass, hbar)))
    return abs(_wrap(kernel_phase - (action / hbar - math.pi / 4.0)))

"""Kernel-driven evolution of the split amplitude pair (U, V).

A transition kernel is stored as a delta part ``r0(x)`` plus a smooth,
even, compactly supported part ``r2(x, eps)`` sampled on ``eps = j dx``:

    phi(x, eps) = r0(x) delta(eps) + hbar^2 r2(x, eps)

Its moments ``P = int phi`` and ``Q = 1/2 int phi eps^2`` fix the
effective dynamics: ``m = -hbar^2 / (2 Q)`` and ``R = P``. Both the direct
kernel update and the Schrodinger PDE update use the same kick-drift-kick
leapfrog, which is exactly time reversible:

    V <- V - dt/(2 hbar) H U
    U <- U + dt/hbar     H V
    V <- V - dt/(2 hbar) H U

U and V are synchronized at step boundaries; inside a step V is evaluated
at the half step.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate, linalg

from .config import Config
from .errors import KernelError, NotHermitianError, StabilityError
from .operators import Grid1D, WaveFunction
from .utils.constants import Boundary
from .utils.progress import step_bar

logger = logging.getLogger(__name__)
config = Config()

EVENNESS_TOL = 1e-14
MASS_SPREAD_TOL = 1e-9

Operator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SplitState:
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self) -> None:
        U = np.asarray(self.U, dtype=float)
        V = np.asarray(self.V, dtype=float)
        if U.shape != V.shape:
            raise ValueError(f"U and V shapes differ: {U.shape} vs {V.shape}")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)

    @classmethod
    def from_complex(cls, psi: np.ndarray) -> "SplitState":
        return cls(np.real(psi).copy(), np.imag(psi).copy())

    @classmethod
    def from_wavefunction(cls, psi: WaveFunction) -> "SplitState":
        return cls.from_complex(psi.samples)

    def to_complex(self) -> np.ndarray:
        return self.U + 1j * self.V

    def norm(self, cell: float) -> float:
        """Sum of (U^2 + V^2) times the cell size ``cell``."""
        return float(np.sum(self.U ** 2 + self.V ** 2) * cell)

    def rotated(self, angle: float) -> "SplitState":
        """Global phase rotation psi -> exp(i angle) psi."""
        return SplitState.from_complex(np.exp(1j * angle) * self.to_complex())


@dataclass(frozen=True)
class TransitionKernel:
    r0: np.ndarray
    r2: np.ndarray
    eps_grid: np.ndarray
    grid: Grid1D
    hbar: float = 1.0

    def __post_init__(self) -> None:
        r0 = np.asarray(self.r0, dtype=float)
        r2 = np.asarray(self.r2, dtype=float)
        eps = np.asarray(self.eps_grid, dtype=float)
        if r0.shape != (self.grid.n,):
            raise KernelError(f"r0 has shape {r0.shape}, expected ({self.grid.n},)")
        if r2.shape != (self.grid.n, eps.size):
            raise KernelError(f"r2 has shape {r2.shape}, expected ({self.grid.n}, {eps.size})")
        if eps.size % 2 != 1:
            raise KernelError("eps grid must have an odd number of points centred on 0")
        half = eps.size // 2
        offsets = np.arange(-half, half + 1)
        if not np.allclose(eps, offsets * self.grid.dx, rtol=0.0, atol=1e-12 * self.grid.dx):
            raise KernelError("eps grid must be the symmetric lattice j * dx of the spatial grid")
        scale = max(1.0, float(np.max(np.abs(r2)))) if r2.size else 1.0
        if r2.size and float(np.max(np.abs(r2 - r2[:, ::-1]))) > EVENNESS_TOL * scale:
            raise KernelError("kernel smooth part is not even in eps")
        if not (np.all(np.isfinite(r0)) and np.all(np.isfinite(r2))):
            raise KernelError("kernel contains non-finite entries")
        object.__setattr__(self, "r0", r0)
        object.__setattr__(self, "r2", r2)
        object.__setattr__(self, "eps_grid", offsets * self.grid.dx)

    @property
    def half_width(self) -> float:
        return float(self.eps_grid[-1])

    def weights(self) -> np.ndarray:
        """Trapezoid weights over the eps lattice."""
        w = np.full(self.eps_grid.size, self.grid.dx)
        if w.size > 1:
            w[0] *= 0.5
            w[-1] *= 0.5
        return w

    def is_static(self) -> bool:
        return not np.any(self.r2)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """int phi(x, eps) f(x + eps) d eps by direct convolution."""
        out = self.r0 * values
        w = self.weights()
        half = self.eps_grid.size // 2
        for idx, j in enumerate(range(-half, half + 1)):
            column = self.r2[:, idx]
            if not np.any(column):
                continue
            out = out + (self.hbar ** 2 * w[idx]) * column * shift(values, j, self.grid.boundary)
        return out

    def spectral_bound(self) -> float:
        """Gershgorin bound on |eigenvalue| of the kernel operator."""
        smooth = self.hbar ** 2 * np.sum(np.abs(self.r2) * self.weights()[None, :], axis=1)
        return float(np.max(np.abs(self.r0) + smooth))


@dataclass(frozen=True)
class KernelMoments:
    P: np.ndarray
    Q: np.ndarray


@dataclass(frozen=True)
class EffectiveDynamics:
    """Mass and potential-like function derived from a kernel.

    ``mass = inf`` is the static limit of a kernel without smooth part: the
    pair (U, V) just rotates locally at rate R / hbar.
    """

    mass: float
    R: np.ndarray
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        R = np.asarray(self.R, dtype=float)
        if not np.all(np.isfinite(R)):
            raise ValueError("R contains non-finite entries")
        object.__setattr__(self, "R", R)

    @property
    def kinetic_coefficient(self) -> float:
        if math.isinf(self.mass):
            return 0.0
        return self.hbar ** 2 / (2.0 * self.mass)


def shift(values: np.ndarray, j: int, boundary: str, axis: int = 0) -> np.ndarray:
    """values[i + j] along ``axis``; zero outside a vanishing grid."""
    if boundary == Boundary.PERIODIC or j == 0:
        return np.roll(values, -j, axis=axis)
    moved = np.moveaxis(values, axis, 0)
    out = np.zeros_like(moved)
    if j > 0:
        out[:-j] = moved[j:]
    else:
        out[-j:] = moved[:j]
    return np.moveaxis(out, 0, axis)


def kernel_moment(k: TransitionKernel, order: int) -> np.ndarray:
    """int phi(x, eps) eps^order d eps; odd orders vanish for even kernels."""
    if order < 0:
        raise ValueError(f"moment order must be non-negative, got {order}")
    smooth = k.hbar ** 2 * integrate.trapezoid(k.r2 * k.eps_grid[None, :] ** order, k.eps_grid, axis=1)
    if order == 0:
        return k.r0 + smooth
    return smooth


def moments(k: TransitionKernel) -> KernelMoments:
    return KernelMoments(P=kernel_moment(k, 0), Q=0.5 * kernel_moment(k, 2))


def to_dynamics(m: KernelMoments, hbar: Optional[float] = None) -> EffectiveDynamics:
    hbar = config.resolve_hbar(hbar)
    Q = np.asarray(m.Q, dtype=float)
    if np.any(Q >= 0.0):
        raise KernelError("kernel is not particle-like: second moment Q must be negative everywhere")
    mean_q = float(np.mean(Q))
    spread = float(np.max(np.abs(Q - mean_q)) / abs(mean_q))
    if spread > MASS_SPREAD_TOL:
        raise KernelError(f"mass not constant: Q varies with x (relative spread {spread:.3e})")
    mass = -hbar ** 2 / (2.0 * mean_q)
    return EffectiveDynamics(mass=mass, R=np.asarray(m.P, dtype=float).copy(), hbar=hbar)


def box_kernel(grid: Grid1D, half_width: float, height: float, r0: float = 0.0,
               hbar: Optional[float] = None) -> TransitionKernel:
    """Constant smooth part of the given half width; ``half_width`` must be a
    multiple of ``grid.dx``."""
    hbar = config.resolve_hbar(hbar)
    half = int(round(half_width / grid.dx))
    if half < 1 or abs(half * grid.dx - half_width) > 1e-9 * grid.dx:
        raise KernelError(
            f"half width {half_width} is not a positive multiple of dx = {grid.dx}"
        )
    eps = np.arange(-half, half + 1) * grid.dx
    r2 = np.full((grid.n, eps.size), float(height))
    return TransitionKernel(np.full(grid.n, float(r0)), r2, eps, grid, hbar)


def kernel_for_dynamics(grid: Grid1D, mass: float, R: np.ndarray, half_width: float,
                        hbar: Optional[float] = None) -> TransitionKernel:
    """Box kernel whose discrete moments reproduce ``(mass, R)`` exactly."""
    hbar = config.resolve_hbar(hbar)
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass}")
    unit = box_kernel(grid, half_width, 1.0, 0.0, hbar)
    unit_q = 0.5 * kernel_moment(unit, 2)[0]
    unit_p = kernel_moment(unit, 0)[0]
    height = (-hbar ** 2 / (2.0 * mass)) / unit_q
    r0 = np.asarray(R, dtype=float) - height * unit_p
    return TransitionKernel(r0, unit.r2 * height, unit.eps_grid, grid, hbar)


def leapfrog_step(U: np.ndarray, V: np.ndarray, apply_h: Operator, dt: float,
                  hbar: float) -> Tuple[np.ndarray, np.ndarray]:
    """One kick-drift-kick step of hbar dU = H V dt, hbar dV = -H U dt."""
    half = 0.5 * dt / hbar
    V = V - half * apply_h(U)
    U = U + (dt / hbar) * apply_h(V)
    V = V - half * apply_h(U)
    return U, V


def _check_stability(dt: float, bound: float) -> None:
    if abs(dt) > bound:
        raise StabilityError(dt, bound)


def integral_stability_bound(k: TransitionKernel, stability_factor: Optional[float] = None) -> float:
    factor = config.STABILITY_FACTOR if stability_factor is None else stability_factor
    e_max = k.spectral_bound()
    return math.inf if e_max == 0.0 else factor * 2.0 * k.hbar / e_max


def integral_step(s: SplitState, k: TransitionKernel, dt: float,
                  stability_factor: Optional[float] = None) -> SplitState:
    _check_stability(dt, integral_stability_bound(k, stability_factor))
    if dt == 0.0:
        return s
    U, V = leapfrog_step(s.U, s.V, k.apply, dt, k.hbar)
    return SplitState(U, V)


def laplacian(values: np.ndarray, dx: float, boundary: str = Boundary.PERIODIC, axis: int = 0) -> np.ndarray:
    """Three-point second difference along ``axis``."""
    return (shift(values, 1, boundary, axis) - 2.0 * values + shift(values, -1, boundary, axis)) / dx ** 2


def pde_hamiltonian(d: EffectiveDynamics, dx: float, boundary: str = Boundary.PERIODIC) -> Operator:
    kin = d.kinetic_coefficient
    if kin == 0.0:
        return lambda f: d.R * f
    return lambda f: -kin * laplacian(f, dx, boundary) + d.R * f


def pde_stability_bound(d: EffectiveDynamics, dx: float, dim: int = 1,
                        stability_factor: Optional[float] = None) -> float:
    """factor * 2 hbar / E_max with E_max = 2 hbar^2 dim / (m dx^2) + max|R|.

    For R = 0 in 1D this is ``factor * m dx^2 / hbar``.
    """
    factor = config.STABILITY_FACTOR if stability_factor is None else stability_factor
    e_max = 4.0 * dim * d.kinetic_coefficient / dx ** 2 + float(np.max(np.abs(d.R)))
    return math.inf if e_max == 0.0 else factor * 2.0 * d.hbar / e_max


def pde_step(s: SplitState, d: EffectiveDynamics, dx: float, dt: float,
             boundary: str = Boundary.PERIODIC, stability_factor: Optional[float] = None) -> SplitState:
    _check_stability(dt, pde_stability_bound(d, dx, 1, stability_factor))
    if dt == 0.0:
        return s
    U, V = leapfrog_step(s.U, s.V, pde_hamiltonian(d, dx, boundary), dt, d.hbar)
    return SplitState(U, V)


def _step_count(T: float, dt: float) -> int:
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    steps = int(round(T / dt))
    if abs(steps * dt - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError(f"duration {T} is not a whole number of steps of {dt}")
    return steps


def derived_dynamics(k: TransitionKernel) -> EffectiveDynamics:
    """``to_dynamics(moments(k))``, or the static limit when r2 vanishes."""
    if k.is_static():
        return EffectiveDynamics(mass=math.inf, R=k.r0.copy(), hbar=k.hbar)
    return to_dynamics(moments(k), k.hbar)


def consistency(k: TransitionKernel, psi0: SplitState, T: float, dt: float,
                stability_factor: Optional[float] = None) -> float:
    """Max pointwise distance between kernel evolution and PDE evolution at time T."""
    dyn = derived_dynamics(k)
    steps = _step_count(T, dt)
    a = b = psi0
    with step_bar(steps, "kernel vs pde") as bar:
        for _ in range(steps):
            a = integral_step(a, k, dt, stability_factor)
            b = pde_step(b, dyn, k.grid.dx, dt, k.grid.boundary, stability_factor)
            bar.update(1)
    error = float(np.max(np.abs(a.to_complex() - b.to_complex())))
    logger.debug("consistency: half width %.4g, %d steps, error %.3e", k.half_width, steps, error)
    return error


def discrete_state_step(s: SplitState, H: np.ndarray, dt: float,
                        hbar: Optional[float] = None) -> SplitState:
    """Leapfrog step of a finite discrete-state system with real symmetric couplings."""
    hbar = config.resolve_hbar(hbar)
    H = _real_symmetric(H)
    U, V = leapfrog_step(s.U, s.V, lambda f: H @ f, dt, hbar)
    return SplitState(U, V)


def _real_symmetric(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H)
    if np.iscomplexobj(H):
        if np.any(np.imag(H)):
            raise ValueError("discrete-state couplings must be real; the U/V split needs a real H")
        H = np.real(H)
    H = H.astype(float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"coupling matrix must be square, got shape {H.shape}")
    if float(np.max(np.abs(H - H.T))) > 1e-12 * max(1.0, float(np.max(np.abs(H)))):
        raise NotHermitianError("discrete-state coupling matrix is not symmetric")
    return H


def discrete_state_drift(H: np.ndarray, psi0: np.ndarray, T: float, dt: float,
                         hbar: Optional[float] = None) -> float:
    """Distance after time T between leapfrog evolution and exp(-i H T / hbar) psi0."""
    hbar = config.resolve_hbar(hbar)
    H = _real_symmetric(H)
    steps = _step_count(T, dt)
    s = SplitState.from_complex(np.asarray(psi0, dtype=complex))
    for _ in range(steps):
        s = discrete_state_step(s, H, dt, hbar)
    exact = linalg.expm(-1j * H * T / hbar) @ np.asarray(psi0, dtype=complex)
    return float(np.max(np.abs(s.to_complex() - exact)))

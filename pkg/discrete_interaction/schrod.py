"""Grid Schrodinger solver in 1D and on separable 3D product grids.

Evolution uses the same kick-drift-kick U/V leapfrog as the kernel update
with the Hamiltonian ``-(hbar^2 / 2m) Laplacian + R``, the Laplacian being
the sum of three-point second differences along every axis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import linalg, sparse
from scipy.sparse import linalg as sparse_linalg

from .config import Config
from .errors import GridMismatchError, NormalizationError, NumericalBlowupError, StabilityError
from .kernel_evolution import laplacian, leapfrog_step, shift
from .operators import Grid1D, ProductGrid, Spectrum, WaveFunction, fix_phase
from .utils.constants import EVOLVE_NORM_TOL, WALL_HEIGHT_FACTOR, Boundary
from .utils.progress import step_bar

logger = logging.getLogger(__name__)
config = Config()

AnyGrid = Union[Grid1D, ProductGrid]
Scalar = Callable[[np.ndarray], np.ndarray]


def _axes(grid: AnyGrid) -> Tuple[Grid1D, ...]:
    return grid.axes if isinstance(grid, ProductGrid) else (grid,)


def _shape(grid: AnyGrid) -> Tuple[int, ...]:
    return tuple(a.n for a in _axes(grid))


def _cell(grid: AnyGrid) -> float:
    return float(np.prod([a.dx for a in _axes(grid)]))


@dataclass(frozen=True)
class ProductWaveFunction:
    """Samples of a wave function on a product grid."""

    grid: ProductGrid
    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != self.grid.shape:
            raise GridMismatchError(
                f"wave function has shape {samples.shape}, grid has {self.grid.shape}"
            )
        object.__setattr__(self, "samples", samples)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.grid.cell_volume))

    @classmethod
    def product(cls, grid: ProductGrid, factors: List[WaveFunction]) -> "ProductWaveFunction":
        if len(factors) != grid.dim:
            raise GridMismatchError(f"need {grid.dim} factors, got {len(factors)}")
        samples = factors[0].samples
        for f in factors[1:]:
            samples = np.multiply.outer(samples, f.samples)
        return cls(grid, samples)


State = Union[WaveFunction, ProductWaveFunction]


@dataclass(frozen=True)
class Potential:
    """Grid samples of R plus, for 1D factories, the closed form and its
    first two derivatives (used off-grid by the least-action solver)."""

    samples: np.ndarray
    grid: AnyGrid
    label: str = "custom"
    func: Optional[Scalar] = field(default=None, compare=False)
    grad: Optional[Scalar] = field(default=None, compare=False)
    curvature: Optional[Scalar] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float)
        if samples.shape != _shape(self.grid):
            raise GridMismatchError(
                f"potential has shape {samples.shape}, grid has {_shape(self.grid)}"
            )
        if not np.all(np.isfinite(samples)):
            raise ValueError("potential contains non-finite samples")
        object.__setattr__(self, "samples", samples)

    def shifted(self, constant: float) -> "Potential":
        func = self.func
        shifted_func = None if func is None else (lambda x: func(x) + constant)
        return Potential(self.samples + constant, self.grid, self.label,
                         shifted_func, self.grad, self.curvature)

    def value(self, x: np.ndarray) -> np.ndarray:
        if self.func is not None:
            return self.func(x)
        if not isinstance(self.grid, Grid1D):
            raise ValueError("off-grid evaluation needs a closed form on product grids")
        return np.interp(x, self.grid.points, self.samples)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.grad is not None:
            return self.grad(x)
        h = 1e-5 * max(1.0, float(np.max(np.abs(x))))
        return (self.value(x + h) - self.value(x - h)) / (2.0 * h)

    def second_derivative(self, x: np.ndarray) -> np.ndarray:
        if self.curvature is not None:
            return self.curvature(x)
        h = 1e-4 * max(1.0, float(np.max(np.abs(x))))
        return (self.gradient(x + h) - self.gradient(x - h)) / (2.0 * h)


def harmonic_potential(grid: Grid1D, omega: float, mass: float = 1.0, center: float = 0.0) -> Potential:
    k = mass * omega ** 2
    return Potential(
        0.5 * k * (grid.points - center) ** 2, grid, "harmonic",
        func=lambda x: 0.5 * k * (x - center) ** 2,
        grad=lambda x: k * (x - center),
        curvature=lambda x: np.full_like(np.asarray(x, dtype=float), k),
    )


def linear_potential(grid: Grid1D, slope: float) -> Potential:
    return Potential(
        slope * grid.points, grid, "linear",
        func=lambda x: slope * x,
        grad=lambda x: np.full_like(np.asarray(x, dtype=float), slope),
        curvature=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    )


def constant_potential(grid: AnyGrid, value: float) -> Potential:
    return Potential(
        np.full(_shape(grid), float(value)), grid, "constant",
        func=lambda x: np.full_like(np.asarray(x, dtype=float), value),
        grad=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        curvature=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    )


def well_potential(grid: Grid1D, left: float, right: float, mass: float = 1.0,
                   hbar: Optional[float] = None) -> Potential:
    """Flat well on [left, right] with walls of height 1e6 hbar^2 / (m dx^2).

    Meant for ``stationary``; the walls make explicit time stepping
    impractically stiff.
    """
    hbar = config.resolve_hbar(hbar)
    x = grid.points
    wall = WALL_HEIGHT_FACTOR * hbar ** 2 / (mass * grid.dx ** 2)
    inside = (x >= left) & (x <= right)
    return Potential(np.where(inside, 0.0, wall), grid, "well")


def separable_potential(grid: ProductGrid, parts: List[Potential]) -> Potential:
    """R(x) + R(y) + R(z) on a product grid."""
    if len(parts) != grid.dim:
        raise GridMismatchError(f"need {grid.dim} one-dimensional potentials, got {len(parts)}")
    total = np.zeros(grid.shape)
    for axis, part in enumerate(parts):
        if part.grid != grid.axes[axis]:
            raise GridMismatchError(f"potential {axis} lives on a different axis grid")
        view = [1] * grid.dim
        view[axis] = grid.shape[axis]
        total = total + part.samples.reshape(view)
    return Potential(total, grid, "separable")


@dataclass(frozen=True)
class EvolConfig:
    dt: float
    steps: int
    mass: float = 1.0
    hbar: Optional[float] = None
    stability_factor: Optional[float] = None
    sample_every: int = 1
    keep_states: bool = False

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ValueError(f"steps must be non-negative, got {self.steps}")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be at least 1, got {self.sample_every}")

    @property
    def resolved_hbar(self) -> float:
        return config.resolve_hbar(self.hbar)

    @property
    def resolved_stability_factor(self) -> float:
        return config.STABILITY_FACTOR if self.stability_factor is None else self.stability_factor


@dataclass
class TrajectoryLog:
    """Sampled observables. ``snapshots`` stays empty unless the run was
    configured with ``keep_states``."""

    t: List[float] = field(default_factory=list)
    norm: List[float] = field(default_factory=list)
    x: List[np.ndarray] = field(default_factory=list)
    p: List[np.ndarray] = field(default_factory=list)
    spread: List[np.ndarray] = field(default_factory=list)
    force: List[np.ndarray] = field(default_factory=list)
    energy: List[float] = field(default_factory=list)
    snapshots: List[np.ndarray] = field(default_factory=list)
    grid: Optional[AnyGrid] = None
    hbar: float = 1.0

    def __len__(self) -> int:
        return len(self.t)

    def to_frame(self) -> pd.DataFrame:
        data = {"t": self.t, "norm": self.norm, "energy": self.energy}
        x = np.array(self.x)
        p = np.array(self.p)
        spread = np.array(self.spread)
        for axis in range(x.shape[1] if x.ndim == 2 else 0):
            data[f"x{axis}"] = x[:, axis]
            data[f"p{axis}"] = p[:, axis]
            data[f"width{axis}"] = spread[:, axis]
        return pd.DataFrame(data)


def hamiltonian_action(R: Potential, mass: float, hbar: float) -> Callable[[np.ndarray], np.ndarray]:
    kin = hbar ** 2 / (2.0 * mass)
    axes = _axes(R.grid)

    def apply(f: np.ndarray) -> np.ndarray:
        lap = np.zeros_like(f)
        for axis, g in enumerate(axes):
            lap = lap + laplacian(f, g.dx, g.boundary, axis)
        return -kin * lap + R.samples * f

    return apply


def stability_bound(R: Potential, mass: float, hbar: float, factor: float) -> float:
    kin = hbar ** 2 / (2.0 * mass)
    e_max = sum(4.0 * kin / g.dx ** 2 for g in _axes(R.grid)) + float(np.max(np.abs(R.samples)))
    return factor * 2.0 * hbar / e_max


def _momentum_means(psi: np.ndarray, grid: AnyGrid, hbar: float) -> np.ndarray:
    cell = _cell(grid)
    out = []
    for axis, g in enumerate(_axes(grid)):
        d = (shift(psi, 1, g.boundary, axis) - shift(psi, -1, g.boundary, axis)) / (2.0 * g.dx)
        out.append(float(np.real(np.vdot(psi, -1j * hbar * d)) * cell))
    return np.array(out)


def _position_means(psi: np.ndarray, grid: AnyGrid) -> np.ndarray:
    density = np.abs(psi) ** 2 * _cell(grid)
    axes = _axes(grid)
    if len(axes) == 1:
        return np.array([float(np.sum(density * axes[0].points))])
    mesh = np.meshgrid(*[a.points for a in axes], indexing="ij")
    return np.array([float(np.sum(density * m)) for m in mesh])


def _position_spreads(psi: np.ndarray, grid: AnyGrid) -> np.ndarray:
    """Per-axis standard deviation of |psi|^2, normalized to unit norm."""
    density = np.abs(psi) ** 2
    density = density / density.sum()
    axes = _axes(grid)
    mesh = [axes[0].points] if len(axes) == 1 else np.meshgrid(*[a.points for a in axes], indexing="ij")
    out = []
    for m in mesh:
        mean = np.sum(density * m)
        out.append(float(np.sqrt(np.sum(density * (m - mean) ** 2))))
    return np.array(out)


def _record(log: TrajectoryLog, t: float, psi: np.ndarray, apply_h: Callable[[np.ndarray], np.ndarray],
            R: Potential, keep_state: bool) -> None:
    grid = log.grid
    cell = _cell(grid)
    log.t.append(t)
    log.norm.append(float(np.sum(np.abs(psi) ** 2) * cell))
    log.x.append(_position_means(psi, grid))
    log.p.append(_momentum_means(psi, grid, log.hbar))
    log.spread.append(_position_spreads(psi, grid))
    log.force.append(force_expectation(psi, R))
    log.energy.append(float(np.real(np.vdot(psi, apply_h(psi))) * cell))
    if keep_state:
        log.snapshots.append(psi.copy())


def evolve(psi0: State, R: Potential, cfg: EvolConfig) -> Tuple[State, TrajectoryLog]:
    """Evolve ``psi0`` for ``cfg.steps`` steps of size ``cfg.dt``.

    A negative ``dt`` runs the same scheme backwards in time. The input may
    be off unit norm by up to ``EVOLVE_NORM_TOL``, which admits the output
    of an earlier run.
    """
    if psi0.grid != R.grid:
        raise GridMismatchError("initial state and potential live on different grids")
    deviation = abs(psi0.norm() ** 2 - 1.0)
    if deviation > EVOLVE_NORM_TOL:
        raise NormalizationError(deviation, "initial state")
    hbar = cfg.resolved_hbar
    bound = stability_bound(R, cfg.mass, hbar, cfg.resolved_stability_factor)
    if abs(cfg.dt) > bound:
        raise StabilityError(cfg.dt, bound)

    apply_h = hamiltonian_action(R, cfg.mass, hbar)
    log = TrajectoryLog(grid=R.grid, hbar=hbar)
    U = np.real(psi0.samples).copy()
    V = np.imag(psi0.samples).copy()
    _record(log, 0.0, psi0.samples, apply_h, R, cfg.keep_states)

    with step_bar(cfg.steps, "evolve") as bar:
        for step in range(1, cfg.steps + 1):
            U, V = leapfrog_step(U, V, apply_h, cfg.dt, hbar)
            if not (np.all(np.isfinite(U)) and np.all(np.isfinite(V))):
                raise NumericalBlowupError(step)
            if step % cfg.sample_every == 0 or step == cfg.steps:
                _record(log, step * cfg.dt, U + 1j * V, apply_h, R, cfg.keep_states)
            bar.update(1)

    logger.debug("evolved %d steps of %.3e, final norm %.12f", cfg.steps, cfg.dt, log.norm[-1])
    final = U + 1j * V
    if isinstance(psi0, WaveFunction):
        return WaveFunction(psi0.grid, final), log
    return ProductWaveFunction(psi0.grid, final), log


def _second_difference(g: Grid1D) -> sparse.csr_matrix:
    n = g.n
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    mat = sparse.diags([off, main, off], [-1, 0, 1], format="lil")
    if g.boundary == Boundary.PERIODIC:
        mat[0, n - 1] = 1.0
        mat[n - 1, 0] = 1.0
    return mat.tocsr() / g.dx ** 2


def hamiltonian_matrix(R: Potential, mass: float = 1.0, hbar: Optional[float] = None) -> sparse.csr_matrix:
    hbar = config.resolve_hbar(hbar)
    axes = _axes(R.grid)
    lap = None
    for axis, g in enumerate(axes):
        term = _second_difference(g)
        for other in range(len(axes)):
            if other < axis:
                term = sparse.kron(sparse.identity(axes[other].n), term)
            elif other > axis:
                term = sparse.kron(term, sparse.identity(axes[other].n))
        lap = term if lap is None else lap + term
    kin = hbar ** 2 / (2.0 * mass)
    return (-kin * lap + sparse.diags(R.samples.ravel())).tocsr()


def stationary(R: Potential, count: int, mass: float = 1.0, hbar: Optional[float] = None) -> Spectrum:
    """Lowest ``count`` eigenpairs of -(hbar^2/2m) Laplacian + R.

    Eigenvectors are unit vectors over the flattened grid; divide by
    ``sqrt(cell volume)`` for normalized wave functions.
    """
    size = int(np.prod(_shape(R.grid)))
    if not 1 <= count <= size:
        raise ValueError(f"count must lie in [1, {size}], got {count}")
    H = hamiltonian_matrix(R, mass, hbar)
    if isinstance(R.grid, Grid1D) or count >= size - 1:
        vals, vecs = linalg.eigh(H.toarray(), subset_by_index=[0, count - 1])
    else:
        vals, vecs = sparse_linalg.eigsh(H, k=count, which="SA")
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    return Spectrum(np.asarray(vals, dtype=float), fix_phase(vecs.astype(complex)))


def force_expectation(psi: np.ndarray, R: Potential) -> np.ndarray:
    """Expectation of the grid force -(i/hbar)[R, p] per axis.

    With central-difference momentum this is the exact rate of change of
    <p> under the grid Hamiltonian, and reduces to <grad R> as dx -> 0.
    """
    cell = _cell(R.grid)
    out = []
    for axis, g in enumerate(_axes(R.grid)):
        r_up = shift(R.samples, 1, Boundary.PERIODIC, axis) - R.samples
        r_down = R.samples - shift(R.samples, -1, Boundary.PERIODIC, axis)
        term = r_up * shift(psi, 1, g.boundary, axis) + r_down * shift(psi, -1, g.boundary, axis)
        out.append(float(np.real(np.vdot(psi, term)) * cell / (2.0 * g.dx)))
    return np.array(out)


def ehrenfest(log: TrajectoryLog, R: Potential) -> float:
    """Max over interior samples of |d<p>/dt + <grad R>| with centred time differences.

    The force is the one recorded along the run, so ``R`` must be the
    potential the trajectory was evolved in.
    """
    if len(log) < 3:
        raise ValueError(f"ehrenfest check needs at least 3 samples, got {len(log)}")
    if log.grid != R.grid:
        raise GridMismatchError("trajectory and potential live on different grids")
    t = np.asarray(log.t)
    p = np.asarray(log.p)
    worst = 0.0
    for i in range(1, len(t) - 1):
        dpdt = (p[i + 1] - p[i - 1]) / (t[i + 1] - t[i - 1])
        residual = dpdt + log.force[i]
        worst = max(worst, float(np.max(np.abs(residual))))
    return worst


def packet_width(psi: WaveFunction) -> float:
    """Standard deviation of |psi|^2."""
    density = np.abs(psi.samples) ** 2 * psi.grid.dx
    density = density / density.sum()
    x = psi.grid.points
    mean = float(np.sum(density * x))
    return float(np.sqrt(np.sum(density * (x - mean) ** 2)))

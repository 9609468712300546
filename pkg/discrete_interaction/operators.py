"""Finite-dimensional Hilbert-space toolkit on uniform grids.

Grids are cell-centred: ``x_j = x_min + (j + 1/2) dx`` with
``dx = (x_max - x_min) / n``, so a symmetric interval gives a grid that is
symmetric about the origin. Inner products are Riemann sums weighted by
``dx``; operator matrices act on raw samples, so an eigenvector ``v`` of a
matrix corresponds to the wave function ``v / sqrt(dx)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .config import Config
from .errors import (
    BoundaryError,
    GridMismatchError,
    LinearDependenceError,
    NormalizationError,
    NotHermitianError,
    NotOrthonormalError,
)
from .utils.constants import (
    DEGENERACY_GAP,
    HERMITIAN_TOL,
    NORMALIZATION_TOL,
    ORTHONORMAL_TOL,
    PHASE_FIX_TOL,
    PIVOT_TOL,
    Boundary,
)

logger = logging.getLogger(__name__)
config = Config()


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int
    boundary: str = Boundary.PERIODIC

    def __post_init__(self) -> None:
        if self.n < 4:
            raise ValueError(f"grid needs at least 4 points, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError(f"grid interval is empty: [{self.x_min}, {self.x_max}]")
        if self.boundary not in Boundary.get_all_boundaries():
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def points(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx

    @property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers of the discrete Fourier modes, in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def plane_wave(self, m: int) -> "WaveFunction":
        """Normalized discrete Fourier mode with wavenumber 2 pi m / L."""
        k = 2.0 * np.pi * m / self.length
        samples = np.exp(1j * k * (self.points - self.x_min)) / np.sqrt(self.length)
        return WaveFunction(self, samples)


@dataclass(frozen=True)
class ProductGrid:
    """Tensor product of 1D grids used by the 3D Schrodinger sector."""

    axes: Tuple[Grid1D, ...]

    def __post_init__(self) -> None:
        if not self.axes:
            raise ValueError("product grid needs at least one axis")

    @classmethod
    def cube(cls, x_min: float, x_max: float, n: int, boundary: str = Boundary.PERIODIC,
             dim: int = 3) -> "ProductGrid":
        axis = Grid1D(x_min, x_max, n, boundary)
        return cls(tuple(axis for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(a.n for a in self.axes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod([a.dx for a in self.axes]))

    def mesh(self) -> List[np.ndarray]:
        return np.meshgrid(*[a.points for a in self.axes], indexing="ij")


@dataclass(frozen=True)
class WaveFunction:
    grid: Grid1D
    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid.n,):
            raise GridMismatchError(
                f"wave function has {samples.shape} samples, grid has {self.grid.n} points"
            )
        object.__setattr__(self, "samples", samples)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.grid.dx))

    def normalized(self) -> "WaveFunction":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero function")
        return WaveFunction(self.grid, self.samples / nrm)

    @classmethod
    def gaussian(cls, grid: Grid1D, x0: float = 0.0, sigma: float = 1.0, k0: float = 0.0) -> "WaveFunction":
        """Normalized Gaussian packet with position spread ``sigma`` (of |psi|^2)."""
        x = grid.points
        samples = np.exp(-((x - x0) ** 2) / (4.0 * sigma ** 2) + 1j * k0 * x)
        return cls(grid, samples).normalized()


@dataclass(frozen=True)
class HermitianOp:
    matrix: np.ndarray
    grid: Optional[Grid1D] = None

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        defect = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if defect >= HERMITIAN_TOL * scale:
            raise NotHermitianError(f"operator is not Hermitian (max |H - H^dagger| = {defect:.3e})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, psi: WaveFunction) -> WaveFunction:
        return WaveFunction(psi.grid, self.matrix @ psi.samples)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def residual(self, op: HermitianOp) -> float:
        lhs = op.matrix @ self.eigenvectors
        rhs = self.eigenvectors * self.eigenvalues[None, :]
        return float(np.max(np.linalg.norm(lhs - rhs, axis=0)))


def fix_phase(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for c in range(out.shape[1]):
        col = out[:, c]
        nz = np.flatnonzero(np.abs(col) > PHASE_FIX_TOL)
        if nz.size:
            lead = col[nz[0]]
            out[:, c] = col * (abs(lead) / lead)
    return out


def eigensystem(op: HermitianOp) -> Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors.

    Vectors inside a degenerate cluster (neighbouring gap below
    ``DEGENERACY_GAP``) are re-orthonormalized by QR, and every vector has its
    first non-negligible component made real and positive.
    """
    vals, vecs = linalg.eigh(op.matrix)
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] >= DEGENERACY_GAP:
            if i - start > 1:
                q, _ = np.linalg.qr(vecs[:, start:i])
                vecs[:, start:i] = q
            start = i
    return Spectrum(np.asarray(vals, dtype=float), fix_phase(vecs))


def _check_same_grid(a: WaveFunction, b: WaveFunction) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"wave functions live on different grids: {a.grid} vs {b.grid}")


def inner(a: WaveFunction, b: WaveFunction) -> complex:
    """Riemann sum of a(x) conj(b(x)) dx."""
    _check_same_grid(a, b)
    return complex(np.sum(a.samples * b.samples.conj()) * a.grid.dx)


def gram_schmidt(fns: Sequence[WaveFunction]) -> List[WaveFunction]:
    """Modified Gram-Schmidt; raises naming the first dependent input."""
    out: List[WaveFunction] = []
    for idx, fn in enumerate(fns):
        if out:
            _check_same_grid(out[0], fn)
        samples = fn.samples.copy()
        for q in out:
            samples = samples - inner(WaveFunction(fn.grid, samples), q) * q.samples
        pivot = float(np.sqrt(np.sum(np.abs(samples) ** 2) * fn.grid.dx))
        if pivot < PIVOT_TOL:
            raise LinearDependenceError(idx, pivot)
        out.append(WaveFunction(fn.grid, samples / pivot))
    return out


def gram_matrix(fns: Sequence[WaveFunction]) -> np.ndarray:
    return np.array([[inner(a, b) for b in fns] for a in fns])


def op_from_eigensystem(vals: Sequence[float], fns: Sequence[WaveFunction]) -> HermitianOp:
    """H = sum_k p_k |psi_k><psi_k| dx, acting on raw samples."""
    if len(vals) != len(fns):
        raise ValueError(f"got {len(vals)} eigenvalues for {len(fns)} functions")
    if not fns:
        raise ValueError("need at least one eigenfunction")
    g = gram_matrix(fns)
    defect = float(np.max(np.abs(g - np.eye(len(fns)))))
    if defect > ORTHONORMAL_TOL:
        raise NotOrthonormalError(f"eigenfunctions are not orthonormal (defect {defect:.3e})")
    grid = fns[0].grid
    basis = np.column_stack([f.samples for f in fns])
    p = np.asarray(vals, dtype=float)
    matrix = (basis * p[None, :]) @ basis.conj().T * grid.dx
    # rounding in the outer products leaves a tiny anti-Hermitian part
    matrix = 0.5 * (matrix + matrix.conj().T)
    return HermitianOp(matrix, grid)


def position_op(grid: Grid1D) -> HermitianOp:
    return HermitianOp(np.diag(grid.points).astype(complex), grid)


def _central_difference(n: int, spacing: float) -> np.ndarray:
    d = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    d[idx, (idx + 1) % n] = 1.0
    d[idx, (idx - 1) % n] = -1.0
    return d / (2.0 * spacing)


def momentum_op(grid: Grid1D, hbar: Optional[float] = None) -> HermitianOp:
    """-i hbar times the antisymmetric central difference on a periodic grid."""
    if grid.boundary != Boundary.PERIODIC:
        raise BoundaryError(
            f"momentum operator requires a periodic grid, got boundary {grid.boundary!r}"
        )
    hbar = config.resolve_hbar(hbar)
    return HermitianOp(-1j * hbar * _central_difference(grid.n, grid.dx), grid)


def periodic_generator(n: int, period: float,
                       scale: Optional[float] = None) -> Tuple[HermitianOp, Spectrum]:
    """-i scale d/dtheta on ``n`` points of a periodic interval of length ``period``,
    with its spectrum.

    With ``scale = hbar`` this is the rotational momentum about an axis
    (period 2 pi) or the U(1) charge generator (period 2 pi / q). A Fourier
    mode e^{i m theta 2 pi / period} has eigenvalue
    scale * sin(2 pi m / n) / dtheta, which tends to m * 2 pi scale / period.
    """
    if n < 4:
        raise ValueError(f"generator needs at least 4 points, got {n}")
    scale = config.HBAR if scale is None else float(scale)
    grid = Grid1D(-period / 2.0, period / 2.0, n, Boundary.PERIODIC)
    op = HermitianOp(-1j * scale * _central_difference(n, grid.dx), grid)
    return op, eigensystem(op)


def ladder_value(n: int, period: float, m: int, scale: Optional[float] = None) -> float:
    """Eigenvalue of ``periodic_generator`` on its m-th Fourier mode."""
    scale = config.HBAR if scale is None else float(scale)
    dtheta = period / n
    return float(scale * np.sin(2.0 * np.pi * m / n) / dtheta)


def _require_unit(psi: WaveFunction) -> None:
    deviation = abs(psi.norm() ** 2 - 1.0)
    if deviation > NORMALIZATION_TOL:
        raise NormalizationError(deviation, "wave function")


def _check_dims(op: HermitianOp, psi: WaveFunction) -> None:
    if op.dim != psi.grid.n:
        raise GridMismatchError(f"operator of dimension {op.dim} applied to {psi.grid.n} samples")


def expectation(H: HermitianOp, psi: WaveFunction) -> float:
    _require_unit(psi)
    _check_dims(H, psi)
    value = complex(np.vdot(psi.samples, H.matrix @ psi.samples) * psi.grid.dx)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise NotHermitianError(f"expectation has imaginary part {value.imag:.3e}")
    return value.real


@dataclass(frozen=True)
class UncertaintyResult:
    dA: float
    dB: float
    bound: float

    @property
    def product(self) -> float:
        return self.dA * self.dB

    @property
    def satisfied(self) -> bool:
        return self.product >= self.bound - 1e-9


def commutator(A: HermitianOp, B: HermitianOp) -> np.ndarray:
    if A.dim != B.dim:
        raise GridMismatchError(f"operators have dimensions {A.dim} and {B.dim}")
    return A.matrix @ B.matrix - B.matrix @ A.matrix


def _spread(op: HermitianOp, psi: WaveFunction) -> float:
    mean = expectation(op, psi)
    second = float(np.vdot(op.matrix @ psi.samples, op.matrix @ psi.samples).real * psi.grid.dx)
    return float(np.sqrt(max(second - mean ** 2, 0.0)))


def commutator_uncertainty(A: HermitianOp, B: HermitianOp, psi: WaveFunction) -> UncertaintyResult:
    """Standard deviations of A and B in psi and the bound |<[A, B]>| / 2."""
    comm = commutator(A, B)
    _check_dims(A, psi)
    _require_unit(psi)
    bound = 0.5 * abs(np.vdot(psi.samples, comm @ psi.samples) * psi.grid.dx)
    return UncertaintyResult(_spread(A, psi), _spread(B, psi), float(bound))

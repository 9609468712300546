"""Mode-space quantization of free linear bosonic fields.

Units are natural (hbar = 1, c = 1). Every mode of wave vector k is an
oscillator of frequency omega_k carrying ladder operators with the
commutator normalization

    [A, A^dagger] = 2 omega,   i.e.  A = sqrt(2 omega) a,

which is the finite-lattice form of the continuum 2 (2 pi)^3 delta(k - k')
omega_k. Truncating the number basis at N levels leaves the commutator
exact on every level but the top one; all exactness checks are taken on
the sub-cutoff block where every oscillator has at most N - 2 quanta.

Two single-mode Hamiltonians are exposed:

* ``ModeOperators.hamiltonian`` is number-exact, ``A^dagger A / 2 + omega / 2``,
  i.e. ``(A^dagger A + A A^dagger) / 4`` with the ideal commutator. It
  generates exact oscillator frequencies on the whole truncated space and is
  used to assemble field momenta.
* ``ModeOperators.symmetrized_hamiltonian`` is the raw truncated
  ``(A^dagger A + A A^dagger) / 4``. Its top level sits at omega (N - 1) / 2,
  a truncation artifact, and it coincides with the Hermite-grid Hamiltonian of
  ``single_mode_hamiltonian``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg

from .errors import DimensionGuardError, InfraredModeError
from .operators import Grid1D, HermitianOp, Spectrum, eigensystem
from .pathint import LagrangianSpec, PropagatorMatrix, Slicing, propagator
from .schrod import harmonic_potential
from .utils.constants import MAX_FIELD_CUTOFF, MAX_FIELD_OSCILLATORS, Boundary, FieldKind

logger = logging.getLogger(__name__)

HERMITE_DECAY_MARGIN = 5.0


# ----------------------------------------------------------------------
# Modes and polarizations
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ModeSet:
    kind: str
    mass: float
    k: np.ndarray
    omega: np.ndarray
    polarizations: np.ndarray

    @property
    def count(self) -> int:
        return self.k.shape[0]

    @property
    def polarization_count(self) -> int:
        return self.polarizations.shape[1]

    @property
    def components(self) -> int:
        """Number of field components: 1 for a scalar, 3 for a vector potential."""
        return self.polarizations.shape[2]

    @property
    def oscillator_count(self) -> int:
        return self.count * self.polarization_count

    def transversality_defect(self) -> float:
        """max |e . k| over transverse polarizations (Maxwell: all of them)."""
        if self.kind == FieldKind.KLEIN_GORDON:
            return 0.0
        transverse = self.polarizations[:, :2, :]
        return float(np.max(np.abs(np.einsum("mpc,mc->mp", transverse, self.k))))

    def orthonormality_defect(self) -> float:
        gram = np.einsum("mpc,mqc->mpq", self.polarizations, self.polarizations)
        eye = np.eye(self.polarization_count)[None, :, :]
        return float(np.max(np.abs(gram - eye)))


def _as_vectors(k_list: Sequence) -> np.ndarray:
    k = np.asarray(k_list, dtype=float)
    if k.ndim == 1:
        k = k[:, None]
    if k.ndim != 2 or k.shape[0] == 0 or k.shape[1] > 3:
        raise ValueError(f"k_list must be a non-empty list of 1D..3D wave vectors, got shape {k.shape}")
    return np.pad(k, ((0, 0), (0, 3 - k.shape[1])))


def transverse_basis(k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal pair perpendicular to a nonzero ``k``.

    The first vector is the axis least aligned with k with its k component
    removed; the second completes a right-handed triad with k.
    """
    khat = k / np.linalg.norm(k)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(khat)))] = 1.0
    e1 = axis - np.dot(axis, khat) * khat
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(khat, e1)
    return e1, e2 / np.linalg.norm(e2)


def build_modes(kind: str, k_list: Sequence, m: float = 0.0) -> ModeSet:
    if kind not in FieldKind.get_all_kinds():
        raise ValueError(f"unknown field kind {kind!r}; expected one of {FieldKind.get_all_kinds()}")
    if m < 0:
        raise ValueError(f"mass must be non-negative, got {m}")
    if kind == FieldKind.MAXWELL and m != 0:
        raise ValueError("the Maxwell field is massless; use kind='proca' for a massive vector field")
    k = _as_vectors(k_list)
    knorm = np.linalg.norm(k, axis=1)
    omega = np.sqrt(knorm ** 2 + m ** 2)
    if np.any(omega == 0.0):
        raise InfraredModeError()

    pols = []
    for vec, size in zip(k, knorm):
        if kind == FieldKind.KLEIN_GORDON:
            pols.append(np.ones((1, 1)))
        elif kind == FieldKind.MAXWELL:
            pols.append(np.stack(transverse_basis(vec)))
        elif size == 0.0:
            pols.append(np.eye(3))
        else:
            e1, e2 = transverse_basis(vec)
            pols.append(np.stack([e1, e2, vec / size]))
    return ModeSet(kind, float(m), k, omega, np.stack(pols))


def lattice_momenta(n_sites: int, spacing: float) -> np.ndarray:
    """A complete, sign-symmetric set of lattice wavenumbers 2 pi m / (n spacing)."""
    if n_sites < 1:
        raise ValueError(f"lattice needs at least one site, got {n_sites}")
    m = np.arange(-((n_sites - 1) // 2), n_sites // 2 + 1)
    return 2.0 * np.pi * m / (n_sites * spacing)


# ----------------------------------------------------------------------
# Single-mode operators
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FockSpaceTrunc:
    cutoff: int

    def __post_init__(self) -> None:
        if self.cutoff < 2:
            raise ValueError(f"Fock cutoff must be at least 2, got {self.cutoff}")


def lowering(N: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, N, dtype=float)), k=1).astype(complex)


@dataclass(frozen=True)
class ModeOperators:
    A: np.ndarray
    A_dag: np.ndarray
    omega: float

    @property
    def cutoff(self) -> int:
        return self.A.shape[0]

    def commutator(self) -> np.ndarray:
        return self.A @ self.A_dag - self.A_dag @ self.A

    def commutator_defect(self) -> float:
        """max |[A, A^dagger] - 2 omega| on levels below the cutoff."""
        block = self.commutator()[: self.cutoff - 1, : self.cutoff - 1]
        return float(np.max(np.abs(block - 2.0 * self.omega * np.eye(self.cutoff - 1))))

    def number(self) -> np.ndarray:
        return np.diag(np.arange(self.cutoff, dtype=float)).astype(complex)

    def hamiltonian(self) -> np.ndarray:
        return 0.5 * (self.A_dag @ self.A) + 0.5 * self.omega * np.eye(self.cutoff)

    def symmetrized_hamiltonian(self) -> np.ndarray:
        """(A^dagger A + A A^dagger) / 4.

        With A = sqrt(2 omega) a this is omega (a^dagger a + a a^dagger) / 2,
        i.e. the familiar 1/2 (a^dagger a + a a^dagger) form in units of omega.
        """
        return 0.25 * (self.A_dag @ self.A + self.A @ self.A_dag)

    def conventional(self) -> Tuple[np.ndarray, np.ndarray]:
        """Ladder pair with [a, a^dagger] = 1 below the cutoff."""
        scale = math.sqrt(2.0 * self.omega)
        return self.A / scale, self.A_dag / scale

    def position(self) -> np.ndarray:
        a, a_dag = self.conventional()
        return (a + a_dag) / math.sqrt(2.0 * self.omega)

    def momentum(self) -> np.ndarray:
        a, a_dag = self.conventional()
        return 1j * math.sqrt(self.omega / 2.0) * (a_dag - a)


def ladder(omega: float, N: int) -> ModeOperators:
    if N < 2:
        raise ValueError(f"Fock cutoff must be at least 2, got {N}")
    if not omega > 0:
        raise InfraredModeError()
    A = math.sqrt(2.0 * omega) * lowering(N)
    return ModeOperators(A, A.conj().T.copy(), float(omega))


def single_mode_hamiltonian(omega: float, N: int) -> Tuple[HermitianOp, Spectrum]:
    """H = (p^2 + omega^2 b^2) / 2 on the N-point Hermite grid.

    Grid points are the eigenvalues of the truncated coordinate; the
    potential is diagonal there and the kinetic term is the truncated
    momentum squared carried over to the grid.
    """
    mo = ladder(omega, N)
    X = mo.position()
    P = mo.momentum()
    nodes, U = linalg.eigh(X)
    kinetic = 0.5 * np.real(U.conj().T @ (P @ P) @ U)
    kinetic = 0.5 * (kinetic + kinetic.T)
    H = HermitianOp(kinetic + np.diag(0.5 * omega ** 2 * nodes ** 2))
    return H, eigensystem(H)


def hermite_nodes(omega: float, N: int) -> np.ndarray:
    return linalg.eigvalsh(ladder(omega, N).position())


# ----------------------------------------------------------------------
# Lattice field assembly
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    n_sites: int
    spacing: float

    def __post_init__(self) -> None:
        if self.n_sites < 1 or not self.spacing > 0:
            raise ValueError(f"invalid lattice: {self.n_sites} sites, spacing {self.spacing}")

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.n_sites) * self.spacing

    @property
    def volume(self) -> float:
        return self.n_sites * self.spacing


@dataclass(frozen=True)
class LatticeFieldOps:
    """phi[j, a] and pi[j, a] are matrices for site j and component a."""

    modes: ModeSet
    lattice: Lattice
    cutoff: int
    phi: np.ndarray
    pi: np.ndarray
    hamiltonian: np.ndarray
    sub_cutoff: np.ndarray

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def hermiticity_defect(self) -> float:
        phi_defect = np.max(np.abs(self.phi - np.conj(np.swapaxes(self.phi, -1, -2))))
        pi_defect = np.max(np.abs(self.pi - np.conj(np.swapaxes(self.pi, -1, -2))))
        return float(max(phi_defect, pi_defect))

    def vacuum_expectation(self, op: np.ndarray) -> complex:
        return complex(op[0, 0])


def _embed(op: np.ndarray, slot: int, count: int, N: int) -> np.ndarray:
    eye = np.eye(N, dtype=complex)
    factors = [op if i == slot else eye for i in range(count)]
    return reduce(np.kron, factors)


def _occupations(count: int, N: int) -> np.ndarray:
    """Occupation of every oscillator for each tensor basis state, shape (N^count, count)."""
    grids = np.meshgrid(*[np.arange(N)] * count, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def assemble_field(modes: ModeSet, lattice: Lattice, trunc: FockSpaceTrunc) -> LatticeFieldOps:
    """phi(x) = sum e (A e^{-ikx} + A^dagger e^{ikx}) / (2 omega sqrt(V)), pi = i[H, phi]."""
    count = modes.oscillator_count
    N = trunc.cutoff
    if count > MAX_FIELD_OSCILLATORS:
        raise DimensionGuardError(
            f"{count} oscillators exceed the limit of {MAX_FIELD_OSCILLATORS}", MAX_FIELD_OSCILLATORS
        )
    if N > MAX_FIELD_CUTOFF:
        raise DimensionGuardError(f"cutoff {N} exceeds the limit of {MAX_FIELD_CUTOFF}", MAX_FIELD_CUTOFF)

    dim = N ** count
    C = modes.components
    x = lattice.positions
    root_v = math.sqrt(lattice.volume)
    phi = np.zeros((lattice.n_sites, C, dim, dim), dtype=complex)
    H = np.zeros((dim, dim), dtype=complex)

    slot = 0
    for m in range(modes.count):
        omega = float(modes.omega[m])
        mo = ladder(omega, N)
        phase = np.exp(-1j * modes.k[m, 0] * x)
        for p in range(modes.polarization_count):
            A = _embed(mo.A, slot, count, N)
            A_dag = _embed(mo.A_dag, slot, count, N)
            H += _embed(mo.hamiltonian(), slot, count, N)
            for j in range(lattice.n_sites):
                field_op = A * phase[j] + A_dag * np.conj(phase[j])
                for a in range(C):
                    e = modes.polarizations[m, p, a]
                    if e != 0.0:
                        phi[j, a] += e * field_op / (2.0 * omega * root_v)
            slot += 1

    pi = 1j * (H @ phi - phi @ H)
    sub_cutoff = np.all(_occupations(count, N) <= N - 2, axis=1)
    logger.debug("assembled %s field: %d oscillators, dim %d", modes.kind, count, dim)
    return LatticeFieldOps(modes, lattice, N, phi, pi, H, sub_cutoff)


def heisenberg_derivative(H: np.ndarray, op: np.ndarray) -> np.ndarray:
    """d/dt of e^{iHt} op e^{-iHt} at t = 0, through the eigenbasis of H."""
    energies, V = linalg.eigh(H)
    rotated = V.conj().T @ op @ V
    return V @ (1j * (energies[:, None] - energies[None, :]) * rotated) @ V.conj().T


@dataclass(frozen=True)
class CCRReport:
    deviation: float
    phi_pi: float
    phi_phi: float
    pi_pi: float
    incomplete_basis: bool


def _ccr_target(f: LatticeFieldOps, a: int, b: int, sep: int) -> complex:
    dx = f.lattice.spacing
    if f.modes.kind != FieldKind.MAXWELL:
        return 1j / dx if (a == b and sep == 0) else 0.0
    total = 0.0
    for m in range(f.modes.count):
        khat = f.modes.k[m] / np.linalg.norm(f.modes.k[m])
        projector = (1.0 if a == b else 0.0) - khat[a] * khat[b]
        total += projector * math.cos(f.modes.k[m, 0] * sep * dx)
    return 1j * total / f.lattice.volume


def _is_complete(f: LatticeFieldOps) -> bool:
    n = f.lattice.n_sites
    period = 2.0 * np.pi / f.lattice.spacing
    wanted = {int(round((k % period) / period * n)) % n for k in lattice_momenta(n, f.lattice.spacing)}
    present = {int(round((k % period) / period * n)) % n for k in f.modes.k[:, 0]}
    if f.modes.kind == FieldKind.MAXWELL:
        wanted.discard(0)
    return wanted <= present and len(present) == f.modes.count


def equal_time_ccr(f: LatticeFieldOps) -> CCRReport:
    """Deviations of [phi, pi], [phi, phi], [pi, pi] from the lattice targets.

    Measured on the sub-cutoff block. KG and Proca target i delta_ab delta_ij / dx;
    Maxwell targets the transverse projection carried by the present modes.
    """
    block = np.ix_(f.sub_cutoff, f.sub_cutoff)
    eye = np.eye(int(f.sub_cutoff.sum()))
    n, C = f.lattice.n_sites, f.modes.components
    worst = {"phi_pi": 0.0, "phi_phi": 0.0, "pi_pi": 0.0}
    for i in range(n):
        for j in range(n):
            for a in range(C):
                for b in range(C):
                    pp = (f.phi[i, a] @ f.pi[j, b] - f.pi[j, b] @ f.phi[i, a])[block]
                    target = _ccr_target(f, a, b, i - j)
                    worst["phi_pi"] = max(worst["phi_pi"], float(np.max(np.abs(pp - target * eye))))
                    ff = (f.phi[i, a] @ f.phi[j, b] - f.phi[j, b] @ f.phi[i, a])[block]
                    worst["phi_phi"] = max(worst["phi_phi"], float(np.max(np.abs(ff))))
                    qq = (f.pi[i, a] @ f.pi[j, b] - f.pi[j, b] @ f.pi[i, a])[block]
                    worst["pi_pi"] = max(worst["pi_pi"], float(np.max(np.abs(qq))))
    incomplete = not _is_complete(f)
    if incomplete:
        logger.warning(
            "equal-time commutators measured on an incomplete mode set; the lattice delta is not expected"
        )
    return CCRReport(max(worst.values()), worst["phi_pi"], worst["phi_phi"], worst["pi_pi"], incomplete)


def pairwise_commutator_defect(modes: ModeSet, N: int) -> float:
    """max |[A_r, A_s^dagger] - 2 omega_r delta_rs| and |[A_r, A_s]| over all
    oscillator pairs, each pair on its own two-oscillator space below the cutoff."""
    ops = []
    for m in range(modes.count):
        mo = ladder(float(modes.omega[m]), N)
        ops.extend([mo] * modes.polarization_count)
    sub = np.all(_occupations(2, N) <= N - 2, axis=1)
    block = np.ix_(sub, sub)
    eye = np.eye(int(sub.sum()))

    def comm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x @ y - y @ x)[block]

    worst = max(mo.commutator_defect() for mo in ops)
    for r in range(len(ops)):
        for s in range(r + 1, len(ops)):
            pair = [(_embed(op.A, slot, 2, N), _embed(op.A_dag, slot, 2, N), op.omega)
                    for slot, op in enumerate((ops[r], ops[s]))]
            for i, (A_i, _, omega_i) in enumerate(pair):
                for j, (A_j, A_j_dag, _) in enumerate(pair):
                    target = 2.0 * omega_i * eye if i == j else np.zeros_like(eye)
                    worst = max(worst, float(np.max(np.abs(comm(A_i, A_j_dag) - target))))
                    worst = max(worst, float(np.max(np.abs(comm(A_i, A_j)))))
    return worst


# ----------------------------------------------------------------------
# Heisenberg evolution of a single mode
# ----------------------------------------------------------------------

def heisenberg_operator(H: np.ndarray, op: np.ndarray, t: float) -> np.ndarray:
    """e^{iHt} op e^{-iHt}; exact phases when H is diagonal."""
    if not np.any(H - np.diag(np.diag(H))):
        e = np.real(np.diag(H))
        return np.exp(1j * (e[:, None] - e[None, :]) * t) * op
    energies, V = linalg.eigh(H)
    rotated = V.conj().T @ op @ V
    return V @ (np.exp(1j * (energies[:, None] - energies[None, :]) * t) * rotated) @ V.conj().T


def heisenberg_check(mo: ModeOperators, t_grid: Sequence[float], include_cutoff: bool = False) -> float:
    """Max residual of a'' + omega^2 a with centred second differences in t.

    Evolution uses the raw truncated Hamiltonian, so the top level carries
    the wrong frequency; ``include_cutoff=False`` restricts the residual to
    the leading (N-1)x(N-1) block where the oscillator equation is exact.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.size < 3:
        raise ValueError(f"need at least 3 times, got {t.size}")
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0) or steps[0] <= 0:
        raise ValueError("t_grid must be increasing and uniformly spaced")
    h = float(steps[0])
    H = mo.symmetrized_hamiltonian()
    a, _ = mo.conventional()
    series = [heisenberg_operator(H, a, float(ti)) for ti in t]
    size = mo.cutoff if include_cutoff else mo.cutoff - 1
    worst = 0.0
    for i in range(1, t.size - 1):
        accel = (series[i + 1] - 2.0 * series[i] + series[i - 1]) / h ** 2
        residual = (accel + mo.omega ** 2 * series[i])[:size, :size]
        worst = max(worst, float(np.max(np.abs(residual))))
    return worst


# ----------------------------------------------------------------------
# Oscillator eigenfunctions and per-mode propagators
# ----------------------------------------------------------------------

def hermite_functions(n_max: int, x: np.ndarray, omega: float, mass: float = 1.0,
                      hbar: float = 1.0) -> np.ndarray:
    """Oscillator eigenfunctions psi_0 .. psi_{n_max-1} at ``x``, shape (n_max, len(x)).

    Uses the normalized three-term recurrence, stable for large n.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be positive, got {n_max}")
    x = np.asarray(x, dtype=float)
    xi = math.sqrt(mass * omega / hbar) * x
    out = np.zeros((n_max, x.size))
    out[0] = (mass * omega / (math.pi * hbar)) ** 0.25 * np.exp(-0.5 * xi ** 2)
    if n_max > 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * xi * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_grid(n_max: int, omega: float, n_points: int) -> Grid1D:
    """Periodic grid on which psi_0 .. psi_{n_max-1} (unit mass) have decayed.

    The half width is the outermost turning point sqrt(2 n_max + 1) plus
    ``HERMITE_DECAY_MARGIN``, in units of 1 / sqrt(omega). The spacing must
    also resolve the same band in momentum, which needs
    n_points > 2 (sqrt(2 n_max + 1) + margin)^2 / pi.
    """
    if not omega > 0:
        raise InfraredModeError()
    reach = math.sqrt(2.0 * n_max + 1.0) + HERMITE_DECAY_MARGIN
    needed = 2.0 * reach ** 2 / math.pi
    if n_points <= needed:
        raise ValueError(f"{n_points} points cannot resolve {n_max} oscillator functions; need more than {needed:.0f}")
    half = reach / math.sqrt(omega)
    return Grid1D(-half, half, n_points, Boundary.PERIODIC)


def hermite_orthogonality_defect(n_max: int, grid: Grid1D, omega: float) -> float:
    psi = hermite_functions(n_max, grid.points, omega)
    gram = psi @ psi.T * grid.dx
    return float(np.max(np.abs(gram - np.eye(n_max))))


def hermite_completeness_defect(n_max: int, grid: Grid1D, omega: float, shift: float) -> float:
    """Reconstruction error of the ground state displaced by ``shift`` from
    its first ``n_max`` oscillator components; decreases as n_max grows."""
    psi = hermite_functions(n_max, grid.points, omega)
    target = hermite_functions(1, grid.points - shift, omega)[0]
    coeffs = psi @ target * grid.dx
    return float(np.max(np.abs(coeffs @ psi - target)))


def mode_propagator(omega: float, slicing: Slicing, grid: Grid1D) -> PropagatorMatrix:
    """Sliced propagator of a single mode amplitude, L = (a'^2 - omega^2 a^2) / 2."""
    R = harmonic_potential(grid, omega, mass=1.0)
    return propagator(LagrangianSpec(1.0, R, hbar=1.0), slicing, grid)

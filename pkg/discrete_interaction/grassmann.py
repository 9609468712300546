"""Finite Grassmann algebra with Berezin calculus and fermionic mode operators.

Basis monomials are bitmasks: bit ``g`` set means generator ``g`` is
present, and a monomial always denotes the product of its generators in
ascending index order. Operators act on the 2^n coefficient space as
explicit matrices, so spectra and anticommutators are checked by brute
force.

Conventions:

* derivatives act from the left: ``d/dg`` first moves ``g`` to the front,
  picking up one sign per generator of lower index;
* the Berezin integral over ``g`` is the same operation;
* in a two-generator sector, index ``2l`` is ``d`` and ``2l + 1`` is ``d*``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
from scipy import linalg

from .errors import AlgebraMismatchError, DimensionGuardError, GeneratorIndexError
from .utils.constants import MAX_GRASSMANN_GENERATORS

logger = logging.getLogger(__name__)


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class GAlgebra:
    n_generators: int

    def __post_init__(self) -> None:
        if not 1 <= self.n_generators <= MAX_GRASSMANN_GENERATORS:
            raise DimensionGuardError(
                f"Grassmann algebra needs 1..{MAX_GRASSMANN_GENERATORS} generators, "
                f"got {self.n_generators}",
                MAX_GRASSMANN_GENERATORS,
            )

    @property
    def dim(self) -> int:
        return 1 << self.n_generators

    def check_generator(self, gen: int) -> None:
        if not 0 <= gen < self.n_generators:
            raise GeneratorIndexError(
                f"generator index {gen} outside 0..{self.n_generators - 1}"
            )

    def one(self) -> "Multivector":
        coeffs = np.zeros(self.dim, dtype=complex)
        coeffs[0] = 1.0
        return Multivector(self, coeffs)

    def zero(self) -> "Multivector":
        return Multivector(self, np.zeros(self.dim, dtype=complex))

    def generator(self, gen: int) -> "Multivector":
        self.check_generator(gen)
        return self.monomial(1 << gen)

    def monomial(self, mask: int, coefficient: complex = 1.0) -> "Multivector":
        coeffs = np.zeros(self.dim, dtype=complex)
        coeffs[mask] = coefficient
        return Multivector(self, coeffs)

    def from_terms(self, terms: Mapping[int, complex]) -> "Multivector":
        coeffs = np.zeros(self.dim, dtype=complex)
        for mask, value in terms.items():
            coeffs[mask] += value
        return Multivector(self, coeffs)


@dataclass(frozen=True)
class Multivector:
    alg: GAlgebra
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.alg.dim,):
            raise AlgebraMismatchError(
                f"multivector has {coeffs.shape} coefficients, algebra needs {self.alg.dim}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    def terms(self) -> Dict[int, complex]:
        return {int(m): complex(self.coeffs[m]) for m in np.flatnonzero(self.coeffs)}

    def __add__(self, other: "Multivector") -> "Multivector":
        _same_algebra(self.alg, other.alg)
        return Multivector(self.alg, self.coeffs + other.coeffs)

    def __sub__(self, other: "Multivector") -> "Multivector":
        _same_algebra(self.alg, other.alg)
        return Multivector(self.alg, self.coeffs - other.coeffs)

    def __neg__(self) -> "Multivector":
        return Multivector(self.alg, -self.coeffs)

    def scale(self, factor: complex) -> "Multivector":
        return Multivector(self.alg, self.coeffs * factor)

    def __mul__(self, other: "Multivector") -> "Multivector":
        return gmul(self, other)

    def allclose(self, other: "Multivector", atol: float = 0.0) -> bool:
        _same_algebra(self.alg, other.alg)
        return bool(np.all(np.abs(self.coeffs - other.coeffs) <= atol))


def _same_algebra(a: GAlgebra, b: GAlgebra) -> None:
    if a != b:
        raise AlgebraMismatchError(
            f"operands live in different algebras ({a.n_generators} vs {b.n_generators} generators)"
        )


def _product_sign(ma: int, mb: int) -> int:
    """Sign of (ordered a)(ordered b) -> ordered (a | b); assumes no overlap."""
    swaps = 0
    bits = mb
    while bits:
        low = bits & -bits
        j = low.bit_length() - 1
        swaps += _popcount(ma >> (j + 1))
        bits ^= low
    return -1 if swaps & 1 else 1


def gmul(a: Multivector, b: Multivector) -> Multivector:
    _same_algebra(a.alg, b.alg)
    out = np.zeros(a.alg.dim, dtype=complex)
    for ma in np.flatnonzero(a.coeffs):
        ma = int(ma)
        for mb in np.flatnonzero(b.coeffs):
            mb = int(mb)
            if ma & mb:
                continue
            out[ma | mb] += _product_sign(ma, mb) * a.coeffs[ma] * b.coeffs[mb]
    return Multivector(a.alg, out)


def berezin_diff(mv: Multivector, gen: int) -> Multivector:
    """Left derivative with respect to generator ``gen``."""
    mv.alg.check_generator(gen)
    bit = 1 << gen
    lower = bit - 1
    out = np.zeros(mv.alg.dim, dtype=complex)
    for mask in np.flatnonzero(mv.coeffs):
        mask = int(mask)
        if mask & bit:
            sign = -1 if _popcount(mask & lower) & 1 else 1
            out[mask ^ bit] += sign * mv.coeffs[mask]
    return Multivector(mv.alg, out)


def berezin_int(mv: Multivector, gen: int) -> Multivector:
    """Berezin integral over ``gen``; identical to the left derivative."""
    return berezin_diff(mv, gen)


# ----------------------------------------------------------------------
# Operators on the coefficient space
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GOperator:
    alg: GAlgebra
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.alg.dim, self.alg.dim):
            raise AlgebraMismatchError(
                f"operator matrix has shape {m.shape}, algebra needs {(self.alg.dim, self.alg.dim)}"
            )
        object.__setattr__(self, "matrix", m)

    def __call__(self, mv: Multivector) -> Multivector:
        _same_algebra(self.alg, mv.alg)
        return Multivector(self.alg, self.matrix @ mv.coeffs)

    def __matmul__(self, other: "GOperator") -> "GOperator":
        _same_algebra(self.alg, other.alg)
        return GOperator(self.alg, self.matrix @ other.matrix)

    def __add__(self, other: "GOperator") -> "GOperator":
        _same_algebra(self.alg, other.alg)
        return GOperator(self.alg, self.matrix + other.matrix)

    def __sub__(self, other: "GOperator") -> "GOperator":
        _same_algebra(self.alg, other.alg)
        return GOperator(self.alg, self.matrix - other.matrix)

    def scale(self, factor: complex) -> "GOperator":
        return GOperator(self.alg, self.matrix * factor)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues sorted by real part; operators here are not Hermitian
        in the coefficient basis."""
        vals = linalg.eigvals(self.matrix)
        return vals[np.lexsort((vals.imag, vals.real))]


def identity(alg: GAlgebra) -> GOperator:
    return GOperator(alg, np.eye(alg.dim))


def zero_operator(alg: GAlgebra) -> GOperator:
    return GOperator(alg, np.zeros((alg.dim, alg.dim)))


def left_mul(mv: Multivector) -> GOperator:
    alg = mv.alg
    columns = [gmul(mv, alg.monomial(mask)).coeffs for mask in range(alg.dim)]
    return GOperator(alg, np.column_stack(columns))


def derivative_op(alg: GAlgebra, gen: int) -> GOperator:
    alg.check_generator(gen)
    columns = [berezin_diff(alg.monomial(mask), gen).coeffs for mask in range(alg.dim)]
    return GOperator(alg, np.column_stack(columns))


def commutator(a: GOperator, b: GOperator) -> GOperator:
    return a @ b - b @ a


def anticommutator(a: GOperator, b: GOperator) -> GOperator:
    return a @ b + b @ a


# ----------------------------------------------------------------------
# Hamiltonians and ladder operators
# ----------------------------------------------------------------------

THETA_KEYS = ("c00", "c11", "c12", "c20", "c30", "c40")


def hamiltonian_from_theta(c: Mapping[str, complex], alg: GAlgebra) -> GOperator:
    """c00 d_{b*} d_b + c11 d_{b*} + c12 d_b + c20 + c30 (b + b*) + c40 b b*.

    ``b`` is generator 0 and ``b*`` generator 1; missing coefficients are zero.
    """
    if alg.n_generators != 2:
        raise AlgebraMismatchError(
            f"the one-mode Hamiltonian needs a two-generator algebra, got {alg.n_generators}"
        )
    unknown = set(c) - set(THETA_KEYS)
    if unknown:
        raise ValueError(f"unknown Hamiltonian coefficients: {sorted(unknown)}")
    coef = {key: complex(c.get(key, 0.0)) for key in THETA_KEYS}
    d_b = derivative_op(alg, 0)
    d_bs = derivative_op(alg, 1)
    b = left_mul(alg.generator(0))
    bs = left_mul(alg.generator(1))
    bbs = left_mul(alg.monomial(0b11))
    H = (d_bs @ d_b).scale(coef["c00"])
    H = H + d_bs.scale(coef["c11"]) + d_b.scale(coef["c12"])
    H = H + identity(alg).scale(coef["c20"]) + (b + bs).scale(coef["c30"]) + bbs.scale(coef["c40"])
    return H


@dataclass(frozen=True)
class FermionMode:
    omega: float
    F: GOperator
    F_dag: GOperator
    E: GOperator
    E_dag: GOperator

    def operators(self) -> Dict[str, GOperator]:
        return {"F": self.F, "F_dag": self.F_dag, "E": self.E, "E_dag": self.E_dag}

    def nilpotency_defect(self) -> float:
        return float(max(np.max(np.abs((op @ op).matrix)) for op in self.operators().values()))

    def hamiltonian(self) -> GOperator:
        """F^dagger F - E E^dagger."""
        return self.F_dag @ self.F - self.E @ self.E_dag


def fermion_mode(alg: GAlgebra, omega: float, label: int = 0) -> FermionMode:
    """Ladder operators on the (d, d*) pair of sector ``label``.

    F = d/dd* + omega d,   F^dagger = d/dd + omega d*,
    E = -d/dd + omega d*,  E^dagger = d/dd* - omega d.
    """
    d, ds = 2 * label, 2 * label + 1
    alg.check_generator(ds)
    dd = derivative_op(alg, d)
    dds = derivative_op(alg, ds)
    mul_d = left_mul(alg.generator(d))
    mul_ds = left_mul(alg.generator(ds))
    return FermionMode(
        omega=float(omega),
        F=dds + mul_d.scale(omega),
        F_dag=dd + mul_ds.scale(omega),
        E=mul_ds.scale(omega) - dd,
        E_dag=dds - mul_d.scale(omega),
    )


def fermi_oscillator(omega: float) -> Tuple[GOperator, FermionMode]:
    """H = d_{b*} d_b + omega^2 b b* on {b, b*}, with its ladder operators.

    This H equals -(F^dagger F - E E^dagger) / 2; its spectrum is
    {-omega, 0, 0, omega}.
    """
    if not omega > 0:
        raise ValueError(f"oscillator frequency must be positive, got {omega}")
    alg = GAlgebra(2)
    H = hamiltonian_from_theta({"c00": 1.0, "c40": omega ** 2}, alg)
    return H, fermion_mode(alg, omega)


def equation_of_motion_defect(H: GOperator, omega: float) -> float:
    """max |i[H, i[H, b]] + omega^2 b| for the left-multiplication operator b."""
    b = left_mul(H.alg.generator(0))
    velocity = commutator(H, b).scale(1j)
    accel = commutator(H, velocity).scale(1j)
    return float(np.max(np.abs((accel + b.scale(omega ** 2)).matrix)))


def anticommutator_table(modes: Sequence[FermionMode]) -> Dict[Tuple[str, str, int, int], np.ndarray]:
    """Every anticommutator between ladder operators of the given modes."""
    table = {}
    for i, first in enumerate(modes):
        for j, second in enumerate(modes):
            for name_a, op_a in first.operators().items():
                for name_b, op_b in second.operators().items():
                    table[(name_a, name_b, i, j)] = anticommutator(op_a, op_b).matrix
    return table


def anticommutator_defect(modes: Sequence[FermionMode]) -> float:
    """Deviation from {F^dagger_a, F_b} = {E^dagger_a, E_b} = 2 omega_a delta_ab
    with every other anticommutator vanishing."""
    worst = 0.0
    for (name_a, name_b, i, j), mat in anticommutator_table(modes).items():
        expected = 0.0
        pair = {name_a, name_b}
        if i == j and (pair == {"F", "F_dag"} or pair == {"E", "E_dag"}):
            expected = 2.0 * modes[i].omega
        worst = max(worst, float(np.max(np.abs(mat - expected * np.eye(mat.shape[0])))))
    return worst


def vacuum(mode: FermionMode) -> np.ndarray:
    """Unit vector annihilated by both F and E^dagger."""
    stacked = np.vstack([mode.F.matrix, mode.E_dag.matrix])
    space = linalg.null_space(stacked)
    if space.shape[1] != 1:
        raise ValueError(f"vacuum is not unique: null space has dimension {space.shape[1]}")
    vec = space[:, 0]
    lead = vec[np.flatnonzero(np.abs(vec) > 1e-12)[0]]
    return vec * (abs(lead) / lead) / np.linalg.norm(vec)


def fock_basis(mode: FermionMode) -> np.ndarray:
    """Columns |0>, F^dagger|0>, E|0>, F^dagger E|0>, scaled to unit Fock norm."""
    v0 = vacuum(mode)
    scale = 2.0 * mode.omega
    f1 = mode.F_dag.matrix @ v0 / np.sqrt(scale)
    e1 = mode.E.matrix @ v0 / np.sqrt(scale)
    fe = mode.F_dag.matrix @ mode.E.matrix @ v0 / scale
    return np.column_stack([v0, f1, e1, fe])


def fock_metric(mode: FermionMode) -> np.ndarray:
    """Gram matrix G that makes the Fock basis orthonormal.

    Under <u, v>_G = u^H G v the adjoint of X is G^-1 X^H G, so F^dagger is
    the adjoint of F and E^dagger that of E.
    """
    if mode.F.alg.n_generators != 2:
        raise AlgebraMismatchError("the Fock metric is built for a single (d, d*) pair")
    inverse = np.linalg.inv(fock_basis(mode))
    return inverse.conj().T @ inverse


def metric_adjoint(op: GOperator, metric: np.ndarray) -> np.ndarray:
    return np.linalg.solve(metric, op.matrix.conj().T @ metric)


def heisenberg_evolve(H: GOperator, op: GOperator, t: float) -> GOperator:
    """e^{iHt} op e^{-iHt}."""
    _same_algebra(H.alg, op.alg)
    forward = linalg.expm(1j * t * H.matrix)
    backward = linalg.expm(-1j * t * H.matrix)
    return GOperator(H.alg, forward @ op.matrix @ backward)


def dirac_mode_hamiltonian(omegas: Sequence[float]) -> Tuple[GOperator, np.ndarray]:
    """Sum over labels of F^dagger F - E E^dagger, each label on its own (d, d*) pair.

    A label with omega = 0 contributes the nilpotent 2 d/dd d/dd*, whose
    spectrum is zero although the operator itself is not.
    """
    labels = len(omegas)
    if labels == 0:
        raise ValueError("need at least one mode label")
    if 2 * labels > MAX_GRASSMANN_GENERATORS:
        raise DimensionGuardError(
            f"{labels} labels need {2 * labels} generators, limit is {MAX_GRASSMANN_GENERATORS}",
            MAX_GRASSMANN_GENERATORS,
        )
    alg = GAlgebra(2 * labels)
    H = zero_operator(alg)
    for label, omega in enumerate(omegas):
        H = H + fermion_mode(alg, float(omega), label).hamiltonian()
    logger.debug("dirac mode Hamiltonian: %d labels, dimension %d", labels, alg.dim)
    return H, H.eigenvalues()


def tensor_sum_spectrum(single_spectra: Sequence[Sequence[float]]) -> np.ndarray:
    """All sums picking one value from each single-label spectrum, sorted."""
    total: List[float] = [0.0]
    for values in single_spectra:
        total = [t + v for t in total for v in values]
    return np.sort(np.asarray(total, dtype=float))

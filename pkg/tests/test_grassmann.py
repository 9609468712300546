"""Tests for the Grassmann algebra, Berezin calculus and fermionic modes."""

from __future__ import annotations

import numpy as np
import pytest

from discrete_interaction.errors import AlgebraMismatchError, DimensionGuardError, GeneratorIndexError
from discrete_interaction.grassmann import (
    GAlgebra,
    Multivector,
    anticommutator,
    anticommutator_defect,
    berezin_diff,
    berezin_int,
    derivative_op,
    dirac_mode_hamiltonian,
    equation_of_motion_defect,
    fermi_oscillator,
    fermion_mode,
    fock_metric,
    gmul,
    hamiltonian_from_theta,
    heisenberg_evolve,
    identity,
    left_mul,
    metric_adjoint,
    tensor_sum_spectrum,
    vacuum,
)


pytestmark = pytest.mark.usefixtures("clean_env")


def _random_multivector(alg: GAlgebra, rng: np.random.Generator) -> Multivector:
    return Multivector(alg, rng.normal(size=alg.dim) + 1j * rng.normal(size=alg.dim))


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [0, 13])
def test_generator_count_is_bounded(n):
    with pytest.raises(DimensionGuardError):
        GAlgebra(n)


def test_generators_anticommute():
    alg = GAlgebra(3)
    t0, t1 = alg.generator(0), alg.generator(1)
    assert (t0 * t1).allclose(-(t1 * t0))
    assert (t0 * t0).allclose(alg.zero())
    assert (t1 * t0).terms() == {0b11: -1.0}


def test_product_is_associative():
    alg = GAlgebra(4)
    rng = np.random.default_rng(11)
    for _ in range(20):
        a, b, c = (_random_multivector(alg, rng) for _ in range(3))
        assert gmul(gmul(a, b), c).allclose(gmul(a, gmul(b, c)), atol=1e-12)


def test_one_is_the_unit():
    alg = GAlgebra(3)
    a = _random_multivector(alg, np.random.default_rng(2))
    assert (alg.one() * a).allclose(a)
    assert (a * alg.one()).allclose(a)


def test_mixing_algebras_is_rejected():
    with pytest.raises(AlgebraMismatchError):
        GAlgebra(2).one() + GAlgebra(3).one()


def test_coefficient_count_must_match():
    with pytest.raises(AlgebraMismatchError):
        Multivector(GAlgebra(2), np.zeros(3))


def test_generator_index_is_checked():
    alg = GAlgebra(2)
    with pytest.raises(GeneratorIndexError):
        alg.generator(2)
    with pytest.raises(GeneratorIndexError):
        berezin_diff(alg.one(), -1)


# ---------------------------------------------------------------------------
# Berezin calculus
# ---------------------------------------------------------------------------

def test_left_derivative_signs():
    alg = GAlgebra(2)
    pair = alg.monomial(0b11)
    assert berezin_diff(pair, 0).allclose(alg.generator(1))
    assert berezin_diff(pair, 1).allclose(-alg.generator(0))


def test_berezin_integral_rules():
    alg = GAlgebra(2)
    assert berezin_int(alg.one(), 0).allclose(alg.zero())
    assert berezin_int(alg.generator(0), 0).allclose(alg.one())
    a = _random_multivector(alg, np.random.default_rng(8))
    assert berezin_int(a, 1).allclose(berezin_diff(a, 1))


def test_derivatives_and_multipliers_satisfy_the_clifford_relations():
    alg = GAlgebra(3)
    eye = np.eye(alg.dim)
    for i in range(3):
        d_i = derivative_op(alg, i)
        assert not np.any((d_i @ d_i).matrix)
        for j in range(3):
            mul_j = left_mul(alg.generator(j))
            expected = eye if i == j else 0.0 * eye
            np.testing.assert_allclose(anticommutator(d_i, mul_j).matrix, expected)
            np.testing.assert_allclose(anticommutator(d_i, derivative_op(alg, j)).matrix, 0.0)


# ---------------------------------------------------------------------------
# Fermi oscillator
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_fermi_oscillator_spectrum(omega):
    H, _ = fermi_oscillator(omega)
    values = H.eigenvalues()
    np.testing.assert_allclose(values.real, [-omega, 0.0, 0.0, omega], atol=1e-10)
    np.testing.assert_allclose(values.imag, 0.0, atol=1e-10)


@pytest.mark.parametrize("omega", [0.5, 2.0])
def test_fermi_oscillator_equation_of_motion(omega):
    H, _ = fermi_oscillator(omega)
    assert equation_of_motion_defect(H, omega) < 1e-12


def test_oscillator_is_minus_half_the_ladder_form():
    H, mode = fermi_oscillator(1.3)
    np.testing.assert_allclose(H.matrix, -0.5 * mode.hamiltonian().matrix, atol=1e-12)


def test_frequency_must_be_positive():
    with pytest.raises(ValueError, match="positive"):
        fermi_oscillator(0.0)


def test_ladder_operators_are_nilpotent():
    _, mode = fermi_oscillator(0.7)
    assert mode.nilpotency_defect() == 0.0


def test_ladder_anticommutators_one_mode():
    _, mode = fermi_oscillator(0.7)
    assert anticommutator_defect([mode]) < 1e-12


def test_ladder_anticommutators_two_modes():
    alg = GAlgebra(4)
    modes = [fermion_mode(alg, 0.5, 0), fermion_mode(alg, 1.5, 1)]
    assert anticommutator_defect(modes) < 1e-12


def test_vacuum_is_annihilated():
    _, mode = fermi_oscillator(1.1)
    v0 = vacuum(mode)
    assert np.linalg.norm(v0) == pytest.approx(1.0)
    assert np.max(np.abs(mode.F.matrix @ v0)) < 1e-12
    assert np.max(np.abs(mode.E_dag.matrix @ v0)) < 1e-12


def test_fock_metric_makes_daggers_adjoints():
    _, mode = fermi_oscillator(0.9)
    G = fock_metric(mode)
    np.testing.assert_allclose(G, G.conj().T, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(G) > 0)
    np.testing.assert_allclose(metric_adjoint(mode.F, G), mode.F_dag.matrix, atol=1e-10)
    np.testing.assert_allclose(metric_adjoint(mode.E, G), mode.E_dag.matrix, atol=1e-10)


def test_heisenberg_evolution_is_harmonic():
    omega, t = 0.8, 1.3
    H, _ = fermi_oscillator(omega)
    b = left_mul(H.alg.generator(0))
    velocity = (H @ b - b @ H).scale(1j)
    expected = b.scale(np.cos(omega * t)) + velocity.scale(np.sin(omega * t) / omega)
    np.testing.assert_allclose(heisenberg_evolve(H, b, t).matrix, expected.matrix, atol=1e-10)


def test_theta_hamiltonian_needs_two_generators():
    with pytest.raises(AlgebraMismatchError):
        hamiltonian_from_theta({"c00": 1.0}, GAlgebra(3))


def test_theta_hamiltonian_rejects_unknown_coefficients():
    with pytest.raises(ValueError, match="unknown"):
        hamiltonian_from_theta({"c99": 1.0}, GAlgebra(2))


def test_constant_theta_term_is_a_multiple_of_identity():
    alg = GAlgebra(2)
    H = hamiltonian_from_theta({"c20": 2.5}, alg)
    np.testing.assert_allclose(H.matrix, identity(alg).scale(2.5).matrix)


# ---------------------------------------------------------------------------
# Dirac modes
# ---------------------------------------------------------------------------

def test_single_label_dirac_spectrum():
    _, values = dirac_mode_hamiltonian([1.0])
    np.testing.assert_allclose(values.real, [-2.0, 0.0, 0.0, 2.0], atol=1e-10)


def test_zero_frequency_label_is_nilpotent():
    H, values = dirac_mode_hamiltonian([0.0])
    assert np.max(np.abs(values)) < 1e-12
    assert np.any(H.matrix)
    assert not np.any((H @ H).matrix)


def test_multi_label_spectrum_is_a_tensor_sum():
    omegas = [0.5, 1.0]
    _, values = dirac_mode_hamiltonian(omegas)
    singles = [[-2.0 * w, 0.0, 0.0, 2.0 * w] for w in omegas]
    np.testing.assert_allclose(values.real, tensor_sum_spectrum(singles), atol=1e-8)


def test_dirac_label_count_is_bounded():
    with pytest.raises(ValueError, match="at least one"):
        dirac_mode_hamiltonian([])
    with pytest.raises(DimensionGuardError):
        dirac_mode_hamiltonian([1.0] * 7)


def test_tensor_sum_spectrum():
    np.testing.assert_array_equal(tensor_sum_spectrum([[0.0, 1.0], [0.0, 2.0]]), [0.0, 1.0, 2.0, 3.0])

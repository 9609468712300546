"""Tests for the grid Hilbert-space toolkit in ``operators.py``.

Coverage:

- Grid geometry and plane-wave normalization; the inner product's
  conjugate symmetry and discrete Fourier orthogonality.
- ``gram_schmidt`` on orthonormal, polynomial and dependent inputs.
- ``op_from_eigensystem`` (zero, identity, cross-check against the
  momentum operator) and ``eigensystem`` conventions.
- ``momentum_op`` eigenvalues, second-order convergence and the periodic
  boundary requirement.
- ``expectation`` and ``commutator_uncertainty`` on Gaussians and random
  states.
- ``periodic_generator`` integer ladders and the U(1) period.
"""

from __future__ import annotations

import numpy as np
import pytest

from discrete_interaction.errors import (
    BoundaryError,
    GridMismatchError,
    LinearDependenceError,
    NormalizationError,
    NotHermitianError,
    NotOrthonormalError,
)
from discrete_interaction.operators import (
    Grid1D,
    HermitianOp,
    WaveFunction,
    commutator_uncertainty,
    eigensystem,
    expectation,
    gram_schmidt,
    inner,
    ladder_value,
    momentum_op,
    op_from_eigensystem,
    periodic_generator,
    position_op,
)
from discrete_interaction.utils.constants import Boundary


pytestmark = pytest.mark.usefixtures("clean_env")


# ---------------------------------------------------------------------------
# Grids, wave functions, inner products
# ---------------------------------------------------------------------------

def test_grid_is_cell_centred_and_symmetric(periodic_grid):
    grid = periodic_grid(n=8, x_max=4.0)
    assert grid.dx == pytest.approx(1.0)
    np.testing.assert_allclose(grid.points, np.arange(-3.5, 4.0, 1.0))
    np.testing.assert_allclose(grid.points, -grid.points[::-1])


@pytest.mark.parametrize("args", [(0.0, 1.0, 3), (1.0, 1.0, 8), (0.0, 1.0, 8, "open")])
def test_grid_rejects_bad_arguments(args):
    with pytest.raises(ValueError):
        Grid1D(*args)


def test_wave_function_shape_is_checked(periodic_grid):
    with pytest.raises(GridMismatchError):
        WaveFunction(periodic_grid(n=16), np.ones(8))


def test_normalized_gaussian_has_unit_inner_product(periodic_grid):
    psi = WaveFunction.gaussian(periodic_grid(n=128), 0.5, 1.3, k0=0.7)
    assert inner(psi, psi).real == pytest.approx(1.0, abs=1e-12)


def test_inner_product_is_conjugate_symmetric(periodic_grid):
    grid = periodic_grid(n=32)
    rng = np.random.default_rng(2)
    a = WaveFunction(grid, rng.normal(size=32) + 1j * rng.normal(size=32))
    b = WaveFunction(grid, rng.normal(size=32) + 1j * rng.normal(size=32))
    assert inner(a, b) == np.conj(inner(b, a))


def test_distinct_plane_waves_are_orthogonal(periodic_grid):
    grid = periodic_grid(n=64)
    assert abs(inner(grid.plane_wave(3), grid.plane_wave(5))) < 1e-12
    assert inner(grid.plane_wave(3), grid.plane_wave(3)).real == pytest.approx(1.0)


def test_inner_rejects_mixed_grids(periodic_grid):
    with pytest.raises(GridMismatchError):
        inner(periodic_grid(n=16).plane_wave(0), periodic_grid(n=32).plane_wave(0))


# ---------------------------------------------------------------------------
# Gram-Schmidt and operators from eigensystems
# ---------------------------------------------------------------------------

def test_gram_schmidt_leaves_orthonormal_set_unchanged(periodic_grid):
    grid = periodic_grid(n=32)
    waves = [grid.plane_wave(m) for m in (0, 1, -1)]
    out = gram_schmidt(waves)
    for before, after in zip(waves, out):
        np.testing.assert_allclose(after.samples, before.samples, atol=1e-12)


def test_gram_schmidt_on_constant_and_linear(periodic_grid):
    grid = periodic_grid(n=40, x_max=1.0)
    one = WaveFunction(grid, np.ones(grid.n))
    x = WaveFunction(grid, grid.points)
    q0, q1 = gram_schmidt([one, x])
    assert abs(inner(q0, q1)) < 1e-12
    np.testing.assert_allclose(q0.samples, q0.samples[0])
    np.testing.assert_allclose(q1.samples, -q1.samples[::-1], atol=1e-12)


def test_gram_schmidt_names_the_dependent_function(periodic_grid):
    grid = periodic_grid(n=16)
    f = WaveFunction.gaussian(grid)
    with pytest.raises(LinearDependenceError) as info:
        gram_schmidt([f, WaveFunction(grid, 2.0 * f.samples)])
    assert info.value.index == 1


def test_op_from_eigensystem_zero_and_identity(periodic_grid):
    grid = periodic_grid(n=16)
    basis = [grid.plane_wave(m) for m in range(-8, 8)]
    zero = op_from_eigensystem([0.0] * 16, basis)
    assert np.max(np.abs(zero.matrix)) == 0.0
    ident = op_from_eigensystem([1.0] * 16, basis)
    np.testing.assert_allclose(ident.matrix, np.eye(16), atol=1e-10)


def test_op_from_eigensystem_reproduces_momentum_operator(periodic_grid):
    grid = periodic_grid(n=16)
    ms = range(-8, 8)
    values = [ladder_value(grid.n, grid.length, m, 1.0) for m in ms]
    built = op_from_eigensystem(values, [grid.plane_wave(m) for m in ms])
    np.testing.assert_allclose(built.matrix, momentum_op(grid, 1.0).matrix, atol=1e-10)


def test_op_from_eigensystem_requires_orthonormal_functions(periodic_grid):
    grid = periodic_grid(n=16)
    f = WaveFunction.gaussian(grid)
    with pytest.raises(NotOrthonormalError):
        op_from_eigensystem([1.0, 2.0], [f, WaveFunction.gaussian(grid, 0.5)])


def test_hermitian_op_rejects_non_hermitian_matrix():
    with pytest.raises(NotHermitianError):
        HermitianOp(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eigensystem_is_sorted_with_positive_leading_components(periodic_grid):
    spec = eigensystem(momentum_op(periodic_grid(n=32), 1.0))
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    for c in range(spec.eigenvectors.shape[1]):
        col = spec.eigenvectors[:, c]
        lead = col[np.flatnonzero(np.abs(col) > 1e-12)[0]]
        assert abs(lead.imag) < 1e-12 and lead.real > 0
    gram = spec.eigenvectors.conj().T @ spec.eigenvectors
    np.testing.assert_allclose(gram, np.eye(32), atol=1e-10)


# ---------------------------------------------------------------------------
# Momentum operator
# ---------------------------------------------------------------------------

def test_constant_function_has_zero_momentum(periodic_grid):
    grid = periodic_grid(n=32)
    out = momentum_op(grid).apply(grid.plane_wave(0))
    assert np.max(np.abs(out.samples)) < 1e-14


@pytest.mark.parametrize("m", [1, 3, -2])
def test_plane_wave_is_momentum_eigenvector(periodic_grid, m):
    grid = periodic_grid(n=64)
    wave = grid.plane_wave(m)
    k = 2 * np.pi * m / grid.length
    expected = np.sin(k * grid.dx) / grid.dx
    out = momentum_op(grid, 1.0).apply(wave)
    np.testing.assert_allclose(out.samples, expected * wave.samples, atol=1e-10)


def test_momentum_error_is_second_order():
    errors = []
    for n in (64, 128):
        grid = Grid1D(-np.pi, np.pi, n, Boundary.PERIODIC)
        value = ladder_value(n, grid.length, 3, 1.0)
        errors.append(abs(value - 3.0))
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.2)


def test_momentum_requires_periodic_grid(vanishing_grid):
    with pytest.raises(BoundaryError):
        momentum_op(vanishing_grid())


def test_momentum_scales_with_configured_hbar(clean_env, periodic_grid):
    grid = periodic_grid(n=16)
    clean_env.setenv("DI_HBAR", "2.0")
    np.testing.assert_allclose(momentum_op(grid).matrix, momentum_op(grid, 2.0).matrix)


# ---------------------------------------------------------------------------
# Expectation values and uncertainty
# ---------------------------------------------------------------------------

def test_expectation_of_eigenstate_and_superposition(periodic_grid):
    grid = periodic_grid(n=64)
    P = momentum_op(grid, 1.0)
    p1 = ladder_value(grid.n, grid.length, 1, 1.0)
    p2 = ladder_value(grid.n, grid.length, 2, 1.0)
    assert expectation(P, grid.plane_wave(1)) == pytest.approx(p1, abs=1e-12)
    mixed = WaveFunction(grid, (grid.plane_wave(1).samples + grid.plane_wave(2).samples) / np.sqrt(2.0))
    assert expectation(P, mixed) == pytest.approx(0.5 * (p1 + p2), abs=1e-12)
    assert expectation(HermitianOp(np.eye(64)), mixed) == pytest.approx(1.0, abs=1e-12)


def test_expectation_requires_unit_norm(periodic_grid):
    grid = periodic_grid(n=16)
    with pytest.raises(NormalizationError):
        expectation(position_op(grid), WaveFunction(grid, np.ones(16)))


def test_commuting_operators_have_zero_bound(periodic_grid):
    grid = periodic_grid(n=32)
    X = position_op(grid)
    res = commutator_uncertainty(X, X, WaveFunction.gaussian(grid, 0.0, 2.0))
    assert res.bound == 0.0


def test_wide_gaussian_reaches_minimum_uncertainty(periodic_grid):
    grid = periodic_grid(n=256, x_max=40.0)
    res = commutator_uncertainty(position_op(grid), momentum_op(grid, 1.0), WaveFunction.gaussian(grid, 0.0, 3.0))
    assert res.product == pytest.approx(0.5, rel=0.01)
    assert res.satisfied


def test_bound_never_exceeds_product_on_random_states(periodic_grid):
    grid = periodic_grid(n=32)
    X, P = position_op(grid), momentum_op(grid, 1.0)
    rng = np.random.default_rng(0)
    for _ in range(500):
        psi = WaveFunction(grid, rng.normal(size=32) + 1j * rng.normal(size=32)).normalized()
        res = commutator_uncertainty(X, P, psi)
        assert res.product >= res.bound - 1e-9


# ---------------------------------------------------------------------------
# Periodic generators
# ---------------------------------------------------------------------------

def test_rotation_generator_spectrum_is_integer_ladder():
    n = 256
    gen, _ = periodic_generator(n, 2 * np.pi, 1.0)
    grid = gen.grid
    for m in (1, 2, -3):
        out = gen.apply(grid.plane_wave(m))
        value = ladder_value(n, 2 * np.pi, m, 1.0)
        np.testing.assert_allclose(out.samples, value * grid.plane_wave(m).samples, atol=1e-10)
        assert value == pytest.approx(m, rel=2e-3)


def test_generator_constant_mode_is_exactly_zero():
    gen, _ = periodic_generator(16, 2 * np.pi, 1.0)
    assert np.max(np.abs(gen.apply(gen.grid.plane_wave(0)).samples)) == 0.0


def test_generator_returns_its_ladder_spectrum():
    n = 32
    gen, spectrum = periodic_generator(n, 2 * np.pi, 1.0)
    expected = np.sort([ladder_value(n, 2 * np.pi, m, 1.0) for m in range(n)])
    np.testing.assert_allclose(spectrum.eigenvalues, expected, atol=1e-10)
    np.testing.assert_allclose(spectrum.eigenvalues, eigensystem(gen).eigenvalues, atol=1e-12)


def test_charge_period_doubles_ladder_spacing():
    n, q = 256, 2
    values = [ladder_value(n, 2 * np.pi / q, m, 1.0) for m in (1, 2)]
    assert values[0] == pytest.approx(q, rel=2e-3)
    assert values[1] - values[0] == pytest.approx(q, rel=2e-3)


def test_generator_needs_four_points():
    with pytest.raises(ValueError):
        periodic_generator(3, 2 * np.pi)

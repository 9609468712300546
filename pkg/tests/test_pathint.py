"""Tests for sliced propagators, least-action paths and the analytic kernels."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from discrete_interaction.errors import (
    BoundaryError,
    GridMismatchError,
    SlicingError,
    TimeMismatchError,
)
from discrete_interaction.fields import hermite_functions
from discrete_interaction.operators import Grid1D, WaveFunction
from discrete_interaction.pathint import (
    LagrangianSpec,
    Slicing,
    classical_action,
    coherent_state,
    compare,
    compose,
    discrete_action,
    euler_lagrange_residual,
    free_kernel,
    free_packet,
    harmonic_action,
    harmonic_kernel,
    kernel_matrix_defect,
    propagator,
    sliced_kernel,
    sliced_phase_defect,
    stationary_phase_defect,
)
from discrete_interaction.schrod import (
    EvolConfig,
    constant_potential,
    evolve,
    harmonic_potential,
    linear_potential,
)
from discrete_interaction.utils.constants import Boundary, FreeFactor


pytestmark = pytest.mark.usefixtures("clean_env")


@pytest.fixture
def grid():
    return Grid1D(-10.0, 10.0, 64, Boundary.PERIODIC)


def _free(grid) -> LagrangianSpec:
    return LagrangianSpec(1.0, constant_potential(grid, 0.0), hbar=1.0)


def _harmonic(grid) -> LagrangianSpec:
    return LagrangianSpec(1.0, harmonic_potential(grid, omega=1.0), hbar=1.0)


# ---------------------------------------------------------------------------
# Slicing and construction
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("t1,t2,n", [(1.0, 1.0, 4), (2.0, 1.0, 4), (0.0, 1.0, 0)])
def test_bad_slicing_is_rejected(t1, t2, n):
    with pytest.raises(SlicingError):
        Slicing(t1, t2, n)


def test_slice_length():
    s = Slicing(0.5, 2.5, 8)
    assert s.duration == pytest.approx(2.0)
    assert s.dt == pytest.approx(0.25)


def test_mass_must_be_positive(grid):
    with pytest.raises(ValueError, match="mass"):
        LagrangianSpec(0.0, constant_potential(grid, 0.0))


def test_vanishing_grid_is_rejected(vanishing_grid):
    g = vanishing_grid(n=16)
    with pytest.raises(BoundaryError):
        propagator(_free(g), Slicing(0.0, 1.0, 1), g)


def test_potential_grid_must_match(grid):
    other = Grid1D(-5.0, 5.0, 64, Boundary.PERIODIC)
    with pytest.raises(GridMismatchError):
        propagator(_free(other), Slicing(0.0, 1.0, 1), grid)


@pytest.mark.parametrize("make_spec", [_free, _harmonic])
def test_propagator_is_unitary(grid, make_spec):
    K = propagator(make_spec(grid), Slicing(0.0, 1.0, 16), grid)
    assert K.unitarity_defect() < 1e-10


def test_resolution_flag(grid):
    fine = propagator(_free(grid), Slicing(0.0, 1.0, 256), grid)
    coarse = propagator(_free(grid), Slicing(0.0, 1.0, 1), grid)
    assert fine.under_resolved
    assert not coarse.under_resolved


# ---------------------------------------------------------------------------
# Propagation
# ---------------------------------------------------------------------------

def test_free_propagator_matches_spreading_packet():
    g = Grid1D(-20.0, 20.0, 128, Boundary.PERIODIC)
    psi0 = WaveFunction.gaussian(g, 0.0, 2.0)
    K = propagator(_free(g), Slicing(0.0, 2.0, 1), g)
    exact = free_packet(g.points, 2.0, 2.0, hbar=1.0)
    assert np.max(np.abs(K.apply(psi0).samples - exact)) < 1e-8


def test_free_packet_starts_as_gaussian():
    g = Grid1D(-20.0, 20.0, 256, Boundary.PERIODIC)
    psi0 = WaveFunction.gaussian(g, 1.0, 2.0, 0.5)
    np.testing.assert_allclose(free_packet(g.points, 0.0, 2.0, x0=1.0, k0=0.5, hbar=1.0), psi0.samples, atol=1e-10)


def test_free_slicing_is_exact(grid):
    one = propagator(_free(grid), Slicing(0.0, 1.0, 1), grid)
    many = propagator(_free(grid), Slicing(0.0, 1.0, 8), grid)
    assert np.max(np.abs(one.transfer - many.transfer)) < 1e-10


def test_harmonic_propagator_follows_coherent_state():
    g = Grid1D(-10.0, 10.0, 128, Boundary.PERIODIC)
    x0 = 1.5
    psi0 = WaveFunction(g, coherent_state(g.points, 0.0, x0, 1.0, hbar=1.0))
    K = propagator(_harmonic(g), Slicing(0.0, 1.0, 1024), g)
    exact = coherent_state(g.points, 1.0, x0, 1.0, hbar=1.0)
    assert np.max(np.abs(K.apply(psi0).samples - exact)) < 1e-4


def test_composition_with_matching_slices_is_exact(grid):
    spec = _harmonic(grid)
    first = propagator(spec, Slicing(0.0, 0.5, 8), grid)
    second = propagator(spec, Slicing(0.5, 1.0, 8), grid)
    full = propagator(spec, Slicing(0.0, 1.0, 16), grid)
    both = compose(second, first)
    assert (both.t1, both.t2, both.n_slices) == (0.0, 1.0, 16)
    assert np.max(np.abs(both.transfer - full.transfer)) < 1e-10


def test_composition_needs_chaining_times(grid):
    spec = _free(grid)
    first = propagator(spec, Slicing(0.0, 0.5, 1), grid)
    gap = propagator(spec, Slicing(0.6, 1.0, 1), grid)
    with pytest.raises(TimeMismatchError):
        compose(gap, first)


def test_composition_needs_one_grid(grid):
    other = Grid1D(-5.0, 5.0, 64, Boundary.PERIODIC)
    with pytest.raises(GridMismatchError):
        compose(propagator(_free(other), Slicing(0.5, 1.0, 1), other),
                propagator(_free(grid), Slicing(0.0, 0.5, 1), grid))


def test_compare_against_grid_evolution():
    g = Grid1D(-10.0, 10.0, 128, Boundary.PERIODIC)
    psi0 = WaveFunction.gaussian(g, 0.0, 1.0)
    K = propagator(_free(g), Slicing(0.0, 0.5, 4), g)
    evolved = evolve(psi0, constant_potential(g, 0.0), EvolConfig(dt=1e-3, steps=500, hbar=1.0, sample_every=500))
    assert compare(K, psi0, evolved) < 1e-2


def test_compare_needs_matching_duration():
    g = Grid1D(-10.0, 10.0, 64, Boundary.PERIODIC)
    psi0 = WaveFunction.gaussian(g, 0.0, 1.0)
    K = propagator(_free(g), Slicing(0.0, 1.0, 4), g)
    evolved = evolve(psi0, constant_potential(g, 0.0), EvolConfig(dt=1e-3, steps=10, hbar=1.0))
    with pytest.raises(TimeMismatchError):
        compare(K, psi0, evolved)


# ---------------------------------------------------------------------------
# The propagator against analytic kernels
# ---------------------------------------------------------------------------

def _pairs(g: Grid1D):
    return g.points[:, None], g.points[None, :]


@pytest.mark.parametrize("n_slices", [1, 16])
def test_free_propagator_matches_free_kernel_between_gaussians(n_slices):
    g = Grid1D(-20.0, 20.0, 256, Boundary.PERIODIC)
    K = propagator(_free(g), Slicing(0.0, 1.0, n_slices), g)
    gaussians = np.array([WaveFunction.gaussian(g, c, 1.0).samples for c in (-2.0, 0.0, 2.0)])
    assert kernel_matrix_defect(K, free_kernel(*_pairs(g), 1.0, hbar=1.0), gaussians) < 1e-3


def test_harmonic_propagator_matches_mehler_between_levels():
    g = Grid1D(-10.0, 10.0, 128, Boundary.PERIODIC)
    K = propagator(_harmonic(g), Slicing(0.0, 1.0, 64), g)
    levels = hermite_functions(4, g.points, 1.0)
    mehler = harmonic_kernel(*_pairs(g), 1.0, omega=1.0, hbar=1.0)
    assert kernel_matrix_defect(K, mehler, levels) < 1e-2


@pytest.mark.parametrize("make_spec", [_free, _harmonic])
def test_single_tiny_slice_is_the_identity(make_spec):
    g = Grid1D(-10.0, 10.0, 128, Boundary.PERIODIC)
    psi = WaveFunction.gaussian(g, 0.5, 1.0)
    K = propagator(make_spec(g), Slicing(0.0, 1e-6, 1), g)
    assert WaveFunction(g, K.apply(psi).samples - psi.samples).norm() < 1e-3
    np.testing.assert_allclose(K.matrix * g.dx, np.eye(g.n), atol=1e-3)


def test_identity_slicing_matches_one_grid_step():
    g = Grid1D(-10.0, 10.0, 128, Boundary.PERIODIC)
    psi0 = WaveFunction.gaussian(g, 0.0, 1.0)
    R = harmonic_potential(g, 1.0)
    K = propagator(LagrangianSpec(1.0, R, hbar=1.0), Slicing(0.0, 1e-7, 1), g)
    evolved = evolve(psi0, R, EvolConfig(dt=1e-7, steps=1, hbar=1.0))
    assert compare(K, psi0, evolved) < 1e-6


def test_sampled_free_factor_is_the_truncated_continuum_kernel(grid):
    dt = 0.5
    K = propagator(_free(grid), Slicing(0.0, dt, 1), grid, FreeFactor.SAMPLED)
    sep = grid.points[:, None] - grid.points[None, :]
    sep = sep - grid.length * np.round(sep / grid.length)
    inside = np.abs(sep) <= 6.0 * math.sqrt(dt)
    np.testing.assert_allclose(K.matrix[inside], free_kernel(sep[inside], 0.0, dt, hbar=1.0), rtol=1e-12)
    assert np.all(K.matrix[~inside] == 0.0)
    # neighbours across the periodic seam
    assert K.matrix[0, -1] == pytest.approx(K.matrix[0, 1])


def test_sampled_free_factor_spreads_the_packet_core():
    g = Grid1D(-20.0, 20.0, 256, Boundary.PERIODIC)
    psi0 = WaveFunction.gaussian(g, 0.0, 1.0)
    K = propagator(_free(g), Slicing(0.0, 1.0, 1), g, FreeFactor.SAMPLED)
    core = np.abs(g.points) < 1.0
    exact = free_packet(g.points, 1.0, 1.0, hbar=1.0)
    assert np.max(np.abs(K.apply(psi0).samples - exact)[core]) < 1e-3


def test_unknown_free_factor_is_rejected(grid):
    with pytest.raises(ValueError, match="free factor"):
        propagator(_free(grid), Slicing(0.0, 1.0, 1), grid, "trapezoid")


def test_kernel_matrix_defect_needs_matching_shapes(grid):
    K = propagator(_free(grid), Slicing(0.0, 1.0, 1), grid)
    with pytest.raises(GridMismatchError):
        kernel_matrix_defect(K, np.eye(grid.n), np.ones((2, grid.n + 1)))


# ---------------------------------------------------------------------------
# Least action
# ---------------------------------------------------------------------------

def test_straight_free_path_action(grid):
    path = np.linspace(0.5, 1.5, 11)
    assert discrete_action(_free(grid), path, 2.0) == pytest.approx(0.25, rel=1e-12)


def test_free_classical_path(grid):
    path, S = classical_action(_free(grid), 0.5, 1.5, 1.0, n_knots=101)
    np.testing.assert_allclose(path, np.linspace(0.5, 1.5, 101), atol=1e-12)
    assert S == pytest.approx(0.5, rel=1e-12)


def test_linear_force_path_is_the_parabola(grid):
    g, m, T, x1, x2 = 0.5, 2.0, 1.0, 0.5, 1.5
    spec = LagrangianSpec(m, linear_potential(grid, g), hbar=1.0)
    path, S = classical_action(spec, x1, x2, T, n_knots=2001)
    t = np.linspace(0.0, T, 2001)
    parabola = x1 + (x2 - x1) * t / T + (g / (2.0 * m)) * t * (T - t)
    np.testing.assert_allclose(path, parabola, atol=1e-9)
    exact = m * (x2 - x1) ** 2 / (2.0 * T) - g * T * (x1 + x2) / 2.0 - g ** 2 * T ** 3 / (24.0 * m)
    assert S == pytest.approx(exact, abs=1e-6)
    assert np.max(np.abs(euler_lagrange_residual(spec, path, T))) < 1e-7


def test_harmonic_classical_action(grid):
    path, S = classical_action(_harmonic(grid), 0.5, 1.5, 1.0, n_knots=2001)
    assert S == pytest.approx(harmonic_action(0.5, 1.5, 1.0, 1.0), abs=1e-6)
    t = np.linspace(0.0, 1.0, 2001)
    exact = (0.5 * np.sin(1.0 - t) + 1.5 * np.sin(t)) / math.sin(1.0)
    np.testing.assert_allclose(path, exact, atol=1e-6)


@pytest.mark.parametrize("kwargs", [{"n_knots": 2}, {"T": 0.0}])
def test_classical_action_arguments(grid, kwargs):
    args = {"x1": 0.0, "x2": 1.0, "T": 1.0, "n_knots": 11}
    args.update(kwargs)
    with pytest.raises(ValueError):
        classical_action(_free(grid), **args)


# ---------------------------------------------------------------------------
# Analytic kernels
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("hbar", [1.0, 0.1, 0.01, 0.001])
def test_harmonic_kernel_phase_is_the_action(hbar):
    S = harmonic_action(0.5, 1.5, 1.0, 1.0)
    assert stationary_phase_defect(0.5, 1.5, 1.0, 1.0, S, hbar=hbar) < 1e-9


def test_harmonic_kernel_tends_to_free_kernel():
    x = np.array([0.3, 1.0])
    free = free_kernel(x, 0.2, 0.5, hbar=1.0)
    weak = harmonic_kernel(x, 0.2, 0.5, omega=1e-4, hbar=1.0)
    np.testing.assert_allclose(weak, free, rtol=1e-6)


def test_coherent_state_is_normalized():
    x = np.linspace(-10.0, 10.0, 2001)
    density = np.abs(coherent_state(x, 0.7, 1.5, 1.0, hbar=1.0)) ** 2
    assert integrate.trapezoid(density, x) == pytest.approx(1.0, rel=1e-8)


# ---------------------------------------------------------------------------
# Sliced kernel at fixed endpoints
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n_slices", [1, 2, 7, 64])
def test_sliced_free_kernel_is_exact(grid, n_slices):
    value = sliced_kernel(_free(grid), 1.5, 0.5, 1.0, n_slices)
    assert value == pytest.approx(complex(free_kernel(1.5, 0.5, 1.0, hbar=1.0)), rel=1e-9)


def test_sliced_harmonic_kernel_tends_to_mehler(grid):
    value = sliced_kernel(_harmonic(grid), 1.5, 0.5, 1.0, 2000)
    assert value == pytest.approx(complex(harmonic_kernel(1.5, 0.5, 1.0, omega=1.0, hbar=1.0)), rel=1e-5)


def test_sliced_harmonic_modulus_converges_with_slices(grid):
    exact = abs(complex(harmonic_kernel(1.5, 0.5, 1.0, omega=1.0, hbar=1.0)))
    errors = [abs(abs(sliced_kernel(_harmonic(grid), 1.5, 0.5, 1.0, n)) / exact - 1.0) for n in (8, 16, 32)]
    assert errors[0] > errors[1] > errors[2]
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.1)


def test_sliced_phase_follows_the_action_at_small_hbar(grid):
    spec = LagrangianSpec(1.0, harmonic_potential(grid, omega=1.0), hbar=1e-3)
    S = harmonic_action(0.5, 1.5, 1.0, 1.0)
    defect = sliced_phase_defect(spec, 0.5, 1.5, 1.0, 2000, S)
    assert defect < 1e-2
    assert defect <= 0.02 * abs(S / 1e-3 - math.pi / 4.0)


def test_sliced_kernel_modulus_scales_with_hbar(grid):
    big = LagrangianSpec(1.0, harmonic_potential(grid, omega=1.0), hbar=1.0)
    small = LagrangianSpec(1.0, harmonic_potential(grid, omega=1.0), hbar=0.01)
    ratio = abs(sliced_kernel(small, 1.5, 0.5, 1.0, 100)) / abs(sliced_kernel(big, 1.5, 0.5, 1.0, 100))
    assert ratio == pytest.approx(10.0, rel=1e-10)


def test_sliced_kernel_rejects_empty_slicing(grid):
    with pytest.raises(SlicingError):
        sliced_kernel(_free(grid), 1.5, 0.5, 1.0, 0)

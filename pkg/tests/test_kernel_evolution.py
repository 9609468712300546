"""Tests for kernel moments, the leapfrog updates and kernel/PDE consistency.

Coverage:

- ``TransitionKernel`` construction errors and the trapezoid moments of
  box kernels.
- ``to_dynamics`` mass recovery and its particle-like / constant-mass
  guards; ``kernel_for_dynamics`` round trip.
- Static kernels: local rotation of (U, V) at rate R / hbar.
- Stability guards and ``dt = 0`` of both update rules.
- Norm behaviour and kernel/PDE consistency under kernel narrowing.
- Finite discrete-state systems against the matrix exponential.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from discrete_interaction.errors import KernelError, NotHermitianError, StabilityError
from discrete_interaction.kernel_evolution import (
    EffectiveDynamics,
    KernelMoments,
    SplitState,
    TransitionKernel,
    box_kernel,
    consistency,
    derived_dynamics,
    discrete_state_drift,
    integral_stability_bound,
    integral_step,
    kernel_for_dynamics,
    kernel_moment,
    moments,
    pde_stability_bound,
    pde_step,
    shift,
    to_dynamics,
)
from discrete_interaction.operators import Grid1D, WaveFunction
from discrete_interaction.utils.constants import Boundary


pytestmark = pytest.mark.usefixtures("clean_env")


def _static_kernel(grid, r0: float) -> TransitionKernel:
    return TransitionKernel(np.full(grid.n, r0), np.zeros((grid.n, 1)), np.array([0.0]), grid)


def _packet(grid, sigma: float) -> SplitState:
    return SplitState.from_wavefunction(WaveFunction.gaussian(grid, 0.0, sigma))


# ---------------------------------------------------------------------------
# Kernel construction
# ---------------------------------------------------------------------------

def test_even_eps_grid_is_rejected(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    with pytest.raises(KernelError, match="odd number"):
        TransitionKernel(np.zeros(16), np.zeros((16, 2)), np.array([-0.5, 0.5]), grid)


def test_eps_grid_must_sit_on_the_spatial_lattice(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    with pytest.raises(KernelError, match="lattice"):
        TransitionKernel(np.zeros(16), np.zeros((16, 3)), np.array([-0.5, 0.0, 0.5]), grid)


def test_odd_smooth_part_is_rejected(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    r2 = np.tile([1.0, 0.0, -1.0], (16, 1))
    with pytest.raises(KernelError, match="not even"):
        TransitionKernel(np.zeros(16), r2, np.array([-1.0, 0.0, 1.0]), grid)


def test_shape_mismatch_is_rejected(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    with pytest.raises(KernelError, match="r0 has shape"):
        TransitionKernel(np.zeros(15), np.zeros((16, 1)), np.array([0.0]), grid)


def test_half_width_must_be_a_multiple_of_dx(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    with pytest.raises(KernelError, match="multiple of dx"):
        box_kernel(grid, 1.5, 1.0)


# ---------------------------------------------------------------------------
# Moments and effective dynamics
# ---------------------------------------------------------------------------

def test_static_kernel_moments(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    k = _static_kernel(grid, 0.7)
    m = moments(k)
    np.testing.assert_array_equal(m.P, np.full(16, 0.7))
    np.testing.assert_array_equal(m.Q, np.zeros(16))


def test_box_kernel_second_moment_matches_closed_form():
    grid = Grid1D(-1.0, 1.0, 200, Boundary.PERIODIC)
    c, w = 3.0, 0.5
    m = moments(box_kernel(grid, w, c))
    # Q = hbar^2 c w^3 / 3 up to the trapezoid error on the eps lattice
    np.testing.assert_allclose(m.Q, c * w ** 3 / 3.0, rtol=1e-3)
    np.testing.assert_allclose(m.P, 2.0 * c * w, rtol=1e-12)


def test_odd_moment_of_even_kernel_vanishes(periodic_grid):
    grid = periodic_grid(n=32, x_max=8.0)
    first = kernel_moment(box_kernel(grid, 2.0, -0.25), 1)
    assert np.max(np.abs(first)) < 1e-14


def test_negative_moment_order_is_rejected(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    with pytest.raises(ValueError, match="non-negative"):
        kernel_moment(_static_kernel(grid, 1.0), -1)


@pytest.mark.parametrize("mass", [0.5, 1.0, 2.0, 5.0])
def test_to_dynamics_recovers_mass(mass):
    Q = np.full(10, -1.0 / (2.0 * mass))
    dyn = to_dynamics(KernelMoments(P=np.linspace(0.0, 1.0, 10), Q=Q), hbar=1.0)
    assert dyn.mass == pytest.approx(mass, rel=1e-12)
    np.testing.assert_array_equal(dyn.R, np.linspace(0.0, 1.0, 10))


def test_positive_second_moment_is_not_particle_like():
    with pytest.raises(KernelError, match="not particle-like"):
        to_dynamics(KernelMoments(P=np.zeros(4), Q=np.full(4, 0.1)), hbar=1.0)


def test_varying_second_moment_is_rejected():
    Q = np.array([-0.5, -0.5, -0.6, -0.5])
    with pytest.raises(KernelError, match="mass not constant"):
        to_dynamics(KernelMoments(P=np.zeros(4), Q=Q), hbar=1.0)


@pytest.mark.parametrize("mass", [0.5, 2.0])
def test_kernel_for_dynamics_round_trip(periodic_grid, mass):
    grid = periodic_grid(n=64, x_max=16.0)
    R = 0.01 * grid.points ** 2
    dyn = derived_dynamics(kernel_for_dynamics(grid, mass, R, 2.0, hbar=1.0))
    assert abs(dyn.mass / mass - 1.0) < 1e-10
    assert np.max(np.abs(dyn.R - R)) < 1e-10


def test_static_kernel_has_infinite_mass(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    dyn = derived_dynamics(_static_kernel(grid, 1.0))
    assert math.isinf(dyn.mass)
    assert dyn.kinetic_coefficient == 0.0


# ---------------------------------------------------------------------------
# Update rules
# ---------------------------------------------------------------------------

def test_shift_vanishing_fills_with_zero():
    values = np.arange(1.0, 6.0)
    np.testing.assert_array_equal(shift(values, 2, Boundary.VANISHING), [3.0, 4.0, 5.0, 0.0, 0.0])
    np.testing.assert_array_equal(shift(values, -1, Boundary.VANISHING), [0.0, 1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(shift(values, 1, Boundary.PERIODIC), [2.0, 3.0, 4.0, 5.0, 1.0])


def test_static_kernel_half_turn(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    r0 = 1.3
    k = _static_kernel(grid, r0)
    s0 = _packet(grid, 2.0).rotated(0.4)
    steps = 4000
    dt = math.pi / (r0 * steps)
    s = s0
    for _ in range(steps):
        s = integral_step(s, k, dt)
    assert np.max(np.abs(s.U + s0.U)) < 1e-6
    assert np.max(np.abs(s.V + s0.V)) < 1e-6


def test_zero_step_is_identity(periodic_grid):
    grid = periodic_grid(n=32, x_max=8.0)
    k = kernel_for_dynamics(grid, 1.0, np.zeros(grid.n), 1.0, hbar=1.0)
    s = _packet(grid, 1.5)
    assert integral_step(s, k, 0.0) is s
    assert pde_step(s, derived_dynamics(k), grid.dx, 0.0) is s


def test_integral_step_beyond_bound_raises(periodic_grid):
    grid = periodic_grid(n=32, x_max=8.0)
    k = kernel_for_dynamics(grid, 1.0, np.zeros(grid.n), 1.0, hbar=1.0)
    bound = integral_stability_bound(k)
    with pytest.raises(StabilityError) as info:
        integral_step(_packet(grid, 1.5), k, 1.01 * bound)
    assert info.value.bound == pytest.approx(bound)


def test_pde_bound_for_free_particle(periodic_grid):
    grid = periodic_grid(n=32, x_max=8.0)
    dyn = EffectiveDynamics(mass=2.0, R=np.zeros(grid.n))
    assert pde_stability_bound(dyn, grid.dx) == pytest.approx(0.25 * 2.0 * grid.dx ** 2)
    with pytest.raises(StabilityError):
        pde_step(_packet(grid, 1.5), dyn, grid.dx, 0.6 * grid.dx ** 2 * 2.0)


def test_stability_factor_from_environment(clean_env, periodic_grid):
    clean_env.setenv("DI_STABILITY_FACTOR", "0.5")
    grid = periodic_grid(n=32, x_max=8.0)
    dyn = EffectiveDynamics(mass=1.0, R=np.zeros(grid.n))
    assert pde_stability_bound(dyn, grid.dx) == pytest.approx(0.5 * grid.dx ** 2)


def test_norm_drift_over_many_steps(periodic_grid):
    grid = periodic_grid(n=256, x_max=128.0)
    k = kernel_for_dynamics(grid, 1.0, np.zeros(grid.n), 2.0, hbar=1.0)
    s = _packet(grid, 24.0)
    start = s.norm(grid.dx)
    worst = 0.0
    for _ in range(1000):
        s = integral_step(s, k, 0.2)
        worst = max(worst, abs(s.norm(grid.dx) - start))
    assert worst < 1e-8


# ---------------------------------------------------------------------------
# Kernel versus PDE
# ---------------------------------------------------------------------------

def test_static_kernel_matches_pde_exactly(periodic_grid):
    grid = periodic_grid(n=32, x_max=8.0)
    k = _static_kernel(grid, 0.8)
    assert consistency(k, _packet(grid, 1.5), T=1.0, dt=0.01) < 1e-12


def test_consistency_improves_as_kernel_narrows(periodic_grid):
    grid = periodic_grid(n=256, x_max=128.0)
    psi0 = _packet(grid, 24.0)
    errors = [
        consistency(kernel_for_dynamics(grid, 1.0, np.zeros(grid.n), w, hbar=1.0), psi0, T=20.0, dt=0.2)
        for w in (8.0, 4.0)
    ]
    assert errors[0] / errors[1] >= 3.0


def test_consistency_is_phase_invariant(periodic_grid):
    grid = periodic_grid(n=128, x_max=64.0)
    k = kernel_for_dynamics(grid, 1.0, np.zeros(grid.n), 4.0, hbar=1.0)
    psi0 = _packet(grid, 12.0)
    plain = consistency(k, psi0, T=4.0, dt=0.2)
    turned = consistency(k, psi0.rotated(0.7), T=4.0, dt=0.2)
    assert turned == pytest.approx(plain, rel=1e-6)


def test_consistency_needs_whole_steps(periodic_grid):
    grid = periodic_grid(n=16, x_max=8.0)
    with pytest.raises(ValueError, match="whole number of steps"):
        consistency(_static_kernel(grid, 1.0), _packet(grid, 1.5), T=1.0, dt=0.3)


# ---------------------------------------------------------------------------
# Finite discrete-state systems
# ---------------------------------------------------------------------------

H2 = np.array([[1.0, 0.5], [0.5, -1.0]])


def test_discrete_state_drift_is_second_order():
    psi0 = np.array([1.0, 0.0], dtype=complex)
    coarse = discrete_state_drift(H2, psi0, T=1.0, dt=2e-3, hbar=1.0)
    fine = discrete_state_drift(H2, psi0, T=1.0, dt=1e-3, hbar=1.0)
    assert fine < 1e-5
    assert coarse / fine > 3.0


def test_complex_couplings_are_rejected():
    H = np.array([[1.0, 0.5j], [-0.5j, 1.0]])
    with pytest.raises(ValueError, match="must be real"):
        discrete_state_drift(H, np.array([1.0, 0.0]), T=0.1, dt=0.01)


def test_asymmetric_couplings_are_rejected():
    H = np.array([[1.0, 0.5], [0.4, 1.0]])
    with pytest.raises(NotHermitianError):
        discrete_state_drift(H, np.array([1.0, 0.0]), T=0.1, dt=0.01)

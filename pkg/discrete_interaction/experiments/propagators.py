"""Sliced propagator and least-action experiments."""

from typing import Any, Dict
import logging
import math

import numpy as np
import pandas as pd

from ..config import Config
from ..fields import hermite_functions
from ..operators import Grid1D, WaveFunction
from ..pathint import (
    LagrangianSpec,
    Slicing,
    classical_action,
    compare,
    compose,
    coherent_state,
    free_kernel,
    free_packet,
    harmonic_action,
    harmonic_kernel,
    kernel_matrix_defect,
    propagator,
    sliced_kernel,
    sliced_phase_defect,
)
from ..schrod import (
    EvolConfig,
    constant_potential,
    evolve,
    harmonic_potential,
    linear_potential,
    stability_bound,
)
from ..utils.constants import Boundary, Experiment
from .base import BaseExperiment

logger = logging.getLogger(__name__)
config = Config()


class PropagatorCompareExperiment(BaseExperiment):
    name = Experiment.PROPAGATOR_COMPARE
    description = "sliced propagators against analytic packets, grid evolution and composition"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        hbar = config.resolve_hbar(parameters.get("hbar"))
        mass = parameters["mass"]
        free = self._free(parameters, mass, hbar)
        harmonic = self._harmonic(parameters, mass, hbar)
        return {"free": free, "harmonic": harmonic}

    def _free(self, parameters: Dict[str, Any], mass: float, hbar: float) -> pd.DataFrame:
        x_max = parameters["x_max"]
        grid = Grid1D(-x_max, x_max, parameters["n"], Boundary.PERIODIC)
        R = constant_potential(grid, 0.0)
        T = parameters["T"]
        sigma0 = parameters["sigma0"]
        psi0 = WaveFunction.gaussian(grid, 0.0, sigma0)

        K = propagator(LagrangianSpec(mass, R, hbar), Slicing(0.0, T, parameters["n_slices"]), grid)
        propagated = K.apply(psi0).samples
        analytic = free_packet(grid.points, T, sigma0, mass, hbar)
        analytic_error = float(np.max(np.abs(propagated - analytic)) / np.max(np.abs(analytic)))

        bound = stability_bound(R, mass, hbar, config.STABILITY_FACTOR)
        steps = int(math.ceil(T / bound)) + 1
        via_grid = evolve(psi0, R, EvolConfig(T / steps, steps, mass, hbar, sample_every=steps))
        grid_error = compare(K, psi0, via_grid) / float(np.max(np.abs(analytic)))
        unitarity = K.unitarity_defect()
        centres = (-2.0 * sigma0, 0.0, 2.0 * sigma0)
        gaussians = np.array([WaveFunction.gaussian(grid, c, sigma0).samples for c in centres])
        exact_kernel = free_kernel(grid.points[:, None], grid.points[None, :], T, mass, hbar)
        kernel_error = kernel_matrix_defect(K, exact_kernel, gaussians)

        self._check_below("free-vs-analytic", analytic_error, 1e-3, "max relative error against the spreading packet")
        self._check_below("free-vs-grid", grid_error, 1e-3, "max relative error against grid evolution")
        self._check_below("free-kernel", kernel_error, 1e-3,
                          "matrix elements of K against the continuum free kernel between Gaussians")
        self._check_below("unitarity", unitarity, 1e-10, "max |T^dagger T - I|")
        return pd.DataFrame([{
            "n [1]": grid.n,
            "slices [1]": K.n_slices,
            "T [time]": T,
            "under resolved": K.under_resolved,
            "vs analytic [1]": analytic_error,
            "vs grid evolution [1]": grid_error,
            "kernel elements [1]": kernel_error,
            "grid steps [1]": steps,
            "unitarity defect [1]": unitarity,
        }])

    def _harmonic(self, parameters: Dict[str, Any], mass: float, hbar: float) -> pd.DataFrame:
        """Error and composition defect of the sliced harmonic propagator over a slice ladder."""
        x_max = parameters["harmonic_x_max"]
        grid = Grid1D(-x_max, x_max, parameters["harmonic_n"], Boundary.PERIODIC)
        omega = parameters["omega"]
        x0 = parameters["x0"]
        T = parameters["harmonic_T"]
        spec = LagrangianSpec(mass, harmonic_potential(grid, omega, mass), hbar)
        psi0 = WaveFunction(grid, coherent_state(grid.points, 0.0, x0, omega, mass, hbar))
        exact = coherent_state(grid.points, T, x0, omega, mass, hbar)
        mehler = harmonic_kernel(grid.points[:, None], grid.points[None, :], T, omega, mass, hbar)
        levels = hermite_functions(4, grid.points, omega, mass, hbar)

        rows = []
        exact_compose = 0.0
        for n in parameters["slices"]:
            full = propagator(spec, Slicing(0.0, T, n), grid)
            halves = compose(propagator(spec, Slicing(0.5 * T, T, n), grid),
                             propagator(spec, Slicing(0.0, 0.5 * T, n), grid))
            doubled = propagator(spec, Slicing(0.0, T, 2 * n), grid)
            exact_compose = max(exact_compose, float(np.max(np.abs(halves.transfer - doubled.transfer))))
            rows.append({
                "slices [1]": n,
                "dt [time]": T / n,
                "error [1]": float(np.max(np.abs(full.apply(psi0).samples - exact))),
                "composition defect [1]": float(np.max(np.abs(halves.transfer - full.transfer))),
                "kernel elements [1]": kernel_matrix_defect(full, mehler, levels),
                "unitarity defect [1]": full.unitarity_defect(),
            })
        table = pd.DataFrame(rows)
        self._check_true("harmonic-error-decreasing", bool(np.all(np.diff(table["error [1]"]) < 0)),
                         "coherent-state error decreases as slices are added")
        self._check_true("composition-decreasing", bool(np.all(np.diff(table["composition defect [1]"]) < 0)),
                         "composition defect decreases as slices are added")
        self._check_below("composition-same-slices", exact_compose, 1e-10,
                          "two halves against one propagator with the same slice length")
        self._check_below("harmonic-unitarity", float(table["unitarity defect [1]"].max()), 1e-10)
        self._check_below("harmonic-kernel", float(table.loc[table["slices [1]"].idxmax(), "kernel elements [1]"]), 1e-2,
                          "matrix elements of K against the Mehler kernel between the lowest four levels, finest slicing")
        return table


class LeastActionExperiment(BaseExperiment):
    name = Experiment.LEAST_ACTION
    description = "stationary discrete paths and their actions against closed forms"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        mass = parameters["mass"]
        T = parameters["T"]
        x1 = parameters["x1"]
        x2 = parameters["x2"]
        knots = parameters["knots"]
        slope = parameters["slope"]
        omega = parameters["omega"]
        # only the closed forms are used off-grid; the grid merely carries samples
        grid = Grid1D(-10.0, 10.0, 64, Boundary.PERIODIC)

        rows = []
        path, S = classical_action(LagrangianSpec(mass, constant_potential(grid, 0.0)), x1, x2, T, knots)
        exact = mass * (x2 - x1) ** 2 / (2.0 * T)
        rows.append({"case": "free", "action [hbar]": S, "exact [hbar]": exact, "error [hbar]": abs(S - exact)})
        self._check_below("free-action", abs(S - exact), 1e-10)

        path, S = classical_action(LagrangianSpec(mass, linear_potential(grid, slope)), x1, x2, T, knots)
        t = np.linspace(0.0, T, knots)
        parabola = x1 + (x2 - x1) * t / T + slope / (2.0 * mass) * t * (T - t)
        exact = (mass * (x2 - x1) ** 2 / (2.0 * T) - slope * T * (x1 + x2) / 2.0
                 - slope ** 2 * T ** 3 / (24.0 * mass))
        rows.append({"case": "linear", "action [hbar]": S, "exact [hbar]": exact, "error [hbar]": abs(S - exact)})
        self._check_below("parabola-path", float(np.max(np.abs(path - parabola))), 1e-8,
                          "max distance from the analytic parabola")
        self._check_below("linear-action", abs(S - exact), 1e-8)

        harmonic = LagrangianSpec(mass, harmonic_potential(grid, omega, mass))
        _, S_h = classical_action(harmonic, x1, x2, T, knots)
        exact = harmonic_action(x1, x2, T, omega, mass)
        rows.append({"case": "harmonic", "action [hbar]": S_h, "exact [hbar]": exact, "error [hbar]": abs(S_h - exact)})
        self._check_below("harmonic-action", abs(S_h - exact), 1e-6)

        phase_table = self._sliced_phase(parameters, grid, exact)
        return {"actions": pd.DataFrame(rows), "stationary-phase": phase_table}

    def _sliced_phase(self, parameters: Dict[str, Any], grid: Grid1D, action: float) -> pd.DataFrame:
        """Phase and modulus of the sliced harmonic kernel over the hbar scan."""
        mass = parameters["mass"]
        omega = parameters["omega"]
        T = parameters["T"]
        x1 = parameters["x1"]
        x2 = parameters["x2"]
        n_slices = parameters["knots"] - 1
        R = harmonic_potential(grid, omega, mass)

        rows = []
        for hbar in parameters["hbar_scan"]:
            spec = LagrangianSpec(mass, R, hbar)
            value = sliced_kernel(spec, x2, x1, T, n_slices)
            mehler = complex(harmonic_kernel(x2, x1, T, omega, mass, hbar))
            target = action / hbar - math.pi / 4.0
            defect = sliced_phase_defect(spec, x1, x2, T, n_slices, action)
            rows.append({
                "hbar [hbar]": hbar,
                "S / hbar - pi/4 [rad]": target,
                "phase defect [rad]": defect,
                "relative defect [1]": defect / abs(target),
                "|K| [1/length]": abs(value),
                "modulus error [1]": abs(abs(value) / abs(mehler) - 1.0),
            })
            logger.info(f"hbar {hbar:.3g}: sliced phase defect {defect:.3e} rad")
        table = pd.DataFrame(rows)
        smallest = table.loc[table["hbar [hbar]"].idxmin()]
        self._check_below("sliced-phase", float(smallest["relative defect [1]"]), 0.02,
                          "|arg K_sliced - (S / hbar - pi/4)| relative to S / hbar - pi/4 at the smallest hbar")
        self._check_below("sliced-modulus", float(table["modulus error [1]"].max()), 1e-3,
                          "|K_sliced| against the Mehler modulus over the hbar scan")
        return table

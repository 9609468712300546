"""Time-evolution experiments: kernel consistency, packet spreading,
stationary states and Ehrenfest relations."""

from typing import Any, Dict, List
import logging
import math

import numpy as np
import pandas as pd

from ..config import Config
from ..kernel_evolution import (
    SplitState,
    TransitionKernel,
    consistency,
    derived_dynamics,
    integral_step,
    kernel_for_dynamics,
)
from ..operators import Grid1D, ProductGrid, WaveFunction
from ..schrod import (
    EvolConfig,
    Potential,
    constant_potential,
    ehrenfest,
    evolve,
    harmonic_potential,
    linear_potential,
    separable_potential,
    stationary,
    well_potential,
)
from ..utils.constants import Boundary, Experiment
from .base import BaseExperiment

logger = logging.getLogger(__name__)
config = Config()


def _whole_steps(duration: float, dt: float, sample_every: int = 1) -> int:
    """Step count closest to ``duration`` that is a multiple of ``sample_every``."""
    blocks = max(1, int(round(duration / (dt * sample_every))))
    return blocks * sample_every


class KernelConsistencyExperiment(BaseExperiment):
    name = Experiment.KERNEL_CONSISTENCY
    description = "integral kernel evolution converging to the derived PDE as the kernel narrows"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        hbar = config.resolve_hbar(parameters.get("hbar"))
        x_max = parameters["x_max"]
        grid = Grid1D(-x_max, x_max, parameters["n"], Boundary.PERIODIC)
        mass = parameters["mass"]
        T = parameters["T"]
        dt = parameters["dt"]
        R = np.zeros(grid.n)
        psi0 = SplitState.from_wavefunction(WaveFunction.gaussian(grid, 0.0, parameters["sigma"]))
        # a tail reaching the periodic edge leaves a kink whose error does not shrink with the width
        amplitude = np.abs(psi0.to_complex())
        edge = float(max(amplitude[0], amplitude[-1]) / np.max(amplitude))
        self._check_below("packet-contained", edge, 1e-10, "packet amplitude at the box edge relative to its peak")

        rows = []
        for width in parameters["widths"]:
            kernel = kernel_for_dynamics(grid, mass, R, width * grid.dx, hbar)
            error = consistency(kernel, psi0, T, dt)
            rows.append({"half width [length]": width * grid.dx, "error [1]": error})
            logger.info(f"kernel half width {width * grid.dx:.4g}: error {error:.3e}")
        table = pd.DataFrame(rows)

        errors = table["error [1]"].to_numpy()
        widths = table["half width [length]"].to_numpy()
        ratios = errors[:-1] / errors[1:]
        table["ratio [1]"] = np.concatenate([[np.nan], ratios])
        order = float(np.polyfit(np.log(widths), np.log(errors), 1)[0])
        self._check_true("error-monotone", bool(np.all(np.diff(errors) < 0)),
                         "error decreases strictly as the kernel narrows")
        self._check_at_least("error-ratio", float(np.min(ratios)), parameters["min_ratio"],
                             "min error ratio per halving")
        self._check_at_least("convergence-order", order, parameters["min_order"],
                             "least-squares order in the half width")

        roundtrip = self._mass_roundtrip(grid, parameters, hbar)
        rotation = self._static_rotation(grid, parameters, hbar)
        self._norm_conservation(grid, psi0, parameters, hbar)
        return {"consistency": table, "mass-roundtrip": roundtrip, "static-rotation": rotation}

    def _mass_roundtrip(self, grid: Grid1D, parameters: Dict[str, Any], hbar: float) -> pd.DataFrame:
        rows = []
        R = 0.01 * grid.points ** 2
        width = parameters["widths"][-1] * grid.dx
        for mass in parameters["roundtrip_masses"]:
            dyn = derived_dynamics(kernel_for_dynamics(grid, mass, R, width, hbar))
            rows.append({
                "mass [1]": mass,
                "derived mass [1]": dyn.mass,
                "relative error [1]": abs(dyn.mass / mass - 1.0),
                "R error [energy]": float(np.max(np.abs(dyn.R - R))),
            })
        table = pd.DataFrame(rows)
        self._check_below("mass-roundtrip", float(table["relative error [1]"].max()), 1e-10)
        self._check_below("potential-roundtrip", float(table["R error [energy]"].max()), 1e-10)
        return table

    def _static_rotation(self, grid: Grid1D, parameters: Dict[str, Any], hbar: float) -> pd.DataFrame:
        """A kernel with no smooth part rotates (U, V) locally; half a turn flips the sign."""
        r0 = parameters["rotation_r0"]
        steps = parameters["rotation_steps"]
        kernel = TransitionKernel(np.full(grid.n, r0), np.zeros((grid.n, 1)), np.zeros(1), grid, hbar)
        dyn = derived_dynamics(kernel)
        dt = math.pi * hbar / (r0 * steps)
        s0 = SplitState.from_wavefunction(WaveFunction.gaussian(grid, 0.0, parameters["sigma"]))
        s = s0
        for _ in range(steps):
            s = integral_step(s, kernel, dt)
        error = float(max(np.max(np.abs(s.U + s0.U)), np.max(np.abs(s.V + s0.V))))
        self._check_true("static-limit", math.isinf(dyn.mass), "kernel without smooth part has infinite mass")
        self._check_below("static-half-turn", error, 1e-6, "max |(U, V)(pi hbar / R0) + (U, V)(0)|")
        return pd.DataFrame([{
            "R0 [energy]": r0,
            "steps [1]": steps,
            "t [hbar/energy]": steps * dt,
            "error [1]": error,
        }])

    def _norm_conservation(self, grid: Grid1D, psi0: SplitState, parameters: Dict[str, Any],
                           hbar: float) -> None:
        kernel = kernel_for_dynamics(grid, parameters["mass"], np.zeros(grid.n),
                                     parameters["widths"][-1] * grid.dx, hbar)
        s = psi0
        start = s.norm(grid.dx)
        for _ in range(parameters["norm_steps"]):
            s = integral_step(s, kernel, parameters["dt"])
        self._check_below("kernel-norm-drift", abs(s.norm(grid.dx) - start), 1e-8,
                          f"norm drift over {parameters['norm_steps']} kernel steps")


class PacketSpreadExperiment(BaseExperiment):
    name = Experiment.PACKET_SPREAD
    description = "free Gaussian spreading, long-run norm conservation and time reversal"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        hbar = config.resolve_hbar(parameters.get("hbar"))
        mass = parameters["mass"]
        sigma0 = parameters["sigma0"]
        dt = parameters["dt"]
        x_max = parameters["x_max"]
        grid = Grid1D(-x_max, x_max, parameters["n"], Boundary.PERIODIC)
        R = constant_potential(grid, 0.0)
        psi0 = WaveFunction.gaussian(grid, 0.0, sigma0)

        doubling = 2.0 * math.sqrt(3.0) * mass * sigma0 ** 2 / hbar
        steps = int(round(doubling / dt))
        sample_every = max(1, steps // max(1, parameters["width_samples"]))
        final, log = evolve(psi0, R, EvolConfig(dt, steps, mass, hbar, sample_every=sample_every))

        rows = []
        for t, spread in zip(log.t, log.spread):
            width = float(spread[0])
            analytic = sigma0 * math.sqrt(1.0 + (hbar * t / (2.0 * mass * sigma0 ** 2)) ** 2)
            rows.append({
                "t [time]": t,
                "width [length]": width,
                "analytic [length]": analytic,
                "relative error [1]": abs(width / analytic - 1.0),
            })
        widths = pd.DataFrame(rows)
        self._check_below("width-law", float(widths["relative error [1]"].max()), 0.01,
                          "max relative width error up to the doubling time")
        self._check_below("width-doubled", abs(widths["width [length]"].iloc[-1] / (2.0 * sigma0) - 1.0), 0.01,
                          "relative distance from 2 sigma0 at the doubling time")

        back, _ = evolve(final, R, EvolConfig(-dt, steps, mass, hbar, sample_every=max(1, steps)))
        reversal = float(np.max(np.abs(back.samples - psi0.samples)))
        self._check_below("time-reversal", reversal, 1e-8, "max |psi(0) - reversed psi(0)|")

        long_steps = parameters["norm_steps"]
        _, long_log = evolve(psi0, R, EvolConfig(dt, long_steps, mass, hbar,
                                                 sample_every=max(1, long_steps // 10)))
        norms = pd.DataFrame({
            "t [time]": long_log.t,
            "norm [1]": long_log.norm,
            "drift [1]": np.abs(np.asarray(long_log.norm) - long_log.norm[0]),
        })
        self._check_below("norm-drift", float(norms["drift [1]"].max()), 1e-6,
                          f"norm drift over {long_steps} steps")
        return {"width": widths, "norm": norms}


class StationaryStatesExperiment(BaseExperiment):
    name = Experiment.STATIONARY_STATES
    description = "harmonic ladder, infinite-well levels, gauge shift and separable 3D ground state"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        hbar = config.resolve_hbar(parameters.get("hbar"))
        mass = parameters["mass"]
        omega = parameters["omega"]
        levels = parameters["levels"]

        grid = Grid1D(-parameters["x_max"], parameters["x_max"], parameters["n"], Boundary.PERIODIC)
        R = harmonic_potential(grid, omega, mass)
        spec = stationary(R, levels, mass, hbar)
        harmonic = pd.DataFrame({
            "level [1]": np.arange(levels),
            "energy [hbar omega]": spec.eigenvalues / (hbar * omega),
            "exact [hbar omega]": np.arange(levels) + 0.5,
        })
        gaps = np.diff(spec.eigenvalues) / (hbar * omega)
        self._check_below("harmonic-spacing", float(np.max(np.abs(gaps - 1.0))), 0.01,
                          "max relative deviation of level gaps from hbar omega")
        self._check_below("harmonic-ground", abs(spec.eigenvalues[0] / (0.5 * hbar * omega) - 1.0), 0.01)

        shift = parameters["gauge_shift"]
        shifted = stationary(R.shifted(shift), levels, mass, hbar)
        self._check_below("gauge-energies", float(np.max(np.abs(shifted.eigenvalues - spec.eigenvalues - shift))),
                          1e-9, "max |E'(n) - E(n) - c|")
        self._check_below("gauge-states", float(np.max(np.abs(shifted.eigenvectors - spec.eigenvectors))),
                          1e-8, "max eigenvector change under a constant shift")

        well = self._well(parameters, mass, hbar)
        cube = self._separable(parameters, mass, omega, hbar)
        return {"harmonic": harmonic, "well": well, "separable": cube}

    def _well(self, parameters: Dict[str, Any], mass: float, hbar: float) -> pd.DataFrame:
        width = parameters["well_width"]
        margin = parameters["well_margin"]
        half = 0.5 * width + margin
        grid = Grid1D(-half, half, parameters["well_n"], Boundary.VANISHING)
        R = well_potential(grid, -0.5 * width, 0.5 * width, mass, hbar)
        count = parameters["well_levels"]
        spec = stationary(R, count, mass, hbar)
        n = np.arange(1, count + 1)
        continuum = (n * math.pi * hbar / width) ** 2 / (2.0 * mass)
        table = pd.DataFrame({
            "level [1]": n,
            "energy [energy]": spec.eigenvalues,
            "continuum [energy]": continuum,
            "ratio to ground [1]": spec.eigenvalues / spec.eigenvalues[0],
        })
        ratio_error = np.abs(table["ratio to ground [1]"].to_numpy() / n ** 2 - 1.0)
        self._check_below("well-ratios", float(ratio_error.max()), 0.02, "max |(E_n / E_1) / n^2 - 1|")
        self._check_below("well-ground", abs(spec.eigenvalues[0] / continuum[0] - 1.0), 0.02)
        return table

    def _separable(self, parameters: Dict[str, Any], mass: float, omega: float, hbar: float) -> pd.DataFrame:
        x_max = parameters["cube_x_max"]
        cube = ProductGrid.cube(-x_max, x_max, parameters["cube_n"], Boundary.PERIODIC)
        parts: List[Potential] = [harmonic_potential(axis, omega, mass) for axis in cube.axes]
        R3 = separable_potential(cube, parts)
        e3 = float(stationary(R3, 1, mass, hbar).eigenvalues[0])
        e1 = float(stationary(parts[0], 1, mass, hbar).eigenvalues[0])
        self._check_below("separable-ground", abs(e3 / (3.0 * e1) - 1.0), 1e-8, "|E_3D / (3 E_1D) - 1|")
        return pd.DataFrame([{
            "points per axis [1]": cube.axes[0].n,
            "E 3D [hbar omega]": e3 / (hbar * omega),
            "3 x E 1D [hbar omega]": 3.0 * e1 / (hbar * omega),
            "continuum [hbar omega]": 1.5,
        }])


class EhrenfestExperiment(BaseExperiment):
    name = Experiment.EHRENFEST
    description = "d<p>/dt against the grid force for free, linear and harmonic potentials"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        hbar = config.resolve_hbar(parameters.get("hbar"))
        mass = parameters["mass"]
        dt = parameters["dt"]
        every = parameters["sample_every"]
        x_max = parameters["x_max"]
        grid = Grid1D(-x_max, x_max, parameters["n"], Boundary.PERIODIC)
        sigma = parameters["sigma"]
        slope = parameters["slope"]
        omega = parameters["omega"]

        cases = [
            ("free", constant_potential(grid, 0.0),
             WaveFunction.gaussian(grid, 0.0, sigma, parameters["k0"]), parameters["T"]),
            ("linear", linear_potential(grid, slope),
             WaveFunction.gaussian(grid, 0.0, sigma), parameters["T"]),
            ("harmonic", harmonic_potential(grid, omega, mass),
             WaveFunction.gaussian(grid, parameters["x0"], sigma), 2.0 * math.pi / omega),
        ]
        summary = []
        trajectories = []
        for label, R, psi0, duration in cases:
            steps = _whole_steps(duration, dt, every)
            _, log = evolve(psi0, R, EvolConfig(dt, steps, mass, hbar, sample_every=every))
            residual = ehrenfest(log, R)
            frame = log.to_frame()
            trajectories.append(pd.DataFrame({
                "case": label,
                "t [time]": frame["t"],
                "<x> [length]": frame["x0"],
                "<p> [hbar/length]": frame["p0"],
                "norm [1]": frame["norm"],
            }))
            summary.append({"case": label, "duration [time]": steps * dt, "residual [force]": residual})

        table = pd.DataFrame(summary).set_index("case")
        self._check_below("ehrenfest-free", float(table.loc["free", "residual [force]"]), 1e-8)
        self._check_below("ehrenfest-linear", float(table.loc["linear", "residual [force]"]) / abs(slope), 1e-3,
                          "residual relative to the slope")
        self._check_below("ehrenfest-harmonic", float(table.loc["harmonic", "residual [force]"]), 1e-3,
                          "residual over one period")
        return {"summary": table.reset_index(), "trajectories": pd.concat(trajectories, ignore_index=True)}

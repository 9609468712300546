"""Bosonic field experiments: free mode decompositions and lattice CCRs."""

from typing import Any, Dict, List
import logging

import numpy as np
import pandas as pd

from ..fields import (
    FockSpaceTrunc,
    Lattice,
    ModeSet,
    assemble_field,
    build_modes,
    equal_time_ccr,
    heisenberg_check,
    hermite_completeness_defect,
    hermite_grid,
    hermite_orthogonality_defect,
    ladder,
    lattice_momenta,
    mode_propagator,
    pairwise_commutator_defect,
    single_mode_hamiltonian,
)
from ..operators import Grid1D
from ..pathint import Slicing, coherent_state
from ..utils.constants import Boundary, Experiment, FieldKind
from .base import BaseExperiment

logger = logging.getLogger(__name__)


class FieldModesExperiment(BaseExperiment):
    """Shared body of the Klein-Gordon, Maxwell and Proca mode experiments.

    Fields are treated in natural units with hbar = 1.
    """

    kind: str = ""

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        modes = build_modes(self.kind, parameters["k_list"], parameters["mass"])
        mode_table = self._modes_table(modes)
        spectrum = self._spectrum(modes, parameters)
        dynamics = self._dynamics(modes, parameters)

        self._check_below("pairwise-commutators", pairwise_commutator_defect(modes, parameters["commutator_cutoff"]),
                          1e-12, "max |[A_r, A_s^dagger] - 2 omega delta_rs|, |[A_r, A_s]|")
        hermite = self._hermite(modes, parameters)
        return {"modes": mode_table, "spectrum": spectrum, "dynamics": dynamics, "hermite": hermite}

    def _modes_table(self, modes: ModeSet) -> pd.DataFrame:
        rows = []
        for m in range(modes.count):
            for p in range(modes.polarization_count):
                e = modes.polarizations[m, p]
                rows.append({
                    "mode [1]": m,
                    "polarization [1]": p,
                    "kx [1/length]": modes.k[m, 0],
                    "ky [1/length]": modes.k[m, 1],
                    "kz [1/length]": modes.k[m, 2],
                    "omega [energy]": modes.omega[m],
                    "ex [1]": e[0] if modes.components == 3 else 1.0,
                    "ey [1]": e[1] if modes.components == 3 else 0.0,
                    "ez [1]": e[2] if modes.components == 3 else 0.0,
                })
        k2 = np.sum(modes.k ** 2, axis=1)
        dispersion = float(np.max(np.abs(modes.omega ** 2 - k2 - modes.mass ** 2)))
        self._check_below("dispersion", dispersion, 1e-12, "max |omega^2 - k^2 - m^2|")
        self._check_below("polarization-orthonormal", modes.orthonormality_defect(), 1e-12)
        self._check_below("transversality", modes.transversality_defect(), 1e-12, "max |e . k| over transverse pairs")
        self._check_true(
            "polarization-count",
            modes.polarization_count == FieldKind.polarization_count(self.kind),
            f"{modes.polarization_count} polarizations per mode",
        )
        return pd.DataFrame(rows)

    def _spectrum(self, modes: ModeSet, parameters: Dict[str, Any]) -> pd.DataFrame:
        N = parameters["cutoff"]
        levels = parameters["levels"]
        rows = []
        worst = 0.0
        for omega in np.unique(modes.omega):
            _, spec = single_mode_hamiltonian(float(omega), N)
            for n in range(levels):
                error = abs(spec.eigenvalues[n] - (n + 0.5) * omega)
                worst = max(worst, error / omega)
                rows.append({
                    "omega [energy]": omega,
                    "level [1]": n,
                    "energy [energy]": spec.eigenvalues[n],
                    "exact [energy]": (n + 0.5) * omega,
                })
        self._check_below("oscillator-levels", worst, 1e-6, "max |E_n - (n + 1/2) omega| / omega")
        _, unit = single_mode_hamiltonian(1.0, N)
        self._check_below("zero-point", abs(unit.eigenvalues[0] - 0.5), 1e-6, "|E_0 - 1/2| at omega = 1")
        return pd.DataFrame(rows)

    def _dynamics(self, modes: ModeSet, parameters: Dict[str, Any]) -> pd.DataFrame:
        """Heisenberg equation of each distinct mode and its sliced amplitude propagator."""
        x_max = parameters["grid_x_max"]
        grid = Grid1D(-x_max, x_max, parameters["grid_n"], Boundary.PERIODIC)
        T = parameters["propagator_T"]
        x0 = parameters["x0"]
        slicing = Slicing(0.0, T, parameters["propagator_slices"])
        rows = []
        for omega in np.unique(modes.omega):
            omega = float(omega)
            mo = ladder(omega, parameters["heisenberg_cutoff"])
            h = parameters["heisenberg_step"] / omega
            residual = heisenberg_check(mo, np.arange(5) * h)
            K = mode_propagator(omega, slicing, grid)
            psi = K.transfer @ coherent_state(grid.points, 0.0, x0, omega, 1.0, 1.0)
            error = float(np.max(np.abs(psi - coherent_state(grid.points, T, x0, omega, 1.0, 1.0))))
            rows.append({
                "omega [energy]": omega,
                "commutator defect [energy]": mo.commutator_defect(),
                "heisenberg residual [energy^2]": residual,
                "propagator error [1]": error,
            })
        table = pd.DataFrame(rows)
        self._check_below("mode-commutator", float(table["commutator defect [energy]"].max()), 1e-12)
        self._check_below("heisenberg", float(table["heisenberg residual [energy^2]"].max()), 1e-6,
                          "max |a'' + omega^2 a| below the cutoff")
        self._check_below("mode-propagator", float(table["propagator error [1]"].max()), 1e-3,
                          "sliced amplitude propagator against the coherent state")
        return table

    def _hermite(self, modes: ModeSet, parameters: Dict[str, Any]) -> pd.DataFrame:
        omega = float(np.min(modes.omega))
        # sized for the widest functions: lowest omega, highest order
        grid = hermite_grid(max(parameters["hermite_orders"]), omega, parameters["grid_n"])
        rows = []
        for n_max in parameters["hermite_orders"]:
            rows.append({
                "omega [energy]": omega,
                "functions [1]": n_max,
                "half width [length]": grid.x_max,
                "orthogonality defect [1]": hermite_orthogonality_defect(n_max, grid, omega),
                "completeness defect [1]": hermite_completeness_defect(n_max, grid, omega,
                                                                       parameters["hermite_shift"]),
            })
        table = pd.DataFrame(rows)
        self._check_below("hermite-orthogonality", float(table["orthogonality defect [1]"].max()), 1e-10)
        self._check_true("hermite-completeness",
                         bool(np.all(np.diff(table["completeness defect [1]"]) < 0)),
                         "reconstruction of a displaced ground state improves with more functions")
        return table


class KleinGordonModesExperiment(FieldModesExperiment):
    name = Experiment.KG_MODES
    description = "scalar field modes: dispersion, oscillator spectra and commutators"
    kind = FieldKind.KLEIN_GORDON


class MaxwellModesExperiment(FieldModesExperiment):
    name = Experiment.MAXWELL_MODES
    description = "transverse vector field modes with two polarizations"
    kind = FieldKind.MAXWELL


class ProcaModesExperiment(FieldModesExperiment):
    name = Experiment.PROCA_MODES
    description = "massive vector field modes with a longitudinal polarization"
    kind = FieldKind.PROCA


class FieldCCRExperiment(BaseExperiment):
    name = Experiment.FIELD_CCR
    description = "equal-time commutators of small truncated lattice fields"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        spacing = parameters["spacing"]
        trunc = FockSpaceTrunc(parameters["cutoff"])
        mass = parameters["mass"]
        kg_sites = parameters["kg_sites"]
        maxwell_sites = parameters["maxwell_sites"]
        maxwell_k = [k for k in lattice_momenta(maxwell_sites, spacing) if k != 0.0]

        cases: List[Any] = [
            ("klein_gordon single site", build_modes(FieldKind.KLEIN_GORDON, [0.0], mass), Lattice(1, spacing)),
            (f"klein_gordon {kg_sites} sites", build_modes(FieldKind.KLEIN_GORDON,
                                                           lattice_momenta(kg_sites, spacing), mass),
             Lattice(kg_sites, spacing)),
            (f"maxwell {maxwell_sites} sites", build_modes(FieldKind.MAXWELL, maxwell_k, 0.0),
             Lattice(maxwell_sites, spacing)),
            ("proca single site", build_modes(FieldKind.PROCA, [0.0], mass), Lattice(1, spacing)),
        ]
        rows = []
        for label, modes, lattice in cases:
            field = assemble_field(modes, lattice, trunc)
            report = equal_time_ccr(field)
            rows.append({
                "case": label,
                "oscillators [1]": modes.oscillator_count,
                "dimension [1]": field.dim,
                "phi-pi [1/length]": report.phi_pi,
                "phi-phi [1/length]": report.phi_phi,
                "pi-pi [1/length]": report.pi_pi,
                "hermiticity [1]": field.hermiticity_defect(),
                "incomplete basis": report.incomplete_basis,
            })
            logger.info(f"{label}: CCR deviation {report.deviation:.3e}")
            self._check_below(f"ccr {label}", report.deviation, 1e-8)
            self._check_true(f"complete {label}", not report.incomplete_basis,
                             "mode set covers every lattice wavenumber")
        table = pd.DataFrame(rows)
        self._check_below("field-hermiticity", float(table["hermiticity [1]"].max()), 1e-12)
        return {"ccr": table}

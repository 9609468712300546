"""Grassmann-algebra experiments: the fermionic oscillator and Dirac modes."""

from typing import Any, Dict, Sequence
import logging

import numpy as np
import pandas as pd

from ..grassmann import (
    GAlgebra,
    anticommutator_defect,
    dirac_mode_hamiltonian,
    equation_of_motion_defect,
    fermi_oscillator,
    fermion_mode,
    fock_metric,
    heisenberg_evolve,
    metric_adjoint,
    tensor_sum_spectrum,
)
from ..utils.constants import Experiment
from .base import BaseExperiment

logger = logging.getLogger(__name__)


def _spectrum_error(values: np.ndarray, expected: Sequence[float]) -> float:
    """Distance between a sorted complex spectrum and real reference values."""
    expected = np.sort(np.asarray(expected, dtype=float))
    return float(max(np.max(np.abs(values.real - expected)), np.max(np.abs(values.imag))))


class FermiOscillatorExperiment(BaseExperiment):
    name = Experiment.FERMI_OSCILLATOR
    description = "fermionic oscillator on a two-generator Grassmann algebra"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        rows = []
        for omega in parameters["omegas"]:
            H, mode = fermi_oscillator(omega)
            number = mode.F_dag @ mode.F
            values = number.eigenvalues()
            levels = np.array([0.0, 2.0 * omega])
            number_error = float(np.max(np.min(np.abs(values[:, None] - levels[None, :]), axis=1)))

            G = fock_metric(mode)
            adjoint = max(
                float(np.max(np.abs(metric_adjoint(mode.F, G) - mode.F_dag.matrix))),
                float(np.max(np.abs(metric_adjoint(mode.E, G) - mode.E_dag.matrix))),
            )
            hermiticity = float(np.max(np.abs(metric_adjoint(H, G) - H.matrix)))
            heisenberg = 0.0
            for t in parameters["times"]:
                evolved = heisenberg_evolve(H, mode.F, t)
                heisenberg = max(heisenberg, float(np.max(np.abs(evolved.matrix - np.exp(1j * omega * t) * mode.F.matrix))))

            rows.append({
                "omega [energy]": omega,
                "nilpotency [1]": mode.nilpotency_defect(),
                "anticommutators [energy]": anticommutator_defect([mode]),
                "number spectrum [energy]": number_error,
                "equation of motion [energy^2]": equation_of_motion_defect(H, omega),
                "spectrum [energy]": _spectrum_error(H.eigenvalues(), [-omega, 0.0, 0.0, omega]),
                "metric adjoint [1]": adjoint,
                "metric hermiticity [energy]": hermiticity,
                "heisenberg [1]": heisenberg,
            })
        table = pd.DataFrame(rows)
        self._check_below("nilpotency", float(table["nilpotency [1]"].max()), 1e-14, "max |F^2|, |E^2|")
        self._check_below("anticommutators", float(table["anticommutators [energy]"].max()), 1e-14,
                          "max |{F^dagger, F} - 2 omega| and vanishing cross terms")
        self._check_below("number-spectrum", float(table["number spectrum [energy]"].max()), 1e-12,
                          "F^dagger F eigenvalues within {0, 2 omega}")
        self._check_below("equation-of-motion", float(table["equation of motion [energy^2]"].max()), 1e-12,
                          "max |b'' + omega^2 b|")
        self._check_below("oscillator-spectrum", float(table["spectrum [energy]"].max()), 1e-12,
                          "spectrum against {-omega, 0, 0, omega}")
        self._check_below("fock-adjoint", float(table["metric adjoint [1]"].max()), 1e-10,
                          "F^dagger and E^dagger as Fock-metric adjoints")
        self._check_below("fock-hermitian", float(table["metric hermiticity [energy]"].max()), 1e-10)
        self._check_below("heisenberg-phase", float(table["heisenberg [1]"].max()), 1e-10,
                          "max |F(t) - e^{i omega t} F|")
        return {"oscillator": table}


class DiracModesExperiment(BaseExperiment):
    name = Experiment.DIRAC_MODES
    description = "Dirac mode Hamiltonians as tensor sums of single-label spectra"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        omega = parameters["omega"]
        _, single = dirac_mode_hamiltonian([omega])
        expected_single = [-2.0 * omega, 0.0, 0.0, 2.0 * omega]
        single_error = _spectrum_error(single, expected_single)
        self._check_below("single-spectrum", single_error, 1e-12, "spectrum against {-2 omega, 0, 0, 2 omega}")

        omegas = parameters["omegas"]
        _, multi = dirac_mode_hamiltonian(omegas)
        expected = tensor_sum_spectrum([[-2.0 * w, 0.0, 0.0, 2.0 * w] for w in omegas])
        multi_error = _spectrum_error(multi, expected)
        self._check_below("tensor-sum", multi_error, 1e-10, "multi-label spectrum against the tensor sum")

        alg = GAlgebra(2 * len(omegas))
        modes = [fermion_mode(alg, w, label) for label, w in enumerate(omegas)]
        self._check_below("cross-label-anticommutators", anticommutator_defect(modes), 1e-14)

        H0, zero_values = dirac_mode_hamiltonian([0.0])
        square = float(np.max(np.abs(np.linalg.matrix_power(H0.matrix, 2))))
        size = float(np.max(np.abs(H0.matrix)))
        self._check_true("zero-frequency-nilpotent", square == 0.0 and size > 0.0,
                         f"H^2 = {square:.1e} with |H| = {size:.1e}")
        self._check_below("zero-frequency-spectrum", float(np.max(np.abs(zero_values))), 1e-6)

        spectrum = pd.DataFrame({
            "index [1]": np.arange(multi.size),
            "eigenvalue [energy]": multi.real,
            "tensor sum [energy]": expected,
        })
        summary = pd.DataFrame([
            {"case": "single", "labels [1]": 1, "dimension [1]": 4, "spectrum error [energy]": single_error},
            {"case": "multi", "labels [1]": len(omegas), "dimension [1]": multi.size,
             "spectrum error [energy]": multi_error},
            {"case": "zero frequency", "labels [1]": 1, "dimension [1]": 4,
             "spectrum error [energy]": float(np.max(np.abs(zero_values)))},
        ])
        return {"summary": summary, "spectrum": spectrum}

"""G-probability and operator-algebra experiments."""

from typing import Any, Dict, List
import logging

import numpy as np
import pandas as pd

from discrete_interaction.gprob import (
    Amplitude,
    EventPair,
    GState,
    PairSpace,
    alt_sum,
    born,
    chain,
    classical_from_pairs,
    density,
    exact_testing,
    normalize,
)
from discrete_interaction.operators import (
    Grid1D,
    WaveFunction,
    commutator_uncertainty,
    expectation,
    ladder_value,
    momentum_op,
    periodic_generator,
    position_op,
)
from discrete_interaction.config import Config
from discrete_interaction.utils.constants import Boundary, Experiment
from .base import BaseExperiment

logger = logging.getLogger(__name__)
config = Config()


def _random_amplitude(rng: np.random.Generator) -> Amplitude:
    """Amplitude with magnitude in [0, 1] and uniform phase."""
    r = rng.uniform(0.0, 1.0)
    theta = rng.uniform(-np.pi, np.pi)
    return Amplitude(r * np.cos(theta), r * np.sin(theta))


class GProbBornExperiment(BaseExperiment):
    name = Experiment.GPROB_BORN
    description = "g-probability composition, Born reduction and pair-space measures"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        rng = np.random.default_rng(parameters["seed"])
        n_triples = parameters["triples"]
        n_states = parameters["states"]
        n_pairs = parameters["pair_spaces"]
        n_labels = parameters["labels"]
        rows_a, cols_b = parameters["pair_shape"]

        assoc = mult = swap = 0.0
        with self._create_progress_bar(n_triples, "chain triples") as bar:
            for _ in range(n_triples):
                a, b, c = (_random_amplitude(rng) for _ in range(3))
                left = chain(chain(a, b), c)
                right = chain(a, chain(b, c))
                assoc = max(assoc, abs(left.as_complex() - right.as_complex()))
                mult = max(mult, abs(chain(a, b).magnitude - a.magnitude * b.magnitude))
                pair = EventPair("a", "b", a)
                back = pair.swapped()
                swap = max(swap, abs(back.amp.u - a.u) + abs(back.amp.v + a.v))
                bar.update(1)

        labels = [f"a{i}" for i in range(n_labels)]
        born_dev = herm = trace = rank = 0.0
        for _ in range(n_states):
            raw = rng.normal(size=n_labels) + 1j * rng.normal(size=n_labels)
            state = normalize(GState.from_vector(labels, raw))
            born_dev = max(born_dev, abs(born(state).total() - 1.0))
            dm = density(state)
            herm = max(herm, dm.hermiticity_defect())
            trace = max(trace, abs(dm.trace - 1.0))
            rank = max(rank, dm.rank_one_defect())

        measure_dev = additivity = 0.0
        a_labels = [f"a{i}" for i in range(rows_a)]
        b_labels = [f"b{j}" for j in range(cols_b)]
        for _ in range(n_pairs):
            raw = rng.normal(size=(rows_a, cols_b)) + 1j * rng.normal(size=(rows_a, cols_b))
            raw = raw / np.sqrt(np.sum(np.abs(raw) ** 2))
            space = classical_from_pairs(PairSpace(a_labels, b_labels, raw))
            measure_dev = max(measure_dev, abs(space.total() - 1.0))
            for i in range(rows_a - 1):
                union = space.probability([a_labels[i], a_labels[i + 1]])
                parts = space.measure[a_labels[i]] + space.measure[a_labels[i + 1]]
                additivity = max(additivity, abs(union - parts))

        properties = pd.DataFrame(
            [
                ("chain associativity", n_triples, assoc, 1e-14),
                ("chain magnitude", n_triples, mult, 1e-14),
                ("event swap", n_triples, swap, 1e-300),
                ("born total", n_states, born_dev, 1e-12),
                ("density hermiticity", n_states, herm, 1e-10),
                ("density trace", n_states, trace, 1e-10),
                ("density rank one", n_states, rank, 1e-10),
                ("pair-space total", n_pairs, measure_dev, 1e-12),
                ("pair-space additivity", n_pairs, additivity, 1e-300),
            ],
            columns=["property", "samples [1]", "max defect [1]", "tolerance [1]"],
        )
        self._check_below("chain-associativity", assoc, 1e-14)
        self._check_below("chain-magnitude", mult, 1e-14)
        self._check_true("event-swap", swap == 0.0, f"label swap defect {swap:.3e} (must be exactly 0)")
        self._check_below("born-total", born_dev, 1e-12)
        self._check_below("density-hermitian", herm, 1e-10)
        self._check_below("density-trace", trace, 1e-10)
        self._check_below("density-rank-one", rank, 1e-10)
        self._check_below("pair-space-total", measure_dev, 1e-12)
        self._check_true("pair-space-additivity", additivity == 0.0,
                         f"disjoint-union additivity defect {additivity:.3e} (must be exactly 0)")

        examples = self._examples()
        return {"properties": properties, "examples": examples}

    def _examples(self) -> pd.DataFrame:
        """Worked values: composition, alternatives, Born weights, exact testing."""
        rows: List[Dict[str, Any]] = []
        composed = chain(Amplitude(0.6, 0.8), Amplitude(0.6, -0.8))
        rows.append({"case": "chain (0.6,0.8)(0.6,-0.8)", "u [1]": composed.u, "v [1]": composed.v})
        summed = alt_sum(Amplitude(0.5, 0.5), Amplitude(0.5, -0.5))
        rows.append({"case": "alt_sum (0.5,0.5)+(0.5,-0.5)", "u [1]": summed.u, "v [1]": summed.v})
        space = born(GState({"a": Amplitude(0.6, 0.0), "b": Amplitude(0.0, 0.8)}))
        rows.append({"case": "born P(a)", "u [1]": space.measure["a"], "v [1]": 0.0})
        rows.append({"case": "born P(b)", "u [1]": space.measure["b"], "v [1]": 0.0})
        self._check_below("example-chain", abs(composed.as_complex() - 1.0), 1e-15)
        self._check_below("example-born", abs(space.measure["a"] - 0.36) + abs(space.measure["b"] - 0.64), 1e-15)

        s = 1.0 / np.sqrt(2.0)
        mixed = density(GState({"a": Amplitude(s, 0.0), "b": Amplitude(s, 0.0)}))
        pure = density(GState({"a": Amplitude(1.0, 0.0)}))
        self._check_true(
            "exact-testing",
            exact_testing(pure, 1e-6) and not exact_testing(mixed, 1e-6),
            "single state is exactly testable, an equal superposition is not",
        )
        return pd.DataFrame(rows)


class UncertaintyExperiment(BaseExperiment):
    name = Experiment.UNCERTAINTY
    description = "position/momentum uncertainty, momentum convergence and periodic generator ladders"

    def run(self, parameters: Dict[str, Any]) -> Dict[str, pd.DataFrame]:
        hbar = config.resolve_hbar(parameters.get("hbar"))
        x_max = parameters["x_max"]
        grid = Grid1D(-x_max, x_max, parameters["n"], Boundary.PERIODIC)
        X = position_op(grid)
        P = momentum_op(grid, hbar)

        rows = []
        for sigma in parameters["sigmas"]:
            psi = WaveFunction.gaussian(grid, 0.0, sigma)
            res = commutator_uncertainty(X, P, psi)
            rows.append({
                "sigma0 [length]": sigma,
                "dx [length]": res.dA,
                "dp [hbar/length]": res.dB,
                "dx*dp [hbar]": res.product,
                "hbar/2 [hbar]": 0.5 * hbar,
                "bound [hbar]": res.bound,
            })
        gaussians = pd.DataFrame(rows)
        slack = float((gaussians["dx*dp [hbar]"] - gaussians["bound [hbar]"]).min())
        self._check_at_least("gaussian-bound", slack, -1e-9, "min(dx*dp - bound)")
        rel = float(np.max(np.abs(gaussians["dx*dp [hbar]"] / (0.5 * hbar) - 1.0)))
        self._check_below("gaussian-minimum", rel, 0.01, "max |dx*dp / (hbar/2) - 1|")

        rng = np.random.default_rng(parameters["seed"])
        small = Grid1D(-x_max, x_max, parameters["random_n"], Boundary.PERIODIC)
        X_small = position_op(small)
        P_small = momentum_op(small, hbar)
        worst = np.inf
        with self._create_progress_bar(parameters["random_states"], "random states") as bar:
            for _ in range(parameters["random_states"]):
                raw = rng.normal(size=small.n) + 1j * rng.normal(size=small.n)
                psi = WaveFunction(small, raw).normalized()
                res = commutator_uncertainty(X_small, P_small, psi)
                worst = min(worst, res.product - res.bound)
                bar.update(1)
        self._check_at_least("random-bound", worst, -1e-9, "min(dA*dB - bound) over random states")

        convergence = self._momentum_convergence(parameters, hbar)
        ladder = self._generator_ladder(parameters, hbar)
        return {"gaussians": gaussians, "momentum-convergence": convergence, "generator-ladder": ladder}

    def _momentum_convergence(self, parameters: Dict[str, Any], hbar: float) -> pd.DataFrame:
        """Plane-wave eigenvalue error of the central-difference momentum under dx halving."""
        mode = parameters["convergence_mode"]
        rows = []
        for n in parameters["convergence_n"]:
            grid = Grid1D(-np.pi, np.pi, n, Boundary.PERIODIC)
            wave = grid.plane_wave(mode)
            P = momentum_op(grid, hbar)
            value = expectation(P, wave)
            residual = float(np.max(np.abs(P.apply(wave).samples - value * wave.samples)))
            k = 2.0 * np.pi * mode / grid.length
            rows.append({
                "n [1]": n,
                "dx [length]": grid.dx,
                "eigenvalue [hbar/length]": value,
                "continuum [hbar/length]": hbar * k,
                "error [hbar/length]": abs(value - hbar * k),
                "residual [1]": residual,
            })
        table = pd.DataFrame(rows)
        self._check_below("plane-wave-eigenvector", float(table["residual [1]"].max()), 1e-10)
        errors = table["error [hbar/length]"].to_numpy()
        ratios = errors[:-1] / errors[1:]
        table["ratio [1]"] = np.concatenate([[np.nan], ratios])
        worst = float(np.max(np.abs(ratios / 4.0 - 1.0)))
        self._check_below("momentum-second-order", worst, 0.2, "max |error ratio / 4 - 1|")
        return table

    def _generator_ladder(self, parameters: Dict[str, Any], hbar: float) -> pd.DataFrame:
        n = parameters["generator_n"]
        q = parameters["charge_q"]
        top = parameters["ladder_modes"]
        rows = []
        spectra_ok = True
        const_zero = True
        for label, period in (("rotation", 2.0 * np.pi), ("u1", 2.0 * np.pi / q)):
            gen, spectrum = periodic_generator(n, period, hbar)
            values = spectrum.eigenvalues
            expected = np.sort([ladder_value(n, period, m, hbar) for m in range(n)])
            spectra_ok = spectra_ok and bool(np.max(np.abs(values - expected)) < 1e-10)
            const_zero = const_zero and not np.any(gen.matrix @ np.ones(n))
            for m in range(-top, top + 1):
                value = ladder_value(n, period, m, hbar)
                continuum = m * 2.0 * np.pi * hbar / period
                rows.append({
                    "generator": label,
                    "period [rad]": period,
                    "m [1]": m,
                    "eigenvalue [hbar]": value,
                    "continuum [hbar]": continuum,
                    "error [hbar]": abs(value - continuum),
                })
        table = pd.DataFrame(rows)
        self._check_true("generator-spectrum", spectra_ok, "generator spectra equal the discrete Fourier ladder")
        self._check_true("generator-constant-mode", const_zero, "constant mode has eigenvalue exactly 0")
        step_rot = ladder_value(n, 2.0 * np.pi, 1, hbar)
        step_u1 = ladder_value(n, 2.0 * np.pi / q, 1, hbar)
        self._check_below("u1-ladder-spacing", abs(step_u1 / step_rot - q), 1e-12,
                          "|U(1) spacing / rotation spacing - q|")
        return table

"""Complex g-probability algebra over events.

An event between two elementary states carries a pair of reals: ``u`` for
the part where the states stay together and ``v`` for the transition
part. Chaining logically related events multiplies the pairs as complex
numbers ``u + i v``; combining logically unrelated alternatives adds them.

Amplitudes are unconstrained during arithmetic. Unit normalization is
enforced only where a state or a pair space crosses an API boundary
(``density``, ``born``, ``classical_from_pairs``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .config import Config
from .errors import DegenerateStateError, NormalizationError
from .utils.constants import NORMALIZATION_TOL

logger = logging.getLogger(__name__)
config = Config()

Label = Hashable


@dataclass(frozen=True)
class Amplitude:
    """Pair (U, V) attached to an event; read as the complex number U + iV."""

    u: float
    v: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"amplitude components must be finite, got ({self.u}, {self.v})")

    @classmethod
    def from_complex(cls, z: complex) -> "Amplitude":
        return cls(float(z.real), float(z.imag))

    def as_complex(self) -> complex:
        return complex(self.u, self.v)

    @property
    def magnitude(self) -> float:
        return math.hypot(self.u, self.v)

    def conjugate(self) -> "Amplitude":
        return Amplitude(self.u, -self.v)


@dataclass(frozen=True)
class EventPair:
    from_label: Label
    to_label: Label
    amp: Amplitude

    def swapped(self) -> "EventPair":
        """Reverse the event: the transition part changes sign, the stay part does not."""
        return EventPair(self.to_label, self.from_label, self.amp.conjugate())


@dataclass(frozen=True)
class GState:
    """Map from elementary-state label to its amplitude. Insertion order is kept."""

    amplitudes: Mapping[Label, Amplitude]

    @property
    def labels(self) -> List[Label]:
        return list(self.amplitudes.keys())

    def vector(self) -> np.ndarray:
        return np.array([a.as_complex() for a in self.amplitudes.values()], dtype=complex)

    def total_weight(self) -> float:
        return float(sum(a.u * a.u + a.v * a.v for a in self.amplitudes.values()))

    @classmethod
    def from_vector(cls, labels: Sequence[Label], values: Iterable[complex]) -> "GState":
        return cls({lab: Amplitude.from_complex(complex(z)) for lab, z in zip(labels, values)})


@dataclass(frozen=True)
class DensityMatrix:
    labels: List[Label]
    entries: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def rank_one_defect(self) -> float:
        """Largest 2x2 minor magnitude; zero for a pure state."""
        p = self.entries
        n = p.shape[0]
        worst = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                minors = p[i, :, None] * p[j, None, :] - p[i, None, :] * p[j, :, None]
                worst = max(worst, float(np.max(np.abs(minors))))
        return worst


@dataclass(frozen=True)
class ClassicalSpace:
    events: List[Label]
    measure: Dict[Label, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(p < 0 for p in self.measure.values()):
            raise ValueError("classical measure must be non-negative")

    def probability(self, labels: Iterable[Label]) -> float:
        """Probability of the union of distinct elementary events."""
        return float(sum(self.measure[lab] for lab in set(labels)))

    def total(self) -> float:
        return float(sum(self.measure.values()))


@dataclass(frozen=True)
class PairSpace:
    """Pair amplitudes Psi(<a_i|b_j>) with rows indexed by a and columns by b.

    The reversed pair is the complex conjugate, so only one orientation is
    stored.
    """

    a_labels: List[Label]
    b_labels: List[Label]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        shape = (len(self.a_labels), len(self.b_labels))
        if self.amplitudes.shape != shape:
            raise ValueError(
                f"pair amplitudes have shape {self.amplitudes.shape}, expected {shape}"
            )

    def reversed_amplitude(self, i: int, j: int) -> complex:
        return complex(np.conj(self.amplitudes[i, j]))

    def total_weight(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def chain(c21: Amplitude, c32: Amplitude) -> Amplitude:
    """Compose <3|1> = <3|2><2|1> for three logically related states."""
    u = c21.u * c32.u - c21.v * c32.v
    v = c21.v * c32.u + c21.u * c32.v
    return Amplitude(u, v)


def alt_sum(ca: Amplitude, cb: Amplitude) -> Amplitude:
    """Amplitude of the alternative "a or b" for logically unrelated states."""
    return Amplitude(ca.u + cb.u, ca.v + cb.v)


def normalize(state: GState) -> GState:
    weight = state.total_weight()
    if weight <= 0.0:
        raise DegenerateStateError()
    scale = 1.0 / math.sqrt(weight)
    return GState({lab: Amplitude(a.u * scale, a.v * scale) for lab, a in state.amplitudes.items()})


def _require_normalized(weight: float, what: str) -> None:
    deviation = abs(weight - 1.0)
    if deviation > NORMALIZATION_TOL:
        raise NormalizationError(deviation, what)


def density(state: GState) -> DensityMatrix:
    """Outer product P_ij = Psi(a_i) conj(Psi(a_j)) of a normalized state."""
    _require_normalized(state.total_weight(), "state")
    psi = state.vector()
    return DensityMatrix(state.labels, np.outer(psi, psi.conj()))


def exact_testing(dm: DensityMatrix, tol: Optional[float] = None) -> bool:
    """True when every off-diagonal entry is below ``tol``, i.e. the labels are
    mutually exclusive outcomes and classical additivity applies."""
    tol = config.EXACT_TESTING_TOL if tol is None else tol
    off = dm.entries - np.diag(np.diag(dm.entries))
    return bool(np.all(np.abs(off) < tol))


def born(state: GState) -> ClassicalSpace:
    _require_normalized(state.total_weight(), "state")
    measure = {lab: a.u * a.u + a.v * a.v for lab, a in state.amplitudes.items()}
    return ClassicalSpace(state.labels, measure)


def classical_from_pairs(ps: PairSpace) -> ClassicalSpace:
    """Unite pairs over the b index: P(a_i) = sum_j Psi(<a_i|b_j>) Psi(<b_j|a_i>)."""
    _require_normalized(ps.total_weight(), "pair space")
    measure: Dict[Label, float] = {}
    for i, lab in enumerate(ps.a_labels):
        row = ps.amplitudes[i]
        measure[lab] = float(np.sum(row * row.conj()).real)
    logger.debug("pair space %dx%d reduced to %d events", len(ps.a_labels), len(ps.b_labels), len(measure))
    return ClassicalSpace(list(ps.a_labels), measure)

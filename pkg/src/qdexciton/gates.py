"""Closed-form gate set: U(chi, gamma), U_Z, U_X, the two-dot propagator, iSWAP, CNOT.

Gate sequences are written left to right as operator products, so the
rightmost element acts first.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DecompositionMismatchError, InvalidArgumentError
from .hamiltonians import CoupledDotParams
from .operators import (
    _expm_hermitian_unchecked,
    as_matrix,
    commutator_norm,
    fidelity_up_to_phase,
    is_unitary,
    quasi_pauli,
)
from .phases import wrap_angle

NONCOMMUTING_THRESHOLD = 1e-12
CNOT_TOL = 1e-10

CNOT_CONTROL_1 = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CNOT_CONTROL_2 = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)


@dataclass(frozen=True)
class SingleQubitGateSpec:
    chi: float
    gamma: float

    def __post_init__(self):
        if not (0.0 <= self.chi <= math.pi):
            raise InvalidArgumentError(f"chi must lie in [0, pi], got {self.chi}")
        if not (-math.pi < self.gamma <= math.pi):
            raise InvalidArgumentError(f"gamma must lie in (-pi, pi], got {self.gamma}")


def u_chi_gamma(spec: SingleQubitGateSpec) -> np.ndarray:
    """Gate of a cyclic evolution with cyclic-state angle chi and total phase gamma."""
    chi, gamma = spec.chi, spec.gamma
    c2 = math.cos(chi / 2) ** 2
    s2 = math.sin(chi / 2) ** 2
    ep, em = cmath.exp(1j * gamma), cmath.exp(-1j * gamma)
    off = 1j * math.sin(chi) * math.sin(gamma)
    return np.array([[ep * c2 + em * s2, off], [off, ep * s2 + em * c2]], dtype=complex)


def u_chi_gamma_exp(spec: SingleQubitGateSpec) -> np.ndarray:
    """``exp(i gamma (cos chi Z + sin chi X))``, the generator form of the same gate."""
    axis = math.cos(spec.chi) * quasi_pauli("Z") + math.sin(spec.chi) * quasi_pauli("X")
    return _expm_hermitian_unchecked(axis, spec.gamma)


def u_z(gamma_z: float) -> np.ndarray:
    return u_chi_gamma(SingleQubitGateSpec(0.0, wrap_angle(-gamma_z / 2)))


def u_x(gamma_x: float) -> np.ndarray:
    return u_chi_gamma(SingleQubitGateSpec(math.pi / 2, wrap_angle(-gamma_x / 2)))


def noncommuting(s1: SingleQubitGateSpec, s2: SingleQubitGateSpec) -> bool:
    """True unless ``sin g1 sin g2 sin(chi2 - chi1)`` vanishes."""
    w = math.sin(s1.gamma) * math.sin(s2.gamma) * math.sin(s2.chi - s1.chi)
    return abs(w) > NONCOMMUTING_THRESHOLD


def two_qubit_propagator(p: CoupledDotParams, t: float) -> np.ndarray:
    """Closed-form evolution of the coupled pair in its standard displayed form.

    The exchange block is ``[[cos(-2Vt), i sin(-2Vt)], [i sin(-2Vt), cos(-2Vt)]]``.
    That is ``(Z x I) exp(-i H t) (Z x I)`` for the coupled Hamiltonian H,
    i.e. the exact propagator with the sign of the exchange term reversed;
    both share populations, and only this form lands on the iSWAP at
    ``V t = m pi - pi/4``.
    """
    if not (math.isfinite(t) and t >= 0):
        raise InvalidArgumentError(f"t must be finite and >= 0, got {t}")
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = cmath.exp(-1j * t * p.epsilon)
    u[3, 3] = cmath.exp(1j * t * p.epsilon)
    theta = -2 * p.coupling * t
    u[1, 1] = u[2, 2] = math.cos(theta)
    u[1, 2] = u[2, 1] = 1j * math.sin(theta)
    return u


def iswap() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex
    )


def apply_single(gate, qubit: int) -> np.ndarray:
    """Lift a one-qubit gate onto qubit 1 (left factor) or 2 of a pair."""
    g = as_matrix(gate, "gate")
    if g.shape != (2, 2):
        raise InvalidArgumentError("apply_single expects a 2x2 gate")
    if qubit == 1:
        return np.kron(g, np.eye(2))
    if qubit == 2:
        return np.kron(np.eye(2), g)
    raise InvalidArgumentError(f"qubit must be 1 or 2, got {qubit}")


@dataclass(frozen=True)
class GateElement:
    name: str
    qubit: int | None
    angle: float | None
    matrix: np.ndarray = field(repr=False)

    @property
    def label(self) -> str:
        if self.name == "iSWAP":
            return "iSWAP"
        return f"{self.name}^({self.qubit})({self.angle:+.6g})"


@dataclass(frozen=True)
class GateSequence:
    """Operator product of ``elements`` read left to right (rightmost first in time)."""

    elements: tuple
    matrix: np.ndarray = field(repr=False)
    control: int | None = None
    fidelities: dict = field(default_factory=dict)

    @classmethod
    def compose(cls, elements, **kw) -> "GateSequence":
        m = np.eye(4, dtype=complex)
        for el in elements:
            m = m @ el.matrix
        return cls(tuple(elements), m, **kw)

    @property
    def fidelity(self) -> float:
        return self.fidelities.get(self.control, 0.0) if self.control else 0.0

    def count(self, name: str) -> int:
        return sum(1 for e in self.elements if e.name == name)


def _single(name, qubit, angle):
    fn = {"U_Z": u_z, "U_X": u_x}[name]
    return GateElement(name, qubit, angle, apply_single(fn(angle), qubit))


def cnot_elements() -> tuple:
    """The seven factors of the two-iSWAP CNOT construction, in written order."""
    half = math.pi / 2
    iS = GateElement("iSWAP", None, None, iswap())
    return (
        _single("U_Z", 2, -half),
        iS,
        _single("U_X", 1, half),
        iS,
        _single("U_Z", 1, half),
        _single("U_Z", 2, -half),
        _single("U_X", 2, -half),
    )


def cnot_sequence(tol: float = CNOT_TOL) -> GateSequence:
    """Compose the CNOT construction and check it against both control assignments.

    Raises :class:`DecompositionMismatchError` with the per-element matrices
    if neither assignment reaches ``1 - tol`` fidelity up to global phase.
    """
    seq = GateSequence.compose(cnot_elements())
    fids = {
        1: fidelity_up_to_phase(seq.matrix, CNOT_CONTROL_1),
        2: fidelity_up_to_phase(seq.matrix, CNOT_CONTROL_2),
    }
    control = max(fids, key=fids.get)
    if fids[control] < 1 - tol or not is_unitary(seq.matrix):
        raise DecompositionMismatchError(
            f"composed sequence is not a CNOT: fidelities {fids}",
            fidelities=fids,
            elements=list(seq.elements),
            composed=seq.matrix,
        )
    return GateSequence(seq.elements, seq.matrix, control, fids)


def universality_witness(s1: SingleQubitGateSpec, s2: SingleQubitGateSpec) -> dict:
    """Predicate and matrix commutator for a pair of single-qubit gates."""
    return {
        "noncommuting": noncommuting(s1, s2),
        "commutator_norm": commutator_norm(u_chi_gamma(s1), u_chi_gamma(s2)),
    }

"""Exciton-qubit Hamiltonians in the quasi-spin computational basis.

Conventions: hbar = 1, energies in eV and times in 1/eV. ``|0>`` is the
empty dot and ``|1>`` holds one exciton; registers are big-endian, dot 1 is
the leftmost tensor factor. ``HBAR_EV_FS`` converts 1/eV to femtoseconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import CapacityError, InvalidArgumentError
from .operators import MAX_QUBITS, kron, quasi_pauli

HBAR_EV_FS = 0.6582119569


def to_fs(t_inv_ev: float) -> float:
    return t_inv_ev * HBAR_EV_FS


def from_fs(t_fs: float) -> float:
    return t_fs / HBAR_EV_FS


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise InvalidArgumentError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class DriveParams:
    """Single-dot laser drive ``E(t) = A exp(i(omega t + phase))``.

    ``phase`` defaults to 0 and is only moved off zero by dynamic-phase
    cancellation schedules (a pi shift flips the in-plane field).
    """

    epsilon: float
    amplitude: float
    omega: float
    phase: float = 0.0

    def __post_init__(self):
        _positive("epsilon", self.epsilon)
        _positive("omega", self.omega)
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise InvalidArgumentError(f"amplitude must be >= 0, got {self.amplitude}")
        if not math.isfinite(self.phase):
            raise InvalidArgumentError("phase must be finite")

    @property
    def detuning(self) -> float:
        return self.epsilon - self.omega

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega


@dataclass(frozen=True)
class CoupledDotParams:
    epsilon: float
    coupling: float

    def __post_init__(self):
        _positive("epsilon", self.epsilon)
        _positive("coupling", self.coupling)


@dataclass(frozen=True)
class DotArrayParams:
    """N identical dots with pairwise Foerster couplings ``coupling[i, j]``."""

    n_dots: int
    epsilon: float
    coupling: np.ndarray = field(repr=False)
    drive_amplitude: float = 0.0
    drive_omega: float = 1.0
    drive_on: bool = False

    def __post_init__(self):
        if not isinstance(self.n_dots, (int, np.integer)) or self.n_dots < 1:
            raise InvalidArgumentError(f"n_dots must be a positive integer, got {self.n_dots}")
        if self.n_dots > MAX_QUBITS:
            raise CapacityError(f"n_dots={self.n_dots} exceeds cap of {MAX_QUBITS}")
        _positive("epsilon", self.epsilon)
        c = np.array(self.coupling, dtype=float)
        if c.shape != (self.n_dots, self.n_dots):
            raise InvalidArgumentError(f"coupling must be {self.n_dots}x{self.n_dots}")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise InvalidArgumentError("couplings must be finite and >= 0")
        if not np.array_equal(c, c.T):
            raise InvalidArgumentError("coupling matrix must be symmetric")
        if np.any(np.diag(c) != 0):
            raise InvalidArgumentError("coupling matrix must have a zero diagonal")
        c.setflags(write=False)
        object.__setattr__(self, "coupling", c)
        if self.drive_on:
            _positive("drive_omega", self.drive_omega)
            if self.drive_amplitude < 0:
                raise InvalidArgumentError("drive_amplitude must be >= 0")

    @classmethod
    def uniform(cls, n_dots, epsilon, coupling, **drive):
        """All-to-all coupling of equal strength, as for equispaced dots."""
        c = np.full((n_dots, n_dots), float(coupling))
        np.fill_diagonal(c, 0.0)
        return cls(n_dots=n_dots, epsilon=epsilon, coupling=c, **drive)

    @classmethod
    def chain(cls, n_dots, epsilon, coupling, **drive):
        """Nearest-neighbour coupling only."""
        c = np.zeros((n_dots, n_dots))
        idx = np.arange(n_dots - 1)
        c[idx, idx + 1] = c[idx + 1, idx] = coupling
        return cls(n_dots=n_dots, epsilon=epsilon, coupling=c, **drive)


def single_dot_hamiltonian(p: DriveParams, t: float) -> np.ndarray:
    """``(eps/2) Z + A cos(wt + phase) X + A sin(wt + phase) Y``."""
    theta = p.omega * t + p.phase
    return (
        0.5 * p.epsilon * quasi_pauli("Z")
        + p.amplitude * math.cos(theta) * quasi_pauli("X")
        + p.amplitude * math.sin(theta) * quasi_pauli("Y")
    )


def single_dot_hamiltonian_batch(p: DriveParams, times) -> np.ndarray:
    """Stack of ``single_dot_hamiltonian`` at each entry of ``times``."""
    times = np.asarray(times, dtype=float)
    field = p.amplitude * np.exp(-1j * (p.omega * times + p.phase))
    h = np.zeros(times.shape + (2, 2), dtype=complex)
    h[..., 0, 0] = 0.5 * p.epsilon
    h[..., 1, 1] = -0.5 * p.epsilon
    h[..., 0, 1] = field
    h[..., 1, 0] = field.conj()
    return h


def rotating_frame_hamiltonian(p: DriveParams) -> np.ndarray:
    """Time-independent generator in the frame co-rotating with the drive.

    The lab propagator is ``exp(-i w t Z/2) exp(-i H_rot t)``.
    """
    return (
        0.5 * p.detuning * quasi_pauli("Z")
        + p.amplitude * math.cos(p.phase) * quasi_pauli("X")
        + p.amplitude * math.sin(p.phase) * quasi_pauli("Y")
    )


def coupled_hamiltonian(p: CoupledDotParams) -> np.ndarray:
    """Two undriven dots, basis ``|00>, |01>, |10>, |11>``."""
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = p.epsilon
    h[3, 3] = -p.epsilon
    h[1, 2] = h[2, 1] = -2 * p.coupling
    return h


def coupled_hamiltonian_tensor(p: CoupledDotParams) -> np.ndarray:
    """Same operator as :func:`coupled_hamiltonian`, assembled from Pauli products."""
    I, X, Y, Z = (quasi_pauli(n) for n in "IXYZ")
    return 0.5 * p.epsilon * (kron(Z, I) + kron(I, Z)) - p.coupling * (kron(X, X) + kron(Y, Y))


def _site(op, i, n):
    left = sparse.identity(2**i, dtype=complex, format="csr")
    right = sparse.identity(2 ** (n - i - 1), dtype=complex, format="csr")
    return sparse.kron(sparse.kron(left, sparse.csr_matrix(op)), right, format="csr")


def array_hamiltonian(p: DotArrayParams, t: float = 0.0) -> np.ndarray:
    """N-dot register Hamiltonian.

    Each unordered pair contributes ``-V_ij (X_i X_j + Y_i Y_j)``, which is
    the two-dot coupling generalised pair by pair. The drive, when on, adds
    ``A cos(wt) X_i + A sin(wt) Y_i`` on every dot.
    """
    n = p.n_dots
    X, Y, Z = (quasi_pauli(k) for k in "XYZ")
    xs = [_site(X, i, n) for i in range(n)]
    ys = [_site(Y, i, n) for i in range(n)]
    h = 0.5 * p.epsilon * sum(_site(Z, i, n) for i in range(n))
    for i in range(n):
        for j in range(i + 1, n):
            v = p.coupling[i, j]
            if v:
                h = h - v * (xs[i] @ xs[j] + ys[i] @ ys[j])
    if p.drive_on and p.drive_amplitude:
        theta = p.drive_omega * t
        a = p.drive_amplitude
        h = h + a * math.cos(theta) * sum(xs) + a * math.sin(theta) * sum(ys)
    return sparse.csr_matrix(h).toarray()


def excitation_number(n_dots: int) -> np.ndarray:
    """Diagonal exciton-count operator ``sum_i (1 - Z_i)/2``."""
    if n_dots > MAX_QUBITS:
        raise CapacityError(f"{n_dots} qubits exceeds cap of {MAX_QUBITS}")
    idx = np.arange(2**n_dots)
    counts = np.array([bin(k).count("1") for k in idx], dtype=float)
    return np.diag(counts).astype(complex)

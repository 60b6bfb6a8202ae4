"""Dense operator algebra for small qubit registers.

Matrices are plain ``numpy`` complex arrays of shape ``(d, d)`` with
``d = 2**n``, ``1 <= n <= 12``. The Frobenius norm is used everywhere.
"""

from __future__ import annotations

import numpy as np

from .errors import CapacityError, ContractViolationError, InvalidArgumentError

MAX_QUBITS = 12
MAX_DIM = 2**MAX_QUBITS

HERMITIAN_RTOL = 1e-12
UNITARY_TOL_PER_DIM = 1e-10

_PAULI = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# J+ raises |1> -> |0> in the Z = diag(1, -1) convention, so that
# X = J+ + J-, Y = i(-J+ + J-), Z = 2 Jz.
_LADDER = {
    "J+": np.array([[0, 1], [0, 0]], dtype=complex),
    "J-": np.array([[0, 0], [1, 0]], dtype=complex),
    "Jz": np.array([[0.5, 0], [0, -0.5]], dtype=complex),
}


def quasi_pauli(name: str) -> np.ndarray:
    """Return a fresh copy of I, X, Y or Z (2x2)."""
    try:
        return _PAULI[name].copy()
    except (KeyError, TypeError):
        raise InvalidArgumentError(f"unknown quasi-Pauli operator {name!r}") from None


def quasi_spin(name: str) -> np.ndarray:
    """Single-site quasi-spin operator ``J+``, ``J-`` or ``Jz``."""
    try:
        return _LADDER[name].copy()
    except (KeyError, TypeError):
        raise InvalidArgumentError(f"unknown quasi-spin operator {name!r}") from None


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and coerce ``a`` into a square complex matrix of power-of-two size."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgumentError(f"{name} must be square, got shape {m.shape}")
    if not _is_power_of_two(m.shape[0]):
        raise InvalidArgumentError(f"{name} dimension {m.shape[0]} is not a power of two >= 2")
    if m.shape[0] > MAX_DIM:
        raise CapacityError(f"{name} dimension {m.shape[0]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise InvalidArgumentError(f"{name} has non-finite entries")
    return m


def frobenius(a) -> float:
    return float(np.linalg.norm(a, "fro"))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(h, rtol: float = HERMITIAN_RTOL) -> bool:
    h = np.asarray(h, dtype=complex)
    scale = frobenius(h)
    return frobenius(h - dagger(h)) <= rtol * scale


def unitarity_residual(u) -> float:
    u = np.asarray(u, dtype=complex)
    return frobenius(dagger(u) @ u - np.eye(u.shape[0]))


def is_unitary(u, tol_per_dim: float = UNITARY_TOL_PER_DIM) -> bool:
    u = np.asarray(u, dtype=complex)
    return unitarity_residual(u) <= tol_per_dim * u.shape[0]


def kron(a, b) -> np.ndarray:
    """Kronecker product; ``a`` acts on the leftmost (first) qubit."""
    a = as_matrix(a, "left factor")
    b = as_matrix(b, "right factor")
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise CapacityError(
            f"kron result dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)


def kron_all(*factors) -> np.ndarray:
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = kron(out, f)
    return out


def expm_hermitian(h, t: float = 1.0, sign: int = -1) -> np.ndarray:
    """Exact ``exp(sign * i * h * t)`` for Hermitian ``h`` via eigendecomposition."""
    h = as_matrix(h, "h")
    if sign not in (1, -1):
        raise InvalidArgumentError(f"sign must be +1 or -1, got {sign}")
    if not is_hermitian(h):
        raise ContractViolationError("expm_hermitian requires a Hermitian matrix")
    return _expm_hermitian_unchecked(h, sign * t)


def _expm_hermitian_unchecked(h: np.ndarray, st) -> np.ndarray:
    # Works on a single matrix or a stack (..., d, d); st may broadcast per stack entry.
    w, v = np.linalg.eigh(h)
    phases = np.exp(1j * w * np.asarray(st)[..., None])
    return (v * phases[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def _check_same_dim(u, v):
    if u.shape != v.shape:
        raise InvalidArgumentError(f"dimension mismatch: {u.shape} vs {v.shape}")


def fidelity_up_to_phase(u, v) -> float:
    """``|Tr(u^dagger v)| / d``, equal to 1 exactly when ``u = exp(i phi) v``."""
    u = as_matrix(u, "u")
    v = as_matrix(v, "v")
    _check_same_dim(u, v)
    return float(abs(np.vdot(u, v)) / u.shape[0])


def commutator(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    _check_same_dim(a, b)
    return a @ b - b @ a


def commutator_norm(a, b) -> float:
    return frobenius(commutator(a, b))


def embed(op, site: int, n_sites: int) -> np.ndarray:
    """Place a single-qubit ``op`` on ``site`` (0-based, big-endian) of ``n_sites``."""
    if not 0 <= site < n_sites:
        raise InvalidArgumentError(f"site {site} outside register of {n_sites}")
    if n_sites > MAX_QUBITS:
        raise CapacityError(f"{n_sites} qubits exceeds cap of {MAX_QUBITS}")
    left = np.eye(2**site, dtype=complex)
    right = np.eye(2 ** (n_sites - site - 1), dtype=complex)
    return np.kron(np.kron(left, np.asarray(op, dtype=complex)), right)

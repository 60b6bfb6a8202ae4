import math

import numpy as np
import pytest

from qdexciton.errors import CapacityError, InvalidArgumentError
from qdexciton.hamiltonians import (
    HBAR_EV_FS,
    CoupledDotParams,
    DotArrayParams,
    DriveParams,
    array_hamiltonian,
    coupled_hamiltonian,
    coupled_hamiltonian_tensor,
    excitation_number,
    from_fs,
    rotating_frame_hamiltonian,
    single_dot_hamiltonian,
    single_dot_hamiltonian_batch,
    to_fs,
)
from qdexciton.operators import commutator_norm, is_hermitian, quasi_pauli, quasi_spin

I, X, Y, Z = (quasi_pauli(n) for n in "IXYZ")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(epsilon=0, amplitude=0.1, omega=1),
        dict(epsilon=1, amplitude=-0.1, omega=1),
        dict(epsilon=1, amplitude=0.1, omega=0),
        dict(epsilon=float("nan"), amplitude=0.1, omega=1),
    ],
)
def test_drive_params_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        DriveParams(**kwargs)


def test_coupled_params_validation():
    with pytest.raises(InvalidArgumentError):
        CoupledDotParams(1.4, 0.0)
    with pytest.raises(InvalidArgumentError):
        CoupledDotParams(-1.0, 0.1)


def test_single_dot_at_t0():
    p = DriveParams(1.2, 0.3, 0.9)
    np.testing.assert_allclose(single_dot_hamiltonian(p, 0.0), 0.6 * Z + 0.3 * X)


def test_single_dot_undriven():
    p = DriveParams(1.2, 0.0, 0.9)
    for t in (0.0, 1.7, 40.0):
        np.testing.assert_array_equal(single_dot_hamiltonian(p, t), 0.6 * Z)


def test_single_dot_quarter_period():
    p = DriveParams(1.2, 0.3, 0.9)
    np.testing.assert_allclose(
        single_dot_hamiltonian(p, math.pi / (2 * p.omega)), 0.6 * Z + 0.3 * Y, atol=1e-15
    )


def test_single_dot_spectrum_is_time_independent(rng):
    p = DriveParams(1.1, 0.4, 1.7)
    expected = math.sqrt((p.epsilon / 2) ** 2 + p.amplitude**2)
    for t in rng.uniform(0, 20, size=10):
        h = single_dot_hamiltonian(p, t)
        assert is_hermitian(h)
        np.testing.assert_allclose(np.linalg.eigvalsh(h), [-expected, expected], atol=1e-14)


def test_batch_matches_scalar(rng):
    p = DriveParams(1.1, 0.4, 1.7, phase=0.3)
    times = rng.uniform(0, 10, size=7)
    batch = single_dot_hamiltonian_batch(p, times)
    for t, h in zip(times, batch):
        np.testing.assert_allclose(h, single_dot_hamiltonian(p, t), atol=1e-15)


def test_rotating_frame_examples():
    np.testing.assert_allclose(rotating_frame_hamiltonian(DriveParams(1.0, 0.2, 1.0)), 0.2 * X)
    np.testing.assert_allclose(rotating_frame_hamiltonian(DriveParams(1.5, 0.0, 1.0)), 0.25 * Z)


def test_rotating_frame_conjugation(rng):
    # H(t) = R(t) H(0) R(t)^dagger with R(t) = exp(-i w t Z/2); H_rot = H(0) - w Z/2
    p = DriveParams(1.3, 0.25, 0.8)
    np.testing.assert_allclose(
        rotating_frame_hamiltonian(p), single_dot_hamiltonian(p, 0.0) - 0.5 * p.omega * Z
    )
    for t in rng.uniform(0, 10, size=5):
        r = np.diag(np.exp([-0.5j * p.omega * t, 0.5j * p.omega * t]))
        np.testing.assert_allclose(
            r @ single_dot_hamiltonian(p, 0.0) @ r.conj().T, single_dot_hamiltonian(p, t), atol=1e-14
        )


def test_coupled_matrix_pattern():
    h = coupled_hamiltonian(CoupledDotParams(1.4, 0.1))
    expected = np.array(
        [[1.4, 0, 0, 0], [0, 0, -0.2, 0], [0, -0.2, 0, 0], [0, 0, 0, -1.4]], dtype=complex
    )
    np.testing.assert_array_equal(h, expected)
    assert h[1, 2] == -2 * 0.1


def test_coupled_small_coupling_limit():
    h = coupled_hamiltonian(CoupledDotParams(1.4, 1e-300))
    np.testing.assert_allclose(h, np.diag([1.4, 0, 0, -1.4]), atol=1e-299)


def test_coupled_two_constructions_agree(rng):
    for _ in range(10):
        p = CoupledDotParams(rng.uniform(0.5, 2), rng.uniform(0.01, 0.5))
        assert np.max(np.abs(coupled_hamiltonian(p) - coupled_hamiltonian_tensor(p))) <= 1e-14


def test_coupled_eigenvalues():
    eps, v = 1.4, 0.1
    w = np.linalg.eigvalsh(coupled_hamiltonian(CoupledDotParams(eps, v)))
    np.testing.assert_allclose(np.sort(w), np.sort([eps, -eps, 2 * v, -2 * v]), atol=1e-14)


def test_array_single_dot_reduction(rng):
    for t in rng.uniform(0, 10, size=5):
        arr = DotArrayParams(1, 1.1, np.zeros((1, 1)), drive_amplitude=0.3, drive_omega=0.7, drive_on=True)
        np.testing.assert_allclose(
            array_hamiltonian(arr, t), single_dot_hamiltonian(DriveParams(1.1, 0.3, 0.7), t), atol=1e-15
        )


def test_array_quasi_spin_drive_form():
    # drive term E J+ + E* J- with J+ = |0><1| and E = A exp(-i w t)
    arr = DotArrayParams(1, 1.0, np.zeros((1, 1)), drive_amplitude=0.3, drive_omega=0.7, drive_on=True)
    t = 0.9
    e = 0.3 * np.exp(-0.7j * t)
    ref = 1.0 * quasi_spin("Jz") + e * quasi_spin("J+") + np.conj(e) * quasi_spin("J-")
    np.testing.assert_allclose(array_hamiltonian(arr, t), ref, atol=1e-15)


def test_array_two_dots_equals_coupled():
    arr = DotArrayParams.uniform(2, 1.4, 0.1)
    ref = coupled_hamiltonian(CoupledDotParams(1.4, 0.1))
    assert np.max(np.abs(array_hamiltonian(arr) - ref)) <= 1e-14


def _brute_force_array(n, eps, coupling):
    # Pairwise hopping |..1_i..0_j..> <-> |..0_i..1_j..| with amplitude -2 V_ij, filled bit by bit.
    dim = 2**n
    h = np.zeros((dim, dim), dtype=complex)
    for s in range(dim):
        bits = [(s >> (n - 1 - i)) & 1 for i in range(n)]
        h[s, s] = 0.5 * eps * sum(1 - 2 * b for b in bits)
        for i in range(n):
            for j in range(n):
                if i != j and bits[i] == 1 and bits[j] == 0:
                    nb = bits.copy()
                    nb[i], nb[j] = 0, 1
                    s2 = int("".join(map(str, nb)), 2)
                    h[s2, s] += -2 * coupling[i, j]
    return h


def test_array_three_dots_random_couplings(rng):
    c = rng.uniform(0, 0.3, size=(3, 3))
    c = np.triu(c, 1) + np.triu(c, 1).T
    arr = DotArrayParams(3, 1.2, c)
    h = array_hamiltonian(arr)
    assert is_hermitian(h)
    np.testing.assert_allclose(h, _brute_force_array(3, 1.2, c), atol=1e-14)
    n_exc = excitation_number(3)
    assert commutator_norm(h, n_exc) <= 1e-10
    # sum_i (Jz_i + 1/2) counts empty dots here; it is conserved all the same
    number_as_written = sum(
        np.kron(np.kron(np.eye(2**i), 0.5 * Z + 0.5 * I), np.eye(2 ** (2 - i))) for i in range(3)
    )
    assert commutator_norm(h, number_as_written) <= 1e-10


def test_array_drive_breaks_number_conservation():
    arr = DotArrayParams.uniform(2, 1.0, 0.1, drive_amplitude=0.2, drive_omega=1.0, drive_on=True)
    assert commutator_norm(array_hamiltonian(arr, 0.3), excitation_number(2)) > 0.1


def test_chain_constructor():
    arr = DotArrayParams.chain(4, 1.0, 0.05)
    assert arr.coupling[0, 1] == 0.05 and arr.coupling[0, 2] == 0
    assert is_hermitian(array_hamiltonian(arr))


def test_array_validation():
    with pytest.raises(CapacityError):
        DotArrayParams.uniform(13, 1.0, 0.1)
    with pytest.raises(InvalidArgumentError):
        DotArrayParams(2, 1.0, np.array([[0, 0.1], [0.2, 0]]))
    with pytest.raises(InvalidArgumentError):
        DotArrayParams(2, 1.0, np.array([[0.1, 0.1], [0.1, 0]]))
    arr = DotArrayParams.uniform(2, 1.0, 0.1)
    with pytest.raises(ValueError):
        arr.coupling[0, 1] = 3.0


def test_unit_conversion():
    assert to_fs(1.0) == HBAR_EV_FS
    assert from_fs(to_fs(3.7)) == pytest.approx(3.7, rel=1e-15)

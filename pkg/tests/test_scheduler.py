import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_timing
from qdexciton.errors import InvalidArgumentError
from qdexciton.gates import u_z
from qdexciton.hamiltonians import HBAR_EV_FS
from qdexciton.operators import fidelity_up_to_phase
from qdexciton.scheduler import (
    decoherence_budget,
    fidelity_penalty,
    idle_phase_tracker,
    iswap_candidates,
    solve_iswap_timing,
    timing_fidelity,
)


def test_reference_timing():
    sol = solve_iswap_timing(1.4, 0.1, 10, 10)
    assert (sol.k, sol.m) == (5, 1)
    assert sol.v_required == pytest.approx(0.105, abs=1e-15)
    assert sol.t == pytest.approx(10 * math.pi / 1.4, rel=1e-15)
    assert sol.t_fs == pytest.approx(14.770, abs=1e-3)
    assert sol.v_residual == pytest.approx(0.005, abs=1e-15)


def test_exact_lattice_point():
    eps = 2 * math.pi
    sol = solve_iswap_timing(eps, 0.75 * math.pi, 3, 3)
    assert (sol.k, sol.m) == (1, 1)
    assert sol.t == pytest.approx(1.0, rel=1e-15)
    assert sol.v_residual <= 1e-15
    assert timing_fidelity(sol, eps) >= 1 - 1e-12


def test_smallest_box_forces_choice():
    sol = solve_iswap_timing(1.4, 5.0, 1, 1)
    assert (sol.k, sol.m) == (1, 1)
    assert sol.v_residual == pytest.approx(5.0 - 1.4 * 0.75 / 2)


def test_candidates_order_and_count():
    cands = iswap_candidates(1.4, 0.1, 3, 4)
    assert len(cands) == 12
    assert [(c.k, c.m) for c in cands[:5]] == [(1, 1), (1, 2), (1, 3), (1, 4), (2, 1)]


@pytest.mark.parametrize("bad", [(0, 0.1, 1, 1), (1.4, -0.1, 1, 1), (1.4, 0.1, 0, 1), (1.4, 0.1, 1.5, 1)])
def test_candidates_validation(bad):
    with pytest.raises(InvalidArgumentError):
        iswap_candidates(*bad)


@settings(max_examples=60, deadline=None)
@given(
    eps=st.floats(0.3, 3.0),
    v=st.floats(0.005, 1.0),
    k_max=st.integers(1, 12),
    m_max=st.integers(1, 12),
)
def test_solver_matches_brute_force(eps, v, k_max, m_max):
    sol = solve_iswap_timing(eps, v, k_max, m_max)
    k, m = brute_force_timing(eps, v, k_max, m_max)
    if (sol.k, sol.m) != (k, m):
        # only a floating-point near tie may disagree with exact arithmetic
        other = [c for c in iswap_candidates(eps, v, k_max, m_max) if (c.k, c.m) == (k, m)][0]
        assert other.v_residual == pytest.approx(sol.v_residual, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(eps=st.floats(0.3, 3.0), v=st.floats(0.005, 1.0), n=st.integers(1, 10))
def test_residual_never_grows_with_box(eps, v, n):
    small = solve_iswap_timing(eps, v, n, n)
    big = solve_iswap_timing(eps, v, n + 1, n + 1)
    assert big.v_residual <= small.v_residual


def test_every_candidate_is_an_iswap(rng):
    eps = rng.uniform(0.5, 2)
    for c in iswap_candidates(eps, 0.1, 4, 4):
        assert timing_fidelity(c, eps) >= 1 - 1e-10


def test_fidelity_penalty():
    eps = 1.4
    sol = solve_iswap_timing(eps, 0.1)
    assert fidelity_penalty(sol, eps, sol.v_required) >= 1 - 1e-12
    f = fidelity_penalty(sol, eps, sol.v_required * (1 + 1e-3))
    assert 1 - 1e-4 < f < 1
    # with the nominal coupling the spent coupling 0.1 misses by 5 meV
    assert fidelity_penalty(sol, eps, 0.1) < f
    with pytest.raises(InvalidArgumentError):
        fidelity_penalty(sol, eps, 0.1, dt_jitter=-2 * sol.t)


def test_jitter_infidelity_is_quadratic():
    eps = 1.4
    sol = solve_iswap_timing(eps, 0.1)
    dts = np.array([1e-4, 2e-4, 4e-4, 8e-4])
    infid = [1 - fidelity_penalty(sol, eps, sol.v_required, dt) for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(infid), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)


# --- idle phases ----------------------------------------------------------------


def test_idle_zero_span():
    idle = idle_phase_tracker(1.4, [])
    assert idle.total_time == 0 and idle.compensation == 0
    np.testing.assert_array_equal(idle.unitary, np.eye(2))


def test_idle_full_turn():
    eps = 1.4
    idle = idle_phase_tracker(eps, [math.pi / eps, math.pi / eps])
    np.testing.assert_allclose(idle.unitary, -np.eye(2), atol=1e-14)
    assert abs(math.sin(idle.compensation)) <= 1e-12
    # both qubits idle together: the sign cancels across the pair
    np.testing.assert_allclose(np.kron(idle.unitary, idle.unitary), np.eye(4), atol=1e-14)


def test_idle_quarter_turn():
    eps = 2.0
    idle = idle_phase_tracker(eps, [math.pi / 4])
    assert idle.compensation == pytest.approx(-math.pi / 2)


@settings(max_examples=80, deadline=None)
@given(eps=st.floats(0.1, 3.0), spans=st.lists(st.floats(0, 50), max_size=6))
def test_compensation_undoes_idle(eps, spans):
    idle = idle_phase_tracker(eps, spans)
    assert -math.pi < idle.compensation <= math.pi
    assert fidelity_up_to_phase(u_z(idle.compensation) @ idle.unitary, np.eye(2)) >= 1 - 1e-10


def test_idle_validation():
    with pytest.raises(InvalidArgumentError):
        idle_phase_tracker(1.0, [1.0, -0.5])


# --- coherence budget -----------------------------------------------------------


def test_budget_reference():
    b = decoherence_budget(40.0, 0.1)
    assert b.tau_v == pytest.approx(6.582, abs=1e-3)
    assert b.op_count == 6077


def test_budget_equal_times():
    tau_v_fs = HBAR_EV_FS / 0.1
    assert decoherence_budget(tau_v_fs / 1000, 0.1).op_count == 1


def test_budget_doubling():
    n = decoherence_budget(40.0, 0.1).op_count
    assert decoherence_budget(80.0, 0.1).op_count in (2 * n, 2 * n + 1)
    assert decoherence_budget(40.0, 0.2).op_count in (2 * n, 2 * n + 1)


@settings(max_examples=50, deadline=None)
@given(tau=st.floats(0.1, 100), v=st.floats(0.001, 0.5), f=st.floats(1.0, 3.0))
def test_budget_monotone(tau, v, f):
    assert decoherence_budget(tau * f, v).op_count >= decoherence_budget(tau, v).op_count
    assert decoherence_budget(tau, v * f).op_count >= decoherence_budget(tau, v).op_count


def test_budget_validation():
    with pytest.raises(InvalidArgumentError):
        decoherence_budget(0, 0.1)

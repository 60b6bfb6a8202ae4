"""Timing for the exchange-generated iSWAP, idle-phase bookkeeping, coherence budget."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .gates import iswap, two_qubit_propagator
from .hamiltonians import HBAR_EV_FS, CoupledDotParams, to_fs
from .operators import fidelity_up_to_phase
from .phases import wrap_angle
from .propagation import free_evolution


@dataclass(frozen=True)
class TimingSolution:
    """Gate time ``t = 2 k pi / eps`` and the coupling that makes ``V t = m pi - pi/4``."""

    k: int
    m: int
    t: float
    v_required: float
    v_target: float

    @property
    def v_residual(self) -> float:
        return abs(self.v_required - self.v_target)

    @property
    def t_fs(self) -> float:
        return to_fs(self.t)

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "t_invEV": self.t,
            "t_fs": self.t_fs,
            "v_required_eV": self.v_required,
            "v_target_eV": self.v_target,
            "v_residual_eV": self.v_residual,
        }


def _candidate(epsilon, v_target, k, m) -> TimingSolution:
    t = 2 * k * math.pi / epsilon
    v_required = epsilon * (m - 0.25) / (2 * k)
    return TimingSolution(k, m, t, v_required, v_target)


def iswap_candidates(epsilon: float, v_target: float, k_max: int, m_max: int) -> list:
    """Every ``(k, m)`` pair in the search box, ordered by k then m."""
    if not (epsilon > 0 and v_target > 0):
        raise InvalidArgumentError("epsilon and v_target must be positive")
    if int(k_max) != k_max or int(m_max) != m_max or k_max < 1 or m_max < 1:
        raise InvalidArgumentError("k_max and m_max must be integers >= 1")
    return [
        _candidate(epsilon, v_target, k, m)
        for k in range(1, int(k_max) + 1)
        for m in range(1, int(m_max) + 1)
    ]


def solve_iswap_timing(epsilon: float, v_target: float, k_max: int = 10, m_max: int = 10) -> TimingSolution:
    """Candidate closest to ``v_target``; ties go to the shorter gate, then smaller k."""
    cands = iswap_candidates(epsilon, v_target, k_max, m_max)
    return min(cands, key=lambda s: (s.v_residual, s.t, s.k))


def timing_fidelity(sol: TimingSolution, epsilon: float) -> float:
    """Fidelity of the exchange propagator at the solution's own coupling."""
    u = two_qubit_propagator(CoupledDotParams(epsilon, sol.v_required), sol.t)
    return fidelity_up_to_phase(u, iswap())


def fidelity_penalty(sol: TimingSolution, epsilon: float, v_actual: float, dt_jitter: float = 0.0) -> float:
    """iSWAP fidelity when the hardware runs at ``v_actual`` for ``t + dt_jitter``."""
    t = sol.t + dt_jitter
    if t < 0:
        raise InvalidArgumentError("jitter makes the gate time negative")
    u = two_qubit_propagator(CoupledDotParams(epsilon, v_actual), t)
    return fidelity_up_to_phase(u, iswap())


@dataclass(frozen=True)
class IdlePhase:
    """Free precession over idle spans and the ``u_z`` angle that undoes it."""

    total_time: float
    unitary: np.ndarray
    compensation: float


def idle_phase_tracker(epsilon: float, idle_spans) -> IdlePhase:
    spans = [float(s) for s in idle_spans]
    if any(s < 0 or not math.isfinite(s) for s in spans):
        raise InvalidArgumentError("idle spans must be finite and >= 0")
    total = math.fsum(spans)
    # u_z(g) multiplies by diag(e^{-ig/2}, e^{ig/2}); g = -eps T cancels the drift.
    return IdlePhase(total, free_evolution(epsilon, total), wrap_angle(-epsilon * total))


@dataclass(frozen=True)
class Budget:
    tau_d: float  # ps
    tau_v: float  # fs
    op_count: int


def decoherence_budget(tau_d_ps: float, v_ev: float) -> Budget:
    """Number of ``hbar / V`` operation spans that fit in the dephasing time."""
    if not (tau_d_ps > 0 and v_ev > 0):
        raise InvalidArgumentError("tau_d and V must be positive")
    tau_v_fs = HBAR_EV_FS / v_ev
    ratio = tau_d_ps * 1000.0 / tau_v_fs
    # absorb last-ulp error so that tau_d == tau_v counts as one operation
    return Budget(tau_d_ps, tau_v_fs, math.floor(ratio * (1 + 1e-12)))

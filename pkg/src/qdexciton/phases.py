"""Cyclic states, total/dynamic/geometric phase split, dynamic-phase cancellation.

The geometric part is the Aharonov-Anandan phase of the cyclic state over
one drive period. It is obtained here as ``total - dynamic``, with the
dynamic phase integrated along the simulated trajectory, so it does not
rely on the closed-form solid-angle result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import AccuracyError, CancellationError, DegenerateDriveError, NotCyclicError
from .hamiltonians import DriveParams, single_dot_hamiltonian_batch
from .propagation import IntegratorConfig, evolve_driven, period

CYCLICITY_TOL = 1e-8
NORM_DRIFT_TOL = 1e-8
CANCELLATION_TOL = 1e-6

TWO_PI = 2 * math.pi


def wrap_angle(a: float) -> float:
    """Reduce an angle to ``(-pi, pi]``."""
    r = math.remainder(a, TWO_PI)
    return math.pi if r <= -math.pi else r


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle."""
    return abs(wrap_angle(a - b))


@dataclass(frozen=True)
class CyclicPair:
    chi: float
    psi_plus: np.ndarray
    psi_minus: np.ndarray

    def basis(self) -> np.ndarray:
        """Unitary with ``psi_plus`` and ``psi_minus`` as its columns."""
        return np.column_stack([self.psi_plus, self.psi_minus])


@dataclass(frozen=True)
class PhaseDecomposition:
    gamma_total: float
    gamma_dynamic: float
    gamma_geometric: float
    chi: float
    cyclicity_residual: float = 0.0

    def as_dict(self) -> dict:
        return {
            "chi": self.chi,
            "gamma_total": self.gamma_total,
            "gamma_dynamic": self.gamma_dynamic,
            "gamma_geometric": self.gamma_geometric,
            "cyclicity_residual": self.cyclicity_residual,
        }


@dataclass(frozen=True)
class LoopPhases:
    """Phases picked up by a tracked state over one schedule segment."""

    gamma_total: float
    gamma_dynamic: float
    cyclicity_residual: float

    @property
    def gamma_geometric(self) -> float:
        return wrap_angle(self.gamma_total - self.gamma_dynamic)


@dataclass(frozen=True)
class LoopSchedule:
    """Consecutive drive segments, each lasting whole periods of its own drive.

    Every segment restarts its drive clock at zero, so ``DriveParams.phase``
    is the drive phase at the start of that segment.
    """

    segments: tuple = field(default_factory=tuple)

    def __post_init__(self):
        segs = tuple((p, float(d)) for p, d in self.segments)
        for p, d in segs:
            if not d > 0:
                raise CancellationError(f"segment duration must be positive, got {d}")
            cycles = d / period(p)
            if abs(cycles - round(cycles)) > 1e-9 * max(1.0, cycles) or round(cycles) < 1:
                raise CancellationError(f"segment of {d} is not a whole number of periods")
        object.__setattr__(self, "segments", segs)

    @property
    def duration(self) -> float:
        return sum(d for _, d in self.segments)


@dataclass(frozen=True)
class ScheduleReport:
    loops: tuple
    gamma_total: float
    gamma_dynamic: float


def _check_drive(p: DriveParams):
    if p.amplitude == 0 and p.epsilon == p.omega:
        raise DegenerateDriveError(
            "A = 0 at resonance: every state is cyclic and chi is undefined"
        )


def cyclic_states(p: DriveParams) -> CyclicPair:
    """The orthogonal pair that returns to itself after one drive period.

    ``chi = atan2(2A, eps - omega)`` in ``[0, pi]``; the pair diagonalises
    the rotating-frame Hamiltonian.
    """
    _check_drive(p)
    chi = math.atan2(2 * p.amplitude, p.detuning)
    c, s = math.cos(chi / 2), math.sin(chi / 2)
    tilt = np.exp(1j * p.phase) if p.phase else 1.0
    psi_plus = np.array([c, tilt * s], dtype=complex)
    psi_minus = np.array([-np.conj(tilt) * s, c], dtype=complex)
    return CyclicPair(chi, psi_plus, psi_minus)


def track_state(p: DriveParams, psi, cfg: IntegratorConfig | None = None, periods: int = 1):
    """Evolve ``psi`` for whole drive periods and split the acquired phase.

    Returns ``(LoopPhases, PropagationResult)``. The dynamic phase is
    ``-int <psi(t)|H(t)|psi(t)> dt`` by composite Simpson on the
    integrator grid.
    """
    cfg = cfg or IntegratorConfig()
    psi = np.asarray(psi, dtype=complex)
    res = evolve_driven(p, periods * period(p), cfg, initial_state=psi)
    drift = float(np.max(np.abs(np.linalg.norm(res.states, axis=1) - 1.0)))
    if drift > NORM_DRIFT_TOL:
        raise AccuracyError(f"trajectory norm drifted by {drift:.3e}")
    overlap = np.vdot(psi, res.states[-1])
    residual = 1.0 - abs(overlap)
    if residual > CYCLICITY_TOL:
        raise NotCyclicError(f"state is not cyclic: 1 - |<psi|U|psi>| = {residual:.3e}")
    h = single_dot_hamiltonian_batch(p, res.times)
    energy = np.einsum("ti,tij,tj->t", res.states.conj(), h, res.states).real
    gamma_dynamic = -float(simpson(energy, x=res.times))
    phases = LoopPhases(float(np.angle(overlap)), gamma_dynamic, max(residual, 0.0))
    return phases, res


def phase_decomposition(p: DriveParams, cfg: IntegratorConfig | None = None) -> PhaseDecomposition:
    """Total, dynamic and geometric phase of ``psi_plus`` over one period."""
    pair = cyclic_states(p)
    loop, res = track_state(p, pair.psi_plus, cfg)
    minus = np.vdot(pair.psi_minus, res.unitary @ pair.psi_minus)
    residual = max(loop.cyclicity_residual, 1.0 - abs(minus))
    if residual > CYCLICITY_TOL:
        raise NotCyclicError(f"psi_minus is not cyclic: residual {residual:.3e}")
    mismatch = angle_distance(float(np.angle(minus)), -loop.gamma_total)
    if mismatch > CYCLICITY_TOL:
        raise NotCyclicError(f"psi_minus eigenphase is off -gamma by {mismatch:.3e}")
    return PhaseDecomposition(
        gamma_total=loop.gamma_total,
        gamma_dynamic=loop.gamma_dynamic,
        gamma_geometric=loop.gamma_geometric,
        chi=pair.chi,
        cyclicity_residual=residual,
    )


def total_phase(p: DriveParams, cfg: IntegratorConfig | None = None) -> float:
    return phase_decomposition(p, cfg).gamma_total


def dynamic_phase(p: DriveParams, cfg: IntegratorConfig | None = None) -> float:
    return phase_decomposition(p, cfg).gamma_dynamic


def geometric_phase(p: DriveParams, cfg: IntegratorConfig | None = None) -> float:
    return phase_decomposition(p, cfg).gamma_geometric


def cyclic_gate(p: DriveParams, cfg: IntegratorConfig | None = None):
    """One-period propagator together with its matrix in the cyclic basis.

    Returns ``(U, M)`` where ``M = W^dagger U W`` and ``W`` has the cyclic
    pair as columns; for a cyclic evolution ``M`` is
    ``diag(exp(i gamma), exp(-i gamma))``.
    """
    pair = cyclic_states(p)
    u = evolve_driven(p, period(p), cfg or IntegratorConfig()).unitary
    w = pair.basis()
    return u, w.conj().T @ u @ w


def mirror_loop(p: DriveParams) -> DriveParams:
    """Second loop whose dynamic phase on ``psi_plus`` cancels that of ``p``.

    The gap ``epsilon`` is kept (it is hardware); frequency, amplitude and
    drive phase are chosen so that the rotating-frame field points along
    the same axis as for ``p``, which keeps the cyclic pair, and so that
    one period of it contributes exactly minus the dynamic phase of ``p``.
    Writing ``r = Omega/omega`` for the first loop, the second needs
    ``s Omega2 / omega2 = q = -(r + 2 cos chi)`` with ``s = sign(q)``, which
    fixes ``omega2 = eps / (1 + q cos chi)``. No such loop exists when
    ``1 + q cos chi <= 0``.
    """
    _check_drive(p)
    if p.amplitude == 0:
        raise DegenerateDriveError("A = 0: the state is stationary and carries no geometric phase")
    rabi = math.hypot(p.detuning, 2 * p.amplitude)
    cos_chi = p.detuning / rabi
    sin_chi = 2 * p.amplitude / rabi
    q = -(rabi / p.omega + 2 * cos_chi)
    denom = 1 + q * cos_chi
    if denom <= 1e-9:
        raise CancellationError(
            "no one-period mirror loop with positive frequency exists for these parameters "
            f"(1 + q cos chi = {denom:.3e})"
        )
    omega2 = p.epsilon / denom
    amp2 = abs(q) * omega2 * sin_chi / 2
    phase2 = wrap_angle(p.phase + (0.0 if q >= 0 else math.pi))
    return DriveParams(p.epsilon, amp2, omega2, phase2)


def cancellation_feasible(p: DriveParams) -> bool:
    try:
        mirror_loop(p)
    except (CancellationError, DegenerateDriveError):
        return False
    return True


def simulate_schedule(schedule: LoopSchedule, psi, cfg: IntegratorConfig | None = None) -> ScheduleReport:
    """Run ``psi`` through every segment and accumulate its phases."""
    psi = np.asarray(psi, dtype=complex)
    loops = []
    for p, duration in schedule.segments:
        cycles = int(round(duration / period(p)))
        loop, _ = track_state(p, psi, cfg, periods=cycles)
        loops.append(loop)
    gamma_total = wrap_angle(sum(lp.gamma_total for lp in loops))
    gamma_dynamic = sum(lp.gamma_dynamic for lp in loops)
    return ScheduleReport(tuple(loops), gamma_total, gamma_dynamic)


def cancellation_sequence(
    p: DriveParams, cfg: IntegratorConfig | None = None, tol: float = CANCELLATION_TOL
) -> LoopSchedule:
    """Two-loop schedule with zero net dynamic phase and doubled geometric phase.

    Loop 1 is one period of ``p``; loop 2 is one period of
    :func:`mirror_loop`. The schedule is simulated before it is returned;
    a :class:`CancellationError` carrying both loops' phases is raised if
    the net dynamic phase exceeds ``tol`` or the net total phase differs
    from twice the geometric phase of ``p``.
    """
    second = mirror_loop(p)
    schedule = LoopSchedule(((p, period(p)), (second, period(second))))
    pair = cyclic_states(p)
    report = simulate_schedule(schedule, pair.psi_plus, cfg)
    target = 2 * report.loops[0].gamma_geometric
    if abs(report.gamma_dynamic) > tol or angle_distance(report.gamma_total, target) > tol:
        raise CancellationError(
            f"cancellation failed: net dynamic {report.gamma_dynamic:.3e}, "
            f"total {report.gamma_total:.6f} vs 2*geometric {wrap_angle(target):.6f}",
            loops=list(report.loops),
        )
    return schedule

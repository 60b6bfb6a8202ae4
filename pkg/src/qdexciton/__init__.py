"""Exciton qubits in coupled quantum dots.

Geometric single-qubit gates from cyclic evolutions of a laser-driven dot,
and an iSWAP/CNOT built from the Foerster exchange between two dots.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    CancellationError,
    CapacityError,
    ContractViolationError,
    DecompositionMismatchError,
    DegenerateDriveError,
    InvalidArgumentError,
    NotCyclicError,
    QDError,
)
from .gates import (  # noqa: E402
    GateSequence,
    SingleQubitGateSpec,
    apply_single,
    cnot_sequence,
    iswap,
    noncommuting,
    two_qubit_propagator,
    u_chi_gamma,
    u_x,
    u_z,
)
from .hamiltonians import (  # noqa: E402
    HBAR_EV_FS,
    CoupledDotParams,
    DotArrayParams,
    DriveParams,
    array_hamiltonian,
    coupled_hamiltonian,
    rotating_frame_hamiltonian,
    single_dot_hamiltonian,
)
from .operators import (  # noqa: E402
    commutator_norm,
    expm_hermitian,
    fidelity_up_to_phase,
    kron,
    quasi_pauli,
)
from .phases import (  # noqa: E402
    CyclicPair,
    LoopSchedule,
    PhaseDecomposition,
    cancellation_sequence,
    cyclic_states,
    dynamic_phase,
    geometric_phase,
    phase_decomposition,
    total_phase,
)
from .propagation import (  # noqa: E402
    IntegratorConfig,
    PropagationResult,
    analytic_driven_propagator,
    evolve_const,
    evolve_driven,
    period,
)
from .scheduler import (  # noqa: E402
    Budget,
    TimingSolution,
    decoherence_budget,
    fidelity_penalty,
    idle_phase_tracker,
    solve_iswap_timing,
)

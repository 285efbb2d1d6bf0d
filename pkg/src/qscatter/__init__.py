"""Digital quantum simulation of 1D scattering, checked against a
classical transfer-matrix oracle.

The register side prepares a Gaussian wave packet, split-steps it
through a localized potential, and reads complex reflection and
transmission amplitudes off the momentum-sign qubit.  The classical
side computes the same amplitudes from 2x2 transfer matrices, exactly
for deltas and rectangles and by delta-pulse chains for everything
else.  ``qscatter compare`` (or :func:`run_scattering` plus the oracle
functions) puts the two side by side.
"""

from ._kernels import available_backends, backend_name
from .errors import (
    AsymmetryError,
    ConfigError,
    DomainError,
    PerfectReflectionError,
    PreconditionError,
    QScatterError,
    ToleranceFailure,
    UndefinedPhaseError,
    ValidationError,
)
from .phase_gates import (
    PhaseNetwork,
    barrier_network_gate,
    barrier_support_network,
    kinetic_gate,
    kinetic_phase_network,
    linear_phase,
    linear_phase_network,
    momentum_parity_gate,
    potential_gate,
    quadratic_phase,
    quadratic_phase_network,
)
from .scattering import (
    PotentialSpec,
    RunResult,
    ScatteringEstimate,
    SimulationConfig,
    WavePacketSpec,
    asymptotic_time,
    dense_evolve,
    estimate_exact,
    estimate_shots,
    grid_positions,
    momentum_labels,
    momentum_readout_transform,
    prepare_packet,
    run_scattering,
    sample_potential,
    trotter_evolve,
)
from .statevector import (
    MAX_QUBITS,
    QuantumState,
    ShotRecord,
    append_qubit,
    apply_controlled,
    apply_single_qubit,
    basis_state,
    iqft,
    measure_shots,
    phase_gate,
    qft,
    qubit_marginal,
    random_state,
    sector_probability,
    swap_qubits,
)
from .tolerances import TOL, Tolerances
from .transfer_matrix import (
    PhaseShifts,
    SMatrix,
    TransferMatrix,
    Units,
    analytic_barrier_transfer,
    chain_from_samples,
    compose_transfer_chain,
    delta_transfer,
    optical_theorem_residual,
    phase_shifts_from_rt,
    potential_from_table,
    rt_from_transfer,
    sample_delta_pulses,
    time_reversed_rt,
    translate_transfer,
    transmission_scan,
)

__version__ = "0.1.0"

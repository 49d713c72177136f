"""Classical simulation of error-detected probabilistic imaginary-time
evolution for few-orbital spin-defect Hamiltonians."""

from .circuit import CircuitIR, lower_diagonal_rotations
from .effham import (
    FciResult,
    OrbitalModelParams,
    SecondQuantizedHamiltonian,
    build_wannier_hamiltonian,
    excitation_table,
    fci_diagonalize,
    fit_extrapolation,
    to_ks_basis,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    emit_outputs,
    load_params,
    prepare_system,
    run_experiment,
)
from .iceberg import (
    IcebergLayout,
    compile_logical,
    encode_zero_circuit,
    final_readout_decode,
    measure_and_reencode,
    syndrome_circuit,
)
from .pauli import PauliSum, PauliTerm
from .pite import (
    PiteConstants,
    PiteSchedule,
    approx_operator,
    crte_circuit,
    make_schedule,
    pite_constants,
    pite_step_circuit,
)
from .qmap import (
    CrteGenerator,
    build_crte_generator,
    encode_determinant_state,
    find_z2_symmetries,
    parity_map,
    taper,
    truncate,
)
from .sim import (
    NoiseModel,
    classical_fidelity,
    count_two_qubit_gates,
    discard_model,
    mse_stats,
    run_noiseless_branches,
    run_shot,
)

__version__ = "0.1.0"
